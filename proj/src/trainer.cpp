#include "fmuad/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include "fmuad/data_io.hpp"
#include "fmuad/parallel.hpp"
#include "fmuad/rng.hpp"

namespace fmuad {

namespace {

std::vector<int> training_positions(const ModelConfig& cfg, int t_len) {
    if (t_len < cfg.tau)
        throw ContractError("training series has " + std::to_string(t_len) +
                            " steps but the input span needs tau=" + std::to_string(cfg.tau));
    std::vector<int> pos;
    for (int t = cfg.tau - 1; t < t_len; t += cfg.k) pos.push_back(t);
    return pos;
}

struct WindowWork {
    std::unique_ptr<Tape> tape;
    Tensor pred;
    Tensor truth;
};

}  // namespace

std::vector<EpochLog> train_model(Model& model, const SeriesMatrix& train,
                                  const TrainOptions& opts) {
    if (opts.batch_size < 2) throw ContractError("training: batch size must be >= 2");
    if (opts.epochs < 1) throw ContractError("training: epochs must be >= 1");
    if (opts.warmup_epochs < 0) throw ContractError("training: warmup epochs must be >= 0");
    const int threads = opts.threads > 0 ? opts.threads : default_thread_count();
    const ModelConfig& cfg = model.config();

    std::vector<int> positions = training_positions(cfg, train.steps());
    Adam optimizer({opts.learning_rate});
    auto params = model.params();
    Rng shuffle_rng(opts.shuffle_seed);

    std::vector<EpochLog> logs;
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        // Fisher-Yates with the deterministic stream
        for (size_t i = positions.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(shuffle_rng.below(i));
            std::swap(positions[i - 1], positions[j]);
        }

        EpochLog log;
        log.epoch = epoch;
        const bool compact_now = opts.compactness && epoch >= opts.warmup_epochs;
        int batches = 0;
        for (size_t offset = 0; offset + 2 <= positions.size(); offset += static_cast<size_t>(opts.batch_size)) {
            const size_t b =
                std::min(static_cast<size_t>(opts.batch_size), positions.size() - offset);
            if (b < 2) break;  // drop a trailing singleton

            std::vector<WindowWork> work(b);
            parallel_for(static_cast<int>(b), threads, [&](int i) {
                int t = positions[offset + static_cast<size_t>(i)];
                WindowView view = make_window_view(train, t, cfg.tau, cfg.k);
                auto& w = work[static_cast<size_t>(i)];
                w.tape = std::make_unique<Tape>();
                w.pred = model.forward(w.tape.get(), view.instance);
                w.truth = model.truth(view.instance);
            });

            std::vector<Tensor> truths, preds;
            truths.reserve(b);
            preds.reserve(b);
            for (auto& w : work) {
                truths.push_back(w.truth);
                preds.push_back(w.pred);
            }
            BatchLoss bl = batch_loss_with_grads(truths, preds, compact_now);
            log.l1 += bl.l1;
            log.l2 += bl.l2;
            log.loss += bl.loss;
            ++batches;

            parallel_for(static_cast<int>(b), threads, [&](int i) {
                auto& w = work[static_cast<size_t>(i)];
                w.tape->backward_seed(w.pred, bl.dloss_dpred[static_cast<size_t>(i)], false);
            });

            // reduce in window order, then param order: deterministic for any
            // thread count
            for (auto& w : work) {
                const auto& watched = w.tape->watched();
                for (Param* p : params) {
                    auto it = watched.find(p);
                    if (it == watched.end()) continue;
                    const auto& g = w.tape->grad(it->second);
                    for (size_t j = 0; j < g.size(); ++j) p->grad[j] += g[j];
                }
            }
            optimizer.step(params);
        }

        if (batches > 0) {
            log.l1 /= batches;
            log.l2 /= batches;
            log.loss /= batches;
        }
        logs.push_back(log);
    }
    return logs;
}

ScoreSeries score_series(Model& model, const SeriesMatrix& test, int threads) {
    if (threads <= 0) threads = default_thread_count();
    const ModelConfig& cfg = model.config();
    if (test.steps() < cfg.tau)
        throw ContractError("test series has " + std::to_string(test.steps()) +
                            " steps but the input span needs tau=" + std::to_string(cfg.tau));
    if (test.features() != cfg.m)
        throw ContractError("test series has " + std::to_string(test.features()) +
                            " features but the model was trained with m=" + std::to_string(cfg.m));

    const int count = test.steps() - cfg.tau + 1;
    ScoreSeries out;
    out.timestamps.resize(static_cast<size_t>(count));
    out.scores.resize(static_cast<size_t>(count));
    parallel_for(count, threads, [&](int i) {
        int t = cfg.tau - 1 + i;
        WindowView view = make_window_view(test, t, cfg.tau, cfg.k);
        Tensor pred = model.forward(nullptr, view.instance);
        Tensor truth = model.truth(view.instance);
        out.timestamps[static_cast<size_t>(i)] = t;
        out.scores[static_cast<size_t>(i)] = anomaly_score(truth, pred);
    });
    return out;
}

void write_score_csv(const ScoreSeries& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out.precision(17);
    out << "timestamp,score\n";
    for (size_t i = 0; i < s.scores.size(); ++i)
        out << s.timestamps[i] << "," << s.scores[i] << "\n";
    if (!out) throw ParseError(path + ": write failed");
}

ScoreSeries load_score_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    ScoreSeries s;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "timestamp,score")
                throw ParseError(path + ":1: expected header 'timestamp,score'");
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing comma");
        long ts = 0;
        double sc = 0.0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, ts);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), sc);
        if (r1.ec != std::errc() || r2.ec != std::errc() ||
            r2.ptr != line.data() + line.size())
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
        s.timestamps.push_back(ts);
        s.scores.push_back(sc);
    }
    return s;
}

void write_training_log(const std::vector<EpochLog>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out.precision(17);
    out << "epoch,l1,l2,loss\n";
    for (const auto& e : log) out << e.epoch << "," << e.l1 << "," << e.l2 << "," << e.loss << "\n";
    if (!out) throw ParseError(path + ": write failed");
}

}  // namespace fmuad
