// fmuad: synthetic data generation, training, scoring, and evaluation for
// the forecast-based multi-aspect anomaly detector.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fmuad/checkpoint.hpp"
#include "fmuad/config.hpp"
#include "fmuad/data_io.hpp"
#include "fmuad/eval.hpp"
#include "fmuad/synthetic.hpp"
#include "fmuad/trainer.hpp"

namespace fs = std::filesystem;
using namespace fmuad;

namespace {

// Applies --config before the regular flag pass so flags win.
void preapply_config(int argc, char** argv, RunConfig& cfg) {
    for (int i = 1; i < argc - 1; ++i) {
        std::string a = argv[i];
        if (a == "--config") apply_config_file(cfg, argv[i + 1]);
    }
}

void add_run_flags(CLI::App* cmd, RunConfig& cfg, std::string& channels_str,
                   std::string& dilations_str) {
    cmd->add_option("--config", "key=value config file (flags override it)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--tau", cfg.tau, "input instance span");
    cmd->add_option("--k", cfg.k, "target window length (even)");
    cmd->add_option("--stride", cfg.stride, "history window stride");
    cmd->add_option("--batch-size", cfg.batch_size, "training batch size (>= 2)");
    cmd->add_option("--epochs", cfg.epochs, "training epochs");
    cmd->add_option("--warmup-epochs", cfg.warmup_epochs,
                    "forecast-only epochs before the compactness factor kicks in");
    cmd->add_option("--learning-rate", cfg.learning_rate, "optimizer learning rate");
    cmd->add_option("--hidden-ch", cfg.hidden_ch, "ConvLSTM hidden channels");
    cmd->add_option("--channels", channels_str, "dilated stack channels, e.g. 32,64,128");
    cmd->add_option("--dilations", dilations_str, "dilated stack dilations, e.g. 1,3,5");
    cmd->add_option("--detectors", cfg.detectors,
                    "enabled detectors, subset of correlation,temporal,spatial");
    cmd->add_option("--loss", cfg.loss_variant, "loss variant: full or l1-only");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
}

void finalize_run_config(RunConfig& cfg, const std::string& channels_str,
                         const std::string& dilations_str) {
    auto parse_list = [](const std::string& s, const char* field) {
        std::vector<int> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            try {
                out.push_back(std::stoi(item));
            } catch (const std::exception&) {
                throw ContractError(std::string("config field '") + field + "': bad integer '" +
                                    item + "'");
            }
        return out;
    };
    if (!channels_str.empty()) cfg.channels = parse_list(channels_str, "channels");
    if (!dilations_str.empty()) cfg.dilations = parse_list(dilations_str, "dilations");
    cfg.validate();
}

void write_spec_echo(const SyntheticSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << "m=" << spec.m << "\n";
    out << "t_train=" << spec.t_train << "\n";
    out << "t_test=" << spec.t_test << "\n";
    out << "seed=" << spec.seed << "\n";
    out << "noise_level=" << spec.noise_level << "\n";
    out << "base_amplitude=" << spec.base_amplitude << "\n";
    for (const auto& seg : spec.segments)
        out << "segment=" << seg.start << ":" << seg.end << ":" << anomaly_kind_name(seg.kind)
            << "\n";
}

int cmd_synth(const std::string& out_dir, int m, int t_train, int t_test, uint64_t seed,
              const std::string& kinds_str, double fraction, double noise) {
    std::vector<AnomalyKind> kinds;
    std::stringstream ss(kinds_str);
    std::string item;
    while (std::getline(ss, item, ',')) kinds.push_back(anomaly_kind_from_name(item));

    SyntheticSpec spec = default_synthetic_spec(seed, kinds, fraction, m, t_train, t_test);
    spec.noise_level = noise;
    SyntheticData data = generate_synthetic(spec);

    fs::create_directories(out_dir);
    write_csv_series(data.train, out_dir + "/train.csv");
    write_csv_series(data.test, out_dir + "/test.csv");
    write_labels(data.labels, out_dir + "/labels.txt");
    write_spec_echo(spec, out_dir + "/spec.txt");
    std::cout << "wrote " << out_dir << "/{train.csv,test.csv,labels.txt,spec.txt}" << std::endl;
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& train_path, const std::string& ckpt_path,
              const std::string& log_path) {
    SeriesMatrix train = load_csv_series(train_path);
    NormStats stats = compute_norm_stats(train);
    apply_normalization(train, stats, false);

    Model model(cfg.model_config(train.features()), cfg.seed);
    TrainOptions opts;
    opts.epochs = cfg.epochs;
    opts.warmup_epochs = cfg.warmup_epochs;
    opts.batch_size = cfg.batch_size;
    opts.learning_rate = cfg.learning_rate;
    opts.compactness = cfg.compactness();
    opts.threads = cfg.threads;
    opts.shuffle_seed = cfg.seed;

    auto log = train_model(model, train, opts);
    for (const auto& e : log)
        std::cout << "epoch " << e.epoch << " l1=" << e.l1 << " l2=" << e.l2 << " loss=" << e.loss
                  << std::endl;
    if (!log_path.empty()) write_training_log(log, log_path);
    save_checkpoint(model, stats, ckpt_path);
    std::cout << "saved checkpoint " << ckpt_path << std::endl;
    return 0;
}

int cmd_score(const std::string& ckpt_path, const std::string& test_path,
              const std::string& out_path, int threads) {
    LoadedModel loaded = load_checkpoint(ckpt_path);
    SeriesMatrix test = load_csv_series(test_path);
    if (test.features() != loaded.model->config().m)
        throw ContractError("test data has " + std::to_string(test.features()) +
                            " features but the checkpoint expects m=" +
                            std::to_string(loaded.model->config().m));
    apply_normalization(test, loaded.stats, true);
    ScoreSeries scores = score_series(*loaded.model, test, threads);
    write_score_csv(scores, out_path);
    std::cout << "wrote " << scores.scores.size() << " scores to " << out_path << std::endl;
    return 0;
}

int cmd_eval(const std::string& scores_path, const std::string& labels_path,
             const std::string& json_path) {
    ScoreSeries scores = load_score_csv(scores_path);
    std::vector<bool> labels = load_labels(labels_path);
    if (scores.scores.empty()) throw ContractError("eval: no scores to evaluate");

    // align by timestamp; the unscored prefix of the labels is discarded
    std::vector<bool> aligned(scores.scores.size());
    for (size_t i = 0; i < scores.timestamps.size(); ++i) {
        long t = scores.timestamps[i];
        if (t < 0 || t >= static_cast<long>(labels.size()))
            throw ContractError("eval: score timestamp " + std::to_string(t) +
                                " outside the label range (0.." + std::to_string(labels.size() - 1) +
                                ")");
        aligned[i] = labels[static_cast<size_t>(t)];
    }

    EvalReport report = select_threshold(scores.scores, aligned);
    std::cout << report_text(report);
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw ParseError(json_path + ": cannot open file for writing");
        out << report_json(report) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMUAD: forecast-based multi-aspect anomaly detection"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string synth_out = "synth";
    int synth_m = 5, synth_train = 20000, synth_test = 5000;
    uint64_t synth_seed = 7;
    std::string synth_kinds = "frequency-change,correlation-change,abrupt-value,subtle-value";
    double synth_fraction = 0.05;
    double synth_noise = 0.05;
    synth->add_option("--out-dir", synth_out, "output directory");
    synth->add_option("--m", synth_m, "number of features");
    synth->add_option("--t-train", synth_train, "training split length");
    synth->add_option("--t-test", synth_test, "test split length");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--kinds", synth_kinds, "comma list of anomaly kinds");
    synth->add_option("--anomaly-fraction", synth_fraction, "target anomalous fraction of test");
    synth->add_option("--noise", synth_noise, "additive noise level");

    // train
    RunConfig cfg;
    std::string channels_str, dilations_str;
    auto* train = app.add_subcommand("train", "train a model and save a checkpoint");
    std::string train_data, train_ckpt = "model.fmuad", train_log;
    train->add_option("--train", train_data, "training CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--checkpoint", train_ckpt, "checkpoint output path");
    train->add_option("--log", train_log, "per-epoch loss CSV output");
    add_run_flags(train, cfg, channels_str, dilations_str);

    // score
    auto* score = app.add_subcommand("score", "score a test series with a checkpoint");
    std::string score_ckpt, score_data, score_out = "scores.csv";
    int score_threads = 0;
    score->add_option("--checkpoint", score_ckpt, "checkpoint path")
        ->required()
        ->check(CLI::ExistingFile);
    score->add_option("--test", score_data, "test CSV")->required()->check(CLI::ExistingFile);
    score->add_option("--out", score_out, "score CSV output path");
    score->add_option("--threads", score_threads, "worker threads (0 = hardware)");

    // eval
    auto* eval = app.add_subcommand("eval", "select a threshold and report P/R/F1");
    std::string eval_scores, eval_labels, eval_json;
    eval->add_option("--scores", eval_scores, "score CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--labels", eval_labels, "label file (one 0/1 per line)")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--report-json", eval_json, "JSON report output path");

    try {
        preapply_config(argc, argv, cfg);
        app.parse(argc, argv);
        if (synth->parsed())
            return cmd_synth(synth_out, synth_m, synth_train, synth_test, synth_seed, synth_kinds,
                             synth_fraction, synth_noise);
        if (train->parsed()) {
            finalize_run_config(cfg, channels_str, dilations_str);
            return cmd_train(cfg, train_data, train_ckpt, train_log);
        }
        if (score->parsed()) return cmd_score(score_ckpt, score_data, score_out, score_threads);
        if (eval->parsed()) return cmd_eval(eval_scores, eval_labels, eval_json);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
