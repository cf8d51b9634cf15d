#include "fmuad/eval.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "fmuad/tensor.hpp"
#include <json.hpp>

namespace fmuad {

std::vector<bool> point_adjust(const std::vector<bool>& pred_flags,
                               const std::vector<bool>& labels) {
    if (pred_flags.size() != labels.size())
        throw ContractError("point_adjust: prediction/label lengths differ");
    std::vector<bool> out = pred_flags;
    size_t i = 0;
    const size_t n = labels.size();
    while (i < n) {
        if (!labels[i]) {
            ++i;
            continue;
        }
        size_t j = i;
        bool hit = false;
        while (j < n && labels[j]) {
            hit = hit || pred_flags[j];
            ++j;
        }
        if (hit)
            for (size_t p = i; p < j; ++p) out[p] = true;
        i = j;
    }
    return out;
}

Prf1 prf1(const std::vector<bool>& pred_flags, const std::vector<bool>& labels) {
    if (pred_flags.size() != labels.size())
        throw ContractError("prf1: prediction/label lengths differ");
    Prf1 r;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (pred_flags[i] && labels[i]) ++r.tp;
        else if (pred_flags[i] && !labels[i]) ++r.fp;
        else if (!pred_flags[i] && labels[i]) ++r.fn;
    }
    r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
    r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                                          : 0.0;
    return r;
}

EvalReport select_threshold(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.empty()) throw ContractError("select_threshold: empty score series");
    if (scores.size() != labels.size())
        throw ContractError("select_threshold: score/label lengths differ");

    std::vector<double> candidates = scores;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.push_back(std::numeric_limits<double>::infinity());

    EvalReport best;
    bool have_best = false;
    for (double thr : candidates) {
        std::vector<bool> flags(scores.size());
        for (size_t i = 0; i < scores.size(); ++i) flags[i] = scores[i] > thr;
        std::vector<bool> adjusted = point_adjust(flags, labels);
        Prf1 adj = prf1(adjusted, labels);
        // ties go to the larger threshold; candidates ascend, so >= keeps the latest
        if (!have_best || adj.f1 >= best.adjusted.f1) {
            best.threshold = thr;
            best.adjusted = adj;
            best.raw = prf1(flags, labels);
            have_best = true;
        }
    }
    return best;
}

std::string report_text(const EvalReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << "threshold=" << r.threshold << "\n";
    os << "precision=" << r.raw.precision << "\n";
    os << "recall=" << r.raw.recall << "\n";
    os << "f1=" << r.raw.f1 << "\n";
    os << "precision_adjusted=" << r.adjusted.precision << "\n";
    os << "recall_adjusted=" << r.adjusted.recall << "\n";
    os << "f1_adjusted=" << r.adjusted.f1 << "\n";
    os << "tp=" << r.adjusted.tp << "\n";
    os << "fp=" << r.adjusted.fp << "\n";
    os << "fn=" << r.adjusted.fn << "\n";
    return os.str();
}

std::string report_json(const EvalReport& r) {
    nlohmann::json j;
    j["threshold"] = r.threshold;
    j["precision"] = r.raw.precision;
    j["recall"] = r.raw.recall;
    j["f1"] = r.raw.f1;
    j["precision_adjusted"] = r.adjusted.precision;
    j["recall_adjusted"] = r.adjusted.recall;
    j["f1_adjusted"] = r.adjusted.f1;
    j["tp"] = r.adjusted.tp;
    j["fp"] = r.adjusted.fp;
    j["fn"] = r.adjusted.fn;
    return j.dump(2);
}

}  // namespace fmuad
