#include "fmuad/model.hpp"

namespace fmuad {

void ModelConfig::validate() const {
    if (m < 1) throw ContractError("config: m must be >= 1");
    if (k % 2 != 0) throw ContractError("config: k must be even, got " + std::to_string(k));
    if (k >= tau) throw ContractError("config: k must be smaller than tau");
    if (stride < 1) throw ContractError("config: stride must be >= 1");
    if (hidden_ch < 1) throw ContractError("config: hidden_ch must be >= 1");
    if (channels.size() != dilations.size() || channels.empty())
        throw ContractError("config: channels and dilations must align and be nonempty");
    if (!use_correlation && !use_temporal && !use_spatial)
        throw ContractError("config: at least one detector must be enabled");
    if (history_count() < 1)
        throw ContractError("config: (tau-k)/stride must yield at least one history window");
}

Model::Model(ModelConfig cfg, uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {
    cfg_.validate();
    // One stream initializes all detectors so the parameter draw only
    // depends on the seed, not on which detectors are enabled elsewhere.
    Rng rng(seed);
    correlation_ = std::make_unique<CorrelationDetector>(cfg_.m, cfg_.hidden_ch, rng);
    temporal_ = std::make_unique<TemporalDetector>(cfg_.m, cfg_.k, cfg_.hidden_ch, rng);
    spatial_ = std::make_unique<SpatialDetector>(cfg_.m, cfg_.history_len(), cfg_.k,
                                                 cfg_.channels, cfg_.dilations, rng);
}

Tensor Model::forward(Tape* tape, const Tensor& instance) {
    if (instance.shape != std::vector<int>{cfg_.m, cfg_.tau})
        throw ContractError("model forward: instance shape " + shape_str(instance.shape) +
                            ", expected " + shape_str({cfg_.m, cfg_.tau}));
    TargetLayout lay = layout();

    Tensor sig_pred, freq_pred, win_pred;
    if (cfg_.use_correlation || cfg_.use_temporal) {
        SlicedWindows sliced = slice_windows(instance, cfg_.k, cfg_.stride);
        if (cfg_.use_correlation) {
            std::vector<Tensor> sigs;
            sigs.reserve(sliced.history.size());
            for (const auto& w : sliced.history) sigs.push_back(signature_matrix(w));
            sig_pred = correlation_->forecast(tape, sigs);
        }
        if (cfg_.use_temporal) freq_pred = temporal_->forecast(tape, sliced.history);
    }
    if (cfg_.use_spatial) {
        Tensor history = Tensor::zeros({cfg_.m, cfg_.history_len()});
        for (int r = 0; r < cfg_.m; ++r)
            for (int c = 0; c < cfg_.history_len(); ++c) history.at(r, c) = instance.at(r, c);
        win_pred = spatial_->forecast(tape, history);
    }

    if (!cfg_.use_correlation) sig_pred = Tensor::zeros({lay.m, lay.sig_cols()});
    if (!cfg_.use_temporal) freq_pred = Tensor::zeros({lay.m, lay.freq_cols()});
    if (!cfg_.use_spatial) win_pred = Tensor::zeros({lay.m, lay.win_cols()});

    return concat_cols(tape, {sig_pred, freq_pred, win_pred});
}

Tensor Model::truth(const Tensor& instance) const {
    if (instance.shape != std::vector<int>{cfg_.m, cfg_.tau})
        throw ContractError("model truth: instance shape " + shape_str(instance.shape) +
                            ", expected " + shape_str({cfg_.m, cfg_.tau}));
    TargetLayout lay = layout();
    Tensor target = Tensor::zeros({cfg_.m, cfg_.k});
    for (int r = 0; r < cfg_.m; ++r)
        for (int c = 0; c < cfg_.k; ++c) target.at(r, c) = instance.at(r, cfg_.tau - cfg_.k + c);

    Tensor sig = cfg_.use_correlation ? signature_matrix(target)
                                      : Tensor::zeros({lay.m, lay.sig_cols()});
    Tensor freq =
        cfg_.use_temporal ? frequency_matrix(target) : Tensor::zeros({lay.m, lay.freq_cols()});
    Tensor win = cfg_.use_spatial ? target : Tensor::zeros({lay.m, lay.win_cols()});
    return concat_cols(nullptr, {sig, freq, win});
}

std::vector<Param*> Model::params() {
    std::vector<Param*> v;
    if (cfg_.use_correlation)
        for (auto* p : correlation_->params()) v.push_back(p);
    if (cfg_.use_temporal)
        for (auto* p : temporal_->params()) v.push_back(p);
    if (cfg_.use_spatial)
        for (auto* p : spatial_->params()) v.push_back(p);
    return v;
}

std::vector<Param*> Model::all_params() {
    std::vector<Param*> v;
    for (auto* p : correlation_->params()) v.push_back(p);
    for (auto* p : temporal_->params()) v.push_back(p);
    for (auto* p : spatial_->params()) v.push_back(p);
    return v;
}

}  // namespace fmuad
