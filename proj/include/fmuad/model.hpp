#ifndef FMUAD_MODEL_HPP
#define FMUAD_MODEL_HPP

#include <memory>
#include <vector>

#include "fmuad/detectors.hpp"
#include "fmuad/transforms.hpp"

namespace fmuad {

struct ModelConfig {
    int m = 0;        // feature count (from the dataset)
    int tau = 500;    // input instance span
    int k = 30;       // target window length (even)
    int stride = 10;  // stride of the history window sequence
    int hidden_ch = 16;
    std::vector<int> channels = {32, 64, 128};
    std::vector<int> dilations = {1, 3, 5};
    bool use_correlation = true;
    bool use_temporal = true;
    bool use_spatial = true;

    void validate() const;
    int history_len() const { return tau - k; }
    int history_count() const { return (tau - k) / stride; }
};

// The three jointly trained detectors plus target assembly. Disabled
// detectors contribute zero blocks to both the prediction and the ground
// truth, so loss and score see only the enabled aspects.
class Model {
public:
    Model(ModelConfig cfg, uint64_t seed);

    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    // Predicted Y_t = [S | F | W] blocks for the m x tau instance.
    // Shape m x (m + k/2 + k); disabled blocks are zero constants.
    Tensor forward(Tape* tape, const Tensor& instance);

    // Ground-truth Y_t with the same masking applied.
    Tensor truth(const Tensor& instance) const;

    // Parameters of the enabled detectors (what training optimizes).
    std::vector<Param*> params();
    // Parameters of all three detectors (what checkpoints persist).
    std::vector<Param*> all_params();

    const ModelConfig& config() const { return cfg_; }
    uint64_t seed() const { return seed_; }
    TargetLayout layout() const { return {cfg_.m, cfg_.k}; }

private:
    ModelConfig cfg_;
    uint64_t seed_;
    std::unique_ptr<CorrelationDetector> correlation_;
    std::unique_ptr<TemporalDetector> temporal_;
    std::unique_ptr<SpatialDetector> spatial_;
};

}  // namespace fmuad

#endif
