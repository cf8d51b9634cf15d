#ifndef FMUAD_CONFIG_HPP
#define FMUAD_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fmuad/model.hpp"

namespace fmuad {

// User-facing run configuration shared by the CLI subcommands. Flags
// override values read from a key=value config file.
struct RunConfig {
    int tau = 500;
    int k = 30;
    int stride = 10;
    int batch_size = 32;
    int epochs = 10;
    int warmup_epochs = 3;
    double learning_rate = 1e-3;
    int hidden_ch = 16;
    std::vector<int> channels = {32, 64, 128};
    std::vector<int> dilations = {1, 3, 5};
    std::string detectors = "correlation,temporal,spatial";
    std::string loss_variant = "full";  // or "l1-only"
    uint64_t seed = 1;
    int threads = 0;

    // Rejects every invariant violation with a message naming the field.
    void validate() const;

    ModelConfig model_config(int m) const;
    bool use_correlation() const;
    bool use_temporal() const;
    bool use_spatial() const;
    bool compactness() const { return loss_variant == "full"; }
};

// key=value lines; '#' starts a comment. Unknown keys are rejected.
void apply_config_file(RunConfig& cfg, const std::string& path);

}  // namespace fmuad

#endif
