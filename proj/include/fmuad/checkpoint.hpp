#ifndef FMUAD_CHECKPOINT_HPP
#define FMUAD_CHECKPOINT_HPP

#include <memory>
#include <string>

#include "fmuad/data_io.hpp"
#include "fmuad/model.hpp"

namespace fmuad {

// Versioned binary checkpoint: magic "FMUD", format version, hyperparameter
// table, normalization stats, named little-endian f64 tensors, trailing
// FNV-1a checksum. Round-trips bitwise.
struct Checkpoint {
    ModelConfig config;
    uint64_t seed = 0;
    NormStats stats;

    static constexpr uint32_t kVersion = 1;
};

void save_checkpoint(Model& model, const NormStats& stats, const std::string& path);

struct LoadedModel {
    std::unique_ptr<Model> model;
    NormStats stats;
};
LoadedModel load_checkpoint(const std::string& path);

}  // namespace fmuad

#endif
