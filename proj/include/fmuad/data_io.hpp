#ifndef FMUAD_DATA_IO_HPP
#define FMUAD_DATA_IO_HPP

#include <string>
#include <vector>

#include "fmuad/transforms.hpp"

namespace fmuad {

// Thrown on malformed input files; carries path and line context.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct NormStats {
    std::vector<double> min, max;  // per feature, computed from train only
};

struct Dataset {
    SeriesMatrix train;
    SeriesMatrix test;
    std::vector<bool> test_labels;
    NormStats stats;
};

// CSV with rows = time steps, columns = features. Returns an m x T matrix.
SeriesMatrix load_csv_series(const std::string& path);
void write_csv_series(const SeriesMatrix& series, const std::string& path);

// One 0/1 per line.
std::vector<bool> load_labels(const std::string& path);
void write_labels(const std::vector<bool>& labels, const std::string& path);

// Loads train/test/labels, computes min-max stats from train, normalizes
// train to [0,1] and applies the same stats to test, clamped to [-1, 2].
// Constant features normalize to 0.
Dataset load_csv_dataset(const std::string& train_path, const std::string& test_path,
                         const std::string& labels_path);

NormStats compute_norm_stats(const SeriesMatrix& train);
void apply_normalization(SeriesMatrix& series, const NormStats& stats, bool clamp_test_range);

}  // namespace fmuad

#endif
