#ifndef FMUAD_TRANSFORMS_HPP
#define FMUAD_TRANSFORMS_HPP

#include <vector>

#include "fmuad/tensor.hpp"

namespace fmuad {

// m x T series, rows are features, columns are time steps.
struct SeriesMatrix {
    Tensor values;  // m x T
    std::vector<std::string> feature_names;  // optional, may be empty

    int features() const { return values.dim(0); }
    int steps() const { return values.dim(1); }
};

// One training/scoring instance: the tau-step span ending at time t.
struct WindowView {
    int t = 0;
    Tensor target;    // m x k
    Tensor history;   // m x (tau - k)
    Tensor instance;  // m x tau, = [history ; target] along time
};

// Extracts the instance ending at time index t (inclusive, 0-based).
WindowView make_window_view(const SeriesMatrix& series, int t, int tau, int k);

// Splits an m x tau instance into d = floor((tau-k)/s) history windows at
// stride s plus the final target window (the last k columns). Windows are
// ordered by start time.
struct SlicedWindows {
    std::vector<Tensor> history;  // d windows, each m x k
    Tensor target;                // m x k
};
SlicedWindows slice_windows(const Tensor& instance, int k, int s);

// Pairwise cosine similarities between the rows of an m x k window.
// Rows with norm below 1e-12 get 0 off-diagonal and 1 on the diagonal.
Tensor signature_matrix(const Tensor& window);

// Per-row DFT magnitudes |xi_j| for j = 1..k/2 under the 1/k normalization;
// the DC bin is excluded. Requires even k. Result is m x (k/2).
Tensor frequency_matrix(const Tensor& window);

// Y_t = [S_t | F_t | W_t], shape m x (m + k/2 + k).
Tensor build_target(const Tensor& window);

// Column extents of the three blocks inside Y_t for a given (m, k).
struct TargetLayout {
    int m = 0, k = 0;
    int sig_cols() const { return m; }
    int freq_cols() const { return k / 2; }
    int win_cols() const { return k; }
    int cols() const { return m + k / 2 + k; }
    int freq_off() const { return m; }
    int win_off() const { return m + k / 2; }
};

}  // namespace fmuad

#endif
