#ifndef FMUAD_DETECTORS_HPP
#define FMUAD_DETECTORS_HPP

#include <vector>

#include "fmuad/rng.hpp"
#include "fmuad/tensor.hpp"

namespace fmuad {

// Reads a parameter through the tape when recording, or its raw value when
// running inference without one.
inline Tensor use_param(Tape* tape, Param& p) { return tape ? tape->watch(p) : p.value; }

// Glorot-uniform initialization in +-sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Rng& rng, std::vector<int> shape, int fan_in, int fan_out);

// Peephole ConvLSTM cell parameters. All gate kernels share one (kh, kw)
// and are applied with same-padding, so the spatial extent of the state
// matches the input.
struct ConvLstmParams {
    int in_ch = 1;
    int hidden_ch = 16;
    int kernel = 3;
    int height = 0, width = 0;  // spatial extent of the state (peephole shape)

    Param w_xi, w_hi, w_xf, w_hf, w_xc, w_hc, w_xo, w_ho;  // gate conv kernels
    Param w_ci, w_cf, w_co;                                // peephole weights
    Param b_i, b_f, b_c, b_o;                              // per-channel biases

    ConvLstmParams() = default;
    ConvLstmParams(const std::string& prefix, int in_ch, int hidden_ch, int kernel, int height,
                   int width, Rng& rng);

    std::vector<Param*> params();
};

struct ConvLstmState {
    Tensor h;  // hidden_ch x H x W
    Tensor c;  // hidden_ch x H x W
};

ConvLstmState initial_state(const ConvLstmParams& p);

// One step of the peephole ConvLSTM recurrence. `x` is in_ch x H x W.
ConvLstmState convlstm_cell(Tape* tape, const Tensor& x, const ConvLstmState& prev,
                            ConvLstmParams& p);

// Similarity-weighted aggregation of hidden states. The last entry is the
// current state; weights are a softmax over inner products with it,
// computed with max-subtraction. Weights are nonnegative and sum to 1.
Tensor temporal_attention(Tape* tape, const std::vector<Tensor>& states);

// Attention weights alone (forward-only), for tests and introspection.
std::vector<double> attention_weights(const std::vector<Tensor>& states);

// Shared ConvLSTM -> attention -> 1x1 conv -> FC head used by the
// correlation and temporal detectors. Output is rows x cols.
class RecurrentForecaster {
public:
    RecurrentForecaster(const std::string& prefix, int rows, int cols, int hidden_ch, Rng& rng);

    // Each history entry is a rows x cols matrix (a signature or frequency
    // matrix); requires at least one entry.
    Tensor forecast(Tape* tape, const std::vector<Tensor>& history);

    std::vector<Param*> params();

    int rows() const { return rows_; }
    int cols() const { return cols_; }

private:
    int rows_, cols_;
    ConvLstmParams cell_;
    Param proj_w_;  // 1 x hidden_ch x 1 x 1
    Param proj_b_;  // one channel
    Param fc_w_;    // (rows*cols) x (rows*cols)
    Param fc_b_;
};

// D^c: forecasts the next signature matrix from the history of signature
// matrices.
class CorrelationDetector {
public:
    CorrelationDetector(int m, int hidden_ch, Rng& rng);

    Tensor forecast(Tape* tape, const std::vector<Tensor>& history_sigs);
    std::vector<Param*> params() { return head_.params(); }

private:
    RecurrentForecaster head_;
};

// D^t: forecasts the next frequency matrix. Takes raw m x k history windows
// and applies the spectral transform internally.
class TemporalDetector {
public:
    TemporalDetector(int m, int k, int hidden_ch, Rng& rng);

    Tensor forecast(Tape* tape, const std::vector<Tensor>& history_windows);
    std::vector<Param*> params() { return head_.params(); }

private:
    int k_;
    RecurrentForecaster head_;
};

// D^s: forecasts the raw target window from the long history segment with a
// stack of time-dilated convolutions.
class SpatialDetector {
public:
    SpatialDetector(int m, int hist_len, int k, const std::vector<int>& channels,
                    const std::vector<int>& dilations, Rng& rng);

    // history: m x hist_len; returns m x k.
    Tensor forecast(Tape* tape, const Tensor& history);
    std::vector<Param*> params();

    // Composite receptive extent along time: 1 + (kernel-1) * sum(dilations).
    int receptive_extent() const;

private:
    int m_, hist_len_, k_;
    std::vector<int> dilations_;
    std::vector<Param> layer_w_;
    std::vector<Param> layer_b_;
    Param proj_w_, proj_b_;
    Param fc_w_, fc_b_;
};

constexpr double kLeakySlope = 0.01;

}  // namespace fmuad

#endif
