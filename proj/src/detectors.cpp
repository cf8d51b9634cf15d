#include "fmuad/detectors.hpp"

#include <algorithm>
#include <cmath>

#include "fmuad/transforms.hpp"

namespace fmuad {

Tensor glorot_uniform(Rng& rng, std::vector<int> shape, int fan_in, int fan_out) {
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(-bound, bound);
    return t;
}

namespace {

Tensor conv_kernel(Rng& rng, int out_ch, int in_ch, int kh, int kw) {
    return glorot_uniform(rng, {out_ch, in_ch, kh, kw}, in_ch * kh * kw, out_ch * kh * kw);
}

}  // namespace

ConvLstmParams::ConvLstmParams(const std::string& prefix, int in_ch_, int hidden_ch_, int kernel_,
                               int height_, int width_, Rng& rng)
    : in_ch(in_ch_), hidden_ch(hidden_ch_), kernel(kernel_), height(height_), width(width_) {
    auto gate_x = [&](const char* n) {
        return Param(prefix + "." + n, conv_kernel(rng, hidden_ch, in_ch, kernel, kernel));
    };
    auto gate_h = [&](const char* n) {
        return Param(prefix + "." + n, conv_kernel(rng, hidden_ch, hidden_ch, kernel, kernel));
    };
    auto peep = [&](const char* n) {
        return Param(prefix + "." + n,
                     glorot_uniform(rng, {hidden_ch, height, width}, hidden_ch, hidden_ch));
    };
    auto bias = [&](const char* n) { return Param(prefix + "." + n, Tensor::zeros({hidden_ch})); };

    w_xi = gate_x("w_xi");
    w_hi = gate_h("w_hi");
    w_xf = gate_x("w_xf");
    w_hf = gate_h("w_hf");
    w_xc = gate_x("w_xc");
    w_hc = gate_h("w_hc");
    w_xo = gate_x("w_xo");
    w_ho = gate_h("w_ho");
    w_ci = peep("w_ci");
    w_cf = peep("w_cf");
    w_co = peep("w_co");
    b_i = bias("b_i");
    b_f = bias("b_f");
    b_c = bias("b_c");
    b_o = bias("b_o");
}

std::vector<Param*> ConvLstmParams::params() {
    return {&w_xi, &w_hi, &w_xf, &w_hf, &w_xc, &w_hc, &w_xo, &w_ho,
            &w_ci, &w_cf, &w_co, &b_i,  &b_f,  &b_c,  &b_o};
}

ConvLstmState initial_state(const ConvLstmParams& p) {
    ConvLstmState s;
    s.h = Tensor::zeros({p.hidden_ch, p.height, p.width});
    s.c = Tensor::zeros({p.hidden_ch, p.height, p.width});
    return s;
}

ConvLstmState convlstm_cell(Tape* tape, const Tensor& x, const ConvLstmState& prev,
                            ConvLstmParams& p) {
    if (x.rank() != 3 || x.dim(0) != p.in_ch || x.dim(1) != p.height || x.dim(2) != p.width)
        throw ContractError("convlstm_cell: input shape " + shape_str(x.shape) +
                            " does not match cell configuration");
    if (prev.h.shape != std::vector<int>{p.hidden_ch, p.height, p.width})
        throw ContractError("convlstm_cell: state shape mismatch");

    const int pad = (p.kernel - 1) / 2;  // same-padding for odd kernels
    std::pair<int, int> pd{pad, pad};
    auto gate_pre = [&](Param& wx, Param& wh, Param& b) {
        Tensor gx = conv2d(tape, x, use_param(tape, wx), {1, 1}, pd);
        Tensor gh = conv2d(tape, prev.h, use_param(tape, wh), {1, 1}, pd);
        return add_channel_bias(tape, add(tape, gx, gh), use_param(tape, b));
    };

    Tensor i_gate = sigmoid(
        tape, add(tape, gate_pre(p.w_xi, p.w_hi, p.b_i), hadamard(tape, use_param(tape, p.w_ci), prev.c)));
    Tensor f_gate = sigmoid(
        tape, add(tape, gate_pre(p.w_xf, p.w_hf, p.b_f), hadamard(tape, use_param(tape, p.w_cf), prev.c)));
    Tensor candidate = tanh_op(tape, gate_pre(p.w_xc, p.w_hc, p.b_c));

    ConvLstmState next;
    next.c = add(tape, hadamard(tape, f_gate, prev.c), hadamard(tape, i_gate, candidate));
    Tensor o_gate = sigmoid(
        tape, add(tape, gate_pre(p.w_xo, p.w_ho, p.b_o), hadamard(tape, use_param(tape, p.w_co), next.c)));
    next.h = hadamard(tape, o_gate, tanh_op(tape, next.c));
    return next;
}

Tensor temporal_attention(Tape* tape, const std::vector<Tensor>& states) {
    if (states.empty()) throw ContractError("temporal_attention: empty state list");
    for (const auto& s : states)
        if (s.shape != states.front().shape)
            throw ContractError("temporal_attention: states must share one shape");

    const Tensor& current = states.back();

    std::vector<Tensor> scores;
    scores.reserve(states.size());
    double max_score = -1e300;
    for (const auto& s : states) {
        Tensor sc = dot(tape, s, current);
        max_score = std::max(max_score, sc.data[0]);
        scores.push_back(std::move(sc));
    }

    // Softmax is shift-invariant; subtracting the max as a constant keeps
    // exp() in range without changing the gradient.
    Tensor shift = Tensor::scalar(max_score);
    std::vector<Tensor> exps;
    exps.reserve(scores.size());
    Tensor total;
    for (size_t i = 0; i < scores.size(); ++i) {
        Tensor e = exp_op(tape, sub(tape, scores[i], shift));
        total = i == 0 ? e : add(tape, total, e);
        exps.push_back(std::move(e));
    }

    Tensor result;
    for (size_t i = 0; i < states.size(); ++i) {
        Tensor weight = div(tape, exps[i], total);
        Tensor term = scale_by(tape, weight, states[i]);
        result = i == 0 ? term : add(tape, result, term);
    }
    return result;
}

std::vector<double> attention_weights(const std::vector<Tensor>& states) {
    if (states.empty()) throw ContractError("attention_weights: empty state list");
    const Tensor& current = states.back();
    std::vector<double> s(states.size());
    double mx = -1e300;
    for (size_t i = 0; i < states.size(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < current.size(); ++j)
            acc += states[i].data[static_cast<size_t>(j)] * current.data[static_cast<size_t>(j)];
        s[i] = acc;
        mx = std::max(mx, acc);
    }
    double total = 0.0;
    for (auto& v : s) {
        v = std::exp(v - mx);
        total += v;
    }
    for (auto& v : s) v /= total;
    return s;
}

// ---- RecurrentForecaster -----------------------------------------------------

RecurrentForecaster::RecurrentForecaster(const std::string& prefix, int rows, int cols,
                                         int hidden_ch, Rng& rng)
    : rows_(rows),
      cols_(cols),
      cell_(prefix + ".cell", 1, hidden_ch, 3, rows, cols, rng),
      proj_w_(prefix + ".proj_w", conv_kernel(rng, 1, hidden_ch, 1, 1)),
      proj_b_(prefix + ".proj_b", Tensor::zeros({1})),
      fc_w_(prefix + ".fc_w",
            glorot_uniform(rng, {rows * cols, rows * cols}, rows * cols, rows * cols)),
      fc_b_(prefix + ".fc_b", Tensor::zeros({rows * cols, 1})) {}

Tensor RecurrentForecaster::forecast(Tape* tape, const std::vector<Tensor>& history) {
    if (history.empty()) throw ContractError("forecast: history must contain at least one matrix");

    ConvLstmState state = initial_state(cell_);
    std::vector<Tensor> hidden;
    hidden.reserve(history.size());
    for (const auto& mat : history) {
        if (mat.shape != std::vector<int>{rows_, cols_})
            throw ContractError("forecast: history matrix shape " + shape_str(mat.shape) +
                                ", expected " + shape_str({rows_, cols_}));
        Tensor x = mat;
        x.shape = {1, rows_, cols_};
        state = convlstm_cell(tape, x, state, cell_);
        hidden.push_back(state.h);
    }

    Tensor pooled = temporal_attention(tape, hidden);
    Tensor projected = conv2d(tape, pooled, use_param(tape, proj_w_));
    projected = add_channel_bias(tape, projected, use_param(tape, proj_b_));
    Tensor flat = reshape(tape, projected, {rows_ * cols_, 1});
    Tensor out = add(tape, matmul(tape, use_param(tape, fc_w_), flat), use_param(tape, fc_b_));
    return reshape(tape, out, {rows_, cols_});
}

std::vector<Param*> RecurrentForecaster::params() {
    auto v = cell_.params();
    v.push_back(&proj_w_);
    v.push_back(&proj_b_);
    v.push_back(&fc_w_);
    v.push_back(&fc_b_);
    return v;
}

// ---- Detectors ----------------------------------------------------------------

CorrelationDetector::CorrelationDetector(int m, int hidden_ch, Rng& rng)
    : head_("dc", m, m, hidden_ch, rng) {}

Tensor CorrelationDetector::forecast(Tape* tape, const std::vector<Tensor>& history_sigs) {
    return head_.forecast(tape, history_sigs);
}

TemporalDetector::TemporalDetector(int m, int k, int hidden_ch, Rng& rng)
    : k_(k), head_("dt", m, k / 2, hidden_ch, rng) {
    if (k % 2 != 0) throw ContractError("TemporalDetector: k must be even");
}

Tensor TemporalDetector::forecast(Tape* tape, const std::vector<Tensor>& history_windows) {
    if (history_windows.empty())
        throw ContractError("forecast_frequency: history must contain at least one window");
    std::vector<Tensor> freq;
    freq.reserve(history_windows.size());
    for (const auto& w : history_windows) freq.push_back(frequency_matrix(w));
    return head_.forecast(tape, freq);
}

SpatialDetector::SpatialDetector(int m, int hist_len, int k, const std::vector<int>& channels,
                                 const std::vector<int>& dilations, Rng& rng)
    : m_(m), hist_len_(hist_len), k_(k), dilations_(dilations) {
    if (channels.size() != dilations.size() || channels.empty())
        throw ContractError("SpatialDetector: channels and dilations must align and be nonempty");
    for (size_t i = 1; i < dilations.size(); ++i)
        if (dilations[i] <= dilations[i - 1])
            throw ContractError("SpatialDetector: dilations must be strictly increasing");
    if (hist_len < receptive_extent())
        throw ContractError("SpatialDetector: history length " + std::to_string(hist_len) +
                            " is shorter than the receptive extent " +
                            std::to_string(receptive_extent()));

    int in_ch = 1;
    for (size_t i = 0; i < channels.size(); ++i) {
        int out_ch = channels[i];
        std::string idx = std::to_string(i);
        // rectangle kernel (3, 1): 3 taps along time, 1 along features
        layer_w_.emplace_back("ds.conv" + idx + "_w", conv_kernel(rng, out_ch, in_ch, 1, 3));
        layer_b_.emplace_back("ds.conv" + idx + "_b", Tensor::zeros({out_ch}));
        in_ch = out_ch;
    }
    proj_w_ = Param("ds.proj_w", conv_kernel(rng, 1, in_ch, 1, 1));
    proj_b_ = Param("ds.proj_b", Tensor::zeros({1}));
    fc_w_ = Param("ds.fc_w",
                  glorot_uniform(rng, {m * k, m * hist_len}, m * hist_len, m * k));
    fc_b_ = Param("ds.fc_b", Tensor::zeros({m * k, 1}));
}

int SpatialDetector::receptive_extent() const {
    int total = 0;
    for (int d : dilations_) total += d;
    return 1 + 2 * total;
}

Tensor SpatialDetector::forecast(Tape* tape, const Tensor& history) {
    if (history.shape != std::vector<int>{m_, hist_len_})
        throw ContractError("forecast_window: history shape " + shape_str(history.shape) +
                            ", expected " + shape_str({m_, hist_len_}));

    Tensor x = history;
    x.shape = {1, m_, hist_len_};
    for (size_t i = 0; i < layer_w_.size(); ++i) {
        int r = dilations_[i];
        // same-padding along time keeps the resolution through the stack
        x = conv2d(tape, x, use_param(tape, layer_w_[i]), {1, r}, {0, r});
        x = add_channel_bias(tape, x, use_param(tape, layer_b_[i]));
        x = leaky_relu(tape, x, kLeakySlope);
    }
    x = conv2d(tape, x, use_param(tape, proj_w_));
    x = add_channel_bias(tape, x, use_param(tape, proj_b_));
    Tensor flat = reshape(tape, x, {m_ * hist_len_, 1});
    Tensor out = add(tape, matmul(tape, use_param(tape, fc_w_), flat), use_param(tape, fc_b_));
    return reshape(tape, out, {m_, k_});
}

std::vector<Param*> SpatialDetector::params() {
    std::vector<Param*> v;
    for (auto& p : layer_w_) v.push_back(&p);
    for (auto& p : layer_b_) v.push_back(&p);
    v.push_back(&proj_w_);
    v.push_back(&proj_b_);
    v.push_back(&fc_w_);
    v.push_back(&fc_b_);
    return v;
}

}  // namespace fmuad
