#ifndef FMUAD_TENSOR_HPP
#define FMUAD_TENSOR_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fmuad {

// Thrown when an operation's preconditions are violated (shape mismatch,
// non-scalar loss, odd window length, ...).
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// Dense row-major tensor of doubles. `node >= 0` links the value to a node
// on the tape that produced it; -1 means constant (not differentiated).
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;
    int node = -1;

    Tensor() = default;
    Tensor(std::vector<int> shape_, std::vector<double> data_);

    static Tensor zeros(std::vector<int> shape);
    static Tensor full(std::vector<int> shape, double value);
    static Tensor scalar(double value);

    int size() const { return static_cast<int>(data.size()); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }
    int rank() const { return static_cast<int>(shape.size()); }

    // 2-D accessors (rows x cols).
    double& at(int r, int c);
    double at(int r, int c) const;
};

int shape_size(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

// Trainable parameter: a named value plus the gradient buffer the tape
// accumulates into. Adam state lives in the optimizer.
struct Param {
    std::string name;
    Tensor value;
    std::vector<double> grad;

    Param() = default;
    Param(std::string name_, Tensor value_)
        : name(std::move(name_)), value(std::move(value_)), grad(value.data.size(), 0.0) {}

    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

// Reverse-mode tape. Nodes are recorded in forward (topological) order;
// backward() walks them in reverse, summing incoming gradients. A tape is
// single-threaded; run one tape per thread.
class Tape {
public:
    using BackFn = std::function<void(Tape&, const std::vector<double>& grad_out)>;

    // Registers a leaf for `p` (once per tape; repeated watch returns the
    // same node so an unrolled reuse of a parameter accumulates correctly).
    Tensor watch(Param& p);

    // Records an interior node; returns its id.
    int record(int size, BackFn back);

    // Seeds d(loss)/d(loss)=1 and accumulates gradients. Leaf gradients are
    // added into their Param::grad buffers.
    void backward(const Tensor& loss);

    // Reverse pass from an arbitrary value with an explicit output gradient.
    // When into_params is false, leaf gradients stay in the tape's own
    // buffers (read them via watched() + grad()); the trainer uses this to
    // run per-window tapes in parallel and reduce deterministically.
    void backward_seed(const Tensor& value, const std::vector<double>& seed, bool into_params);

    const std::unordered_map<const Param*, int>& watched() const { return watched_; }

    // Gradient buffer of a tape node (valid after backward()).
    const std::vector<double>& grad(int node) const;
    const std::vector<double>& grad(const Tensor& t) const { return grad(t.node); }

    void accum(int node, const std::vector<double>& g);
    std::vector<double>& grad_buf(int node) { return grads_[static_cast<size_t>(node)]; }

    size_t num_nodes() const { return nodes_.size(); }

private:
    struct Node {
        int size = 0;
        BackFn back;         // null for leaves
        Param* leaf = nullptr;
    };
    std::vector<Node> nodes_;
    std::vector<std::vector<double>> grads_;
    std::unordered_map<const Param*, int> watched_;
};

// ---- Operations -----------------------------------------------------------
// All ops compute the forward value and, when `tape` is non-null and an
// argument carries a tape node, record the backward rule.

Tensor add(Tape* tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape* tape, const Tensor& a, const Tensor& b);
Tensor hadamard(Tape* tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape* tape, const Tensor& a, double c);

// Elementwise quotient; shapes must match (used on scalars by attention).
Tensor div(Tape* tape, const Tensor& a, const Tensor& b);

// y = s * x where s is a scalar tensor on the tape.
Tensor scale_by(Tape* tape, const Tensor& s, const Tensor& x);

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b);

// input: C_in x H x W, kernel: C_out x C_in x kh x kw. Output spatial size
// H' = H + 2*ph - (dh*(kh-1)+1) + 1, likewise W'.
Tensor conv2d(Tape* tape, const Tensor& input, const Tensor& kernel,
              std::pair<int, int> dilation = {1, 1},
              std::pair<int, int> padding = {0, 0});

// x: C x H x W plus one bias value per channel (b has C entries).
Tensor add_channel_bias(Tape* tape, const Tensor& x, const Tensor& b);

Tensor sigmoid(Tape* tape, const Tensor& x);
Tensor tanh_op(Tape* tape, const Tensor& x);
Tensor leaky_relu(Tape* tape, const Tensor& x, double slope);
Tensor exp_op(Tape* tape, const Tensor& x);

Tensor sum(Tape* tape, const Tensor& x);            // -> scalar
Tensor dot(Tape* tape, const Tensor& a, const Tensor& b);  // -> scalar
Tensor reshape(Tape* tape, const Tensor& x, std::vector<int> shape);

// Horizontal concatenation of 2-D blocks with equal row counts.
Tensor concat_cols(Tape* tape, const std::vector<Tensor>& blocks);

// ---- Optimizer (adaptive moments with bias correction) --------------------

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    // Applies one update from each param's grad buffer and clears the grads.
    // Missing state is created on first use; step_count increments once per call.
    void step(const std::vector<Param*>& params);

    long step_count() const { return step_count_; }
    const AdamConfig& config() const { return cfg_; }

private:
    struct Moments {
        std::vector<double> m, v;
    };
    AdamConfig cfg_;
    std::unordered_map<const Param*, Moments> state_;
    long step_count_ = 0;
};

}  // namespace fmuad

#endif
