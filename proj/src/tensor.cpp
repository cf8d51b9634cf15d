#include "fmuad/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fmuad {

int shape_size(const std::vector<int>& shape) {
    int n = 1;
    for (int d : shape) n *= d;
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

Tensor::Tensor(std::vector<int> shape_, std::vector<double> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
    for (int d : shape)
        if (d <= 0) throw ContractError("tensor dims must be positive, got " + shape_str(shape));
    if (shape_size(shape) != static_cast<int>(data.size()))
        throw ContractError("tensor shape " + shape_str(shape) + " does not match data length " +
                            std::to_string(data.size()));
}

Tensor Tensor::zeros(std::vector<int> shape) {
    std::vector<double> d(static_cast<size_t>(shape_size(shape)), 0.0);
    return Tensor(std::move(shape), std::move(d));
}

Tensor Tensor::full(std::vector<int> shape, double value) {
    std::vector<double> d(static_cast<size_t>(shape_size(shape)), value);
    return Tensor(std::move(shape), std::move(d));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

double& Tensor::at(int r, int c) {
    return data[static_cast<size_t>(r) * static_cast<size_t>(shape[1]) + static_cast<size_t>(c)];
}

double Tensor::at(int r, int c) const {
    return data[static_cast<size_t>(r) * static_cast<size_t>(shape[1]) + static_cast<size_t>(c)];
}

// ---- Tape ------------------------------------------------------------------

Tensor Tape::watch(Param& p) {
    Tensor t = p.value;
    auto it = watched_.find(&p);
    if (it != watched_.end()) {
        t.node = it->second;
        return t;
    }
    Node n;
    n.size = p.value.size();
    n.leaf = &p;
    nodes_.push_back(std::move(n));
    grads_.emplace_back(static_cast<size_t>(p.value.size()), 0.0);
    int id = static_cast<int>(nodes_.size()) - 1;
    watched_.emplace(&p, id);
    t.node = id;
    return t;
}

int Tape::record(int size, BackFn back) {
    Node n;
    n.size = size;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    grads_.emplace_back(static_cast<size_t>(size), 0.0);
    return static_cast<int>(nodes_.size()) - 1;
}

void Tape::accum(int node, const std::vector<double>& g) {
    auto& buf = grads_[static_cast<size_t>(node)];
    for (size_t i = 0; i < g.size(); ++i) buf[i] += g[i];
}

const std::vector<double>& Tape::grad(int node) const {
    if (node < 0 || node >= static_cast<int>(grads_.size()))
        throw ContractError("grad requested for a value not on this tape");
    return grads_[static_cast<size_t>(node)];
}

void Tape::backward(const Tensor& loss) {
    if (loss.size() != 1) throw ContractError("backward requires a scalar loss");
    backward_seed(loss, {1.0}, true);
}

void Tape::backward_seed(const Tensor& value, const std::vector<double>& seed, bool into_params) {
    if (value.node < 0) throw ContractError("backward requires a value recorded on the tape");
    if (static_cast<int>(seed.size()) != value.size())
        throw ContractError("backward: seed gradient size does not match value");
    accum(value.node, seed);
    for (int i = value.node; i >= 0; --i) {
        auto& n = nodes_[static_cast<size_t>(i)];
        const auto& g = grads_[static_cast<size_t>(i)];
        if (n.back) {
            n.back(*this, g);
        } else if (n.leaf && into_params) {
            auto& pg = n.leaf->grad;
            for (size_t j = 0; j < g.size(); ++j) pg[j] += g[j];
        }
    }
}

// ---- helpers ----------------------------------------------------------------

namespace {

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

bool on_tape(const Tensor& t) { return t.node >= 0; }

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}

}  // namespace

// ---- elementwise ops ---------------------------------------------------------

Tensor add(Tape* tape, const Tensor& a, const Tensor& b) {
    require(same_shape(a, b), "add: shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    Tensor out = a;
    out.node = -1;
    for (int i = 0; i < out.size(); ++i) out.data[static_cast<size_t>(i)] += b.data[static_cast<size_t>(i)];
    if (tape && (on_tape(a) || on_tape(b))) {
        int na = a.node, nb = b.node;
        out.node = tape->record(out.size(), [na, nb](Tape& t, const std::vector<double>& g) {
            if (na >= 0) t.accum(na, g);
            if (nb >= 0) t.accum(nb, g);
        });
    }
    return out;
}

Tensor sub(Tape* tape, const Tensor& a, const Tensor& b) {
    require(same_shape(a, b), "sub: shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    Tensor out = a;
    out.node = -1;
    for (int i = 0; i < out.size(); ++i) out.data[static_cast<size_t>(i)] -= b.data[static_cast<size_t>(i)];
    if (tape && (on_tape(a) || on_tape(b))) {
        int na = a.node, nb = b.node;
        out.node = tape->record(out.size(), [na, nb](Tape& t, const std::vector<double>& g) {
            if (na >= 0) t.accum(na, g);
            if (nb >= 0) {
                auto& buf = t.grad_buf(nb);
                for (size_t i = 0; i < g.size(); ++i) buf[i] -= g[i];
            }
        });
    }
    return out;
}

Tensor hadamard(Tape* tape, const Tensor& a, const Tensor& b) {
    require(same_shape(a, b),
            "hadamard: shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    Tensor out = a;
    out.node = -1;
    for (int i = 0; i < out.size(); ++i) out.data[static_cast<size_t>(i)] *= b.data[static_cast<size_t>(i)];
    if (tape && (on_tape(a) || on_tape(b))) {
        int na = a.node, nb = b.node;
        std::vector<double> av = a.data, bv = b.data;
        out.node = tape->record(
            out.size(), [na, nb, av = std::move(av), bv = std::move(bv)](Tape& t, const std::vector<double>& g) {
                if (na >= 0) {
                    auto& buf = t.grad_buf(na);
                    for (size_t i = 0; i < g.size(); ++i) buf[i] += g[i] * bv[i];
                }
                if (nb >= 0) {
                    auto& buf = t.grad_buf(nb);
                    for (size_t i = 0; i < g.size(); ++i) buf[i] += g[i] * av[i];
                }
            });
    }
    return out;
}

Tensor scale(Tape* tape, const Tensor& a, double c) {
    Tensor out = a;
    out.node = -1;
    for (auto& v : out.data) v *= c;
    if (tape && on_tape(a)) {
        int na = a.node;
        out.node = tape->record(out.size(), [na, c](Tape& t, const std::vector<double>& g) {
            auto& buf = t.grad_buf(na);
            for (size_t i = 0; i < g.size(); ++i) buf[i] += c * g[i];
        });
    }
    return out;
}

Tensor div(Tape* tape, const Tensor& a, const Tensor& b) {
    require(same_shape(a, b), "div: shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    Tensor out = a;
    out.node = -1;
    for (int i = 0; i < out.size(); ++i) out.data[static_cast<size_t>(i)] /= b.data[static_cast<size_t>(i)];
    if (tape && (on_tape(a) || on_tape(b))) {
        int na = a.node, nb = b.node;
        std::vector<double> av = a.data, bv = b.data;
        out.node = tape->record(
            out.size(), [na, nb, av = std::move(av), bv = std::move(bv)](Tape& t, const std::vector<double>& g) {
                if (na >= 0) {
                    auto& buf = t.grad_buf(na);
                    for (size_t i = 0; i < g.size(); ++i) buf[i] += g[i] / bv[i];
                }
                if (nb >= 0) {
                    auto& buf = t.grad_buf(nb);
                    for (size_t i = 0; i < g.size(); ++i) buf[i] -= g[i] * av[i] / (bv[i] * bv[i]);
                }
            });
    }
    return out;
}

Tensor scale_by(Tape* tape, const Tensor& s, const Tensor& x) {
    require(s.size() == 1, "scale_by: scale factor must be scalar");
    double sv = s.data[0];
    Tensor out = x;
    out.node = -1;
    for (auto& v : out.data) v *= sv;
    if (tape && (on_tape(s) || on_tape(x))) {
        int ns = s.node, nx = x.node;
        std::vector<double> xv = x.data;
        out.node =
            tape->record(out.size(), [ns, nx, sv, xv = std::move(xv)](Tape& t, const std::vector<double>& g) {
                if (nx >= 0) {
                    auto& buf = t.grad_buf(nx);
                    for (size_t i = 0; i < g.size(); ++i) buf[i] += sv * g[i];
                }
                if (ns >= 0) {
                    double acc = 0.0;
                    for (size_t i = 0; i < g.size(); ++i) acc += g[i] * xv[i];
                    t.grad_buf(ns)[0] += acc;
                }
            });
    }
    return out;
}

// ---- matmul ------------------------------------------------------------------

Tensor matmul(Tape* tape, const Tensor& a, const Tensor& b) {
    require(a.rank() == 2 && b.rank() == 2, "matmul: operands must be 2-D");
    require(a.dim(1) == b.dim(0), "matmul: inner dimensions disagree, " + shape_str(a.shape) +
                                      " vs " + shape_str(b.shape));
    const int p = a.dim(0), q = a.dim(1), r = b.dim(1);
    Tensor out = Tensor::zeros({p, r});
    for (int i = 0; i < p; ++i) {
        for (int kk = 0; kk < q; ++kk) {
            double av = a.data[static_cast<size_t>(i * q + kk)];
            if (av == 0.0) continue;
            const double* brow = &b.data[static_cast<size_t>(kk * r)];
            double* orow = &out.data[static_cast<size_t>(i * r)];
            for (int j = 0; j < r; ++j) orow[j] += av * brow[j];
        }
    }
    if (tape && (on_tape(a) || on_tape(b))) {
        int na = a.node, nb = b.node;
        std::vector<double> av = a.data, bv = b.data;
        out.node = tape->record(
            out.size(),
            [na, nb, p, q, r, av = std::move(av), bv = std::move(bv)](Tape& t, const std::vector<double>& g) {
                if (na >= 0) {
                    // dA = G * B^T
                    auto& buf = t.grad_buf(na);
                    for (int i = 0; i < p; ++i)
                        for (int kk = 0; kk < q; ++kk) {
                            double acc = 0.0;
                            for (int j = 0; j < r; ++j)
                                acc += g[static_cast<size_t>(i * r + j)] * bv[static_cast<size_t>(kk * r + j)];
                            buf[static_cast<size_t>(i * q + kk)] += acc;
                        }
                }
                if (nb >= 0) {
                    // dB = A^T * G
                    auto& buf = t.grad_buf(nb);
                    for (int kk = 0; kk < q; ++kk)
                        for (int i = 0; i < p; ++i) {
                            double av_ik = av[static_cast<size_t>(i * q + kk)];
                            if (av_ik == 0.0) continue;
                            for (int j = 0; j < r; ++j)
                                buf[static_cast<size_t>(kk * r + j)] += av_ik * g[static_cast<size_t>(i * r + j)];
                        }
                }
            });
    }
    return out;
}

// ---- conv2d ------------------------------------------------------------------

namespace {

struct ConvDims {
    int cin, h, w, cout, kh, kw, dh, dw, ph, pw, ho, wo;
};

void conv_forward(const ConvDims& d, const double* in, const double* k, double* out) {
    for (int oc = 0; oc < d.cout; ++oc)
        for (int oy = 0; oy < d.ho; ++oy)
            for (int ox = 0; ox < d.wo; ++ox) {
                double acc = 0.0;
                for (int ic = 0; ic < d.cin; ++ic)
                    for (int ky = 0; ky < d.kh; ++ky) {
                        int iy = oy - d.ph + ky * d.dh;
                        if (iy < 0 || iy >= d.h) continue;
                        for (int kx = 0; kx < d.kw; ++kx) {
                            int ix = ox - d.pw + kx * d.dw;
                            if (ix < 0 || ix >= d.w) continue;
                            acc += in[(static_cast<size_t>(ic) * d.h + iy) * d.w + ix] *
                                   k[((static_cast<size_t>(oc) * d.cin + ic) * d.kh + ky) * d.kw + kx];
                        }
                    }
                out[(static_cast<size_t>(oc) * d.ho + oy) * d.wo + ox] = acc;
            }
}

}  // namespace

Tensor conv2d(Tape* tape, const Tensor& input, const Tensor& kernel, std::pair<int, int> dilation,
              std::pair<int, int> padding) {
    require(input.rank() == 3, "conv2d: input must be C x H x W");
    require(kernel.rank() == 4, "conv2d: kernel must be C_out x C_in x kh x kw");
    require(kernel.dim(1) == input.dim(0), "conv2d: channel mismatch, input " + shape_str(input.shape) +
                                               " kernel " + shape_str(kernel.shape));
    require(dilation.first >= 1 && dilation.second >= 1, "conv2d: dilation must be >= 1");
    require(padding.first >= 0 && padding.second >= 0, "conv2d: padding must be >= 0");

    ConvDims d;
    d.cin = input.dim(0);
    d.h = input.dim(1);
    d.w = input.dim(2);
    d.cout = kernel.dim(0);
    d.kh = kernel.dim(2);
    d.kw = kernel.dim(3);
    d.dh = dilation.first;
    d.dw = dilation.second;
    d.ph = padding.first;
    d.pw = padding.second;
    d.ho = d.h + 2 * d.ph - (d.dh * (d.kh - 1) + 1) + 1;
    d.wo = d.w + 2 * d.pw - (d.dw * (d.kw - 1) + 1) + 1;
    require(d.ho >= 1 && d.wo >= 1, "conv2d: dilated kernel exceeds padded input extent");

    Tensor out = Tensor::zeros({d.cout, d.ho, d.wo});
    conv_forward(d, input.data.data(), kernel.data.data(), out.data.data());

    if (tape && (on_tape(input) || on_tape(kernel))) {
        int ni = input.node, nk = kernel.node;
        std::vector<double> iv = input.data, kv = kernel.data;
        out.node = tape->record(
            out.size(),
            [ni, nk, d, iv = std::move(iv), kv = std::move(kv)](Tape& t, const std::vector<double>& g) {
                if (ni >= 0) {
                    auto& buf = t.grad_buf(ni);
                    for (int oc = 0; oc < d.cout; ++oc)
                        for (int oy = 0; oy < d.ho; ++oy)
                            for (int ox = 0; ox < d.wo; ++ox) {
                                double gv = g[(static_cast<size_t>(oc) * d.ho + oy) * d.wo + ox];
                                if (gv == 0.0) continue;
                                for (int ic = 0; ic < d.cin; ++ic)
                                    for (int ky = 0; ky < d.kh; ++ky) {
                                        int iy = oy - d.ph + ky * d.dh;
                                        if (iy < 0 || iy >= d.h) continue;
                                        for (int kx = 0; kx < d.kw; ++kx) {
                                            int ix = ox - d.pw + kx * d.dw;
                                            if (ix < 0 || ix >= d.w) continue;
                                            buf[(static_cast<size_t>(ic) * d.h + iy) * d.w + ix] +=
                                                gv * kv[((static_cast<size_t>(oc) * d.cin + ic) * d.kh + ky) *
                                                            d.kw +
                                                        kx];
                                        }
                                    }
                            }
                }
                if (nk >= 0) {
                    auto& buf = t.grad_buf(nk);
                    for (int oc = 0; oc < d.cout; ++oc)
                        for (int oy = 0; oy < d.ho; ++oy)
                            for (int ox = 0; ox < d.wo; ++ox) {
                                double gv = g[(static_cast<size_t>(oc) * d.ho + oy) * d.wo + ox];
                                if (gv == 0.0) continue;
                                for (int ic = 0; ic < d.cin; ++ic)
                                    for (int ky = 0; ky < d.kh; ++ky) {
                                        int iy = oy - d.ph + ky * d.dh;
                                        if (iy < 0 || iy >= d.h) continue;
                                        for (int kx = 0; kx < d.kw; ++kx) {
                                            int ix = ox - d.pw + kx * d.dw;
                                            if (ix < 0 || ix >= d.w) continue;
                                            buf[((static_cast<size_t>(oc) * d.cin + ic) * d.kh + ky) * d.kw +
                                                kx] +=
                                                gv * iv[(static_cast<size_t>(ic) * d.h + iy) * d.w + ix];
                                        }
                                    }
                            }
                }
            });
    }
    return out;
}

Tensor add_channel_bias(Tape* tape, const Tensor& x, const Tensor& b) {
    require(x.rank() == 3, "add_channel_bias: input must be C x H x W");
    require(b.rank() == 1 && b.dim(0) == x.dim(0),
            "add_channel_bias: bias length must equal channel count");
    const int c = x.dim(0), hw = x.dim(1) * x.dim(2);
    Tensor out = x;
    out.node = -1;
    for (int ch = 0; ch < c; ++ch) {
        double bv = b.data[static_cast<size_t>(ch)];
        for (int i = 0; i < hw; ++i) out.data[static_cast<size_t>(ch * hw + i)] += bv;
    }
    if (tape && (on_tape(x) || on_tape(b))) {
        int nx = x.node, nb = b.node;
        out.node = tape->record(out.size(), [nx, nb, c, hw](Tape& t, const std::vector<double>& g) {
            if (nx >= 0) t.accum(nx, g);
            if (nb >= 0) {
                auto& buf = t.grad_buf(nb);
                for (int ch = 0; ch < c; ++ch) {
                    double acc = 0.0;
                    for (int i = 0; i < hw; ++i) acc += g[static_cast<size_t>(ch * hw + i)];
                    buf[static_cast<size_t>(ch)] += acc;
                }
            }
        });
    }
    return out;
}

// ---- nonlinearities ------------------------------------------------------------

Tensor sigmoid(Tape* tape, const Tensor& x) {
    Tensor out = x;
    out.node = -1;
    for (auto& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
    if (tape && on_tape(x)) {
        int nx = x.node;
        std::vector<double> y = out.data;
        out.node = tape->record(out.size(), [nx, y = std::move(y)](Tape& t, const std::vector<double>& g) {
            auto& buf = t.grad_buf(nx);
            for (size_t i = 0; i < g.size(); ++i) buf[i] += g[i] * y[i] * (1.0 - y[i]);
        });
    }
    return out;
}

Tensor tanh_op(Tape* tape, const Tensor& x) {
    Tensor out = x;
    out.node = -1;
    for (auto& v : out.data) v = std::tanh(v);
    if (tape && on_tape(x)) {
        int nx = x.node;
        std::vector<double> y = out.data;
        out.node = tape->record(out.size(), [nx, y = std::move(y)](Tape& t, const std::vector<double>& g) {
            auto& buf = t.grad_buf(nx);
            for (size_t i = 0; i < g.size(); ++i) buf[i] += g[i] * (1.0 - y[i] * y[i]);
        });
    }
    return out;
}

Tensor leaky_relu(Tape* tape, const Tensor& x, double slope) {
    Tensor out = x;
    out.node = -1;
    for (auto& v : out.data) v = v >= 0.0 ? v : slope * v;
    if (tape && on_tape(x)) {
        int nx = x.node;
        std::vector<double> xv = x.data;
        out.node =
            tape->record(out.size(), [nx, slope, xv = std::move(xv)](Tape& t, const std::vector<double>& g) {
                auto& buf = t.grad_buf(nx);
                for (size_t i = 0; i < g.size(); ++i) buf[i] += g[i] * (xv[i] >= 0.0 ? 1.0 : slope);
            });
    }
    return out;
}

Tensor exp_op(Tape* tape, const Tensor& x) {
    Tensor out = x;
    out.node = -1;
    for (auto& v : out.data) v = std::exp(v);
    if (tape && on_tape(x)) {
        int nx = x.node;
        std::vector<double> y = out.data;
        out.node = tape->record(out.size(), [nx, y = std::move(y)](Tape& t, const std::vector<double>& g) {
            auto& buf = t.grad_buf(nx);
            for (size_t i = 0; i < g.size(); ++i) buf[i] += g[i] * y[i];
        });
    }
    return out;
}

// ---- reductions / shape ---------------------------------------------------------

Tensor sum(Tape* tape, const Tensor& x) {
    double acc = 0.0;
    for (double v : x.data) acc += v;
    Tensor out = Tensor::scalar(acc);
    if (tape && on_tape(x)) {
        int nx = x.node;
        int n = x.size();
        out.node = tape->record(1, [nx, n](Tape& t, const std::vector<double>& g) {
            auto& buf = t.grad_buf(nx);
            for (int i = 0; i < n; ++i) buf[static_cast<size_t>(i)] += g[0];
        });
    }
    return out;
}

Tensor dot(Tape* tape, const Tensor& a, const Tensor& b) {
    require(a.size() == b.size(), "dot: operand lengths differ");
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i)
        acc += a.data[static_cast<size_t>(i)] * b.data[static_cast<size_t>(i)];
    Tensor out = Tensor::scalar(acc);
    if (tape && (on_tape(a) || on_tape(b))) {
        int na = a.node, nb = b.node;
        std::vector<double> av = a.data, bv = b.data;
        out.node =
            tape->record(1, [na, nb, av = std::move(av), bv = std::move(bv)](Tape& t, const std::vector<double>& g) {
                if (na >= 0) {
                    auto& buf = t.grad_buf(na);
                    for (size_t i = 0; i < bv.size(); ++i) buf[i] += g[0] * bv[i];
                }
                if (nb >= 0) {
                    auto& buf = t.grad_buf(nb);
                    for (size_t i = 0; i < av.size(); ++i) buf[i] += g[0] * av[i];
                }
            });
    }
    return out;
}

Tensor reshape(Tape* tape, const Tensor& x, std::vector<int> shape) {
    require(shape_size(shape) == x.size(), "reshape: element count must be preserved, " +
                                               shape_str(x.shape) + " -> " + shape_str(shape));
    Tensor out = x;
    out.shape = std::move(shape);
    out.node = -1;
    if (tape && on_tape(x)) {
        int nx = x.node;
        out.node = tape->record(out.size(),
                                [nx](Tape& t, const std::vector<double>& g) { t.accum(nx, g); });
    }
    return out;
}

Tensor concat_cols(Tape* tape, const std::vector<Tensor>& blocks) {
    require(!blocks.empty(), "concat_cols: no blocks");
    const int rows = blocks[0].dim(0);
    int cols = 0;
    bool any_tape = false;
    for (const auto& b : blocks) {
        require(b.rank() == 2, "concat_cols: blocks must be 2-D");
        require(b.dim(0) == rows, "concat_cols: row count mismatch");
        cols += b.dim(1);
        any_tape = any_tape || on_tape(b);
    }
    Tensor out = Tensor::zeros({rows, cols});
    int off = 0;
    for (const auto& b : blocks) {
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < b.dim(1); ++c) out.at(r, off + c) = b.at(r, c);
        off += b.dim(1);
    }
    if (tape && any_tape) {
        std::vector<int> nodes, widths;
        for (const auto& b : blocks) {
            nodes.push_back(b.node);
            widths.push_back(b.dim(1));
        }
        out.node = tape->record(
            out.size(),
            [nodes = std::move(nodes), widths = std::move(widths), rows, cols](Tape& t,
                                                                               const std::vector<double>& g) {
                int off = 0;
                for (size_t bi = 0; bi < nodes.size(); ++bi) {
                    int w = widths[bi];
                    if (nodes[bi] >= 0) {
                        auto& buf = t.grad_buf(nodes[bi]);
                        for (int r = 0; r < rows; ++r)
                            for (int c = 0; c < w; ++c)
                                buf[static_cast<size_t>(r * w + c)] +=
                                    g[static_cast<size_t>(r * cols + off + c)];
                    }
                    off += w;
                }
            });
    }
    return out;
}

// ---- Adam -----------------------------------------------------------------------

void Adam::step(const std::vector<Param*>& params) {
    for (Param* p : params) {
        if (p->grad.size() != p->value.data.size())
            throw ContractError("optimizer_step: gradient missing or mis-sized for " + p->name);
    }
    ++step_count_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
    for (Param* p : params) {
        auto& mo = state_[p];
        if (mo.m.empty()) {
            mo.m.assign(p->value.data.size(), 0.0);
            mo.v.assign(p->value.data.size(), 0.0);
        }
        for (size_t i = 0; i < p->value.data.size(); ++i) {
            double g = p->grad[i];
            mo.m[i] = cfg_.beta1 * mo.m[i] + (1.0 - cfg_.beta1) * g;
            mo.v[i] = cfg_.beta2 * mo.v[i] + (1.0 - cfg_.beta2) * g * g;
            double mhat = mo.m[i] / bc1;
            double vhat = mo.v[i] / bc2;
            p->value.data[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
        p->zero_grad();
    }
}

}  // namespace fmuad
