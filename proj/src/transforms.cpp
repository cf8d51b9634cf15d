#include "fmuad/transforms.hpp"

#include <cmath>
#include <numbers>

namespace fmuad {

namespace {
constexpr double kZeroNorm = 1e-12;
}

WindowView make_window_view(const SeriesMatrix& series, int t, int tau, int k) {
    if (k >= tau) throw ContractError("window view: requires k < tau");
    if (t + 1 < tau)
        throw ContractError("window view: t=" + std::to_string(t) + " has fewer than tau=" +
                            std::to_string(tau) + " preceding steps");
    if (t >= series.steps()) throw ContractError("window view: t beyond series end");

    const int m = series.features();
    WindowView v;
    v.t = t;
    v.instance = Tensor::zeros({m, tau});
    const int start = t - tau + 1;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < tau; ++c) v.instance.at(r, c) = series.values.at(r, start + c);
    v.history = Tensor::zeros({m, tau - k});
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < tau - k; ++c) v.history.at(r, c) = v.instance.at(r, c);
    v.target = Tensor::zeros({m, k});
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < k; ++c) v.target.at(r, c) = v.instance.at(r, tau - k + c);
    return v;
}

SlicedWindows slice_windows(const Tensor& instance, int k, int s) {
    if (instance.rank() != 2) throw ContractError("slice_windows: instance must be 2-D");
    const int m = instance.dim(0);
    const int tau = instance.dim(1);
    if (k > tau) throw ContractError("slice_windows: k=" + std::to_string(k) + " exceeds tau=" +
                                     std::to_string(tau));
    if (s < 1) throw ContractError("slice_windows: stride must be >= 1");

    SlicedWindows out;
    const int d = (tau - k) / s;
    out.history.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        Tensor w = Tensor::zeros({m, k});
        const int start = i * s;
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < k; ++c) w.at(r, c) = instance.at(r, start + c);
        out.history.push_back(std::move(w));
    }
    out.target = Tensor::zeros({m, k});
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < k; ++c) out.target.at(r, c) = instance.at(r, tau - k + c);
    return out;
}

Tensor signature_matrix(const Tensor& window) {
    if (window.rank() != 2) throw ContractError("signature_matrix: window must be 2-D");
    const int m = window.dim(0);
    const int k = window.dim(1);

    std::vector<double> norms(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int c = 0; c < k; ++c) acc += window.at(i, c) * window.at(i, c);
        norms[static_cast<size_t>(i)] = std::sqrt(acc);
    }

    Tensor s = Tensor::zeros({m, m});
    for (int i = 0; i < m; ++i) {
        s.at(i, i) = 1.0;  // unit diagonal by convention, also for dead rows
        for (int j = i + 1; j < m; ++j) {
            double value = 0.0;
            if (norms[static_cast<size_t>(i)] >= kZeroNorm && norms[static_cast<size_t>(j)] >= kZeroNorm) {
                double ip = 0.0;
                for (int c = 0; c < k; ++c) ip += window.at(i, c) * window.at(j, c);
                value = ip / (norms[static_cast<size_t>(i)] * norms[static_cast<size_t>(j)]);
                // guard tiny numeric excursions outside [-1, 1]
                if (value > 1.0) value = 1.0;
                if (value < -1.0) value = -1.0;
            }
            s.at(i, j) = value;
            s.at(j, i) = value;
        }
    }
    return s;
}

Tensor frequency_matrix(const Tensor& window) {
    if (window.rank() != 2) throw ContractError("frequency_matrix: window must be 2-D");
    const int m = window.dim(0);
    const int k = window.dim(1);
    if (k % 2 != 0) throw ContractError("frequency_matrix: window length must be even, got k=" +
                                        std::to_string(k));

    const int bins = k / 2;
    Tensor f = Tensor::zeros({m, bins});
    const double two_pi = 2.0 * std::numbers::pi;
    for (int r = 0; r < m; ++r) {
        for (int j = 1; j <= bins; ++j) {
            double re = 0.0, im = 0.0;
            for (int l = 0; l < k; ++l) {
                double angle = two_pi * static_cast<double>(j) * static_cast<double>(l) /
                               static_cast<double>(k);
                re += window.at(r, l) * std::cos(angle);
                im += window.at(r, l) * std::sin(angle);
            }
            re /= static_cast<double>(k);
            im /= static_cast<double>(k);
            f.at(r, j - 1) = std::sqrt(re * re + im * im);
        }
    }
    return f;
}

Tensor build_target(const Tensor& window) {
    Tensor s = signature_matrix(window);
    Tensor f = frequency_matrix(window);
    return concat_cols(nullptr, {s, f, window});
}

}  // namespace fmuad
