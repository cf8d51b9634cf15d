#ifndef FMUAD_LOSS_HPP
#define FMUAD_LOSS_HPP

#include <vector>

#include "fmuad/tensor.hpp"

namespace fmuad {

// Epsilon of the product loss; keeps the all-zero network off the zero-loss
// trivial solution.
constexpr double kLossEpsilon = 1e-5;

// l1 = (1/b) * sum_i ||Y_i - Yhat_i||_2^2 (squared Frobenius norm per pair).
Tensor forecast_loss(Tape* tape, const std::vector<Tensor>& truths,
                     const std::vector<Tensor>& preds);

// l2 = (1/(n*b)) * sum_i <z_i, z_i> with z_i the leave-one-out deviation of
// prediction i and n the column count of the predictions. Requires b >= 2.
Tensor compactness_loss(Tape* tape, const std::vector<Tensor>& preds);

// l = (epsilon + l2) * l1, differentiable through both factors.
Tensor training_loss(Tape* tape, const Tensor& l1, const Tensor& l2);

// Test-time score: the per-window squared Frobenius forecast error.
double anomaly_score(const Tensor& truth, const Tensor& pred);

// Batch loss values plus the closed-form gradient of the selected objective
// with respect to each prediction. Used by the trainer to seed per-window
// backward passes; must agree with the tape route (checked in tests).
struct BatchLoss {
    double l1 = 0.0;
    double l2 = 0.0;
    double loss = 0.0;  // the optimized objective
    std::vector<std::vector<double>> dloss_dpred;
};
BatchLoss batch_loss_with_grads(const std::vector<Tensor>& truths,
                                const std::vector<Tensor>& preds, bool include_compactness);

}  // namespace fmuad

#endif
