#include "fmuad/loss.hpp"

namespace fmuad {

namespace {

void check_batch(const std::vector<Tensor>& truths, const std::vector<Tensor>& preds) {
    if (truths.size() != preds.size())
        throw ContractError("forecast_loss: truth/prediction counts differ");
    if (truths.empty()) throw ContractError("forecast_loss: empty batch");
    for (size_t i = 0; i < truths.size(); ++i)
        if (truths[i].shape != preds[i].shape)
            throw ContractError("forecast_loss: shape mismatch at batch index " + std::to_string(i) +
                                ": " + shape_str(truths[i].shape) + " vs " +
                                shape_str(preds[i].shape));
}

}  // namespace

Tensor forecast_loss(Tape* tape, const std::vector<Tensor>& truths,
                     const std::vector<Tensor>& preds) {
    check_batch(truths, preds);
    Tensor total;
    for (size_t i = 0; i < truths.size(); ++i) {
        Tensor diff = sub(tape, truths[i], preds[i]);
        Tensor sq = sum(tape, hadamard(tape, diff, diff));
        total = i == 0 ? sq : add(tape, total, sq);
    }
    return scale(tape, total, 1.0 / static_cast<double>(truths.size()));
}

Tensor compactness_loss(Tape* tape, const std::vector<Tensor>& preds) {
    const size_t b = preds.size();
    if (b < 2) throw ContractError("compactness_loss: batch size must be >= 2");
    for (const auto& p : preds)
        if (p.shape != preds.front().shape)
            throw ContractError("compactness_loss: predictions must share one shape");
    const int n = preds.front().rank() == 2 ? preds.front().dim(1) : preds.front().size();

    Tensor sum_all;
    for (size_t i = 0; i < b; ++i) sum_all = i == 0 ? preds[i] : add(tape, sum_all, preds[i]);

    Tensor total;
    const double inv = 1.0 / static_cast<double>(b - 1);
    for (size_t i = 0; i < b; ++i) {
        // leave-one-out mean = (sum_all - pred_i) / (b-1)
        Tensor loo = scale(tape, sub(tape, sum_all, preds[i]), inv);
        Tensor z = sub(tape, preds[i], loo);
        Tensor sq = sum(tape, hadamard(tape, z, z));
        total = i == 0 ? sq : add(tape, total, sq);
    }
    return scale(tape, total, 1.0 / (static_cast<double>(n) * static_cast<double>(b)));
}

Tensor training_loss(Tape* tape, const Tensor& l1, const Tensor& l2) {
    if (l1.size() != 1 || l2.size() != 1)
        throw ContractError("training_loss: l1 and l2 must be scalars");
    Tensor shifted = add(tape, l2, Tensor::scalar(kLossEpsilon));
    return hadamard(tape, shifted, l1);
}

double anomaly_score(const Tensor& truth, const Tensor& pred) {
    if (truth.shape != pred.shape)
        throw ContractError("anomaly_score: shape mismatch " + shape_str(truth.shape) + " vs " +
                            shape_str(pred.shape));
    double acc = 0.0;
    for (int i = 0; i < truth.size(); ++i) {
        double d = truth.data[static_cast<size_t>(i)] - pred.data[static_cast<size_t>(i)];
        acc += d * d;
    }
    return acc;
}

BatchLoss batch_loss_with_grads(const std::vector<Tensor>& truths,
                                const std::vector<Tensor>& preds, bool include_compactness) {
    check_batch(truths, preds);
    const size_t b = truths.size();
    if (b < 2) throw ContractError("batch loss: training batches require b >= 2");
    const size_t sz = truths.front().data.size();
    const int n = preds.front().rank() == 2 ? preds.front().dim(1) : preds.front().size();
    const double bd = static_cast<double>(b);

    BatchLoss out;
    // l1 and its gradient
    std::vector<std::vector<double>> dl1(b, std::vector<double>(sz, 0.0));
    for (size_t i = 0; i < b; ++i) {
        double acc = 0.0;
        for (size_t j = 0; j < sz; ++j) {
            double d = truths[i].data[j] - preds[i].data[j];
            acc += d * d;
            dl1[i][j] = -2.0 * d / bd;
        }
        out.l1 += acc;
    }
    out.l1 /= bd;

    // l2 and its gradient. Column sums of z vanish, so
    // dl2/dpred_i = 2 * z_i / (n * (b-1)).
    std::vector<double> mean_sum(sz, 0.0);
    for (size_t i = 0; i < b; ++i)
        for (size_t j = 0; j < sz; ++j) mean_sum[j] += preds[i].data[j];
    std::vector<std::vector<double>> z(b, std::vector<double>(sz, 0.0));
    const double inv_loo = 1.0 / (bd - 1.0);
    for (size_t i = 0; i < b; ++i) {
        double acc = 0.0;
        for (size_t j = 0; j < sz; ++j) {
            double loo = (mean_sum[j] - preds[i].data[j]) * inv_loo;
            z[i][j] = preds[i].data[j] - loo;
            acc += z[i][j] * z[i][j];
        }
        out.l2 += acc;
    }
    out.l2 /= static_cast<double>(n) * bd;

    out.dloss_dpred.assign(b, std::vector<double>(sz, 0.0));
    if (include_compactness) {
        out.loss = (kLossEpsilon + out.l2) * out.l1;
        const double dl2_coef = 2.0 / (static_cast<double>(n) * (bd - 1.0));
        for (size_t i = 0; i < b; ++i)
            for (size_t j = 0; j < sz; ++j)
                out.dloss_dpred[i][j] =
                    (kLossEpsilon + out.l2) * dl1[i][j] + out.l1 * dl2_coef * z[i][j];
    } else {
        out.loss = out.l1;
        for (size_t i = 0; i < b; ++i) out.dloss_dpred[i] = dl1[i];
    }
    return out;
}

}  // namespace fmuad
