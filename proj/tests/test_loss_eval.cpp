#include <doctest.h>

#include <cmath>
#include <vector>

#include "fmuad/eval.hpp"
#include "fmuad/loss.hpp"
#include "fmuad/rng.hpp"
#include "oracles.hpp"

using namespace fmuad;

namespace {

Tensor rt(Rng& rng, std::vector<int> shape, double lo = -1.0, double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

std::vector<bool> to_flags(std::initializer_list<int> bits) {
    std::vector<bool> out;
    for (int b : bits) out.push_back(b != 0);
    return out;
}

}  // namespace

TEST_CASE("hand-worked loss example") {
    // b = 2 pairs of 1x2 matrices.
    std::vector<Tensor> truths = {Tensor({1, 2}, {1.0, 2.0}), Tensor({1, 2}, {0.0, 0.0})};
    std::vector<Tensor> preds = {Tensor({1, 2}, {2.0, 4.0}), Tensor({1, 2}, {1.0, 2.0})};
    // ||diff_1||^2 = 1 + 4 = 5, ||diff_2||^2 = 1 + 4 = 5, l1 = (5+5)/2 = 5.
    // With b = 2 the leave-one-out deviation is z_i = pred_i - pred_other,
    // so z_1 = (1, 2), z_2 = -(1, 2), |z_i|^2 = 5 each; with n = 2 columns
    // l2 = (1/(n*b)) * (5+5) = 2.5.
    Tensor l1 = forecast_loss(nullptr, truths, preds);
    Tensor l2 = compactness_loss(nullptr, preds);
    CHECK(l1.data[0] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(l2.data[0] == doctest::Approx(2.5).epsilon(1e-12));
    Tensor l = training_loss(nullptr, l1, l2);
    CHECK(l.data[0] == doctest::Approx((kLossEpsilon + 2.5) * 5.0).epsilon(1e-12));
}

TEST_CASE("pinned loss values") {
    // Constructed so l1 = 5 and l2 = 4 exactly, hence l = 20.00005.
    // Scalars: l1 = ((4-1)^2 + (0-(-1))^2)/2 = 5; z = +-2, so
    // l2 = (4+4)/(1*2) = 4.
    std::vector<Tensor> preds = {Tensor({1, 1}, {1.0}), Tensor({1, 1}, {-1.0})};
    std::vector<Tensor> truths = {Tensor({1, 1}, {4.0}), Tensor({1, 1}, {0.0})};
    double l1 = forecast_loss(nullptr, truths, preds).data[0];
    double l2 = compactness_loss(nullptr, preds).data[0];
    CHECK(l1 == 5.0);
    CHECK(l2 == 4.0);
    Tensor l = training_loss(nullptr, Tensor::scalar(l1), Tensor::scalar(l2));
    CHECK(l.data[0] == doctest::Approx(20.00005).epsilon(1e-14));
}

TEST_CASE("loss properties") {
    Rng rng(53);
    SUBCASE("l1 is translation-sensitive but zero at a perfect forecast") {
        std::vector<Tensor> truths, preds;
        for (int i = 0; i < 3; ++i) {
            Tensor t = rt(rng, {2, 3});
            truths.push_back(t);
            preds.push_back(t);
        }
        CHECK(forecast_loss(nullptr, truths, preds).data[0] == 0.0);
    }
    SUBCASE("l2 is invariant to a shared translation of all predictions") {
        std::vector<Tensor> preds, shifted;
        Tensor offset = rt(rng, {2, 3}, -5.0, 5.0);
        for (int i = 0; i < 4; ++i) {
            Tensor p = rt(rng, {2, 3});
            preds.push_back(p);
            Tensor q = p;
            for (int j = 0; j < q.size(); ++j)
                q.data[static_cast<size_t>(j)] += offset.data[static_cast<size_t>(j)];
            shifted.push_back(q);
        }
        CHECK(compactness_loss(nullptr, preds).data[0] ==
              doctest::Approx(compactness_loss(nullptr, shifted).data[0]).epsilon(1e-12));
    }
    SUBCASE("both scale quadratically") {
        std::vector<Tensor> truths, preds, truths2, preds2;
        for (int i = 0; i < 3; ++i) {
            Tensor t = rt(rng, {2, 2}), p = rt(rng, {2, 2});
            truths.push_back(t);
            preds.push_back(p);
            Tensor t2 = t, p2 = p;
            for (auto& v : t2.data) v *= 3.0;
            for (auto& v : p2.data) v *= 3.0;
            truths2.push_back(t2);
            preds2.push_back(p2);
        }
        CHECK(forecast_loss(nullptr, truths2, preds2).data[0] ==
              doctest::Approx(9.0 * forecast_loss(nullptr, truths, preds).data[0]).epsilon(1e-12));
        CHECK(compactness_loss(nullptr, preds2).data[0] ==
              doctest::Approx(9.0 * compactness_loss(nullptr, preds).data[0]).epsilon(1e-12));
    }
    SUBCASE("compactness requires at least two members") {
        std::vector<Tensor> one = {rt(rng, {2, 2})};
        CHECK_THROWS_AS(compactness_loss(nullptr, one), ContractError);
    }
}

TEST_CASE("anomaly_score is the squared Frobenius forecast error") {
    Tensor truth({2, 2}, {1.0, 2.0, 3.0, 4.0});
    Tensor pred({2, 2}, {0.0, 2.0, 5.0, 1.0});
    CHECK(anomaly_score(truth, pred) == doctest::Approx(1.0 + 0.0 + 4.0 + 9.0).epsilon(1e-14));
    Rng rng(59);
    std::vector<Tensor> truths = {rt(rng, {3, 4}), rt(rng, {3, 4})};
    std::vector<Tensor> preds = {rt(rng, {3, 4}), rt(rng, {3, 4})};
    double mean_score = (anomaly_score(truths[0], preds[0]) + anomaly_score(truths[1], preds[1])) / 2.0;
    CHECK(forecast_loss(nullptr, truths, preds).data[0] ==
          doctest::Approx(mean_score).epsilon(1e-12));
}

TEST_CASE("closed-form batch gradients agree with the tape") {
    Rng rng(61);
    for (bool compact : {true, false}) {
        for (int trial = 0; trial < 10; ++trial) {
            const int b = 2 + static_cast<int>(rng.below(5));
            std::vector<Tensor> truths, preds;
            std::vector<Param> pred_params;
            pred_params.reserve(static_cast<size_t>(b));
            for (int i = 0; i < b; ++i) {
                truths.push_back(rt(rng, {2, 3}));
                Tensor p = rt(rng, {2, 3});
                preds.push_back(p);
                pred_params.emplace_back("p" + std::to_string(i), p);
            }

            BatchLoss bl = batch_loss_with_grads(truths, preds, compact);

            Tape tape;
            std::vector<Tensor> watched;
            for (auto& pp : pred_params) watched.push_back(tape.watch(pp));
            Tensor l1 = forecast_loss(&tape, truths, watched);
            Tensor loss = l1;
            Tensor l2 = Tensor::scalar(0.0);
            if (compact) {
                l2 = compactness_loss(&tape, watched);
                loss = training_loss(&tape, l1, l2);
            }
            tape.backward(loss);

            CHECK(bl.l1 == doctest::Approx(l1.data[0]).epsilon(1e-12));
            if (compact) CHECK(bl.l2 == doctest::Approx(l2.data[0]).epsilon(1e-12));
            CHECK(bl.loss == doctest::Approx(loss.data[0]).epsilon(1e-12));
            for (int i = 0; i < b; ++i)
                for (size_t j = 0; j < bl.dloss_dpred[static_cast<size_t>(i)].size(); ++j)
                    CHECK(bl.dloss_dpred[static_cast<size_t>(i)][j] ==
                          doctest::Approx(pred_params[static_cast<size_t>(i)].grad[j])
                              .epsilon(1e-9));
        }
    }
}

TEST_CASE("point_adjust examples") {
    SUBCASE("one hit floods the whole labeled run") {
        auto pred = to_flags({0, 0, 1, 0, 0, 0});
        auto labels = to_flags({0, 1, 1, 1, 0, 0});
        auto adj = point_adjust(pred, labels);
        CHECK(adj == to_flags({0, 1, 1, 1, 0, 0}));
    }
    SUBCASE("misses and false positives are untouched") {
        auto pred = to_flags({1, 0, 0, 0, 1, 0});
        auto labels = to_flags({0, 1, 1, 0, 0, 0});
        auto adj = point_adjust(pred, labels);
        CHECK(adj == to_flags({1, 0, 0, 0, 1, 0}));
    }
    SUBCASE("matches the independent formulation on random inputs") {
        Rng rng(67);
        for (int trial = 0; trial < 200; ++trial) {
            int n = 1 + static_cast<int>(rng.below(40));
            std::vector<bool> pred(static_cast<size_t>(n)), labels(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                pred[static_cast<size_t>(i)] = rng.below(3) == 0;
                labels[static_cast<size_t>(i)] = rng.below(3) == 0;
            }
            CHECK(point_adjust(pred, labels) == oracles::point_adjust_naive(pred, labels));
        }
    }
}

TEST_CASE("prf1 counting") {
    auto pred = to_flags({1, 1, 0, 0, 1});
    auto labels = to_flags({1, 0, 1, 0, 1});
    Prf1 r = prf1(pred, labels);
    CHECK(r.tp == 2);
    CHECK(r.fp == 1);
    CHECK(r.fn == 1);
    CHECK(r.precision == doctest::Approx(2.0 / 3.0));
    CHECK(r.recall == doctest::Approx(2.0 / 3.0));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));

    // zero denominators yield 0, not NaN
    Prf1 empty = prf1(to_flags({0, 0}), to_flags({0, 0}));
    CHECK(empty.precision == 0.0);
    CHECK(empty.recall == 0.0);
    CHECK(empty.f1 == 0.0);
}

TEST_CASE("select_threshold") {
    SUBCASE("simple separable case") {
        std::vector<double> scores = {0.1, 0.2, 5.0, 0.3, 4.0};
        auto labels = to_flags({0, 0, 1, 0, 1});
        EvalReport r = select_threshold(scores, labels);
        CHECK(r.adjusted.f1 == doctest::Approx(1.0));
        CHECK(r.threshold >= 0.3);
        CHECK(r.threshold < 4.0);
    }
    SUBCASE("matches brute force on 500 random instances") {
        Rng rng(71);
        for (int trial = 0; trial < 500; ++trial) {
            int n = 2 + static_cast<int>(rng.below(60));
            std::vector<double> scores(static_cast<size_t>(n));
            std::vector<bool> labels(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                // draw from a small value set so ties are frequent
                scores[static_cast<size_t>(i)] = rng.below(8) * 0.125;
                labels[static_cast<size_t>(i)] = rng.below(4) == 0;
            }
            auto [thr, f1] = oracles::best_threshold_brute(scores, labels);
            EvalReport r = select_threshold(scores, labels);
            CHECK(r.adjusted.f1 == doctest::Approx(f1).epsilon(1e-12));
            if (std::isinf(thr))
                CHECK(std::isinf(r.threshold));
            else
                CHECK(r.threshold == doctest::Approx(thr));
        }
    }
}

TEST_CASE("report formats") {
    EvalReport r;
    r.threshold = 1.5;
    r.adjusted = {0.5, 0.25, 1.0 / 3.0, 2, 2, 6};
    r.raw = {0.25, 0.125, 1.0 / 6.0, 1, 3, 7};
    std::string json = report_json(r);
    CHECK(json.find("\"threshold\"") != std::string::npos);
    CHECK(json.find("\"precision_adjusted\"") != std::string::npos);
    CHECK(json.find("\"recall_adjusted\"") != std::string::npos);
    CHECK(json.find("\"f1_adjusted\"") != std::string::npos);
    CHECK(json.find("\"tp\"") != std::string::npos);
    CHECK(json.find("\"fp\"") != std::string::npos);
    CHECK(json.find("\"fn\"") != std::string::npos);
    std::string text = report_text(r);
    CHECK(text.find("threshold") != std::string::npos);
    CHECK(text.find("f1") != std::string::npos);
}
