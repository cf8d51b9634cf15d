#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fmuad/rng.hpp"
#include "fmuad/transforms.hpp"
#include "oracles.hpp"

using namespace fmuad;

namespace {

Tensor random_window(Rng& rng, int m, int k) {
    Tensor w = Tensor::zeros({m, k});
    for (auto& v : w.data) v = rng.uniform(-2.0, 2.0);
    return w;
}

}  // namespace

TEST_CASE("slice_windows counts") {
    SUBCASE("tau=500 k=30 s=10 gives 47 history windows") {
        Tensor inst = Tensor::zeros({2, 500});
        auto sliced = slice_windows(inst, 30, 10);
        CHECK(sliced.history.size() == 47);
        CHECK(sliced.target.shape == std::vector<int>{2, 30});
    }
    SUBCASE("tau=k degenerates to target only") {
        Tensor inst = Tensor::zeros({3, 30});
        auto sliced = slice_windows(inst, 30, 10);
        CHECK(sliced.history.empty());
        CHECK(sliced.target.shape == std::vector<int>{3, 30});
    }
    SUBCASE("tau=100 k=30 s=30 gives 2") {
        Tensor inst = Tensor::zeros({1, 100});
        CHECK(slice_windows(inst, 30, 30).history.size() == 2);
    }
    SUBCASE("k > tau rejected") {
        Tensor inst = Tensor::zeros({1, 10});
        CHECK_THROWS_AS(slice_windows(inst, 11, 1), ContractError);
    }
    SUBCASE("count matches floor((tau-k)/s) for random shapes") {
        Rng rng(31);
        for (int trial = 0; trial < 50; ++trial) {
            int k = 2 + static_cast<int>(rng.below(20));
            int tau = k + static_cast<int>(rng.below(100));
            int s = 1 + static_cast<int>(rng.below(15));
            Tensor inst = Tensor::zeros({1, tau});
            auto sliced = slice_windows(inst, k, s);
            CHECK(static_cast<int>(sliced.history.size()) == (tau - k) / s);
        }
    }
    SUBCASE("windows are contiguous time slices in order") {
        Tensor inst = Tensor::zeros({1, 12});
        for (int i = 0; i < 12; ++i) inst.data[static_cast<size_t>(i)] = i;
        auto sliced = slice_windows(inst, 4, 3);
        REQUIRE(sliced.history.size() == 2);
        CHECK(sliced.history[0].data == std::vector<double>{0, 1, 2, 3});
        CHECK(sliced.history[1].data == std::vector<double>{3, 4, 5, 6});
        CHECK(sliced.target.data == std::vector<double>{8, 9, 10, 11});
    }
}

TEST_CASE("signature_matrix examples") {
    SUBCASE("positively scaled rows have cosine 1") {
        Tensor w({2, 3}, {1, 2, 3, 2, 4, 6});
        Tensor s = signature_matrix(w);
        CHECK(s.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("orthogonal rows") {
        Tensor w({2, 2}, {1, 0, 0, 1});
        CHECK(signature_matrix(w).at(0, 1) == doctest::Approx(0.0));
    }
    SUBCASE("hand-computed cosines") {
        Tensor w1({2, 2}, {1, 1, 1, -1});
        CHECK(signature_matrix(w1).at(0, 1) == doctest::Approx(0.0));
        Tensor w2({2, 2}, {1, 2, 2, 3});
        CHECK(signature_matrix(w2).at(0, 1) ==
              doctest::Approx(8.0 / (std::sqrt(5.0) * std::sqrt(13.0))).epsilon(1e-12));
    }
    SUBCASE("zero-norm rows") {
        Tensor w({2, 3}, {0, 0, 0, 1, 2, 3});
        Tensor s = signature_matrix(w);
        CHECK(s.at(0, 0) == 1.0);
        CHECK(s.at(0, 1) == 0.0);
        CHECK(s.at(1, 0) == 0.0);
        CHECK(s.at(1, 1) == 1.0);
    }
}

TEST_CASE("signature invariants on random windows") {
    Rng rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        int m = 1 + static_cast<int>(rng.below(6));
        int k = 2 + static_cast<int>(rng.below(20));
        Tensor w = random_window(rng, m, k);
        Tensor s = signature_matrix(w);
        for (int i = 0; i < m; ++i) {
            CHECK(s.at(i, i) == 1.0);
            for (int j = 0; j < m; ++j) {
                CHECK(s.at(i, j) == s.at(j, i));
                CHECK(s.at(i, j) >= -1.0);
                CHECK(s.at(i, j) <= 1.0);
            }
        }
        // positive per-row rescaling leaves the matrix unchanged
        Tensor scaled = w;
        for (int i = 0; i < m; ++i) {
            double c = rng.uniform(0.1, 10.0);
            for (int c2 = 0; c2 < k; ++c2) scaled.at(i, c2) *= c;
        }
        Tensor s2 = signature_matrix(scaled);
        for (int i = 0; i < s.size(); ++i)
            CHECK(std::fabs(s.data[static_cast<size_t>(i)] - s2.data[static_cast<size_t>(i)]) <=
                  1e-12);
    }
}

TEST_CASE("frequency_matrix examples") {
    SUBCASE("constant row has zero stored magnitudes") {
        Tensor w({1, 8}, std::vector<double>(8, 3.7));
        Tensor f = frequency_matrix(w);
        CHECK(f.shape == std::vector<int>{1, 4});
        for (double v : f.data) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("pure cosine puts 0.5 in bin 1") {
        const int k = 8;
        Tensor w = Tensor::zeros({1, k});
        for (int l = 0; l < k; ++l)
            w.data[static_cast<size_t>(l)] = std::cos(2.0 * std::numbers::pi * l / k);
        Tensor f = frequency_matrix(w);
        CHECK(f.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
        for (int j = 1; j < k / 2; ++j) CHECK(f.at(0, j) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("odd k rejected") {
        Tensor w({1, 5}, {1, 2, 3, 4, 5});
        CHECK_THROWS_AS(frequency_matrix(w), ContractError);
    }
}

TEST_CASE("frequency_matrix matches naive DFT oracle") {
    Rng rng(41);
    for (int k : {4, 8, 16, 30}) {
        Tensor w = random_window(rng, 3, k);
        Tensor f = frequency_matrix(w);
        for (int r = 0; r < 3; ++r) {
            std::vector<double> row(static_cast<size_t>(k));
            for (int c = 0; c < k; ++c) row[static_cast<size_t>(c)] = w.at(r, c);
            auto mags = oracles::dft_magnitudes_naive(row);
            for (int j = 1; j <= k / 2; ++j)
                CHECK(std::fabs(f.at(r, j - 1) - mags[static_cast<size_t>(j)]) <= 1e-9);
            // conjugate symmetry of the full spectrum justifies storing half
            for (int j = 1; j < k; ++j)
                CHECK(mags[static_cast<size_t>(j)] ==
                      doctest::Approx(mags[static_cast<size_t>(k - j)]).epsilon(1e-9));
        }
    }
}

TEST_CASE("build_target layout") {
    SUBCASE("m=1 k=2 gives 1x4") {
        Tensor w({1, 2}, {1.0, 2.0});
        Tensor y = build_target(w);
        CHECK(y.shape == std::vector<int>{1, 4});
    }
    SUBCASE("m=38 k=30 gives 38x83") {
        Rng rng(43);
        Tensor w = random_window(rng, 38, 30);
        Tensor y = build_target(w);
        CHECK(y.shape == std::vector<int>{38, 83});
    }
    SUBCASE("S block equals signature_matrix exactly") {
        Rng rng(47);
        Tensor w = random_window(rng, 4, 8);
        Tensor y = build_target(w);
        Tensor s = signature_matrix(w);
        TargetLayout lay{4, 8};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < lay.sig_cols(); ++j) CHECK(y.at(i, j) == s.at(i, j));
        Tensor f = frequency_matrix(w);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < lay.freq_cols(); ++j) CHECK(y.at(i, lay.freq_off() + j) == f.at(i, j));
            for (int j = 0; j < lay.win_cols(); ++j) CHECK(y.at(i, lay.win_off() + j) == w.at(i, j));
        }
    }
}
