#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "fmuad/checkpoint.hpp"
#include "fmuad/data_io.hpp"
#include "fmuad/rng.hpp"
#include "fmuad/synthetic.hpp"
#include "oracles.hpp"

using namespace fmuad;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("fmuad_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

}  // namespace

TEST_CASE("csv series round trip") {
    TempDir dir;
    SeriesMatrix s;
    s.values = Tensor({3, 4}, {1.0, 2.0, 3.0, 4.0,
                               -0.5, 0.25, 1e-9, 123456.789,
                               0.1, 0.2, 0.3, 0.4});
    write_csv_series(s, dir.file("s.csv"));
    SeriesMatrix back = load_csv_series(dir.file("s.csv"));
    CHECK(back.values.shape == s.values.shape);
    for (int i = 0; i < s.values.size(); ++i)
        CHECK(back.values.data[static_cast<size_t>(i)] == s.values.data[static_cast<size_t>(i)]);
}

TEST_CASE("csv rows are time steps, columns features") {
    TempDir dir;
    write_text(dir.file("t.csv"), "1.0,10.0\n2.0,20.0\n3.0,30.0\n");
    SeriesMatrix s = load_csv_series(dir.file("t.csv"));
    CHECK(s.values.shape == std::vector<int>{2, 3});
    CHECK(s.values.at(0, 0) == 1.0);
    CHECK(s.values.at(0, 2) == 3.0);
    CHECK(s.values.at(1, 1) == 20.0);
}

TEST_CASE("csv parse errors carry location") {
    TempDir dir;
    SUBCASE("bad number") {
        write_text(dir.file("bad.csv"), "1.0,2.0\n3.0,oops\n");
        try {
            load_csv_series(dir.file("bad.csv"));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            std::string msg = e.what();
            CHECK(msg.find("bad.csv") != std::string::npos);
            CHECK(msg.find("2") != std::string::npos);  // line number
        }
    }
    SUBCASE("ragged rows") {
        write_text(dir.file("ragged.csv"), "1.0,2.0\n3.0\n");
        CHECK_THROWS_AS(load_csv_series(dir.file("ragged.csv")), ParseError);
    }
    SUBCASE("empty file") {
        write_text(dir.file("empty.csv"), "");
        CHECK_THROWS_AS(load_csv_series(dir.file("empty.csv")), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_csv_series(dir.file("nope.csv")), ParseError);
    }
}

TEST_CASE("labels io") {
    TempDir dir;
    std::vector<bool> labels = {false, true, true, false, true};
    write_labels(labels, dir.file("l.txt"));
    CHECK(load_labels(dir.file("l.txt")) == labels);

    write_text(dir.file("badl.txt"), "0\n2\n");
    CHECK_THROWS_AS(load_labels(dir.file("badl.txt")), ParseError);
}

TEST_CASE("min-max normalization") {
    SeriesMatrix train;
    train.values = Tensor({2, 3}, {0.0, 5.0, 10.0,
                                   4.0, 4.0, 4.0});  // second feature constant
    NormStats stats = compute_norm_stats(train);
    CHECK(stats.min == std::vector<double>{0.0, 4.0});
    CHECK(stats.max == std::vector<double>{10.0, 4.0});

    SeriesMatrix t1 = train;
    apply_normalization(t1, stats, false);
    CHECK(t1.values.at(0, 0) == 0.0);
    CHECK(t1.values.at(0, 1) == 0.5);
    CHECK(t1.values.at(0, 2) == 1.0);
    // constant features map to 0
    for (int c = 0; c < 3; ++c) CHECK(t1.values.at(1, c) == 0.0);

    // test-split values outside the train range clamp to [-1, 2]
    SeriesMatrix test;
    test.values = Tensor({2, 2}, {-100.0, 100.0, 7.0, 1.0});
    apply_normalization(test, stats, true);
    CHECK(test.values.at(0, 0) == -1.0);
    CHECK(test.values.at(0, 1) == 2.0);
}

TEST_CASE("dataset loader wires the pieces together") {
    TempDir dir;
    write_text(dir.file("train.csv"), "0.0,1.0\n10.0,1.0\n5.0,1.0\n");
    write_text(dir.file("test.csv"), "2.0,1.0\n20.0,1.0\n");
    write_text(dir.file("labels.txt"), "0\n1\n");
    Dataset ds = load_csv_dataset(dir.file("train.csv"), dir.file("test.csv"),
                                  dir.file("labels.txt"));
    CHECK(ds.train.values.at(0, 1) == 1.0);   // 10 -> 1 after min-max
    CHECK(ds.test.values.at(0, 1) == 2.0);    // 20 -> clamped to 2
    CHECK(ds.test_labels == std::vector<bool>{false, true});

    write_text(dir.file("short.txt"), "0\n");
    CHECK_THROWS_AS(
        load_csv_dataset(dir.file("train.csv"), dir.file("test.csv"), dir.file("short.txt")),
        ParseError);
}

TEST_CASE("synthetic generator basics") {
    SyntheticSpec spec = default_synthetic_spec(
        7, {AnomalyKind::FrequencyChange, AnomalyKind::CorrelationChange,
            AnomalyKind::AbruptValue, AnomalyKind::SubtleValue},
        0.05, 5, 4000, 2000);
    spec.validate();
    SyntheticData data = generate_synthetic(spec);
    CHECK(data.train.values.shape == std::vector<int>{5, 4000});
    CHECK(data.test.values.shape == std::vector<int>{5, 2000});
    CHECK(data.labels.size() == 2000);

    // labels are true exactly inside the declared segments
    std::vector<bool> expect(2000, false);
    size_t labeled = 0;
    for (const auto& seg : spec.segments)
        for (int t = seg.start; t < seg.end; ++t) expect[static_cast<size_t>(t)] = true;
    for (size_t i = 0; i < expect.size(); ++i) {
        CHECK(data.labels[i] == expect[i]);
        labeled += expect[i] ? 1u : 0u;
    }
    double fraction = static_cast<double>(labeled) / 2000.0;
    CHECK(fraction >= 0.01);
    CHECK(fraction <= 0.15);

    // deterministic in the seed
    SyntheticData again = generate_synthetic(spec);
    CHECK(again.train.values.data == data.train.values.data);
    CHECK(again.test.values.data == data.test.values.data);

    SyntheticSpec other = spec;
    other.seed = 8;
    SyntheticData diff = generate_synthetic(other);
    CHECK(diff.train.values.data != data.train.values.data);
}

TEST_CASE("single-kind specs keep a valid anomaly fraction") {
    for (AnomalyKind kind : {AnomalyKind::FrequencyChange, AnomalyKind::CorrelationChange,
                             AnomalyKind::AbruptValue, AnomalyKind::SubtleValue}) {
        SyntheticSpec spec = default_synthetic_spec(3, {kind}, 0.05, 5, 2000, 5000);
        CHECK_NOTHROW(spec.validate());
        for (const auto& seg : spec.segments) CHECK(seg.kind == kind);
        CHECK(!spec.segments.empty());
    }
}

TEST_CASE("anomaly patterns land on the designated channels") {
    SyntheticSpec spec;
    spec.m = 5;
    spec.t_train = 3000;
    spec.t_test = 3000;
    spec.seed = 11;
    spec.segments = {
        {500, 700, AnomalyKind::FrequencyChange, -1},
        {1200, 1400, AnomalyKind::CorrelationChange, -1},
        {2000, 2030, AnomalyKind::AbruptValue, -1},
    };
    SyntheticData data = generate_synthetic(spec);

    SyntheticSpec clean = spec;
    clean.segments.clear();
    SyntheticData base = generate_synthetic(clean);

    auto row = [](const SeriesMatrix& s, int r, int from, int len) {
        std::vector<double> out(static_cast<size_t>(len));
        for (int i = 0; i < len; ++i) out[static_cast<size_t>(i)] = s.values.at(r, from + i);
        return out;
    };

    SUBCASE("frequency change doubles the dominant bin of channel 2") {
        // compare dominant DFT bins of the anomalous span vs the clean one
        auto seg = row(data.test, 2, 500, 200);
        auto ref = row(base.test, 2, 500, 200);
        auto pick = [](const std::vector<double>& x) {
            auto mags = oracles::dft_magnitudes_naive(x);
            size_t best = 1;
            for (size_t j = 2; j <= x.size() / 2; ++j)
                if (mags[j] > mags[best]) best = j;
            return best;
        };
        long clean_bin = static_cast<long>(pick(ref));
        long anom_bin = static_cast<long>(pick(seg));
        // dominant bin doubles (give 1 bin of slack for spectral leakage)
        CHECK(std::labs(anom_bin - 2 * clean_bin) <= 1);
    }

    SUBCASE("correlation change flips the sign of corr(ch0, ch1)") {
        auto corr = [&](const SeriesMatrix& s, int from, int len) {
            double m0 = 0, m1 = 0;
            for (int i = 0; i < len; ++i) {
                m0 += s.values.at(0, from + i);
                m1 += s.values.at(1, from + i);
            }
            m0 /= len;
            m1 /= len;
            double num = 0, d0 = 0, d1 = 0;
            for (int i = 0; i < len; ++i) {
                double a = s.values.at(0, from + i) - m0;
                double b = s.values.at(1, from + i) - m1;
                num += a * b;
                d0 += a * a;
                d1 += b * b;
            }
            return num / std::sqrt(d0 * d1);
        };
        CHECK(corr(base.test, 1200, 200) < -0.5);
        CHECK(corr(data.test, 1200, 200) > 0.5);
    }

    SUBCASE("abrupt anomaly spikes channel 3 at the segment start") {
        double delta = std::fabs(data.test.values.at(3, 2000) - base.test.values.at(3, 2000));
        CHECK(delta > 3.0);  // +6 sigma with sigma >= sqrt(1/2)
        // outside its segment the channel is untouched
        CHECK(data.test.values.at(3, 1000) == doctest::Approx(base.test.values.at(3, 1000)));
    }

    SUBCASE("channels without a pattern are identical to the clean series") {
        for (int t = 0; t < 3000; ++t)
            CHECK(data.test.values.at(4, t) == base.test.values.at(4, t));
    }
}

TEST_CASE("synthetic spec validation") {
    SyntheticSpec spec;
    spec.m = 2;
    spec.t_train = 100;
    spec.t_test = 100;
    SUBCASE("segments must stay inside the test split") {
        spec.segments = {{90, 120, AnomalyKind::AbruptValue, -1}};
        CHECK_THROWS_AS(spec.validate(), ContractError);
    }
    SUBCASE("segments must not overlap") {
        spec.segments = {{10, 40, AnomalyKind::AbruptValue, -1},
                         {30, 60, AnomalyKind::SubtleValue, -1}};
        CHECK_THROWS_AS(spec.validate(), ContractError);
    }
    SUBCASE("fraction below 1% is rejected") {
        spec.t_test = 10000;
        spec.segments = {{10, 20, AnomalyKind::AbruptValue, -1}};
        CHECK_THROWS_AS(spec.validate(), ContractError);
    }
}

TEST_CASE("checkpoint round trip") {
    TempDir dir;
    ModelConfig cfg;
    cfg.m = 3;
    cfg.tau = 60;
    cfg.k = 10;
    cfg.stride = 10;
    cfg.hidden_ch = 2;
    cfg.channels = {2, 3, 4};
    Model model(cfg, 99);
    NormStats stats{{0.0, -1.0, 2.0}, {1.0, 3.5, 2.0}};

    std::string path = dir.file("model.ckpt");
    save_checkpoint(model, stats, path);

    LoadedModel loaded = load_checkpoint(path);
    CHECK(loaded.model->config().m == 3);
    CHECK(loaded.model->config().tau == 60);
    CHECK(loaded.model->config().k == 10);
    CHECK(loaded.model->seed() == 99);
    CHECK(loaded.stats.min == stats.min);
    CHECK(loaded.stats.max == stats.max);

    auto orig = model.all_params();
    auto back = loaded.model->all_params();
    REQUIRE(orig.size() == back.size());
    for (size_t i = 0; i < orig.size(); ++i) {
        CHECK(orig[i]->name == back[i]->name);
        CHECK(orig[i]->value.data == back[i]->value.data);
    }

    // magic bytes
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "FMUD");
}

TEST_CASE("checkpoint corruption is detected") {
    TempDir dir;
    ModelConfig cfg;
    cfg.m = 2;
    cfg.tau = 60;
    cfg.k = 10;
    cfg.hidden_ch = 2;
    cfg.channels = {2, 2, 2};
    Model model(cfg, 1);
    NormStats stats{{0.0, 0.0}, {1.0, 1.0}};
    std::string path = dir.file("m.ckpt");
    save_checkpoint(model, stats, path);

    auto corrupt_at = [&](std::streamoff off, const std::string& out) {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        bytes[static_cast<size_t>(off)] = static_cast<char>(bytes[static_cast<size_t>(off)] ^ 0x5a);
        std::ofstream o(out, std::ios::binary);
        o.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };

    SUBCASE("bad magic") {
        corrupt_at(0, dir.file("bad_magic.ckpt"));
        CHECK_THROWS_AS(load_checkpoint(dir.file("bad_magic.ckpt")), ParseError);
    }
    SUBCASE("flipped payload byte fails the checksum") {
        corrupt_at(200, dir.file("bad_sum.ckpt"));
        CHECK_THROWS_AS(load_checkpoint(dir.file("bad_sum.ckpt")), ParseError);
    }
    SUBCASE("truncated file") {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream o(dir.file("trunc.ckpt"), std::ios::binary);
        o.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
        o.close();
        CHECK_THROWS_AS(load_checkpoint(dir.file("trunc.ckpt")), ParseError);
    }
}
