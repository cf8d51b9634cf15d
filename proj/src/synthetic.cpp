#include "fmuad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmuad/rng.hpp"

namespace fmuad {

std::string anomaly_kind_name(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::FrequencyChange: return "frequency-change";
        case AnomalyKind::CorrelationChange: return "correlation-change";
        case AnomalyKind::AbruptValue: return "abrupt-value";
        case AnomalyKind::SubtleValue: return "subtle-value";
    }
    throw ContractError("unknown anomaly kind");
}

AnomalyKind anomaly_kind_from_name(const std::string& name) {
    if (name == "frequency-change") return AnomalyKind::FrequencyChange;
    if (name == "correlation-change") return AnomalyKind::CorrelationChange;
    if (name == "abrupt-value") return AnomalyKind::AbruptValue;
    if (name == "subtle-value") return AnomalyKind::SubtleValue;
    throw ContractError("unknown anomaly kind '" + name + "'");
}

void SyntheticSpec::validate() const {
    if (m < 1) throw ContractError("synthetic spec: m must be >= 1");
    if (t_train < 1 || t_test < 1) throw ContractError("synthetic spec: split sizes must be >= 1");

    std::vector<AnomalySegment> sorted = segments;
    std::sort(sorted.begin(), sorted.end(),
              [](const AnomalySegment& a, const AnomalySegment& b) { return a.start < b.start; });
    int total = 0;
    int prev_end = 0;
    for (const auto& seg : sorted) {
        if (seg.start < 0 || seg.end > t_test || seg.start >= seg.end)
            throw ContractError("synthetic spec: segment [" + std::to_string(seg.start) + "," +
                                std::to_string(seg.end) + ") outside [0," + std::to_string(t_test) +
                                ")");
        if (seg.start < prev_end)
            throw ContractError("synthetic spec: segments overlap at " + std::to_string(seg.start));
        prev_end = seg.end;
        total += seg.end - seg.start;
    }
    if (!segments.empty()) {
        double frac = static_cast<double>(total) / static_cast<double>(t_test);
        if (frac < 0.01 || frac > 0.15)
            throw ContractError("synthetic spec: anomalous fraction " + std::to_string(frac) +
                                " outside [0.01, 0.15]");
    }
}

namespace {

struct ChannelBase {
    double freq;  // cycles per step
    double amp;
    double phase;
    int coupled_to = -1;  // generated from this channel's oscillation, sign flipped
};

int designated_channel(AnomalyKind kind, int m) {
    // Spread the four kinds over distinct channels where m permits.
    switch (kind) {
        case AnomalyKind::CorrelationChange: return m >= 2 ? 1 : 0;
        case AnomalyKind::FrequencyChange: return std::min(2, m - 1);
        case AnomalyKind::AbruptValue: return std::min(3, m - 1);
        case AnomalyKind::SubtleValue: return std::min(4, m - 1);
    }
    return 0;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<ChannelBase> base(static_cast<size_t>(spec.m));
    for (int i = 0; i < spec.m; ++i) {
        auto& ch = base[static_cast<size_t>(i)];
        ch.freq = rng.uniform(0.02, 0.08);
        ch.amp = spec.base_amplitude * rng.uniform(0.8, 1.2);
        ch.phase = rng.uniform(0.0, two_pi);
    }
    if (spec.m >= 2) base[1].coupled_to = 0;

    // Per-segment lookup: for each test step, the active segment (or -1).
    std::vector<int> active(static_cast<size_t>(spec.t_test), -1);
    for (size_t s = 0; s < spec.segments.size(); ++s)
        for (int t = spec.segments[s].start; t < spec.segments[s].end; ++t)
            active[static_cast<size_t>(t)] = static_cast<int>(s);

    auto clean_value = [&](int ch_idx, long t) {
        const auto& ch = base[static_cast<size_t>(ch_idx)];
        if (ch.coupled_to >= 0) {
            const auto& src = base[static_cast<size_t>(ch.coupled_to)];
            return -ch.amp * std::sin(two_pi * src.freq * static_cast<double>(t) + src.phase);
        }
        return ch.amp * std::sin(two_pi * ch.freq * static_cast<double>(t) + ch.phase);
    };
    auto channel_sigma = [&](int ch_idx) {
        const auto& ch = base[static_cast<size_t>(ch_idx)];
        return std::sqrt(ch.amp * ch.amp / 2.0 + spec.noise_level * spec.noise_level);
    };

    const long total_steps = spec.t_train + spec.t_test;
    Tensor all = Tensor::zeros({spec.m, static_cast<int>(total_steps)});
    for (long t = 0; t < total_steps; ++t) {
        const int test_t = static_cast<int>(t - spec.t_train);
        const int seg_idx = test_t >= 0 ? active[static_cast<size_t>(test_t)] : -1;
        const AnomalySegment* seg =
            seg_idx >= 0 ? &spec.segments[static_cast<size_t>(seg_idx)] : nullptr;
        for (int i = 0; i < spec.m; ++i) {
            double v;
            int target = seg ? (seg->channel >= 0 ? seg->channel : designated_channel(seg->kind, spec.m))
                             : -1;
            if (seg && i == target) {
                switch (seg->kind) {
                    case AnomalyKind::FrequencyChange: {
                        const auto& ch = base[static_cast<size_t>(i)];
                        double f = (ch.coupled_to >= 0 ? base[static_cast<size_t>(ch.coupled_to)].freq
                                                       : ch.freq) * 2.0;
                        v = ch.amp * std::sin(two_pi * f * static_cast<double>(t) + ch.phase);
                        break;
                    }
                    case AnomalyKind::CorrelationChange:
                        // flip the coupled channel's sign: correlation with its
                        // partner inverts inside the segment
                        v = -clean_value(i, t);
                        break;
                    case AnomalyKind::AbruptValue: {
                        v = clean_value(i, t);
                        if (test_t - seg->start < 3) v += 6.0 * channel_sigma(i);
                        break;
                    }
                    case AnomalyKind::SubtleValue: {
                        double progress = static_cast<double>(test_t - seg->start + 1) /
                                          static_cast<double>(seg->end - seg->start);
                        v = clean_value(i, t) + 1.5 * channel_sigma(i) * progress;
                        break;
                    }
                    default: v = clean_value(i, t);
                }
            } else {
                v = clean_value(i, t);
            }
            v += spec.noise_level * rng.normal();
            all.at(i, static_cast<int>(t)) = v;
        }
    }

    SyntheticData out;
    out.train.values = Tensor::zeros({spec.m, spec.t_train});
    out.test.values = Tensor::zeros({spec.m, spec.t_test});
    for (int i = 0; i < spec.m; ++i) {
        for (int t = 0; t < spec.t_train; ++t) out.train.values.at(i, t) = all.at(i, t);
        for (int t = 0; t < spec.t_test; ++t)
            out.test.values.at(i, t) = all.at(i, spec.t_train + t);
    }
    out.labels.assign(static_cast<size_t>(spec.t_test), false);
    for (int t = 0; t < spec.t_test; ++t) out.labels[static_cast<size_t>(t)] = active[static_cast<size_t>(t)] >= 0;
    return out;
}

SyntheticSpec default_synthetic_spec(uint64_t seed, const std::vector<AnomalyKind>& kinds,
                                     double anomaly_fraction, int m, int t_train, int t_test) {
    if (kinds.empty()) throw ContractError("default_synthetic_spec: no anomaly kinds given");
    SyntheticSpec spec;
    spec.m = m;
    spec.t_train = t_train;
    spec.t_test = t_test;
    spec.seed = seed;

    const int target = static_cast<int>(anomaly_fraction * static_cast<double>(t_test));
    const int gap = 400;  // decontaminates the history span between segments
    int pos = std::min(700, t_test / 4);
    int total = 0;
    size_t ki = 0;
    while (total < target) {
        AnomalyKind kind = kinds[ki % kinds.size()];
        ++ki;
        // abrupt segments are short but still long enough that a
        // single-kind spec clears the minimum labeled fraction
        int len = kind == AnomalyKind::AbruptValue ? 30 : 70;
        if (pos + len > t_test - 50) break;
        spec.segments.push_back({pos, pos + len, kind, -1});
        total += len;
        pos += len + gap;
    }
    return spec;
}

}  // namespace fmuad
