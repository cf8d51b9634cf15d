#ifndef FMUAD_SYNTHETIC_HPP
#define FMUAD_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fmuad/data_io.hpp"

namespace fmuad {

enum class AnomalyKind { FrequencyChange, CorrelationChange, AbruptValue, SubtleValue };

std::string anomaly_kind_name(AnomalyKind k);
AnomalyKind anomaly_kind_from_name(const std::string& name);

// Half-open [start, end) span inside the test split. `channel < 0` picks the
// kind's designated channel.
struct AnomalySegment {
    int start = 0;
    int end = 0;
    AnomalyKind kind = AnomalyKind::AbruptValue;
    int channel = -1;
};

struct SyntheticSpec {
    int m = 5;
    int t_train = 20000;
    int t_test = 5000;
    uint64_t seed = 7;
    std::vector<AnomalySegment> segments;

    // Base signal: noisy sinusoids. Channel 1 is generated negatively
    // coupled to channel 0 (when m >= 2) so correlation anomalies have a
    // pair to flip.
    double noise_level = 0.05;
    double base_amplitude = 1.0;

    void validate() const;
};

struct SyntheticData {
    SeriesMatrix train;  // raw values (not normalized)
    SeriesMatrix test;
    std::vector<bool> labels;  // length t_test, true exactly inside segments
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// A mixed-pattern spec with segments of each requested kind spread over the
// test split, totalling roughly `anomaly_fraction` of it.
SyntheticSpec default_synthetic_spec(uint64_t seed, const std::vector<AnomalyKind>& kinds,
                                     double anomaly_fraction = 0.05, int m = 5,
                                     int t_train = 20000, int t_test = 5000);

}  // namespace fmuad

#endif
