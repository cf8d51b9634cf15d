#ifndef FMUAD_EVAL_HPP
#define FMUAD_EVAL_HPP

#include <string>
#include <vector>

namespace fmuad {

// Point-adjust protocol: a maximal run of true labels counts as fully
// detected if any position inside it was flagged. Flags outside labeled
// runs are left untouched.
std::vector<bool> point_adjust(const std::vector<bool>& pred_flags,
                               const std::vector<bool>& labels);

struct Prf1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long tp = 0, fp = 0, fn = 0;
};

// Time-step-granularity binary counts; zero denominators yield 0.
Prf1 prf1(const std::vector<bool>& pred_flags, const std::vector<bool>& labels);

struct EvalReport {
    double threshold = 0.0;
    Prf1 raw;       // before point-adjust, at the selected threshold
    Prf1 adjusted;  // after point-adjust (the selection objective)
};

// Scores paired with the timestamps they were assigned to.
struct ScoreSeries {
    std::vector<long> timestamps;
    std::vector<double> scores;
};

// Sweeps the unique score values (plus +inf), flags score > threshold,
// point-adjusts, and returns the threshold with the best adjusted F1.
// Ties go to the larger threshold.
EvalReport select_threshold(const std::vector<double>& scores, const std::vector<bool>& labels);

std::string report_text(const EvalReport& r);
std::string report_json(const EvalReport& r);

}  // namespace fmuad

#endif
