#ifndef FMUAD_TRAINER_HPP
#define FMUAD_TRAINER_HPP

#include <vector>

#include "fmuad/eval.hpp"
#include "fmuad/loss.hpp"
#include "fmuad/model.hpp"

namespace fmuad {

struct TrainOptions {
    int epochs = 10;
    int batch_size = 32;       // >= 2 (the compactness loss needs a batch)
    double learning_rate = 1e-3;
    bool compactness = true;   // false: optimize l1 only (l2 still logged)
    // Forecast-only warm-up epochs before the compactness factor enters the
    // objective. Starting the product loss from scratch lets its l1*dl2 term
    // dominate and collapses predictions onto the batch mean; warming up on
    // l1 first avoids that degenerate optimum. Ignored when compactness is
    // off.
    int warmup_epochs = 3;
    int threads = 0;           // 0: hardware concurrency
    uint64_t shuffle_seed = 1;
};

struct EpochLog {
    int epoch = 0;
    double l1 = 0.0;
    double l2 = 0.0;
    double loss = 0.0;  // the optimized objective, averaged across batches
};

// Trains the enabled detectors jointly. Training windows are taken at
// stride k (non-overlapping targets); trailing batches smaller than 2 are
// dropped. Window forward/backward passes run data-parallel, one tape per
// window, with gradients reduced in window order so results are
// deterministic regardless of thread count.
std::vector<EpochLog> train_model(Model& model, const SeriesMatrix& train,
                                  const TrainOptions& opts);

// One anomaly score per window at stride 1 over t >= tau-1 (0-based final
// timestamps); score count is T - tau + 1.
ScoreSeries score_series(Model& model, const SeriesMatrix& test, int threads = 0);

void write_score_csv(const ScoreSeries& s, const std::string& path);
ScoreSeries load_score_csv(const std::string& path);
void write_training_log(const std::vector<EpochLog>& log, const std::string& path);

}  // namespace fmuad

#endif
