#ifndef SMAML_META_HPP
#define SMAML_META_HPP

#include <cstdint>
#include <vector>

#include "smaml/model.hpp"
#include "smaml/partition.hpp"
#include "smaml/preprocess.hpp"

namespace smaml {

struct MetaConfig {
    double inner_lr = 0.001;
    int inner_steps = 10;
    double outer_lr = 0.001;
    int meta_epochs = 8;
    int tasks_per_meta_batch = 4;
    bool first_order = true;
};

struct EvalRecord {
    double mae_original_units = 0.0;
    double mae_transformed = 0.0;
    int task_id = 0;
    uint64_t seed = 0;
};

// Meta-trained initialization plus the contract it was trained under.
struct TrainedModel {
    ModelParams params;
    int K = 0;
    MetaConfig cfg;
    std::vector<double> epoch_query_loss;  // mean query MSE per meta-epoch
};

// inner_steps SGD steps on the mean support MSE; the input is untouched.
ModelParams inner_adapt(const ModelParams& theta,
                        const std::vector<WindowPair>& support,
                        const MetaConfig& cfg);

// First-order MAML: adapt per task, outer gradient = mean query-loss
// gradient at the adapted parameters, Adam on the initialization.
TrainedModel meta_train(const ModelParams& theta0, const TaskSet& tasks,
                        const MetaConfig& cfg, uint64_t seed);

// Same procedure as inner_adapt; rejects a support size different from
// the K used in meta-training.
ModelParams fine_tune(const TrainedModel& model,
                      const std::vector<WindowPair>& target_support);

// Fine-tune on each task's support, predict its query, report MAE in
// both transformed and original units.
std::vector<EvalRecord> meta_test(const TrainedModel& model,
                                  const TaskSet& target_tasks,
                                  const PreparedSeries& target_prepared,
                                  uint64_t seed);

struct SeedAggregate {
    double mean_mae = 0.0;
    std::vector<double> per_seed_mae;  // one mean per seed, input order
};

// Mean over per-seed mean MAEs (original units).
SeedAggregate aggregate_seeds(
    const std::vector<std::vector<EvalRecord>>& records_by_seed);

}  // namespace smaml

#endif  // SMAML_META_HPP
