#ifndef SMAML_EXPERIMENT_HPP
#define SMAML_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "smaml/config.hpp"
#include "smaml/data_io.hpp"
#include "smaml/meta.hpp"

namespace smaml {

struct LoadedDataset {
    std::vector<Series> sources;
    Series target;
};

LoadedDataset load_dataset(const ExperimentConfig& cfg);

struct CellResult {
    double mae_original = 0.0;
    double mae_transformed = 0.0;
    std::vector<EvalRecord> records;
    std::vector<double> loss_trace;
};

// One (method, N, K, seed) pipeline run: prepare, partition, meta-train,
// meta-test. Deterministic given the derived cell seed.
CellResult run_cell(const ExperimentConfig& cfg, const LoadedDataset& data,
                    const std::string& method, int N, int K, uint64_t seed_id);

// The full grid, seed-aggregated, in config declaration order.
std::vector<ResultRecord> run_grid(const ExperimentConfig& cfg,
                                   const LoadedDataset& data);

// Preprocessing pieces shared with the CLI.
PreparedSeries prepare_for(const ExperimentConfig& cfg, const Series& raw);
std::vector<WindowPair> windows_for(const ExperimentConfig& cfg,
                                    const PreparedSeries& prepared,
                                    const std::string& method);
TaskSet build_tasks(const std::string& method,
                    const std::vector<WindowPair>& windows, int K, int N,
                    uint64_t seed);

// Content hash of a dataset, recorded in checkpoint sidecars.
uint64_t dataset_fingerprint(const LoadedDataset& data);

}  // namespace smaml

#endif  // SMAML_EXPERIMENT_HPP
