#ifndef SMAML_CONFIG_HPP
#define SMAML_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "smaml/data_io.hpp"
#include "smaml/meta.hpp"
#include "smaml/preprocess.hpp"

namespace smaml {

// Flat `key = value` config file; `#` starts a comment, lists are
// comma-separated. Unknown keys are rejected.
struct ExperimentConfig {
    // Dataset: either CSV paths or synthetic specs.
    std::vector<std::string> source_csv;
    std::string target_csv;
    std::string csv_column = "value";
    SynthSpec source_synth;
    SynthSpec target_synth;
    bool use_synth = true;
    std::string dataset_name = "synthetic";
    bool integrate_conditions = false;

    std::vector<std::string> methods = {"smaml"};
    std::vector<int> n_values = {70};
    std::vector<int> k_values = {5};
    int input_len = 16;
    int stride = 1;
    std::vector<uint64_t> seeds = {1, 2, 3};
    int test_tasks = 64;
    int hidden_size = 32;

    MetaConfig meta;
    DiffMode diff_mode = DiffMode::automatic;
    int fixed_diff_order = 0;
    double es_alpha = 0.3;
    bool es_alpha_set = false;

    std::string out_dir = "out";
    int threads = 1;
    uint64_t master_seed = 0;
    bool master_seed_set = false;
};

ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

// Splittable per-cell seed: FNV-1a over master seed, method, N, K and
// the seed index.
uint64_t cell_seed(uint64_t master, const std::string& method, int N, int K,
                   size_t seed_index);

}  // namespace smaml

#endif  // SMAML_CONFIG_HPP
