#ifndef SMAML_PARTITION_HPP
#define SMAML_PARTITION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "smaml/series.hpp"

namespace smaml {

enum class Strategy { successive, random, shuffle, dtw, es };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// One (input window, prediction target) sample. origin_index is the
// position of the last input element in the source series.
struct WindowPair {
    Eigen::VectorXd input;
    Eigen::VectorXd target;
    Eigen::Index origin_index = 0;
};

struct MetaTask {
    std::vector<WindowPair> support;
    WindowPair query;
    Strategy strategy_tag = Strategy::successive;
};

struct TaskSet {
    std::vector<MetaTask> tasks;
    int K = 0;
    int N = 0;
    Strategy strategy_tag = Strategy::successive;
};

// Sliding windows: L inputs followed immediately by L/4 targets.
// L must be divisible by 4.
std::vector<WindowPair> make_windows(const Series& series, int input_len,
                                     int stride = 1);

// Windows whose inputs come from a smoothed copy of the series while
// targets stay raw; both series must have equal length.
std::vector<WindowPair> make_windows_smoothed_inputs(const Series& raw,
                                                     const Series& smoothed,
                                                     int input_len,
                                                     int stride = 1);

// Support = the K windows immediately preceding the query, chronological.
TaskSet build_successive_tasks(const std::vector<WindowPair>& windows, int K,
                               int N, uint64_t seed);

// Support = K uniform draws without replacement, query excluded.
TaskSet build_random_tasks(const std::vector<WindowPair>& windows, int K,
                           int N, uint64_t seed);

// Same support membership as successive (same seed), random support order.
TaskSet build_shuffle_tasks(const std::vector<WindowPair>& windows, int K,
                            int N, uint64_t seed);

// Support = K causally earlier windows nearest in DTW distance to the
// query input, ascending distance, ties by smaller origin index.
TaskSet build_dtw_tasks(const std::vector<WindowPair>& windows, int K, int N,
                        uint64_t seed);

// Successive selection over windows built from a smoothed series.
TaskSet build_es_tasks(const std::vector<WindowPair>& smoothed_windows, int K,
                       int N, uint64_t seed);

// Classic DP alignment cost, absolute-difference local cost, full window.
double dtw_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace smaml

#endif  // SMAML_PARTITION_HPP
