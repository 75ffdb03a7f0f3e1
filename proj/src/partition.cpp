#include "smaml/partition.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace smaml {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::successive: return "smaml";
        case Strategy::random: return "maml_random";
        case Strategy::shuffle: return "smaml_shuffle";
        case Strategy::dtw: return "maml_dtw";
        case Strategy::es: return "esmaml";
    }
    throw std::logic_error("unknown strategy");
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "smaml") return Strategy::successive;
    if (name == "maml_random") return Strategy::random;
    if (name == "smaml_shuffle") return Strategy::shuffle;
    if (name == "maml_dtw") return Strategy::dtw;
    if (name == "esmaml") return Strategy::es;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::vector<WindowPair> make_windows(const Series& series, int input_len,
                                     int stride) {
    return make_windows_smoothed_inputs(series, series, input_len, stride);
}

std::vector<WindowPair> make_windows_smoothed_inputs(const Series& raw,
                                                     const Series& smoothed,
                                                     int input_len,
                                                     int stride) {
    if (input_len < 4 || input_len % 4 != 0)
        throw std::invalid_argument("input length must be a positive multiple of 4");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (raw.length() != smoothed.length())
        throw std::invalid_argument("raw and smoothed series lengths differ");
    const int pred_len = input_len / 4;
    const Eigen::Index n = raw.length();
    if (n < input_len + pred_len)
        throw std::invalid_argument("series too short for windowing");

    std::vector<WindowPair> out;
    for (Eigen::Index start = 0; start + input_len + pred_len <= n;
         start += stride) {
        WindowPair w;
        w.input = smoothed.values.segment(start, input_len);
        w.target = raw.values.segment(start + input_len, pred_len);
        w.origin_index = start + input_len - 1;
        out.push_back(std::move(w));
    }
    return out;
}

namespace {

void check_task_args(size_t window_count, int K, int N) {
    if (K < 1 || N < 1) throw std::invalid_argument("K and N must be >= 1");
    if (window_count < static_cast<size_t>(K) + 1)
        throw std::invalid_argument("insufficient windows for support size K");
    if (static_cast<size_t>(N) > window_count - static_cast<size_t>(K))
        throw std::invalid_argument("N exceeds available query positions");
}

// N distinct values from [lo, hi], seeded partial Fisher-Yates.
std::vector<size_t> sample_positions(size_t lo, size_t hi, int N,
                                     std::mt19937_64& rng) {
    std::vector<size_t> pool(hi - lo + 1);
    std::iota(pool.begin(), pool.end(), lo);
    for (int i = 0; i < N; ++i) {
        std::uniform_int_distribution<size_t> dist(i, pool.size() - 1);
        std::swap(pool[static_cast<size_t>(i)], pool[dist(rng)]);
    }
    pool.resize(static_cast<size_t>(N));
    return pool;
}

TaskSet build_contiguous(const std::vector<WindowPair>& windows, int K, int N,
                         uint64_t seed, Strategy tag) {
    check_task_args(windows.size(), K, N);
    std::mt19937_64 rng(seed);
    auto queries =
        sample_positions(static_cast<size_t>(K), windows.size() - 1, N, rng);

    TaskSet set;
    set.K = K;
    set.N = N;
    set.strategy_tag = tag;
    for (size_t q : queries) {
        MetaTask task;
        task.strategy_tag = tag;
        task.query = windows[q];
        for (size_t p = q - static_cast<size_t>(K); p < q; ++p)
            task.support.push_back(windows[p]);
        set.tasks.push_back(std::move(task));
    }
    return set;
}

}  // namespace

TaskSet build_successive_tasks(const std::vector<WindowPair>& windows, int K,
                               int N, uint64_t seed) {
    return build_contiguous(windows, K, N, seed, Strategy::successive);
}

TaskSet build_random_tasks(const std::vector<WindowPair>& windows, int K,
                           int N, uint64_t seed) {
    check_task_args(windows.size(), K, N);
    std::mt19937_64 rng(seed);
    auto queries = sample_positions(0, windows.size() - 1, N, rng);

    TaskSet set;
    set.K = K;
    set.N = N;
    set.strategy_tag = Strategy::random;
    for (size_t q : queries) {
        MetaTask task;
        task.strategy_tag = Strategy::random;
        task.query = windows[q];
        std::vector<size_t> pool;
        pool.reserve(windows.size() - 1);
        for (size_t p = 0; p < windows.size(); ++p)
            if (p != q) pool.push_back(p);
        for (int i = 0; i < K; ++i) {
            std::uniform_int_distribution<size_t> dist(static_cast<size_t>(i),
                                                       pool.size() - 1);
            std::swap(pool[static_cast<size_t>(i)], pool[dist(rng)]);
            task.support.push_back(windows[pool[static_cast<size_t>(i)]]);
        }
        set.tasks.push_back(std::move(task));
    }
    return set;
}

TaskSet build_shuffle_tasks(const std::vector<WindowPair>& windows, int K,
                            int N, uint64_t seed) {
    TaskSet set = build_contiguous(windows, K, N, seed, Strategy::shuffle);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (MetaTask& task : set.tasks)
        std::shuffle(task.support.begin(), task.support.end(), rng);
    return set;
}

double dtw_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index na = a.size();
    const Eigen::Index nb = b.size();
    if (na == 0 || nb == 0)
        throw std::invalid_argument("DTW inputs must be non-empty");

    constexpr double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXd prev = Eigen::VectorXd::Constant(nb, inf);
    Eigen::VectorXd cur(nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        for (Eigen::Index j = 0; j < nb; ++j) {
            const double cost = std::abs(a[i] - b[j]);
            if (i == 0 && j == 0) {
                cur[j] = cost;
            } else {
                double best = inf;
                if (i > 0) best = std::min(best, prev[j]);
                if (j > 0) best = std::min(best, cur[j - 1]);
                if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
                cur[j] = cost + best;
            }
        }
        std::swap(prev, cur);
    }
    return prev[nb - 1];
}

TaskSet build_dtw_tasks(const std::vector<WindowPair>& windows, int K, int N,
                        uint64_t seed) {
    check_task_args(windows.size(), K, N);
    std::mt19937_64 rng(seed);
    // Only positions with at least K causally earlier windows qualify.
    auto queries =
        sample_positions(static_cast<size_t>(K), windows.size() - 1, N, rng);

    TaskSet set;
    set.K = K;
    set.N = N;
    set.strategy_tag = Strategy::dtw;
    for (size_t q : queries) {
        MetaTask task;
        task.strategy_tag = Strategy::dtw;
        task.query = windows[q];
        std::vector<std::pair<double, size_t>> scored;
        scored.reserve(q);
        for (size_t p = 0; p < q; ++p)
            scored.emplace_back(dtw_distance(windows[p].input, windows[q].input), p);
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& x, const auto& y) {
                             if (x.first != y.first) return x.first < y.first;
                             return x.second < y.second;
                         });
        for (int i = 0; i < K; ++i)
            task.support.push_back(windows[scored[static_cast<size_t>(i)].second]);
        set.tasks.push_back(std::move(task));
    }
    return set;
}

TaskSet build_es_tasks(const std::vector<WindowPair>& smoothed_windows, int K,
                       int N, uint64_t seed) {
    return build_contiguous(smoothed_windows, K, N, seed, Strategy::es);
}

}  // namespace smaml
