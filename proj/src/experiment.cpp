#include "smaml/experiment.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

namespace smaml {

LoadedDataset load_dataset(const ExperimentConfig& cfg) {
    LoadedDataset data;
    if (cfg.use_synth) {
        data.sources.push_back(generate_synthetic(cfg.source_synth).series);
        data.target = generate_synthetic(cfg.target_synth).series;
    } else {
        for (const std::string& path : cfg.source_csv)
            data.sources.push_back(load_csv(path, cfg.csv_column));
        data.target = load_csv(cfg.target_csv, cfg.csv_column);
    }
    if (!cfg.integrate_conditions && data.sources.size() > 1)
        data.sources.resize(1);
    return data;
}

PreparedSeries prepare_for(const ExperimentConfig& cfg, const Series& raw) {
    return prepare_series(raw, cfg.diff_mode, cfg.fixed_diff_order);
}

std::vector<WindowPair> windows_for(const ExperimentConfig& cfg,
                                    const PreparedSeries& prepared,
                                    const std::string& method) {
    if (method == "esmaml") {
        Series smoothed = exponential_smooth(prepared.transformed, cfg.es_alpha);
        return make_windows_smoothed_inputs(prepared.transformed, smoothed,
                                            cfg.input_len, cfg.stride);
    }
    return make_windows(prepared.transformed, cfg.input_len, cfg.stride);
}

TaskSet build_tasks(const std::string& method,
                    const std::vector<WindowPair>& windows, int K, int N,
                    uint64_t seed) {
    switch (strategy_from_name(method)) {
        case Strategy::successive: return build_successive_tasks(windows, K, N, seed);
        case Strategy::random: return build_random_tasks(windows, K, N, seed);
        case Strategy::shuffle: return build_shuffle_tasks(windows, K, N, seed);
        case Strategy::dtw: return build_dtw_tasks(windows, K, N, seed);
        case Strategy::es: return build_es_tasks(windows, K, N, seed);
    }
    throw std::logic_error("unreachable");
}

uint64_t dataset_fingerprint(const LoadedDataset& data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_series = [&h](const Series& s) {
        const auto* p = reinterpret_cast<const unsigned char*>(s.values.data());
        for (Eigen::Index i = 0;
             i < s.values.size() * static_cast<Eigen::Index>(sizeof(double)); ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const Series& s : data.sources) mix_series(s);
    mix_series(data.target);
    return h;
}

CellResult run_cell(const ExperimentConfig& cfg, const LoadedDataset& data,
                    const std::string& method, int N, int K, uint64_t seed_id) {
    // All randomness in one cell flows from this derived seed.
    const uint64_t base = cell_seed(cfg.master_seed, method, N, K,
                                    static_cast<size_t>(seed_id));

    // ES replaces differencing by smoothing; other methods difference
    // per the configured mode.
    ExperimentConfig local = cfg;
    if (method == "esmaml") local.diff_mode = DiffMode::off;

    std::vector<WindowPair> source_windows;
    for (const Series& s : data.sources) {
        PreparedSeries prepared = prepare_for(local, s);
        auto w = windows_for(local, prepared, method);
        source_windows.insert(source_windows.end(), w.begin(), w.end());
    }

    TaskSet tasks = build_tasks(method, source_windows, K, N, base);
    ModelParams theta0 = ModelParams::random_init(
        1, cfg.hidden_size, cfg.input_len / 4, base ^ 0x5851f42d4c957f2dULL);
    TrainedModel model = meta_train(theta0, tasks, cfg.meta, base ^ 0x1ULL);

    PreparedSeries target_prepared = prepare_for(local, data.target);
    auto target_windows = windows_for(local, target_prepared, method);
    if (target_windows.size() <= static_cast<size_t>(K))
        throw std::invalid_argument("target series too short for K support windows");
    const int n_test = static_cast<int>(
        std::min<size_t>(static_cast<size_t>(cfg.test_tasks),
                         target_windows.size() - static_cast<size_t>(K)));
    // Target supports always use the successive rule: the K windows
    // immediately preceding each test window.
    TaskSet target_tasks =
        build_successive_tasks(target_windows, K, n_test, base ^ 0x2ULL);

    CellResult res;
    res.records = meta_test(model, target_tasks, target_prepared, seed_id);
    res.loss_trace = model.epoch_query_loss;
    double sum_o = 0.0, sum_t = 0.0;
    for (const EvalRecord& r : res.records) {
        sum_o += r.mae_original_units;
        sum_t += r.mae_transformed;
    }
    res.mae_original = sum_o / static_cast<double>(res.records.size());
    res.mae_transformed = sum_t / static_cast<double>(res.records.size());
    return res;
}

std::vector<ResultRecord> run_grid(const ExperimentConfig& cfg,
                                   const LoadedDataset& data) {
    struct Cell {
        std::string method;
        int N, K;
    };
    std::vector<Cell> cells;
    for (const std::string& m : cfg.methods)
        for (int n : cfg.n_values)
            for (int k : cfg.k_values) cells.push_back({m, n, k});

    std::vector<ResultRecord> records(cells.size());
    auto run_one = [&](size_t i) {
        const Cell& c = cells[i];
        ResultRecord rec;
        rec.dataset = cfg.dataset_name;
        rec.method = c.method;
        rec.N = c.N;
        rec.K = c.K;
        rec.input_len = cfg.input_len;
        for (uint64_t s : cfg.seeds)
            rec.mae_per_seed.push_back(
                run_cell(cfg, data, c.method, c.N, c.K, s).mae_original);
        records[i] = std::move(rec);
    };

    if (cfg.threads <= 1) {
        for (size_t i = 0; i < cells.size(); ++i) run_one(i);
    } else {
        std::vector<std::future<void>> futures;
        size_t next = 0;
        while (next < cells.size() || !futures.empty()) {
            while (next < cells.size() &&
                   futures.size() < static_cast<size_t>(cfg.threads))
                futures.push_back(std::async(std::launch::async, run_one, next++));
            futures.front().get();
            futures.erase(futures.begin());
        }
    }
    return records;
}

}  // namespace smaml
