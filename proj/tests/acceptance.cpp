// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exit code 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smaml/config.hpp"
#include "smaml/data_io.hpp"
#include "smaml/experiment.hpp"
#include "smaml/gradcheck.hpp"
#include "smaml/meta.hpp"
#include "smaml/model.hpp"
#include "smaml/partition.hpp"
#include "smaml/series.hpp"

using namespace smaml;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// --- 1. differencing round trip -------------------------------------------

Outcome criterion_round_trip() {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> len_dist(4, 512);
    std::uniform_int_distribution<int> d_dist(1, 2);
    std::normal_distribution<double> val(0.0, 50.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = len_dist(rng);
        const int d = d_dist(rng);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = val(rng);
        Series s(x);
        auto [diffed, stack] = difference(s, d);
        Series back = integrate(diffed, stack);
        worst = std::max(worst,
                         (back.values - s.values).cwiseAbs().maxCoeff());
    }
    std::ostringstream os;
    os << "1000 fuzzed series, max elementwise error " << worst;
    return {worst < 1e-12, os.str()};
}

// --- 2. ADF classification -------------------------------------------------

Outcome criterion_adf() {
    const int n = 500;
    int stationary_hits = 0, walk_hits = 0;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::mt19937_64 rng_wn(1000 + trial), rng_walk(2000 + trial);
        Eigen::VectorXd wn(n), walk(n);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            wn[i] = noise(rng_wn);
            acc += noise(rng_walk);
            walk[i] = acc;
        }
        const int lag = default_adf_lag(n);
        if (adf_test(Series(wn), lag).is_stationary) ++stationary_hits;
        if (!adf_test(Series(walk), lag).is_stationary) ++walk_hits;
    }
    std::ostringstream os;
    os << "white noise " << stationary_hits << "/100 stationary, random walk "
       << walk_hits << "/100 non-stationary";
    return {stationary_hits >= 95 && walk_hits >= 95, os.str()};
}

// --- 3. DTW oracle ----------------------------------------------------------

double dtw_oracle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    std::map<std::pair<int, int>, double> memo;
    std::function<double(int, int)> rec = [&](int i, int j) -> double {
        if (i < 0 && j < 0) return 0.0;
        if (i < 0 || j < 0) return std::numeric_limits<double>::infinity();
        auto it = memo.find({i, j});
        if (it != memo.end()) return it->second;
        const double cost = std::abs(a[i] - b[j]) +
                            std::min({rec(i - 1, j - 1), rec(i - 1, j),
                                      rec(i, j - 1)});
        memo[{i, j}] = cost;
        return cost;
    };
    return rec(static_cast<int>(a.size()) - 1, static_cast<int>(b.size()) - 1);
}

Outcome criterion_dtw() {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> len_dist(1, 6);
    std::uniform_int_distribution<int> val_dist(0, 2);
    int mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        Eigen::VectorXd a(len_dist(rng)), b(len_dist(rng));
        for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = val_dist(rng);
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = val_dist(rng);
        if (dtw_distance(a, b) != dtw_oracle(a, b)) ++mismatches;
    }
    std::ostringstream os;
    os << "500 sampled pairs, " << mismatches << " mismatches vs oracle";
    return {mismatches == 0, os.str()};
}

// --- 4. gradient checks -----------------------------------------------------

Outcome criterion_gradcheck() {
    auto results = run_gradcheck(42);
    double worst = 0.0;
    std::string failing;
    for (const auto& r : results) {
        worst = std::max(worst, r.max_rel_err);
        if (!r.pass) failing += " " + r.op;
    }
    std::ostringstream os;
    os << results.size() << " ops checked, max relative error " << worst;
    if (!failing.empty()) os << ", failing:" << failing;
    return {failing.empty() && !results.empty(), os.str()};
}

// --- 5. AR recovery ---------------------------------------------------------

Outcome criterion_ar() {
    // Exact recurrence y_t = 0.2 + 0.5 y_{t-1}.
    Eigen::VectorXd exact(200);
    exact[0] = 1.0;
    for (int t = 1; t < 200; ++t) exact[t] = 0.2 + 0.5 * exact[t - 1];
    ArFit f1 = fit_ar(Series(exact), 1);
    const double err1 = std::abs(f1.coefficients[0] - 0.5);

    // Noisy AR(2) simulation.
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int n = 5000;
    Eigen::VectorXd y(n);
    y[0] = y[1] = 0.0;
    for (int t = 2; t < n; ++t)
        y[t] = 0.5 * y[t - 1] - 0.3 * y[t - 2] + noise(rng);
    ArFit f2 = fit_ar(Series(y), 2);
    const double err2a = std::abs(f2.coefficients[0] - 0.5);
    const double err2b = std::abs(f2.coefficients[1] + 0.3);

    std::ostringstream os;
    os << "exact AR(1) error " << err1 << ", AR(2) errors " << err2a << "/"
       << err2b;
    return {err1 < 1e-8 && err2a < 0.05 && err2b < 0.05, os.str()};
}

// --- 6. inner-loop efficacy -------------------------------------------------

Outcome criterion_inner_loop() {
    SynthSpec spec;
    spec.length = 200;
    spec.trend_slope = 0.02;
    spec.season_amplitude = 1.0;
    spec.season_period = 20;
    spec.ar_coeffs = {0.5};
    spec.noise_sigma = 0.2;

    MetaConfig mc;  // inner_lr 0.001, inner_steps 10
    int improved = 0;
    for (int seed = 0; seed < 50; ++seed) {
        spec.seed = 5000 + seed;
        Series raw = generate_synthetic(spec).series;
        auto [norm, stack] = normalize_minmax(raw);
        auto windows = make_windows(norm, 16);
        TaskSet tasks = build_successive_tasks(windows, 5, 1, seed);
        const auto& support = tasks.tasks[0].support;
        ModelParams theta = ModelParams::random_init(1, 32, 4, seed);
        const double before = batch_mse(theta, support);
        const double after = batch_mse(inner_adapt(theta, support, mc), support);
        if (after < before) ++improved;
    }
    std::ostringstream os;
    os << improved << "/50 seeds improved support MSE after 10 inner steps";
    return {improved >= 45, os.str()};
}

// --- 7 & 8. directional reproduction + differencing ablation ----------------

ExperimentConfig directional_config() {
    ExperimentConfig cfg;
    cfg.source_synth.length = 600;
    cfg.source_synth.trend_slope = 0.05;
    cfg.source_synth.season_amplitude = 2.0;
    cfg.source_synth.season_period = 24;
    cfg.source_synth.ar_coeffs = {0.6};
    cfg.source_synth.noise_sigma = 0.4;
    cfg.source_synth.seed = 101;
    cfg.target_synth.length = 260;
    cfg.target_synth.trend_slope = 0.08;
    cfg.target_synth.season_amplitude = 1.5;
    cfg.target_synth.season_period = 30;
    cfg.target_synth.ar_coeffs = {0.5};
    cfg.target_synth.noise_sigma = 0.4;
    cfg.target_synth.seed = 202;
    cfg.input_len = 16;
    cfg.test_tasks = 64;
    cfg.hidden_size = 32;
    return cfg;
}

double mean_mae(const ExperimentConfig& cfg, const LoadedDataset& data,
                const std::string& method, const std::vector<uint64_t>& seeds) {
    double sum = 0.0;
    for (uint64_t s : seeds)
        sum += run_cell(cfg, data, method, 70, 5, s).mae_original;
    return sum / static_cast<double>(seeds.size());
}

Outcome criterion_directional() {
    ExperimentConfig cfg = directional_config();
    LoadedDataset data = load_dataset(cfg);
    const std::vector<std::vector<uint64_t>> triples = {
        {1, 2, 3}, {4, 5, 6}, {7, 8, 9}};

    double smaml_all = 0.0, random_all = 0.0;
    int shuffle_wins = 0;
    for (const auto& t : triples) {
        const double sm = mean_mae(cfg, data, "smaml", t);
        const double sh = mean_mae(cfg, data, "smaml_shuffle", t);
        smaml_all += sm;
        random_all += mean_mae(cfg, data, "maml_random", t);
        if (sm <= sh) ++shuffle_wins;
    }
    smaml_all /= 3.0;
    random_all /= 3.0;
    const double margin = (random_all - smaml_all) / random_all;

    std::ostringstream os;
    os << "smaml " << smaml_all << " vs maml_random " << random_all
       << " (margin " << 100.0 * margin << "%), smaml <= shuffle in "
       << shuffle_wins << "/3 triples";
    return {margin >= 0.05 && shuffle_wins >= 2, os.str()};
}

Outcome criterion_diff_ablation() {
    ExperimentConfig cfg = directional_config();
    LoadedDataset data = load_dataset(cfg);
    const std::vector<uint64_t> seeds = {1, 2, 3};
    cfg.diff_mode = DiffMode::automatic;
    const double mae_auto = mean_mae(cfg, data, "smaml", seeds);
    cfg.diff_mode = DiffMode::off;
    const double mae_off = mean_mae(cfg, data, "smaml", seeds);
    std::ostringstream os;
    os << "auto " << mae_auto << " vs off " << mae_off;
    return {mae_auto <= mae_off, os.str()};
}

// --- 9. determinism ---------------------------------------------------------

Outcome criterion_determinism() {
    ExperimentConfig cfg = directional_config();
    cfg.methods = {"smaml", "maml_random"};
    cfg.n_values = {20};
    cfg.k_values = {5};
    cfg.seeds = {1, 2};
    cfg.meta.meta_epochs = 2;
    cfg.threads = 1;
    LoadedDataset data = load_dataset(cfg);

    const fs::path dir = fs::temp_directory_path() / "smaml_acceptance";
    fs::create_directories(dir);
    auto emit = [&](const std::string& name) {
        write_results_csv((dir / name).string(), run_grid(cfg, data));
        std::ifstream f(dir / name, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    const std::string a = emit("run_a.csv");
    const std::string b = emit("run_b.csv");
    fs::remove_all(dir);
    std::ostringstream os;
    os << "two runs, " << a.size() << " bytes each, "
       << (a == b ? "identical" : "different");
    return {!a.empty() && a == b, os.str()};
}

// --- 10. K-consistency ------------------------------------------------------

Outcome criterion_k_contract() {
    SynthSpec spec;
    spec.length = 120;
    spec.season_amplitude = 1.0;
    spec.season_period = 16;
    spec.ar_coeffs = {0.5};
    spec.noise_sigma = 0.2;
    spec.seed = 77;
    Series raw = generate_synthetic(spec).series;
    auto [norm, stack] = normalize_minmax(raw);
    auto windows = make_windows(norm, 16);
    TaskSet tasks = build_successive_tasks(windows, 5, 10, 0);
    MetaConfig mc;
    mc.meta_epochs = 1;
    TrainedModel model =
        meta_train(ModelParams::random_init(1, 16, 4, 0), tasks, mc, 0);

    std::vector<WindowPair> wrong(windows.begin(), windows.begin() + 3);
    try {
        fine_tune(model, wrong);
        return {false, "mismatched support size was accepted"};
    } catch (const std::invalid_argument& e) {
        std::ostringstream os;
        os << "rejected with: " << e.what();
        return {std::string(e.what()).find("K=") != std::string::npos,
                os.str()};
    }
}

}  // namespace

int main() {
    struct Entry {
        const char* label;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"differencing round trip", criterion_round_trip},
        {"ADF classification", criterion_adf},
        {"DTW oracle equivalence", criterion_dtw},
        {"gradient checks", criterion_gradcheck},
        {"AR recovery", criterion_ar},
        {"inner-loop efficacy", criterion_inner_loop},
        {"directional reproduction", criterion_directional},
        {"differencing ablation", criterion_diff_ablation},
        {"determinism", criterion_determinism},
        {"K-consistency contract", criterion_k_contract},
    };

    bool all_pass = true;
    int idx = 0;
    for (const Entry& e : entries) {
        ++idx;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out = {false, std::string("exception: ") + ex.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::printf("criterion %2d [%s]: %s (%s; %.1f s)\n", idx, e.label,
                    out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
