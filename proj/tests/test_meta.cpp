#include <doctest.h>

#include <random>

#include "smaml/meta.hpp"
#include "smaml/optim.hpp"

using namespace smaml;

namespace {

// Windows from a sinusoid family with per-task phase, the smallest
// learnable synthetic setup.
std::vector<WindowPair> sine_windows(double phase, double freq, int count,
                                     int input_len, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.01);
    const int pred = input_len / 4;
    Eigen::VectorXd series(count + input_len + pred);
    for (Eigen::Index t = 0; t < series.size(); ++t)
        series[t] = 0.5 + 0.4 * std::sin(freq * static_cast<double>(t) + phase) +
                    gauss(rng);
    return make_windows(Series(std::move(series)), input_len);
}

TaskSet sine_task_set(int K, int N, uint64_t seed) {
    auto windows = sine_windows(0.3, 0.35, N + K + 4, 8, seed);
    return build_successive_tasks(windows, K, N, seed);
}

}  // namespace

TEST_CASE("inner_adapt with lr→0 and identity edge cases") {
    TaskSet set = sine_task_set(5, 10, 1);
    ModelParams theta = ModelParams::random_init(1, 8, 2, 2);
    MetaConfig cfg;
    cfg.inner_lr = 1e-300;  // effectively zero while staying positive
    ModelParams adapted = inner_adapt(theta, set.tasks[0].support, cfg);
    CHECK((adapted.flat() - theta.flat()).cwiseAbs().maxCoeff() < 1e-200);

    MetaConfig bad;
    bad.inner_lr = 0.0;
    CHECK_THROWS_AS(inner_adapt(theta, set.tasks[0].support, bad),
                    std::invalid_argument);
}

TEST_CASE("inner_adapt never mutates its input") {
    TaskSet set = sine_task_set(5, 10, 3);
    ModelParams theta = ModelParams::random_init(1, 8, 2, 4);
    Eigen::VectorXd before = theta.flat();
    MetaConfig cfg;
    inner_adapt(theta, set.tasks[0].support, cfg);
    CHECK((theta.flat() - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single sample, one step matches manual SGD") {
    TaskSet set = sine_task_set(5, 10, 5);
    ModelParams theta = ModelParams::random_init(1, 8, 2, 6);
    std::vector<WindowPair> support = {set.tasks[0].support[0]};

    MetaConfig cfg;
    cfg.inner_steps = 1;
    ModelParams adapted = inner_adapt(theta, support, cfg);

    Eigen::VectorXd g = batch_mse_grad(theta, support);
    Eigen::VectorXd manual = theta.flat() - cfg.inner_lr * g;
    CHECK((adapted.flat() - manual).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("ten inner steps reduce support loss on most seeds") {
    MetaConfig cfg;  // inner_lr 0.001, 10 steps
    int improved = 0;
    const int trials = 50;
    for (uint64_t seed = 0; seed < trials; ++seed) {
        auto windows = sine_windows(0.1 * static_cast<double>(seed), 0.4, 30, 8,
                                    900 + seed);
        TaskSet set = build_successive_tasks(windows, 5, 5, seed);
        ModelParams theta = ModelParams::random_init(1, 8, 2, 100 + seed);
        const auto& support = set.tasks[0].support;
        const double before = batch_mse(theta, support);
        ModelParams adapted = inner_adapt(theta, support, cfg);
        if (batch_mse(adapted, support) < before) ++improved;
    }
    CHECK(improved >= 45);  // >= 90%
}

TEST_CASE("meta_train with zero epochs is the identity") {
    TaskSet set = sine_task_set(5, 10, 7);
    ModelParams theta = ModelParams::random_init(1, 8, 2, 8);
    MetaConfig cfg;
    cfg.meta_epochs = 0;
    TrainedModel model = meta_train(theta, set, cfg, 1);
    CHECK((model.params.flat() - theta.flat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("meta_train is bit-deterministic per seed") {
    TaskSet set = sine_task_set(5, 20, 9);
    ModelParams theta = ModelParams::random_init(1, 8, 2, 10);
    MetaConfig cfg;
    cfg.meta_epochs = 2;
    TrainedModel a = meta_train(theta, set, cfg, 33);
    TrainedModel b = meta_train(theta, set, cfg, 33);
    CHECK((a.params.flat() - b.params.flat()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.epoch_query_loss == b.epoch_query_loss);
}

TEST_CASE("meta-training beats random init on query MSE") {
    TaskSet train_set = sine_task_set(5, 40, 11);
    TaskSet eval_set = sine_task_set(5, 15, 12);
    ModelParams theta = ModelParams::random_init(1, 8, 2, 13);
    MetaConfig cfg;
    cfg.meta_epochs = 8;
    TrainedModel model = meta_train(theta, train_set, cfg, 14);

    auto query_mse_after_adapt = [&](const ModelParams& init) {
        double total = 0.0;
        for (const MetaTask& t : eval_set.tasks) {
            ModelParams adapted = inner_adapt(init, t.support, cfg);
            total += batch_mse(adapted, {t.query});
        }
        return total / static_cast<double>(eval_set.tasks.size());
    };
    CHECK(query_mse_after_adapt(model.params) < query_mse_after_adapt(theta));
}

TEST_CASE("meta_train with batch=1 matches a hand-rolled reference loop") {
    TaskSet set = sine_task_set(3, 8, 15);
    ModelParams theta = ModelParams::random_init(1, 4, 2, 16);  // small model
    MetaConfig cfg;
    cfg.meta_epochs = 2;
    cfg.tasks_per_meta_batch = 1;
    const uint64_t seed = 77;
    TrainedModel model = meta_train(theta, set, cfg, seed);

    // Reference: same first-order procedure written out longhand.
    ModelParams ref = theta;
    AdamState adam = AdamState::init(theta.size());
    std::mt19937_64 rng(seed);
    for (int epoch = 0; epoch < cfg.meta_epochs; ++epoch) {
        std::vector<size_t> order(set.tasks.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t idx : order) {
            const MetaTask& task = set.tasks[idx];
            ModelParams adapted = ref;
            for (int s = 0; s < cfg.inner_steps; ++s) {
                Eigen::VectorXd g = batch_mse_grad(adapted, task.support);
                sgd_step(adapted.flat(), g, cfg.inner_lr);
            }
            Eigen::VectorXd outer = batch_mse_grad(adapted, {task.query});
            adam_step(ref.flat(), outer, adam, cfg.outer_lr);
        }
    }
    CHECK((model.params.flat() - ref.flat()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fine_tune enforces the K contract") {
    TaskSet set = sine_task_set(5, 10, 17);
    ModelParams theta = ModelParams::random_init(1, 8, 2, 18);
    MetaConfig cfg;
    cfg.meta_epochs = 1;
    TrainedModel model = meta_train(theta, set, cfg, 19);

    CHECK_NOTHROW(fine_tune(model, set.tasks[0].support));

    std::vector<WindowPair> wrong(set.tasks[0].support.begin(),
                                  set.tasks[0].support.begin() + 3);
    CHECK_THROWS_WITH_AS(fine_tune(model, wrong), doctest::Contains("K="),
                         std::invalid_argument);
}

TEST_CASE("fine-tuning does not hurt on synthetic targets, seed-averaged") {
    MetaConfig cfg;
    cfg.meta_epochs = 6;
    double adapted_sum = 0.0, raw_sum = 0.0;
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        TaskSet train_set = sine_task_set(5, 30, 100 + seed);
        TaskSet target_set = sine_task_set(5, 10, 200 + seed);
        ModelParams theta = ModelParams::random_init(1, 8, 2, 300 + seed);
        TrainedModel model = meta_train(theta, train_set, cfg, 400 + seed);
        for (const MetaTask& t : target_set.tasks) {
            ModelParams tuned = fine_tune(model, t.support);
            adapted_sum += mae_metric(predict(tuned, t.query.input), t.query.target);
            raw_sum +=
         mae_metric(predict(model.params, t.query.input), t.query.target);
        }
    }
    CHECK(adapted_sum <= raw_sum);
}

TEST_CASE("meta_test inverts transforms exactly and counts records") {
    // Nonstationary raw series so differencing actually engages.
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss(0.0, 0.2);
    Eigen::VectorXd raw(120);
    double acc = 0.0;
    for (Eigen::Index t = 0; t < raw.size(); ++t) {
        acc += 0.3 + gauss(rng);
        raw[t] = acc;
    }
    PreparedSeries prepared = prepare_series(Series(raw), DiffMode::fixed, 1);
    auto windows = make_windows(prepared.transformed, 8);
    TaskSet target = build_successive_tasks(windows, 5, 12, 22);

    ModelParams theta = ModelParams::random_init(1, 8, 2, 23);
    MetaConfig cfg;
    cfg.meta_epochs = 1;
    TaskSet train_set = build_successive_tasks(windows, 5, 20, 24);
    TrainedModel model = meta_train(theta, train_set, cfg, 25);

    auto records = meta_test(model, target, prepared, 99);
    CHECK(records.size() == 12);
    for (const EvalRecord& r : records) {
        CHECK(r.mae_original_units >= 0.0);
        CHECK(r.mae_transformed >= 0.0);
        CHECK(r.seed == 99);
    }

    // Consistency: transformed MAE equals metric on direct predictions.
    for (size_t i = 0; i < target.tasks.size(); ++i) {
        ModelParams tuned = fine_tune(model, target.tasks[i].support);
        const double direct = mae_metric(predict(tuned, target.tasks[i].query.input),
                                         target.tasks[i].query.target);
        CHECK(records[i].mae_transformed == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("exact transformed predictions give zero original-units MAE") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd raw(80);
    double acc = 0.0;
    for (Eigen::Index t = 0; t < raw.size(); ++t) {
        acc += gauss(rng);
        raw[t] = acc;
    }
    PreparedSeries prepared = prepare_series(Series(raw), DiffMode::fixed, 1);
    auto windows = make_windows(prepared.transformed, 8);
    for (const WindowPair& w : windows) {
        const Eigen::Index start = w.origin_index + 1;
        Eigen::VectorXd inverted = invert_target(prepared, start, w.target);
        Eigen::VectorXd truth = original_target(prepared, start, w.target.size());
        CHECK((inverted - truth).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("constant-zero transformed predictor has closed-form original MAE") {
    // d=0, normalization only: predicting 0 in transformed space means
    // predicting norm_min in original space.
    Eigen::VectorXd raw(60);
    for (Eigen::Index t = 0; t < raw.size(); ++t)
        raw[t] = std::sin(0.2 * static_cast<double>(t)) + 2.0;
    PreparedSeries prepared = prepare_series(Series(raw), DiffMode::off);
    auto windows = make_windows(prepared.transformed, 8);
    const WindowPair& w = windows[10];
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(w.target.size());
    Eigen::VectorXd inverted = invert_target(prepared, w.origin_index + 1, zero);
    Eigen::VectorXd truth = original_target(prepared, w.origin_index + 1, 2);
    const double expected =
        (truth.array() - prepared.norm_stack.norm_min).abs().mean();
    CHECK(mae_metric(inverted, truth) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("aggregate_seeds") {
    auto rec = [](double mae, uint64_t seed) {
        EvalRecord r;
        r.mae_original_units = mae;
        r.seed = seed;
        return r;
    };
    SeedAggregate agg = aggregate_seeds({{rec(1.0, 1)}, {rec(2.0, 2)}, {rec(3.0, 3)}});
    CHECK(agg.mean_mae == doctest::Approx(2.0));
    REQUIRE(agg.per_seed_mae.size() == 3);

    SeedAggregate one = aggregate_seeds({{rec(0.7, 1)}});
    CHECK(one.mean_mae == doctest::Approx(0.7));

    SeedAggregate permuted =
        aggregate_seeds({{rec(3.0, 3)}, {rec(1.0, 1)}, {rec(2.0, 2)}});
    CHECK(permuted.mean_mae == doctest::Approx(agg.mean_mae));

    CHECK_THROWS_AS(aggregate_seeds({}), std::invalid_argument);
}
