#include "smaml/meta.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "smaml/optim.hpp"

namespace smaml {

ModelParams inner_adapt(const ModelParams& theta,
                        const std::vector<WindowPair>& support,
                        const MetaConfig& cfg) {
    if (support.empty()) throw std::invalid_argument("empty support set");
    if (!(cfg.inner_lr > 0.0) || cfg.inner_steps < 1)
        throw std::invalid_argument("inner_lr must be > 0 and inner_steps >= 1");

    ModelParams adapted = theta;
    for (int step = 0; step < cfg.inner_steps; ++step) {
        double loss = 0.0;
        Eigen::VectorXd g = batch_mse_grad(adapted, support, &loss);
        if (!std::isfinite(loss))
            throw std::runtime_error("non-finite support loss during adaptation");
        sgd_step(adapted.flat(), g, cfg.inner_lr);
    }
    return adapted;
}

TrainedModel meta_train(const ModelParams& theta0, const TaskSet& tasks,
                        const MetaConfig& cfg, uint64_t seed) {
    if (tasks.tasks.empty()) throw std::invalid_argument("empty task set");
    if (cfg.tasks_per_meta_batch < 1)
        throw std::invalid_argument("meta-batch size must be >= 1");
    if (!cfg.first_order)
        throw std::invalid_argument(
            "second-order meta-gradients are not implemented");

    TrainedModel model{theta0, tasks.K, cfg, {}};
    AdamState adam = AdamState::init(theta0.size());
    std::mt19937_64 rng(seed);

    size_t aborted = 0;
    size_t attempted = 0;
    for (int epoch = 0; epoch < cfg.meta_epochs; ++epoch) {
        std::vector<size_t> order(tasks.tasks.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);

        double epoch_loss = 0.0;
        size_t epoch_tasks = 0;
        for (size_t at = 0; at < order.size();
             at += static_cast<size_t>(cfg.tasks_per_meta_batch)) {
            const size_t end = std::min(
                order.size(), at + static_cast<size_t>(cfg.tasks_per_meta_batch));
            Eigen::VectorXd outer_grad = Eigen::VectorXd::Zero(model.params.size());
            size_t used = 0;
            for (size_t b = at; b < end; ++b) {
                const MetaTask& task = tasks.tasks[order[b]];
                ++attempted;
                try {
                    ModelParams adapted = inner_adapt(model.params, task.support, cfg);
                    double qloss = 0.0;
                    Eigen::VectorXd g =
                        batch_mse_grad(adapted, {task.query}, &qloss);
                    if (!std::isfinite(qloss) || !g.allFinite())
                        throw std::runtime_error("non-finite query loss");
                    outer_grad += g;
                    epoch_loss += qloss;
                    ++epoch_tasks;
                    ++used;
                } catch (const std::runtime_error&) {
                    ++aborted;
                    if (10 * aborted > attempted)
                        throw std::runtime_error(
                            "more than 10% of tasks aborted during meta-training");
                }
            }
            if (used == 0) continue;
            outer_grad /= static_cast<double>(used);
            adam_step(model.params.flat(), outer_grad, adam, cfg.outer_lr);
        }
        model.epoch_query_loss.push_back(
            epoch_tasks > 0 ? epoch_loss / static_cast<double>(epoch_tasks) : 0.0);
    }
    return model;
}

ModelParams fine_tune(const TrainedModel& model,
                      const std::vector<WindowPair>& target_support) {
    if (static_cast<int>(target_support.size()) != model.K)
        throw std::invalid_argument(
            "fine-tune support size K=" + std::to_string(target_support.size()) +
            " differs from meta-training K=" + std::to_string(model.K));
    return inner_adapt(model.params, target_support, model.cfg);
}

std::vector<EvalRecord> meta_test(const TrainedModel& model,
                                  const TaskSet& target_tasks,
                                  const PreparedSeries& target_prepared,
                                  uint64_t seed) {
    std::vector<EvalRecord> records;
    int task_id = 0;
    for (const MetaTask& task : target_tasks.tasks) {
        ModelParams adapted = fine_tune(model, task.support);
        Eigen::VectorXd pred = predict(adapted, task.query.input);

        EvalRecord rec;
        rec.task_id = task_id++;
        rec.seed = seed;
        rec.mae_transformed = mae_metric(pred, task.query.target);

        const Eigen::Index start = task.query.origin_index + 1;
        Eigen::VectorXd pred_orig = invert_target(target_prepared, start, pred);
        Eigen::VectorXd true_orig =
            original_target(target_prepared, start, pred.size());
        rec.mae_original_units = mae_metric(pred_orig, true_orig);
        records.push_back(rec);
    }
    return records;
}

SeedAggregate aggregate_seeds(
    const std::vector<std::vector<EvalRecord>>& records_by_seed) {
    if (records_by_seed.empty())
        throw std::invalid_argument("no seed groups to aggregate");
    SeedAggregate agg;
    for (const auto& group : records_by_seed) {
        if (group.empty()) throw std::invalid_argument("empty seed group");
        double sum = 0.0;
        for (const EvalRecord& r : group) sum += r.mae_original_units;
        agg.per_seed_mae.push_back(sum / static_cast<double>(group.size()));
    }
    agg.mean_mae =
        std::accumulate(agg.per_seed_mae.begin(), agg.per_seed_mae.end(), 0.0) /
        static_cast<double>(agg.per_seed_mae.size());
    return agg;
}

}  // namespace smaml
