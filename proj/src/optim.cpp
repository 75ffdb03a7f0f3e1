#include "smaml/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace smaml {

AdamState AdamState::init(Eigen::Index param_count) {
    AdamState s;
    s.m = Eigen::VectorXd::Zero(param_count);
    s.v = Eigen::VectorXd::Zero(param_count);
    return s;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads,
               AdamState& state, double lr) {
    if (grads.size() != params.size() || state.m.size() != params.size())
        throw std::invalid_argument("optimizer state/gradient misaligned with params");
    if (!grads.allFinite()) throw std::invalid_argument("gradient overflow");

    state.step_count += 1;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
    state.v = state.beta2 * state.v.array().matrix() +
              (1.0 - state.beta2) * grads.array().square().matrix();
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    params.array() -= lr * (state.m.array() / bc1) /
                      ((state.v.array() / bc2).sqrt() + state.epsilon);
}

void sgd_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, double lr) {
    if (grads.size() != params.size())
        throw std::invalid_argument("gradient misaligned with params");
    if (!grads.allFinite()) throw std::invalid_argument("gradient overflow");
    params -= lr * grads;
}

}  // namespace smaml
