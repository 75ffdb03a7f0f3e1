#ifndef SMAML_OPTIM_HPP
#define SMAML_OPTIM_HPP

#include <Eigen/Dense>

namespace smaml {

// Bias-corrected Adam state over a flat parameter vector.
struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-9;

    static AdamState init(Eigen::Index param_count);
};

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads,
               AdamState& state, double lr);

void sgd_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, double lr);

}  // namespace smaml

#endif  // SMAML_OPTIM_HPP
