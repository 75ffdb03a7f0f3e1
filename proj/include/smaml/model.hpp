#ifndef SMAML_MODEL_HPP
#define SMAML_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "smaml/autodiff.hpp"
#include "smaml/partition.hpp"

namespace smaml {

// Single-layer LSTM plus linear head, stored as one flat parameter vector.
// Segment order (also the serialized order): Wx [4H x I], Wh [4H x H],
// b [4H], Whead [O x H], bhead [O]. Gate row blocks: input, forget,
// cell candidate, output.
class ModelParams {
public:
    ModelParams(int input_size, int hidden_size, int output_size);

    static ModelParams random_init(int input_size, int hidden_size,
                                   int output_size, uint64_t seed);

    int input_size() const { return input_size_; }
    int hidden_size() const { return hidden_size_; }
    int output_size() const { return output_size_; }

    Eigen::VectorXd& flat() { return theta_; }
    const Eigen::VectorXd& flat() const { return theta_; }
    Eigen::Index size() const { return theta_.size(); }

    Eigen::Map<const Eigen::MatrixXd> wx() const;
    Eigen::Map<const Eigen::MatrixXd> wh() const;
    Eigen::Map<const Eigen::VectorXd> bias() const;
    Eigen::Map<const Eigen::MatrixXd> w_head() const;
    Eigen::Map<const Eigen::VectorXd> b_head() const;

    void save(const std::string& path) const;
    static ModelParams load(const std::string& path);

private:
    int input_size_, hidden_size_, output_size_;
    Eigen::VectorXd theta_;
};

// Parameter leaves registered on a tape for one forward pass.
struct ParamLeaves {
    Var wx, wh, bias, w_head, b_head;
};

ParamLeaves register_params(Tape& tape, const ModelParams& params);

// LSTM over the input window from zero state; head on the final hidden
// state. Input is a flat window of length L (univariate) or L x I.
Var lstm_forward(Tape& tape, const ParamLeaves& leaves,
                 const ModelParams& params, const Eigen::VectorXd& input);

// Non-recording convenience: prediction only.
Eigen::VectorXd predict(const ModelParams& params, const Eigen::VectorXd& input);

// Collect leaf gradients into a flat vector aligned with ModelParams.
Eigen::VectorXd collect_grad(const Tape& tape, const ParamLeaves& leaves,
                             const ModelParams& params);

// Gradient of the mean MSE over the samples, at `params`.
Eigen::VectorXd batch_mse_grad(const ModelParams& params,
                               const std::vector<WindowPair>& samples,
                               double* loss_out = nullptr);

double batch_mse(const ModelParams& params,
                 const std::vector<WindowPair>& samples);

double mse_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);
double mae_metric(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

}  // namespace smaml

#endif  // SMAML_MODEL_HPP
