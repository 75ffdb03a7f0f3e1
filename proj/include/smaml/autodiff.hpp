#ifndef SMAML_AUTODIFF_HPP
#define SMAML_AUTODIFF_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace smaml {

class Tape;

// Handle into a tape node. Cheap to copy; valid only for its tape's life.
struct Var {
    Tape* tape = nullptr;
    int id = -1;
};

// Record of a forward computation over matrix-valued nodes. backward()
// seeds the scalar loss with 1 and runs the recorded closures in reverse.
class Tape {
public:
    Var leaf(const Eigen::MatrixXd& value);
    Var constant(const Eigen::MatrixXd& value);

    const Eigen::MatrixXd& value(Var v) const;
    const Eigen::MatrixXd& grad(Var v) const;

    // One backward per forward unless retain is set.
    void backward(Var loss, bool retain = false);

    int emit(Eigen::MatrixXd value);
    void set_back(int id, std::function<void()> back);
    Eigen::MatrixXd& grad_ref(int id);

private:
    struct Node {
        Eigen::MatrixXd value;
        Eigen::MatrixXd grad;
        std::function<void()> back;  // empty for leaves/constants
    };
    std::vector<Node> nodes_;
    bool consumed_ = false;
};

// Differentiable ops. Vectors are n-by-1 matrices.
Var matmul(Var w, Var x);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var cmul(Var a, Var b);           // elementwise
Var scale(Var a, double c);
Var sigmoid(Var a);
Var tanh_op(Var a);
Var segment(Var a, Eigen::Index start, Eigen::Index len);
Var mse_against(Var pred, const Eigen::VectorXd& target);  // scalar mean sq err

}  // namespace smaml

#endif  // SMAML_AUTODIFF_HPP
