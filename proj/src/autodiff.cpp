#include "smaml/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace smaml {

Var Tape::leaf(const Eigen::MatrixXd& value) {
    nodes_.push_back({value, Eigen::MatrixXd::Zero(value.rows(), value.cols()), {}});
    return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::constant(const Eigen::MatrixXd& value) { return leaf(value); }

const Eigen::MatrixXd& Tape::value(Var v) const {
    return nodes_[static_cast<size_t>(v.id)].value;
}

const Eigen::MatrixXd& Tape::grad(Var v) const {
    return nodes_[static_cast<size_t>(v.id)].grad;
}

Eigen::MatrixXd& Tape::grad_ref(int id) {
    return nodes_[static_cast<size_t>(id)].grad;
}

int Tape::emit(Eigen::MatrixXd value) {
    nodes_.push_back({std::move(value), {}, {}});
    Node& n = nodes_.back();
    n.grad = Eigen::MatrixXd::Zero(n.value.rows(), n.value.cols());
    return static_cast<int>(nodes_.size()) - 1;
}

void Tape::set_back(int id, std::function<void()> back) {
    nodes_[static_cast<size_t>(id)].back = std::move(back);
}

void Tape::backward(Var loss, bool retain) {
    if (consumed_)
        throw std::logic_error("tape already consumed by a previous backward");
    if (loss.tape != this) throw std::logic_error("loss belongs to another tape");
    Node& top = nodes_[static_cast<size_t>(loss.id)];
    if (top.value.size() != 1)
        throw std::invalid_argument("backward requires a scalar loss");
    top.grad(0, 0) = 1.0;
    for (int i = loss.id; i >= 0; --i) {
        Node& n = nodes_[static_cast<size_t>(i)];
        if (n.back) n.back();
    }
    if (!retain) consumed_ = true;
}

namespace {

Tape* same_tape(Var a, Var b) {
    if (a.tape != b.tape) throw std::logic_error("vars belong to different tapes");
    return a.tape;
}

}  // namespace

Var matmul(Var w, Var x) {
    Tape* t = same_tape(w, x);
    if (t->value(w).cols() != t->value(x).rows())
        throw std::invalid_argument("matmul shape mismatch");
    int id = t->emit(t->value(w) * t->value(x));
    t->set_back(id, [t, id, w, x] {
        const Eigen::MatrixXd& g = t->grad({t, id});
        t->grad_ref(w.id) += g * t->value(x).transpose();
        t->grad_ref(x.id) += t->value(w).transpose() * g;
    });
    return {t, id};
}

Var add(Var a, Var b) {
    Tape* t = same_tape(a, b);
    if (t->value(a).rows() != t->value(b).rows() ||
        t->value(a).cols() != t->value(b).cols())
        throw std::invalid_argument("add shape mismatch");
    int id = t->emit(t->value(a) + t->value(b));
    t->set_back(id, [t, id, a, b] {
        const Eigen::MatrixXd& g = t->grad({t, id});
        t->grad_ref(a.id) += g;
        t->grad_ref(b.id) += g;
    });
    return {t, id};
}

Var sub(Var a, Var b) {
    Tape* t = same_tape(a, b);
    if (t->value(a).rows() != t->value(b).rows() ||
        t->value(a).cols() != t->value(b).cols())
        throw std::invalid_argument("sub shape mismatch");
    int id = t->emit(t->value(a) - t->value(b));
    t->set_back(id, [t, id, a, b] {
        const Eigen::MatrixXd& g = t->grad({t, id});
        t->grad_ref(a.id) += g;
        t->grad_ref(b.id) -= g;
    });
    return {t, id};
}

Var cmul(Var a, Var b) {
    Tape* t = same_tape(a, b);
    if (t->value(a).rows() != t->value(b).rows() ||
        t->value(a).cols() != t->value(b).cols())
        throw std::invalid_argument("cmul shape mismatch");
    int id = t->emit(t->value(a).cwiseProduct(t->value(b)));
    t->set_back(id, [t, id, a, b] {
        const Eigen::MatrixXd& g = t->grad({t, id});
        t->grad_ref(a.id) += g.cwiseProduct(t->value(b));
        t->grad_ref(b.id) += g.cwiseProduct(t->value(a));
    });
    return {t, id};
}

Var scale(Var a, double c) {
    Tape* t = a.tape;
    int id = t->emit(t->value(a) * c);
    t->set_back(id, [t, id, a, c] { t->grad_ref(a.id) += t->grad({t, id}) * c; });
    return {t, id};
}

Var sigmoid(Var a) {
    Tape* t = a.tape;
    Eigen::MatrixXd s =
        t->value(a).unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    int id = t->emit(std::move(s));
    t->set_back(id, [t, id, a] {
        const Eigen::MatrixXd& y = t->value({t, id});
        t->grad_ref(a.id) += t->grad({t, id})
                                 .cwiseProduct(y)
                                 .cwiseProduct((1.0 - y.array()).matrix());
    });
    return {t, id};
}

Var tanh_op(Var a) {
    Tape* t = a.tape;
    int id = t->emit(t->value(a).array().tanh().matrix());
    t->set_back(id, [t, id, a] {
        const Eigen::MatrixXd& y = t->value({t, id});
        t->grad_ref(a.id) += t->grad({t, id})
                                 .cwiseProduct((1.0 - y.array().square()).matrix());
    });
    return {t, id};
}

Var segment(Var a, Eigen::Index start, Eigen::Index len) {
    Tape* t = a.tape;
    if (t->value(a).cols() != 1)
        throw std::invalid_argument("segment expects a column vector");
    if (start < 0 || start + len > t->value(a).rows())
        throw std::invalid_argument("segment out of range");
    int id = t->emit(t->value(a).block(start, 0, len, 1));
    t->set_back(id, [t, id, a, start, len] {
        t->grad_ref(a.id).block(start, 0, len, 1) += t->grad({t, id});
    });
    return {t, id};
}

Var mse_against(Var pred, const Eigen::VectorXd& target) {
    Tape* t = pred.tape;
    if (t->value(pred).cols() != 1 || t->value(pred).rows() != target.size())
        throw std::invalid_argument("loss shape mismatch");
    const Eigen::VectorXd diff = t->value(pred).col(0) - target;
    Eigen::MatrixXd out(1, 1);
    out(0, 0) = diff.squaredNorm() / static_cast<double>(target.size());
    int id = t->emit(std::move(out));
    t->set_back(id, [t, id, pred, target] {
        const double g = t->grad({t, id})(0, 0);
        const double n = static_cast<double>(target.size());
        t->grad_ref(pred.id) +=
            g * 2.0 / n * (t->value(pred).col(0) - target);
    });
    return {t, id};
}

}  // namespace smaml
