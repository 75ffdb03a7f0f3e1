#include "smaml/gradcheck.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>

#include "smaml/autodiff.hpp"
#include "smaml/model.hpp"

namespace smaml {

namespace {

constexpr double kH = 1e-5;
constexpr double kTol = 1e-4;

// Scalar loss built from leaf matrices; re-evaluated for finite differences.
using Forward = std::function<double(Tape&, const std::vector<Var>&)>;

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

double check_one(const std::vector<Eigen::MatrixXd>& inputs, const Forward& fwd) {
    // One recorded pass for analytic gradients, then numeric probes.
    Tape t;
    std::vector<Var> vs;
    for (const auto& m : inputs) vs.push_back(t.leaf(m));
    fwd(t, vs);

    double max_err = 0.0;
    for (size_t li = 0; li < inputs.size(); ++li) {
        const Eigen::MatrixXd& analytic = t.grad(vs[li]);
        for (Eigen::Index r = 0; r < analytic.rows(); ++r)
            for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
                auto eval = [&](double delta) {
                    std::vector<Eigen::MatrixXd> pert = inputs;
                    pert[li](r, c) += delta;
                    Tape t2;
                    std::vector<Var> vs2;
                    for (const auto& m : pert) vs2.push_back(t2.leaf(m));
                    return fwd(t2, vs2);
                };
                const double numeric = (eval(kH) - eval(-kH)) / (2.0 * kH);
                max_err = std::max(max_err, rel_err(analytic(r, c), numeric));
            }
    }
    return max_err;
}

}  // namespace

std::vector<GradCheckResult> run_gradcheck(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto rand_mat = [&](Eigen::Index r, Eigen::Index c) {
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = gauss(rng);
        return m;
    };
    auto rand_vec = [&](Eigen::Index n) { return rand_mat(n, 1); };

    // Forward closures run the op, fold the result to a scalar with a
    // fixed quadratic, and call backward so analytic grads populate.
    auto finish = [](Tape& t, Var out, const Eigen::VectorXd& target) {
        Var loss = mse_against(out, target);
        const double v = t.value(loss)(0, 0);
        t.backward(loss, true);
        return v;
    };

    struct Case {
        std::string op;
        std::vector<Eigen::MatrixXd> inputs;
        Forward fwd;
    };
    std::vector<Case> cases;
    const std::vector<Eigen::Index> sizes = {2, 3, 5};

    for (Eigen::Index n : sizes) {
        Eigen::VectorXd tgt = rand_vec(n);
        cases.push_back({"matmul",
                         {rand_mat(n, n + 1), rand_vec(n + 1)},
                         [tgt, &finish](Tape& t, const std::vector<Var>& v) {
                             return finish(t, matmul(v[0], v[1]), tgt);
                         }});
        cases.push_back({"add",
                         {rand_vec(n), rand_vec(n)},
                         [tgt, &finish](Tape& t, const std::vector<Var>& v) {
                             return finish(t, add(v[0], v[1]), tgt);
                         }});
        cases.push_back({"sub",
                         {rand_vec(n), rand_vec(n)},
                         [tgt, &finish](Tape& t, const std::vector<Var>& v) {
                             return finish(t, sub(v[0], v[1]), tgt);
                         }});
        cases.push_back({"cmul",
                         {rand_vec(n), rand_vec(n)},
                         [tgt, &finish](Tape& t, const std::vector<Var>& v) {
                             return finish(t, cmul(v[0], v[1]), tgt);
                         }});
        cases.push_back({"sigmoid",
                         {rand_vec(n)},
                         [tgt, &finish](Tape& t, const std::vector<Var>& v) {
                             return finish(t, sigmoid(v[0]), tgt);
                         }});
        cases.push_back({"tanh",
                         {rand_vec(n)},
                         [tgt, &finish](Tape& t, const std::vector<Var>& v) {
                             return finish(t, tanh_op(v[0]), tgt);
                         }});
        Eigen::VectorXd tgt_seg = rand_vec(n);
        cases.push_back({"segment",
                         {rand_vec(2 * n)},
                         [tgt_seg, n, &finish](Tape& t, const std::vector<Var>& v) {
                             return finish(t, segment(v[0], n / 2, n), tgt_seg);
                         }});
        cases.push_back({"scale",
                         {rand_vec(n)},
                         [tgt, &finish](Tape& t, const std::vector<Var>& v) {
                             return finish(t, scale(v[0], 1.7), tgt);
                         }});
        cases.push_back({"mse",
                         {rand_vec(n)},
                         [tgt](Tape& t, const std::vector<Var>& v) {
                             Var loss = mse_against(v[0], tgt);
                             const double val = t.value(loss)(0, 0);
                             t.backward(loss, true);
                             return val;
                         }});
    }

    // Full LSTM+head model at three sizes: perturb the flat parameter
    // vector through the registered leaves.
    for (int hidden : {3, 4, 6}) {
        const int L = 8;
        ModelParams proto = ModelParams::random_init(1, hidden, 2, seed + hidden);
        Eigen::VectorXd input = rand_vec(L);
        Eigen::VectorXd tgt = rand_vec(2);
        std::vector<Eigen::MatrixXd> leaves = {proto.wx(), proto.wh(), proto.bias(),
                                               proto.w_head(), proto.b_head()};
        cases.push_back(
            {"lstm_forward", leaves,
             [input, tgt, proto, &finish](Tape& t, const std::vector<Var>& v) {
                 ParamLeaves pl{v[0], v[1], v[2], v[3], v[4]};
                 return finish(t, lstm_forward(t, pl, proto, input), tgt);
             }});
    }

    std::vector<GradCheckResult> results;
    for (const Case& c : cases) {
        double err = check_one(c.inputs, c.fwd);
        bool merged = false;
        for (GradCheckResult& r : results)
            if (r.op == c.op) {
                r.max_rel_err = std::max(r.max_rel_err, err);
                r.pass = r.max_rel_err < kTol;
                merged = true;
            }
        if (!merged) results.push_back({c.op, err, err < kTol});
    }
    return results;
}

}  // namespace smaml
