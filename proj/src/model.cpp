#include "smaml/model.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace smaml {

namespace {

constexpr char kMagic[8] = {'S', 'M', 'A', 'M', 'L', 'P', '0', '1'};

struct Offsets {
    Eigen::Index wx, wh, bias, w_head, b_head, total;
};

Offsets offsets(int I, int H, int O) {
    Offsets o;
    o.wx = 0;
    o.wh = o.wx + 4 * H * I;
    o.bias = o.wh + 4 * H * H;
    o.w_head = o.bias + 4 * H;
    o.b_head = o.w_head + static_cast<Eigen::Index>(O) * H;
    o.total = o.b_head + O;
    return o;
}

}  // namespace

ModelParams::ModelParams(int input_size, int hidden_size, int output_size)
    : input_size_(input_size), hidden_size_(hidden_size), output_size_(output_size) {
    if (input_size < 1 || hidden_size < 1 || output_size < 1)
        throw std::invalid_argument("model sizes must be positive");
    theta_ = Eigen::VectorXd::Zero(offsets(input_size, hidden_size, output_size).total);
}

ModelParams ModelParams::random_init(int input_size, int hidden_size,
                                     int output_size, uint64_t seed) {
    ModelParams p(input_size, hidden_size, output_size);
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const Offsets o = offsets(input_size, hidden_size, output_size);
    for (Eigen::Index i = 0; i < o.bias; ++i) p.theta_[i] = dist(rng);
    for (Eigen::Index i = o.w_head; i < o.b_head; ++i) p.theta_[i] = dist(rng);
    // Forget-gate bias starts at +1.
    p.theta_.segment(o.bias + hidden_size, hidden_size).setOnes();
    return p;
}

Eigen::Map<const Eigen::MatrixXd> ModelParams::wx() const {
    const Offsets o = offsets(input_size_, hidden_size_, output_size_);
    return {theta_.data() + o.wx, 4 * hidden_size_, input_size_};
}
Eigen::Map<const Eigen::MatrixXd> ModelParams::wh() const {
    const Offsets o = offsets(input_size_, hidden_size_, output_size_);
    return {theta_.data() + o.wh, 4 * hidden_size_, hidden_size_};
}
Eigen::Map<const Eigen::VectorXd> ModelParams::bias() const {
    const Offsets o = offsets(input_size_, hidden_size_, output_size_);
    return {theta_.data() + o.bias, 4 * hidden_size_};
}
Eigen::Map<const Eigen::MatrixXd> ModelParams::w_head() const {
    const Offsets o = offsets(input_size_, hidden_size_, output_size_);
    return {theta_.data() + o.w_head, output_size_, hidden_size_};
}
Eigen::Map<const Eigen::VectorXd> ModelParams::b_head() const {
    const Offsets o = offsets(input_size_, hidden_size_, output_size_);
    return {theta_.data() + o.b_head, output_size_};
}

void ModelParams::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f.write(kMagic, 8);
    const uint32_t sizes[3] = {static_cast<uint32_t>(input_size_),
                               static_cast<uint32_t>(hidden_size_),
                               static_cast<uint32_t>(output_size_)};
    f.write(reinterpret_cast<const char*>(sizes), sizeof(sizes));
    f.write(reinterpret_cast<const char*>(theta_.data()),
            static_cast<std::streamsize>(theta_.size() * sizeof(double)));
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

ModelParams ModelParams::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("'" + path + "' is not a model parameter file");
    uint32_t sizes[3];
    f.read(reinterpret_cast<char*>(sizes), sizeof(sizes));
    if (!f) throw std::runtime_error("truncated parameter file '" + path + "'");
    ModelParams p(static_cast<int>(sizes[0]), static_cast<int>(sizes[1]),
                  static_cast<int>(sizes[2]));
    f.read(reinterpret_cast<char*>(p.theta_.data()),
           static_cast<std::streamsize>(p.theta_.size() * sizeof(double)));
    if (!f) throw std::runtime_error("truncated parameter file '" + path + "'");
    return p;
}

ParamLeaves register_params(Tape& tape, const ModelParams& p) {
    ParamLeaves l;
    l.wx = tape.leaf(p.wx());
    l.wh = tape.leaf(p.wh());
    l.bias = tape.leaf(p.bias());
    l.w_head = tape.leaf(p.w_head());
    l.b_head = tape.leaf(p.b_head());
    return l;
}

Var lstm_forward(Tape& tape, const ParamLeaves& leaves,
                 const ModelParams& params, const Eigen::VectorXd& input) {
    const int I = params.input_size();
    const int H = params.hidden_size();
    if (input.size() % I != 0)
        throw std::invalid_argument(
            "input length not divisible by input_size (segment Wx)");
    const Eigen::Index steps = input.size() / I;
    if (steps < 1) throw std::invalid_argument("empty input window");

    Var h = tape.constant(Eigen::VectorXd::Zero(H));
    Var c = tape.constant(Eigen::VectorXd::Zero(H));
    for (Eigen::Index t = 0; t < steps; ++t) {
        Var xt = tape.constant(input.segment(t * I, I));
        Var pre = add(add(matmul(leaves.wx, xt), matmul(leaves.wh, h)),
                      leaves.bias);
        Var gi = sigmoid(segment(pre, 0, H));
        Var gf = sigmoid(segment(pre, H, H));
        Var gc = tanh_op(segment(pre, 2 * H, H));
        Var go = sigmoid(segment(pre, 3 * H, H));
        c = add(cmul(gf, c), cmul(gi, gc));
        h = cmul(go, tanh_op(c));
    }
    return add(matmul(leaves.w_head, h), leaves.b_head);
}

Eigen::VectorXd predict(const ModelParams& params, const Eigen::VectorXd& input) {
    Tape tape;
    ParamLeaves leaves = register_params(tape, params);
    Var out = lstm_forward(tape, leaves, params, input);
    return tape.value(out).col(0);
}

Eigen::VectorXd collect_grad(const Tape& tape, const ParamLeaves& leaves,
                             const ModelParams& params) {
    Eigen::VectorXd g(params.size());
    Eigen::Index off = 0;
    for (Var v : {leaves.wx, leaves.wh, leaves.bias, leaves.w_head, leaves.b_head}) {
        const Eigen::MatrixXd& gm = tape.grad(v);
        g.segment(off, gm.size()) =
            Eigen::Map<const Eigen::VectorXd>(gm.data(), gm.size());
        off += gm.size();
    }
    return g;
}

Eigen::VectorXd batch_mse_grad(const ModelParams& params,
                               const std::vector<WindowPair>& samples,
                               double* loss_out) {
    if (samples.empty()) throw std::invalid_argument("empty sample batch");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(params.size());
    double loss = 0.0;
    for (const WindowPair& w : samples) {
        Tape tape;
        ParamLeaves leaves = register_params(tape, params);
        Var pred = lstm_forward(tape, leaves, params, w.input);
        Var l = mse_against(pred, w.target);
        loss += tape.value(l)(0, 0);
        tape.backward(l);
        g += collect_grad(tape, leaves, params);
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    g *= inv;
    if (loss_out) *loss_out = loss * inv;
    return g;
}

double batch_mse(const ModelParams& params,
                 const std::vector<WindowPair>& samples) {
    if (samples.empty()) throw std::invalid_argument("empty sample batch");
    double loss = 0.0;
    for (const WindowPair& w : samples)
        loss += mse_loss(predict(params, w.input), w.target);
    return loss / static_cast<double>(samples.size());
}

double mse_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (pred.size() != target.size())
        throw std::invalid_argument("loss shape mismatch");
    return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double mae_metric(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (pred.size() != target.size())
        throw std::invalid_argument("metric shape mismatch");
    return (pred - target).cwiseAbs().mean();
}

}  // namespace smaml
