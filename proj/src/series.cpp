#include "smaml/series.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace smaml {

namespace {

void check_finite(const Eigen::VectorXd& v, const std::string& name) {
    if (!v.allFinite())
        throw std::invalid_argument("series '" + name + "' contains non-finite values");
}

}  // namespace

Series::Series(Eigen::VectorXd v, std::string n)
    : values(std::move(v)), name(std::move(n)) {
    if (values.size() < 1) throw std::invalid_argument("series must have length >= 1");
    check_finite(values, name);
}

Series::Series(const std::vector<double>& v, std::string n)
    : Series(Eigen::Map<const Eigen::VectorXd>(v.data(),
                                               static_cast<Eigen::Index>(v.size())),
             std::move(n)) {}

std::pair<Series, TransformStack> difference(const Series& series, int order) {
    if (order < 1) throw std::invalid_argument("differencing order must be >= 1");
    if (series.length() <= order)
        throw std::invalid_argument("series too short for differencing order");

    TransformStack stack;
    stack.diff_order = order;
    Eigen::VectorXd cur = series.values;
    for (int pass = 0; pass < order; ++pass) {
        stack.diff_initials.push_back(cur[0]);
        Eigen::VectorXd next(cur.size() - 1);
        Eigen::VectorXd resid(cur.size() - 1);
        for (Eigen::Index i = 0; i < next.size(); ++i) {
            // TwoSum of (a, -b): s + err == a - b exactly.
            const double a = cur[i + 1], nb = -cur[i];
            const double s = a + nb;
            const double bb = s - a;
            next[i] = s;
            resid[i] = (a - (s - bb)) + (nb - bb);
        }
        stack.diff_residuals.push_back(std::move(resid));
        cur = std::move(next);
    }
    return {Series(std::move(cur), series.name), std::move(stack)};
}

Series integrate(const Series& diffed, const TransformStack& stack) {
    if (stack.diff_order < 1)
        throw std::invalid_argument("transform stack has no differencing to invert");
    if (static_cast<int>(stack.diff_initials.size()) != stack.diff_order)
        throw std::invalid_argument("initials count inconsistent with differencing order");

    Eigen::VectorXd cur = diffed.values;
    for (int pass = stack.diff_order - 1; pass >= 0; --pass) {
        const auto p = static_cast<size_t>(pass);
        const Eigen::VectorXd* resid =
            p < stack.diff_residuals.size() &&
                    stack.diff_residuals[p].size() == cur.size()
                ? &stack.diff_residuals[p]
                : nullptr;
        Eigen::VectorXd out(cur.size() + 1);
        out[0] = stack.diff_initials[p];
        // Extended-precision running sum plus the stored difference residuals
        // makes the reconstruction an exact inverse of difference().
        long double sum = out[0];
        for (Eigen::Index i = 0; i < cur.size(); ++i) {
            sum += cur[i];
            if (resid) sum += (*resid)[i];
            out[i + 1] = static_cast<double>(sum);
        }
        cur = std::move(out);
    }
    return Series(std::move(cur), diffed.name);
}

std::pair<Series, TransformStack> normalize_minmax(const Series& series) {
    if (series.length() < 2)
        throw std::invalid_argument("normalization needs length >= 2");
    const double lo = series.values.minCoeff();
    const double hi = series.values.maxCoeff();
    if (!(hi > lo))
        throw std::invalid_argument("zero range: constant series cannot be normalized");

    TransformStack stack;
    stack.normalized = true;
    stack.norm_min = lo;
    stack.norm_max = hi;
    Eigen::VectorXd out = (series.values.array() - lo) / (hi - lo);
    return {Series(std::move(out), series.name), std::move(stack)};
}

Series denormalize(const Series& normalized, const TransformStack& stack) {
    if (!stack.normalized)
        throw std::invalid_argument("transform stack has no normalization to invert");
    Eigen::VectorXd out =
        normalized.values.array() * (stack.norm_max - stack.norm_min) + stack.norm_min;
    return Series(std::move(out), normalized.name);
}

double mackinnon_critical_value(double level, Eigen::Index nobs) {
    // MacKinnon (2010) response-surface coefficients, constant-only case.
    const double n = static_cast<double>(nobs);
    if (level == 0.01)
        return -3.43035 - 6.5393 / n - 16.786 / (n * n) - 79.433 / (n * n * n);
    if (level == 0.05)
        return -2.86154 - 2.8903 / n - 4.234 / (n * n) - 40.040 / (n * n * n);
    if (level == 0.10)
        return -2.56677 - 1.5384 / n - 2.809 / (n * n);
    throw std::invalid_argument("unsupported significance level");
}

int default_adf_lag(Eigen::Index n) {
    return static_cast<int>(std::floor(std::cbrt(static_cast<double>(n - 1))));
}

AdfReport adf_test(const Series& series, int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("max_lag must be non-negative");
    const Eigen::Index n = series.length();
    if (n < max_lag + 10)
        throw std::invalid_argument("series too short for ADF with this lag");

    const Eigen::VectorXd& y = series.values;
    Eigen::VectorXd dy = y.tail(n - 1) - y.head(n - 1);

    // Rows are t = max_lag .. n-2 indexed on dy.
    const Eigen::Index rows = dy.size() - max_lag;
    const Eigen::Index cols = 2 + max_lag;  // [y_{t-1}, 1, dy lags]
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = r + max_lag;  // dy index
        b[r] = dy[t];
        X(r, 0) = y[t];  // level lagged once relative to dy[t]
        X(r, 1) = 1.0;
        for (int j = 1; j <= max_lag; ++j) X(r, 1 + j) = dy[t - j];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < cols) {
        // Collinear lagged-difference columns (e.g. a pure ramp, whose
        // differences are constant): drop the lags and retry. A series that
        // is still rank-deficient with just [y_{t-1}, 1] carries no signal.
        if (max_lag > 0) return adf_test(series, 0);
        throw std::invalid_argument("degenerate series");
    }
    Eigen::VectorXd beta = qr.solve(b);
    Eigen::VectorXd resid = b - X * beta;
    const double dof = static_cast<double>(rows - cols);
    if (dof <= 0) throw std::invalid_argument("degenerate series");
    const double sigma2 = resid.squaredNorm() / dof;

    AdfReport rep;
    rep.lag_used = max_lag;
    if (resid.squaredNorm() <= b.squaredNorm() * 1e-24 + 1e-300) {
        // Exact deterministic recurrence: the residual scale carries no
        // information, so classify on the sign of rho alone.
        rep.statistic = beta[0] < -1e-8
                            ? -std::numeric_limits<double>::infinity()
                            : 0.0;
    } else {
        Eigen::MatrixXd xtx_inv = (X.transpose() * X)
                                      .ldlt()
                                      .solve(Eigen::MatrixXd::Identity(cols, cols));
        const double se = std::sqrt(sigma2 * xtx_inv(0, 0));
        if (!(se > 0.0)) throw std::invalid_argument("degenerate series");
        rep.statistic = beta[0] / se;
    }
    rep.critical_value_5pct = mackinnon_critical_value(0.05, rows);
    rep.is_stationary = rep.statistic < rep.critical_value_5pct;
    return rep;
}

int select_difference_order(const Series& series, int max_d, int max_lag) {
    if (max_d < 1 || max_d > 2)
        throw std::invalid_argument("max differencing order must be 1 or 2");
    for (int d = 0; d <= max_d; ++d) {
        Series cur = series;
        if (d > 0) cur = difference(series, d).first;
        const int lag = max_lag >= 0 ? max_lag : default_adf_lag(cur.length());
        if (adf_test(cur, lag).is_stationary) return d;
    }
    return max_d;
}

ArFit fit_ar(const Series& series, int order_p) {
    if (order_p < 1) throw std::invalid_argument("AR order must be >= 1");
    const Eigen::Index n = series.length();
    if (n < order_p + 2)
        throw std::invalid_argument("series too short for AR order");

    const Eigen::VectorXd& y = series.values;
    const Eigen::Index rows = n - order_p;
    Eigen::MatrixXd X(rows, order_p + 1);
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = r + order_p;
        b[r] = y[t];
        X(r, 0) = 1.0;
        for (int j = 1; j <= order_p; ++j) X(r, j) = y[t - j];
    }

    // Rank-deficient designs (e.g. constant series) take the minimal-norm fit.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    Eigen::VectorXd beta = cod.solve(b);
    if (!beta.allFinite()) throw std::invalid_argument("singular AR normal equations");

    ArFit fit;
    fit.order_p = order_p;
    fit.intercept = beta[0];
    fit.coefficients = beta.tail(order_p);
    fit.residual_variance = (b - X * beta).squaredNorm() / static_cast<double>(rows);
    return fit;
}

Series exponential_smooth(const Series& series, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("smoothing alpha must be in (0, 1]");
    Eigen::VectorXd out(series.length());
    out[0] = series.values[0];
    for (Eigen::Index t = 1; t < series.length(); ++t)
        out[t] = alpha * series.values[t] + (1.0 - alpha) * out[t - 1];
    return Series(std::move(out), series.name);
}

}  // namespace smaml
