#ifndef SMAML_SERIES_HPP
#define SMAML_SERIES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace smaml {

// Univariate time series. Index t is the t-th chronological observation.
struct Series {
    Eigen::VectorXd values;
    std::string name = "series";

    Series() = default;
    explicit Series(Eigen::VectorXd v, std::string n = "series");
    explicit Series(const std::vector<double>& v, std::string n = "series");
    Series(std::initializer_list<double> v)
        : Series(std::vector<double>(v)) {}

    Eigen::Index length() const { return values.size(); }
};

// Record of the preprocessing applied to a series, sufficient to undo it.
// Differencing of order d is order-1 differencing applied d times; pass i
// consumes (and stores) the first element of the series at that pass.
struct TransformStack {
    int diff_order = 0;
    std::vector<double> diff_initials;  // one entry per pass
    // Exact floating-point residual of each stored difference (TwoSum error
    // term), one vector per pass; makes integrate() an exact inverse. Empty
    // vectors are tolerated for stacks built elsewhere.
    std::vector<Eigen::VectorXd> diff_residuals;
    bool normalized = false;
    double norm_min = 0.0;
    double norm_max = 0.0;
};

struct AdfReport {
    double statistic = 0.0;
    int lag_used = 0;
    double critical_value_5pct = 0.0;
    bool is_stationary = false;
};

struct ArFit {
    int order_p = 0;
    double intercept = 0.0;
    Eigen::VectorXd coefficients;
    double residual_variance = 0.0;
};

// First differences: out[t] = in[t+1] - in[t], repeated `order` times.
std::pair<Series, TransformStack> difference(const Series& series, int order);

// Exact inverse of difference(); needs the stored pass initials.
Series integrate(const Series& diffed, const TransformStack& stack);

// Affine map of [min, max] onto [0, 1]. Rejects constant series.
std::pair<Series, TransformStack> normalize_minmax(const Series& series);
Series denormalize(const Series& normalized, const TransformStack& stack);

// Augmented Dickey-Fuller regression, constant term, no trend:
//   dy_t = a + rho * y_{t-1} + sum_j c_j * dy_{t-j} + e_t
// statistic = rho / se(rho), compared to the MacKinnon 5% critical value.
AdfReport adf_test(const Series& series, int max_lag);

int default_adf_lag(Eigen::Index n);

// Smallest d in 0..max_d whose d-th difference passes the ADF test at 5%;
// returns max_d if none does. max_d capped at 2.
int select_difference_order(const Series& series, int max_d,
                            int max_lag = -1);

// Least-squares fit of y_t = b0 + sum_i b_i y_{t-i} + e_t.
ArFit fit_ar(const Series& series, int order_p);

// S_t = alpha * x_t + (1 - alpha) * S_{t-1}, S_0 = x_0.
Series exponential_smooth(const Series& series, double alpha);

// MacKinnon response-surface critical value, constant-only case.
// level is one of 0.01, 0.05, 0.10.
double mackinnon_critical_value(double level, Eigen::Index nobs);

}  // namespace smaml

#endif  // SMAML_SERIES_HPP
