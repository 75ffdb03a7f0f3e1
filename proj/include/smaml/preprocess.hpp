#ifndef SMAML_PREPROCESS_HPP
#define SMAML_PREPROCESS_HPP

#include <Eigen/Dense>

#include "smaml/series.hpp"

namespace smaml {

enum class DiffMode { automatic, fixed, off };

// A series together with everything needed to map model outputs back to
// original units: raw values, the differenced+normalized working copy,
// and the transforms applied.
struct PreparedSeries {
    Series raw;
    Series transformed;
    TransformStack diff_stack;   // diff_order == 0 when no differencing
    TransformStack norm_stack;
    AdfReport adf;               // report on the raw series
};

// Difference (per mode, order capped at 2) then normalize to [0, 1].
PreparedSeries prepare_series(const Series& raw, DiffMode mode,
                              int fixed_d = 0, int max_lag = -1);

// Map a predicted target window from transformed space back to original
// units. `start` is the window's first index in the transformed series.
Eigen::VectorXd invert_target(const PreparedSeries& prepared,
                              Eigen::Index start,
                              const Eigen::VectorXd& pred_transformed);

// The true original-units values of the same window.
Eigen::VectorXd original_target(const PreparedSeries& prepared,
                                Eigen::Index start, Eigen::Index len);

}  // namespace smaml

#endif  // SMAML_PREPROCESS_HPP
