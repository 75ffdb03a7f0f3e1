#include "smaml/preprocess.hpp"

#include <stdexcept>

namespace smaml {

PreparedSeries prepare_series(const Series& raw, DiffMode mode, int fixed_d,
                              int max_lag) {
    PreparedSeries out;
    out.raw = raw;
    const int lag = max_lag >= 0 ? max_lag : default_adf_lag(raw.length());
    out.adf = adf_test(raw, lag);

    int d = 0;
    switch (mode) {
        case DiffMode::automatic:
            d = select_difference_order(raw, 2, max_lag);
            break;
        case DiffMode::fixed:
            if (fixed_d < 0 || fixed_d > 2)
                throw std::invalid_argument("fixed differencing order must be 0..2");
            d = fixed_d;
            break;
        case DiffMode::off:
            d = 0;
            break;
    }

    Series work = raw;
    if (d > 0) {
        auto [diffed, stack] = difference(raw, d);
        work = std::move(diffed);
        out.diff_stack = std::move(stack);
    }
    auto [normed, nstack] = normalize_minmax(work);
    out.transformed = std::move(normed);
    out.norm_stack = std::move(nstack);
    return out;
}

Eigen::VectorXd invert_target(const PreparedSeries& prepared,
                              Eigen::Index start,
                              const Eigen::VectorXd& pred_transformed) {
    const int d = prepared.diff_stack.diff_order;
    const Eigen::Index len = pred_transformed.size();
    if (start < 0 || start + len > prepared.transformed.length())
        throw std::invalid_argument("target window outside transformed series");

    Eigen::VectorXd cur =
        denormalize(Series(pred_transformed), prepared.norm_stack).values;

    // Walk back up the differencing levels. A window starting at index s
    // of level k starts at index s+1 of level k-1, and needs the level
    // k-1 value immediately before it as the integration anchor.
    Eigen::Index s = start;
    Series level = prepared.raw;
    std::vector<Series> levels{level};
    for (int k = 1; k <= d; ++k) {
        level = difference(level, 1).first;
        levels.push_back(level);
    }
    for (int k = d; k >= 1; --k) {
        const Eigen::Index s_prev = s + 1;  // index in level k-1
        if (s_prev < 1)
            throw std::invalid_argument("no anchor value before target window");
        Eigen::VectorXd up(len);
        double acc = levels[static_cast<size_t>(k - 1)].values[s_prev - 1];
        for (Eigen::Index i = 0; i < len; ++i) {
            acc += cur[i];
            up[i] = acc;
        }
        cur = std::move(up);
        s = s_prev;
    }
    return cur;
}

Eigen::VectorXd original_target(const PreparedSeries& prepared,
                                Eigen::Index start, Eigen::Index len) {
    const int d = prepared.diff_stack.diff_order;
    if (start < 0 || start + len > prepared.transformed.length())
        throw std::invalid_argument("target window outside transformed series");
    return prepared.raw.values.segment(start + d, len);
}

}  // namespace smaml
