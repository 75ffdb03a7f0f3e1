#ifndef SMAML_GRADCHECK_HPP
#define SMAML_GRADCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace smaml {

struct GradCheckResult {
    std::string op;
    double max_rel_err = 0.0;
    bool pass = false;
};

// Central finite-difference comparison (h = 1e-5) for every
// differentiable op and the full LSTM+head model, each on at least
// three randomized shapes. Pass threshold: max relative error < 1e-4.
std::vector<GradCheckResult> run_gradcheck(uint64_t seed);

}  // namespace smaml

#endif  // SMAML_GRADCHECK_HPP
