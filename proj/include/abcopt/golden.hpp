#pragma once

#include <cstddef>
#include <functional>

namespace abcopt {

struct OptimizeResult {
    double x = 0.0;
    double f_of_x = 0.0;
    std::size_t n_iterations = 0;
    bool converged = false;
};

/// Golden-section search for the maximum of a unimodal function on
/// [lo, hi]. Stops when the bracket width falls below
/// rel_tol * max(1, |x|). Throws ConfigError on an invalid bracket.
OptimizeResult golden_section_maximize(const std::function<double(double)>& f,
                                       double lo, double hi,
                                       double rel_tol = 1e-6,
                                       std::size_t max_iter = 200);

} // namespace abcopt
