#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "abcopt/interval.hpp"

namespace abcopt {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t n_evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7,15) integration over a finite interval.
///
/// The domain is first cut into a uniform initial partition (merged
/// with any caller-supplied breakpoints) before adaptive refinement, so
/// features much narrower than the domain cannot slip between the nodes
/// of a single opening pass and masquerade as a zero integral.
/// Breakpoints outside the open interval are ignored; callers that know
/// where an integrand concentrates (density component locations, say)
/// should pass those abscissae.
///
/// Throws EvaluationError if the integrand returns a non-finite value
/// (the offending abscissa is named in the message), ConvergenceError if
/// the absolute tolerance is not reached within the evaluation budget,
/// and ConfigError for an empty or non-finite interval.
QuadratureResult integrate(const std::function<double(double)>& f,
                           Interval domain, double abs_tol = 1e-8,
                           std::size_t max_evaluations = 1000000,
                           const std::vector<double>& breakpoints = {});

} // namespace abcopt
