#pragma once

#include <stdexcept>
#include <string>

namespace abcopt {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A density or integrand evaluated to NaN/Inf at a concrete point.
struct EvaluationError : Error {
    using Error::Error;
};

/// An integral failed to converge within the evaluation budget.
struct ConvergenceError : Error {
    using Error::Error;
};

/// A functional is divergent for the given pair of densities.
struct DivergenceError : Error {
    using Error::Error;
};

/// Invalid configuration, specification, or argument.
struct ConfigError : Error {
    using Error::Error;
};

/// An ABC iteration exceeded its proposal budget without filling the
/// target population.
struct StallError : Error {
    using Error::Error;
};

} // namespace abcopt
