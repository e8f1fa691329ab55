#include "abcopt/golden.hpp"

#include <cmath>

#include "abcopt/errors.hpp"

namespace abcopt {

OptimizeResult golden_section_maximize(const std::function<double(double)>& f,
                                       double lo, double hi, double rel_tol,
                                       std::size_t max_iter) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw ConfigError("golden_section_maximize: invalid bracket");

    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);

    OptimizeResult result;
    for (std::size_t i = 0; i < max_iter; ++i) {
        ++result.n_iterations;
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        const double mid = 0.5 * (a + b);
        if (b - a < rel_tol * std::max(1.0, std::fabs(mid))) {
            result.converged = true;
            break;
        }
    }

    if (f1 > f2) {
        result.x = x1;
        result.f_of_x = f1;
    } else {
        result.x = x2;
        result.f_of_x = f2;
    }
    return result;
}

} // namespace abcopt
