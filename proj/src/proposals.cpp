#include "abcopt/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "abcopt/errors.hpp"
#include "abcopt/golden.hpp"

namespace abcopt {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

/// q_A(theta) before normalization, in log space:
/// log sqrt(p*prior / (2A - p/prior)).
double bounded_family_log(const DensitySpec& p, const DensitySpec& prior,
                          double A, double x) {
    const double lp = log_pdf(p, x);
    const double lpi = log_pdf(prior, x);
    if (lp == -std::numeric_limits<double>::infinity() ||
        lpi == -std::numeric_limits<double>::infinity())
        return -std::numeric_limits<double>::infinity();
    const double den = 2.0 * A - std::exp(lp - lpi);
    if (den <= 0.0) return -std::numeric_limits<double>::infinity();
    return 0.5 * (lp + lpi) - 0.5 * std::log(den);
}

std::vector<double> construction_breakpoints(const DensitySpec& p,
                                             const DensitySpec& prior) {
    std::vector<double> pts = salient_points(p);
    auto more = salient_points(prior);
    pts.insert(pts.end(), more.begin(), more.end());
    return pts;
}

DensitySpec normalized_bounded_family(const DensitySpec& p,
                                      const DensitySpec& prior, double A,
                                      const Interval& dom) {
    auto log_raw = [p, prior, A](double x) {
        return bounded_family_log(p, prior, A, x);
    };
    return normalize(log_raw, dom, construction_breakpoints(p, prior));
}

double omega_at(const DensitySpec& p, const DensitySpec& prior, double A,
                const Interval& dom) {
    const DensitySpec q = normalized_bounded_family(p, prior, A, dom);
    return sampling_efficiency(q, p, prior).omega;
}

} // namespace

Interval construction_domain(const DensitySpec& p, const DensitySpec& prior) {
    Interval hard = Interval::intersect(hard_support(p), hard_support(prior));
    Interval soft = Interval::hull(soft_range(p, 12.0), soft_range(prior, 12.0));
    Interval dom = Interval::intersect(hard, soft);
    if (dom.empty())
        throw ConfigError("proposal construction: posterior and prior "
                          "supports do not intersect");
    return dom;
}

Proposal geometric_mean_proposal(const DensitySpec& p,
                                 const DensitySpec& prior) {
    Proposal out;
    out.scheme = Scheme::geometric_mean;
    if (const auto* gp = std::get_if<Gaussian>(&p)) {
        if (const auto* gpi = std::get_if<Gaussian>(&prior)) {
            const double lam_p = 1.0 / (gp->std * gp->std);
            const double lam_pi = 1.0 / (gpi->std * gpi->std);
            const double lam0 = 0.5 * (lam_p + lam_pi);
            const double mu0 =
                (lam_p * gp->mean + lam_pi * gpi->mean) / (lam_p + lam_pi);
            out.density = Gaussian{mu0, std::sqrt(1.0 / lam0)};
            return out;
        }
    }
    const Interval dom = construction_domain(p, prior);
    auto log_raw = [p, prior](double x) {
        const double lp = log_pdf(p, x);
        const double lpi = log_pdf(prior, x);
        if (lp == -std::numeric_limits<double>::infinity() ||
            lpi == -std::numeric_limits<double>::infinity())
            return -std::numeric_limits<double>::infinity();
        return 0.5 * (lp + lpi);
    };
    out.density = normalize(log_raw, dom, construction_breakpoints(p, prior));
    return out;
}

Proposal bounded_proposal(const DensitySpec& p, const DensitySpec& prior,
                          std::optional<double> A_bar) {
    const Interval dom = construction_domain(p, prior);
    const SupRatioResult sup = sup_ratio(p, prior, dom);
    const double A = A_bar.value_or(0.75 * sup.sup_value);
    // The sup is located numerically, so give the divergence boundary a
    // relative margin; A at exactly half the true supremum must reject.
    if (!(A > 0.5 * sup.sup_value * (1.0 + 1e-9)))
        throw ConfigError(
            "bounded proposal: A_bar must exceed half the supremum of "
            "p/prior (Hoelder lower bound " +
            fmt(0.5 * sup.sup_value) + "), got " + fmt(A));
    Proposal out;
    out.scheme = Scheme::bounded;
    out.density = normalized_bounded_family(p, prior, A, dom);
    out.params.A_bar = A;
    out.params.sup_ratio = sup.sup_value;
    return out;
}

Proposal optimal_proposal(const DensitySpec& p, const DensitySpec& prior,
                          double tol) {
    const Interval dom = construction_domain(p, prior);
    const SupRatioResult sup = sup_ratio(p, prior, dom);
    const double lo = 0.5 * sup.sup_value * (1.0 + 1e-3);
    const double hi = sup.sup_value;
    if (!(lo < hi))
        throw ConfigError("optimal proposal: degenerate A-bracket, sup = " +
                          fmt(sup.sup_value));

    auto scan = [&](int n, std::vector<double>& nodes,
                    std::vector<double>& values) {
        nodes.resize(n);
        values.resize(n);
        for (int i = 0; i < n; ++i) {
            nodes[i] = lo + (hi - lo) * i / (n - 1);
            values[i] = omega_at(p, prior, nodes[i], dom);
        }
    };

    std::vector<double> nodes, values;
    scan(33, nodes, values);

    auto count_maxima = [&](const std::vector<double>& v) {
        int count = 0;
        const int n = static_cast<int>(v.size());
        for (int i = 0; i < n; ++i) {
            const double eps = 1e-9 * std::fabs(v[i]);
            const bool left_ok = i == 0 || v[i] > v[i - 1] + eps;
            const bool right_ok = i == n - 1 || v[i] > v[i + 1] + eps;
            if (left_ok && right_ok) ++count;
        }
        return count;
    };

    bool fallback = false;
    if (count_maxima(values) > 1) {
        fallback = true;
        scan(257, nodes, values);
    }

    const auto best_it = std::max_element(values.begin(), values.end());
    const int j = static_cast<int>(best_it - values.begin());
    const int n = static_cast<int>(nodes.size());
    const double bracket_lo = nodes[std::max(0, j - 1)];
    const double bracket_hi = nodes[std::min(n - 1, j + 1)];

    auto objective = [&](double A) { return omega_at(p, prior, A, dom); };
    const OptimizeResult opt =
        golden_section_maximize(objective, bracket_lo, bracket_hi, tol);

    double A_star = opt.x;
    double omega_star = opt.f_of_x;
    if (omega_star < values[j]) {
        A_star = nodes[j];
        omega_star = values[j];
    }

    Proposal out;
    out.scheme = Scheme::optimal;
    out.density = normalized_bounded_family(p, prior, A_star, dom);
    out.params.A_star = A_star;
    out.params.omega_star = omega_star;
    out.params.sup_ratio = sup.sup_value;
    out.params.fallback_scan = fallback;
    return out;
}

Proposal optimal_proposal_fixed_point(const DensitySpec& p,
                                      const DensitySpec& prior, double a_tol,
                                      int max_iterations) {
    const Interval dom = construction_domain(p, prior);
    const SupRatioResult sup = sup_ratio(p, prior, dom);
    double A = 0.75 * sup.sup_value;
    DensitySpec q = normalized_bounded_family(p, prior, A, dom);
    for (int iter = 0; iter < max_iterations; ++iter) {
        const double A_next = functional_A(q, p, prior);
        if (!(A_next > 0.5 * sup.sup_value) ||
            !(A_next <= sup.sup_value * (1.0 + 1e-9)))
            throw ConvergenceError(
                "fixed-point iteration left the admissible bracket: A = " +
                fmt(A_next) + ", sup = " + fmt(sup.sup_value));
        const bool done = std::fabs(A_next - A) <= a_tol * std::max(1.0, A);
        A = A_next;
        q = normalized_bounded_family(p, prior, A, dom);
        if (done) {
            Proposal out;
            out.scheme = Scheme::optimal;
            out.density = q;
            out.params.A_star = A;
            out.params.omega_star = sampling_efficiency(q, p, prior).omega;
            out.params.sup_ratio = sup.sup_value;
            return out;
        }
    }
    throw ConvergenceError("fixed-point iteration for A* did not converge in " +
                           std::to_string(max_iterations) + " iterations");
}

Proposal series_proposal(const DensitySpec& p, const DensitySpec& prior,
                         int order, double A_star) {
    if (order < 0)
        throw ConfigError("series proposal: order must be nonnegative");
    const Interval dom = construction_domain(p, prior);
    const SupRatioResult sup = sup_ratio(p, prior, dom);
    if (!(A_star > 0.5 * sup.sup_value * (1.0 + 1e-9)))
        throw DivergenceError(
            "series proposal diverges: A_star = " + fmt(A_star) +
            " is at or below half the supremum of p/prior (" +
            fmt(0.5 * sup.sup_value) + ")");

    if (order == 0) {
        Proposal gm = geometric_mean_proposal(p, prior);
        Proposal out;
        out.scheme = Scheme::series;
        out.density = gm.density;
        out.params.order = 0;
        out.params.A_star = A_star;
        out.params.sup_ratio = sup.sup_value;
        return out;
    }

    std::vector<double> coeff(static_cast<std::size_t>(order) + 1);
    coeff[0] = 1.0;
    for (int i = 1; i <= order; ++i)
        coeff[i] = coeff[i - 1] * (2.0 * i - 1.0) / (2.0 * i);

    auto log_raw = [p, prior, A_star, coeff](double x) {
        const double lp = log_pdf(p, x);
        const double lpi = log_pdf(prior, x);
        if (lp == -std::numeric_limits<double>::infinity() ||
            lpi == -std::numeric_limits<double>::infinity())
            return -std::numeric_limits<double>::infinity();
        const double r = std::exp(lp - lpi) / (2.0 * A_star);
        double sum = 0.0;
        double r_pow = 1.0;
        for (double c : coeff) {
            sum += c * r_pow;
            r_pow *= r;
        }
        return 0.5 * (lp + lpi) + std::log(sum);
    };

    Proposal out;
    out.scheme = Scheme::series;
    out.density = normalize(log_raw, dom, construction_breakpoints(p, prior));
    out.params.order = order;
    out.params.A_star = A_star;
    out.params.sup_ratio = sup.sup_value;
    return out;
}

Proposal beaumont_kde_proposal(const DensitySpec& p) {
    const double var = variance(p);
    if (!(var > 0.0))
        throw ConfigError("beaumont_kde proposal: posterior variance must be "
                          "positive, got " +
                          fmt(var));
    Proposal out;
    out.scheme = Scheme::beaumont_kde;
    out.density = convolve_gaussian(p, 2.0 * var);
    out.params.bandwidth2 = 2.0 * var;
    return out;
}

Proposal make_proposal(Scheme scheme, const DensitySpec& p,
                       const DensitySpec& prior) {
    switch (scheme) {
    case Scheme::prior: {
        Proposal out;
        out.scheme = Scheme::prior;
        out.density = prior;
        return out;
    }
    case Scheme::posterior: {
        Proposal out;
        out.scheme = Scheme::posterior;
        out.density = p;
        return out;
    }
    case Scheme::beaumont_kde:
        return beaumont_kde_proposal(p);
    case Scheme::geometric_mean:
        return geometric_mean_proposal(p, prior);
    case Scheme::bounded:
        return bounded_proposal(p, prior);
    case Scheme::optimal:
        return optimal_proposal(p, prior);
    case Scheme::series:
        throw ConfigError("series proposal requires explicit order and "
                          "A_star; use series_proposal directly");
    }
    throw ConfigError("unknown scheme value");
}

} // namespace abcopt
