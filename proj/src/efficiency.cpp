#include "abcopt/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "abcopt/errors.hpp"
#include "abcopt/quadrature.hpp"

namespace abcopt {

namespace {

constexpr double kAbsTol = 1e-8;
constexpr std::size_t kMaxEvals = 1000000;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

std::string to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::prior: return "prior";
    case Scheme::posterior: return "posterior";
    case Scheme::beaumont_kde: return "beaumont_kde";
    case Scheme::geometric_mean: return "geometric_mean";
    case Scheme::bounded: return "bounded";
    case Scheme::optimal: return "optimal";
    case Scheme::series: return "series";
    }
    throw ConfigError("unknown scheme value");
}

std::string to_string(Method method) {
    switch (method) {
    case Method::quadrature: return "quadrature";
    case Method::analytic: return "analytic";
    case Method::monte_carlo: return "monte_carlo";
    }
    throw ConfigError("unknown method value");
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "prior") return Scheme::prior;
    if (name == "posterior") return Scheme::posterior;
    if (name == "beaumont_kde") return Scheme::beaumont_kde;
    if (name == "geometric_mean") return Scheme::geometric_mean;
    if (name == "bounded") return Scheme::bounded;
    if (name == "optimal") return Scheme::optimal;
    if (name == "series") return Scheme::series;
    throw ConfigError("unknown scheme name: " + name);
}

Interval functional_domain(const DensitySpec& q, const DensitySpec& p,
                           const DensitySpec& prior, double k_sigma) {
    Interval hard = Interval::intersect(
        Interval::intersect(hard_support(q), hard_support(p)),
        hard_support(prior));
    Interval soft = Interval::hull(
        Interval::hull(soft_range(q, k_sigma), soft_range(p, k_sigma)),
        soft_range(prior, k_sigma));
    Interval dom = Interval::intersect(hard, soft);
    if (dom.empty())
        throw ConfigError("efficiency functional: supports of q, p and the "
                          "prior have empty intersection");
    return dom;
}

namespace {

/// Integrand of A (a_mode) or B over the common support, evaluated in
/// log space with explicit guards so that support mismatches surface
/// as the right error instead of NaN.
double ratio_integrand(double x, const DensitySpec& q, const DensitySpec& p,
                       const DensitySpec& prior, bool a_mode) {
    const double lp = log_pdf(p, x);
    if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
    const double lq = log_pdf(q, x);
    const double lpi = log_pdf(prior, x);
    if (a_mode) {
        if (lq == -std::numeric_limits<double>::infinity()) return 0.0;
        if (lpi == -std::numeric_limits<double>::infinity())
            throw DivergenceError(
                "functional A diverges: prior vanishes at theta=" + fmt(x) +
                " where the posterior has positive density");
        return std::exp(lq - lpi + lp);
    }
    if (lq == -std::numeric_limits<double>::infinity())
        throw DivergenceError(
            "functional B diverges: proposal vanishes at theta=" + fmt(x) +
            " where the posterior has positive density");
    if (lpi == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(lpi - lq + lp);
}

struct TailCheck {
    double value = 0.0;
    double error = 0.0;
};

TailCheck integrate_annulus(const std::function<double(double)>& f,
                            const Interval& inner, const Interval& outer) {
    TailCheck out;
    if (outer.lo < inner.lo) {
        auto r = integrate(f, {outer.lo, inner.lo}, kAbsTol, kMaxEvals);
        out.value += r.value;
        out.error += r.error_estimate;
    }
    if (outer.hi > inner.hi) {
        auto r = integrate(f, {inner.hi, outer.hi}, kAbsTol, kMaxEvals);
        out.value += r.value;
        out.error += r.error_estimate;
    }
    return out;
}

std::vector<double> merged_salient_points(const DensitySpec& q,
                                          const DensitySpec& p,
                                          const DensitySpec& prior) {
    std::vector<double> pts = salient_points(q);
    for (const DensitySpec* s : {&p, &prior}) {
        auto more = salient_points(*s);
        pts.insert(pts.end(), more.begin(), more.end());
    }
    return pts;
}

double ratio_functional(const DensitySpec& q, const DensitySpec& p,
                        const DensitySpec& prior, bool a_mode,
                        double* est_error) {
    auto f = [&](double x) {
        return ratio_integrand(x, q, p, prior, a_mode);
    };
    const Interval d12 = functional_domain(q, p, prior, 12.0);
    const auto breakpoints = merged_salient_points(q, p, prior);
    auto core = integrate(f, d12, kAbsTol, kMaxEvals, breakpoints);
    double value = core.value;
    double error = core.error_estimate;

    const Interval d16 = functional_domain(q, p, prior, 16.0);
    if (d16.lo < d12.lo || d16.hi > d12.hi) {
        const TailCheck g16 = integrate_annulus(f, d12, d16);
        const double negligible =
            std::max(10.0 * kAbsTol, 1e-10 * std::abs(value));
        if (std::abs(g16.value) > negligible) {
            const Interval d20 = functional_domain(q, p, prior, 20.0);
            const TailCheck g20 = integrate_annulus(f, d16, d20);
            if (std::abs(g20.value) >= 0.5 * std::abs(g16.value)) {
                const char* name = a_mode ? "A" : "B";
                throw DivergenceError(
                    std::string("functional ") + name +
                    " diverges: tail contributions fail to decay (" +
                    fmt(g16.value) + " over 12-16 sigma, " + fmt(g20.value) +
                    " over 16-20 sigma)");
            }
            value += g16.value + g20.value;
            error += g16.error + g20.error;
        } else {
            value += g16.value;
            error += g16.error;
        }
    }
    if (!std::isfinite(value) || value <= 0.0) {
        const char* name = a_mode ? "A" : "B";
        throw DivergenceError(std::string("functional ") + name +
                              " evaluated to " + fmt(value) +
                              "; expected a positive finite value");
    }
    if (est_error) *est_error = error;
    return value;
}

} // namespace

double functional_A(const DensitySpec& q, const DensitySpec& p,
                    const DensitySpec& prior) {
    return ratio_functional(q, p, prior, true, nullptr);
}

double functional_B(const DensitySpec& q, const DensitySpec& p,
                    const DensitySpec& prior) {
    return ratio_functional(q, p, prior, false, nullptr);
}

EfficiencyReport sampling_efficiency(const DensitySpec& q,
                                     const DensitySpec& p,
                                     const DensitySpec& prior) {
    EfficiencyReport rep;
    double err_a = 0.0;
    double err_b = 0.0;
    rep.A = ratio_functional(q, p, prior, true, &err_a);
    rep.B = ratio_functional(q, p, prior, false, &err_b);
    rep.omega = rep.A / rep.B;
    rep.method = Method::quadrature;
    rep.est_error = rep.omega * (err_a / rep.A + err_b / rep.B);
    return rep;
}

double kish_ess(const std::vector<double>& weights) {
    if (weights.empty())
        throw ConfigError("kish_ess: empty weight vector");
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (double w : weights) {
        if (!(w >= 0.0))
            throw ConfigError("kish_ess: weights must be nonnegative, got " +
                              fmt(w));
        sum += w;
        sum_sq += static_cast<long double>(w) * w;
    }
    if (sum_sq <= 0.0L)
        throw ConfigError("kish_ess: needs at least one positive weight");
    return static_cast<double>(sum * sum / sum_sq);
}

McFunctionals mc_functionals(const DensitySpec& q,
                             const std::vector<double>& thetas,
                             const std::vector<double>& weights,
                             const DensitySpec& prior) {
    if (thetas.empty() || thetas.size() != weights.size())
        throw ConfigError("mc_functionals: thetas and weights must be "
                          "nonempty and of equal length");
    const std::size_t n = thetas.size();
    std::vector<double> ra(n), rb(n);
    long double sum_w = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(weights[i] >= 0.0))
            throw ConfigError("mc_functionals: negative weight at index " +
                              std::to_string(i));
        sum_w += weights[i];
        const double lq = log_pdf(q, thetas[i]);
        const double lpi = log_pdf(prior, thetas[i]);
        if (weights[i] == 0.0) {
            ra[i] = rb[i] = 0.0;
            continue;
        }
        if (lq == -std::numeric_limits<double>::infinity())
            throw DivergenceError(
                "mc_functionals: proposal density is zero at sampled theta=" +
                fmt(thetas[i]));
        if (lpi == -std::numeric_limits<double>::infinity())
            throw DivergenceError(
                "mc_functionals: prior density is zero at sampled theta=" +
                fmt(thetas[i]));
        ra[i] = std::exp(lq - lpi);
        rb[i] = std::exp(lpi - lq);
    }
    if (sum_w <= 0.0L)
        throw ConfigError("mc_functionals: all weights are zero");

    const double S = static_cast<double>(sum_w);
    long double acc_a = 0.0L, acc_b = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        acc_a += static_cast<long double>(weights[i]) * ra[i];
        acc_b += static_cast<long double>(weights[i]) * rb[i];
    }
    McFunctionals out;
    out.A_hat = static_cast<double>(acc_a) / S;
    out.B_hat = static_cast<double>(acc_b) / S;

    // Delete-one jackknife over the weighted sample.
    auto jackknife_se = [&](const std::vector<double>& r, double full,
                            double numer) {
        if (n < 2) return std::numeric_limits<double>::quiet_NaN();
        long double mean_acc = 0.0L;
        std::vector<double> loo(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double denom = S - weights[i];
            loo[i] = denom > 0.0 ? (numer - weights[i] * r[i]) / denom : full;
            mean_acc += loo[i];
        }
        const double mean = static_cast<double>(mean_acc) / n;
        long double ss = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            const long double d = loo[i] - mean;
            ss += d * d;
        }
        const double factor = static_cast<double>(n - 1) / n;
        return std::sqrt(factor * static_cast<double>(ss));
    };
    out.A_se = jackknife_se(ra, out.A_hat, static_cast<double>(acc_a));
    out.B_se = jackknife_se(rb, out.B_hat, static_cast<double>(acc_b));
    return out;
}

namespace {

/// log of integral q(x) p(x) / pi(x) dx for three Gaussians, written
/// with precisions lambda = 1/sigma^2. Finite iff the combined
/// precision Lambda = lq + lp - lpi is positive.
double log_three_gaussian(double lq, double mq, double lp, double mp,
                          double lpi, double mpi, const char* what) {
    const double Lambda = lq + lp - lpi;
    if (Lambda <= 0.0)
        throw DivergenceError(std::string(what) +
                              " diverges: combined precision " + fmt(Lambda) +
                              " is not positive");
    const double m = (lq * mq + lp * mp - lpi * mpi) / Lambda;
    const double C = lq * mq * mq + lp * mp * mp - lpi * mpi * mpi;
    return 0.5 * (std::log(lq) + std::log(lp) - std::log(lpi) -
                  std::log(Lambda)) -
           0.5 * (C - Lambda * m * m);
}

} // namespace

void analytic_gaussian_log_functionals(const GaussianToyParams& params,
                                       Scheme scheme, double& log_A1,
                                       double& log_B1) {
    if (params.n_theta < 1)
        throw ConfigError("analytic_gaussian_efficiency: n_theta must be >= 1");
    if (!(params.sigma_pi > 0.0))
        throw ConfigError("analytic_gaussian_efficiency: sigma_pi must be "
                          "positive");
    const double lpi = 1.0 / (params.sigma_pi * params.sigma_pi);
    const double mpi = params.mu_pi;
    const double lp = 1.0;
    const double mp = 0.0;

    double lq, mq;
    switch (scheme) {
    case Scheme::prior:
        log_A1 = 0.0;
        log_B1 = 0.0;
        return;
    case Scheme::posterior:
        lq = lp;
        mq = mp;
        break;
    case Scheme::beaumont_kde:
        lq = 1.0 / 3.0;
        mq = mp;
        break;
    case Scheme::geometric_mean:
        lq = 0.5 * (lp + lpi);
        mq = (lp * mp + lpi * mpi) / (lp + lpi);
        break;
    default:
        throw ConfigError("analytic_gaussian_efficiency: no closed form for "
                          "scheme " +
                          to_string(scheme));
    }
    log_A1 = log_three_gaussian(lq, mq, lp, mp, lpi, mpi, "functional A");
    log_B1 = log_three_gaussian(lpi, mpi, lp, mp, lq, mq, "functional B");
}

EfficiencyReport analytic_gaussian_efficiency(const GaussianToyParams& params,
                                              Scheme scheme) {
    double la = 0.0, lb = 0.0;
    analytic_gaussian_log_functionals(params, scheme, la, lb);
    EfficiencyReport rep;
    const double n = static_cast<double>(params.n_theta);
    rep.A = std::exp(n * la);
    rep.B = std::exp(n * lb);
    rep.omega = std::exp(n * (la - lb));
    rep.method = Method::analytic;
    rep.est_error = 0.0;
    return rep;
}

std::vector<SurfaceRow> improvement_surface(
    const std::vector<GaussianToyParams>& grid, Scheme numerator_scheme,
    Scheme denominator_scheme) {
    std::vector<SurfaceRow> rows;
    rows.reserve(grid.size());
    for (const auto& params : grid) {
        SurfaceRow row;
        row.mu_pi = params.mu_pi;
        row.sigma_pi = params.sigma_pi;
        row.n_theta = params.n_theta;
        try {
            double la_n, lb_n, la_d, lb_d;
            analytic_gaussian_log_functionals(params, numerator_scheme, la_n,
                                              lb_n);
            analytic_gaussian_log_functionals(params, denominator_scheme,
                                              la_d, lb_d);
            const double log_a = static_cast<double>(params.n_theta) *
                                 ((la_n - lb_n) - (la_d - lb_d));
            row.a = std::exp(log_a);
            row.admissible = true;
        } catch (const DivergenceError&) {
            row.a = std::numeric_limits<double>::quiet_NaN();
            row.admissible = false;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace abcopt
