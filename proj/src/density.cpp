#include "abcopt/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "abcopt/golden.hpp"
#include "abcopt/quadrature.hpp"

namespace abcopt {
namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double log_2pi = 1.8378770664093453;

double log_normal(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * log_2pi - std::log(sigma) - 0.5 * z * z;
}

double log_chi2(double x, int dof) {
    if (x < 0.0) return neg_inf;
    if (x == 0.0) return dof == 2 ? std::log(0.5) : neg_inf;
    const double h = 0.5 * dof;
    return (h - 1.0) * std::log(x) - 0.5 * x - h * std::log(2.0) -
           std::lgamma(h);
}

double logsumexp2(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

} // namespace

void validate(const DensitySpec& spec) {
    if (const auto* g = std::get_if<Gaussian>(&spec)) {
        if (!(g->std > 0.0) || !std::isfinite(g->mean) ||
            !std::isfinite(g->std))
            throw ConfigError("Gaussian requires finite mean and std > 0");
    } else if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        if (m->components.empty())
            throw ConfigError("GaussianMixture requires components");
        long double wsum = 0.0L;
        for (const auto& c : m->components) {
            if (c.weight < 0.0 || !(c.std > 0.0))
                throw ConfigError(
                    "mixture components require weight >= 0 and std > 0");
            wsum += c.weight;
        }
        if (std::fabs(static_cast<double>(wsum) - 1.0) > 1e-12)
            throw ConfigError("mixture weights must sum to 1 within 1e-12");
    } else if (const auto* c = std::get_if<ChiSquared>(&spec)) {
        if (c->dof < 1) throw ConfigError("ChiSquared requires dof >= 1");
    } else if (const auto* u = std::get_if<Uniform>(&spec)) {
        if (!(u->lo < u->hi))
            throw ConfigError("Uniform requires lo < hi");
    } else if (const auto* d = std::get_if<DiagonalGaussian>(&spec)) {
        if (d->means.empty() || d->means.size() != d->stds.size())
            throw ConfigError(
                "DiagonalGaussian requires matching nonempty means/stds");
        for (double s : d->stds)
            if (!(s > 0.0))
                throw ConfigError("DiagonalGaussian requires stds > 0");
    } else if (const auto* n = std::get_if<Numeric>(&spec)) {
        if (!n->log_density)
            throw ConfigError("Numeric requires a log-density evaluator");
        if (!n->domain.finite() || n->domain.empty())
            throw ConfigError("Numeric requires a finite nonempty domain");
    }
}

std::size_t dimension(const DensitySpec& spec) {
    if (const auto* d = std::get_if<DiagonalGaussian>(&spec))
        return d->means.size();
    return 1;
}

double log_pdf(const DensitySpec& spec, double theta) {
    if (const auto* g = std::get_if<Gaussian>(&spec))
        return log_normal(theta, g->mean, g->std);
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        double acc = neg_inf;
        for (const auto& c : m->components) {
            if (c.weight == 0.0) continue;
            acc = logsumexp2(acc, std::log(c.weight) +
                                      log_normal(theta, c.mean, c.std));
        }
        return acc;
    }
    if (const auto* c = std::get_if<ChiSquared>(&spec))
        return log_chi2(theta, c->dof);
    if (const auto* u = std::get_if<Uniform>(&spec))
        return (theta >= u->lo && theta <= u->hi)
                   ? -std::log(u->hi - u->lo)
                   : neg_inf;
    if (std::get_if<DiagonalGaussian>(&spec))
        throw ConfigError("log_pdf: scalar theta for a multi-dimensional "
                          "density");
    const auto& n = std::get<Numeric>(spec);
    if (!n.domain.contains(theta)) return neg_inf;
    return n.log_density(theta) - n.log_normalizer;
}

double log_pdf(const DensitySpec& spec, const std::vector<double>& theta) {
    if (const auto* d = std::get_if<DiagonalGaussian>(&spec)) {
        if (theta.size() != d->means.size())
            throw ConfigError("log_pdf: theta dimension mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i)
            acc += log_normal(theta[i], d->means[i], d->stds[i]);
        return acc;
    }
    if (theta.size() != 1)
        throw ConfigError("log_pdf: theta dimension mismatch");
    return log_pdf(spec, theta[0]);
}

double mean(const DensitySpec& spec) {
    if (const auto* g = std::get_if<Gaussian>(&spec)) return g->mean;
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        double acc = 0.0;
        for (const auto& c : m->components) acc += c.weight * c.mean;
        return acc;
    }
    if (const auto* c = std::get_if<ChiSquared>(&spec))
        return static_cast<double>(c->dof);
    if (const auto* u = std::get_if<Uniform>(&spec))
        return 0.5 * (u->lo + u->hi);
    if (std::get_if<DiagonalGaussian>(&spec))
        throw ConfigError("mean: scalar moment of a multi-dimensional "
                          "density");
    const auto& n = std::get<Numeric>(spec);
    return integrate([&](double x) { return x * std::exp(log_pdf(spec, x)); },
                     n.domain, 1e-8)
        .value;
}

double variance(const DensitySpec& spec) {
    if (const auto* g = std::get_if<Gaussian>(&spec)) return g->std * g->std;
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        const double mu = mean(spec);
        double acc = 0.0;
        for (const auto& c : m->components)
            acc += c.weight * (c.std * c.std + c.mean * c.mean);
        return acc - mu * mu;
    }
    if (const auto* c = std::get_if<ChiSquared>(&spec)) return 2.0 * c->dof;
    if (const auto* u = std::get_if<Uniform>(&spec)) {
        const double w = u->hi - u->lo;
        return w * w / 12.0;
    }
    if (std::get_if<DiagonalGaussian>(&spec))
        throw ConfigError("variance: scalar moment of a multi-dimensional "
                          "density");
    const auto& n = std::get<Numeric>(spec);
    const double mu = mean(spec);
    return integrate(
               [&](double x) {
                   const double d = x - mu;
                   return d * d * std::exp(log_pdf(spec, x));
               },
               n.domain, 1e-8)
        .value;
}

Interval hard_support(const DensitySpec& spec) {
    if (const auto* u = std::get_if<Uniform>(&spec)) return {u->lo, u->hi};
    if (std::get_if<ChiSquared>(&spec))
        return {0.0, std::numeric_limits<double>::infinity()};
    if (const auto* n = std::get_if<Numeric>(&spec)) return n->domain;
    return Interval::whole();
}

Interval soft_range(const DensitySpec& spec, double k_sigma) {
    if (const auto* g = std::get_if<Gaussian>(&spec))
        return {g->mean - k_sigma * g->std, g->mean + k_sigma * g->std};
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        Interval r{std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
        for (const auto& c : m->components)
            r = Interval::hull(r, {c.mean - k_sigma * c.std,
                                   c.mean + k_sigma * c.std});
        return r;
    }
    if (const auto* c = std::get_if<ChiSquared>(&spec)) {
        boost::math::chi_squared dist(c->dof);
        double hi = boost::math::quantile(boost::math::complement(dist, 1e-12));
        if (k_sigma > 12.0)
            hi += (k_sigma - 12.0) * std::sqrt(2.0 * c->dof);
        return {0.0, hi};
    }
    if (const auto* u = std::get_if<Uniform>(&spec)) return {u->lo, u->hi};
    if (std::get_if<DiagonalGaussian>(&spec))
        throw ConfigError("soft_range: one-dimensional densities only");
    return std::get<Numeric>(spec).domain;
}

std::vector<double> salient_points(const DensitySpec& spec) {
    std::vector<double> pts;
    if (const auto* g = std::get_if<Gaussian>(&spec)) {
        for (double k : {-3.0, -1.0, 0.0, 1.0, 3.0})
            pts.push_back(g->mean + k * g->std);
    } else if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        for (const auto& c : m->components)
            for (double k : {-3.0, -1.0, 0.0, 1.0, 3.0})
                pts.push_back(c.mean + k * c.std);
    } else if (const auto* c = std::get_if<ChiSquared>(&spec)) {
        const double sigma = std::sqrt(2.0 * c->dof);
        pts = {std::max(0.0, c->dof - 2.0), static_cast<double>(c->dof),
               c->dof + 2.0 * sigma};
    } else if (const auto* u = std::get_if<Uniform>(&spec)) {
        pts = {u->lo, 0.5 * (u->lo + u->hi), u->hi};
    } else if (const auto* n = std::get_if<Numeric>(&spec)) {
        pts = {0.5 * (n->domain.lo + n->domain.hi)};
    }
    return pts;
}

DensitySpec normalize(const std::function<double(double)>& log_evaluator,
                      Interval domain, const std::vector<double>& breakpoints) {
    if (!domain.finite() || domain.empty() || domain.width() == 0.0)
        throw ConfigError("normalize: domain must be finite and nonempty");

    // Shift by the grid maximum so the exponentials stay in range.
    const int n_grid = 1024;
    double peak = neg_inf;
    for (int i = 0; i <= n_grid; ++i) {
        const double x = domain.lo + domain.width() * i / n_grid;
        peak = std::max(peak, log_evaluator(x));
    }
    for (double b : breakpoints)
        if (std::isfinite(b) && domain.contains(b))
            peak = std::max(peak, log_evaluator(b));
    if (peak == neg_inf)
        throw Error("normalize: evaluator is -inf everywhere on the domain");
    if (!std::isfinite(peak))
        throw Error("normalize: evaluator is unbounded on the domain");

    const auto r = integrate(
        [&](double x) { return std::exp(log_evaluator(x) - peak); }, domain,
        1e-10 * std::max(1.0, domain.width()), 1000000, breakpoints);
    if (!(r.value > 0.0) || !std::isfinite(r.value))
        throw Error("normalize: integral of the evaluator is zero or "
                    "non-finite");

    Numeric out;
    out.domain = domain;
    out.log_density = log_evaluator;
    out.log_normalizer = peak + std::log(r.value);
    return out;
}

DensitySpec convolve_gaussian(const DensitySpec& spec, double added_variance) {
    if (!(added_variance > 0.0))
        throw ConfigError("convolve_gaussian: added_variance must be > 0");

    if (const auto* g = std::get_if<Gaussian>(&spec))
        return Gaussian{g->mean,
                        std::sqrt(g->std * g->std + added_variance)};
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        GaussianMixture out;
        for (const auto& c : m->components)
            out.components.push_back(
                {c.weight, c.mean,
                 std::sqrt(c.std * c.std + added_variance)});
        return out;
    }
    if (!std::holds_alternative<ChiSquared>(spec) &&
        !std::holds_alternative<Uniform>(spec))
        throw ConfigError("convolve_gaussian: unsupported density variant");

    const double s = std::sqrt(added_variance);
    const Interval base = soft_range(spec);
    const Interval hard = hard_support(spec);
    const DensitySpec inner = spec;

    auto evaluator = [inner, hard, base, s](double x) {
        Interval t_dom =
            Interval::intersect(Interval::intersect(hard, base),
                                {x - 12.0 * s, x + 12.0 * s});
        if (t_dom.empty() || t_dom.width() == 0.0) return neg_inf;
        const auto r = integrate(
            [&](double t) {
                return std::exp(log_pdf(inner, t) + log_normal(x, t, s));
            },
            t_dom, 1e-9, 200000);
        return r.value > 0.0 ? std::log(r.value) : neg_inf;
    };

    const Interval out_dom{base.lo - 10.0 * s, base.hi + 10.0 * s};
    return normalize(evaluator, out_dom, salient_points(spec));
}

SupRatioResult sup_ratio(const DensitySpec& p, const DensitySpec& prior,
                         Interval search_domain) {
    if (!search_domain.finite() || search_domain.empty() ||
        search_domain.width() == 0.0)
        throw ConfigError("sup_ratio: search domain must be finite and "
                          "nonempty");

    auto log_ratio = [&](double x) {
        const double lpi = log_pdf(prior, x);
        if (lpi == neg_inf) return neg_inf;
        const double lp = log_pdf(p, x);
        return lp == neg_inf ? neg_inf : lp - lpi;
    };

    const int n_grid = 2048;
    const double step = search_domain.width() / (n_grid - 1);
    int best = -1;
    double best_val = neg_inf;
    for (int i = 0; i < n_grid; ++i) {
        const double v = log_ratio(search_domain.lo + i * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best < 0)
        throw EvaluationError("sup_ratio: ratio undefined on the whole "
                              "search domain");

    SupRatioResult result;
    const double lo =
        search_domain.lo + std::max(0, best - 1) * step;
    const double hi =
        search_domain.lo + std::min(n_grid - 1, best + 1) * step;
    const auto refined = golden_section_maximize(log_ratio, lo, hi, 1e-10);
    if (refined.f_of_x >= best_val) {
        result.theta_star = refined.x;
        result.sup_value = std::exp(refined.f_of_x);
    } else {
        result.theta_star = search_domain.lo + best * step;
        result.sup_value = std::exp(best_val);
    }

    if ((best == 0 && log_ratio(search_domain.lo) >
                          log_ratio(search_domain.lo + step)) ||
        (best == n_grid - 1 && log_ratio(search_domain.hi) >
                                   log_ratio(search_domain.hi - step)))
        result.boundary_warning = true;

    return result;
}

} // namespace abcopt
