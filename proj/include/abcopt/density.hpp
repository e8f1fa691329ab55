#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <variant>
#include <vector>

#include "abcopt/errors.hpp"
#include "abcopt/interval.hpp"

namespace abcopt {

struct Gaussian {
    double mean;
    double std;
};

struct MixtureComponent {
    double weight;
    double mean;
    double std;
};

struct GaussianMixture {
    std::vector<MixtureComponent> components;
};

struct ChiSquared {
    int dof;
};

struct Uniform {
    double lo;
    double hi;
};

struct DiagonalGaussian {
    std::vector<double> means;
    std::vector<double> stds;
};

/// Density known only through a pointwise log evaluator on a finite
/// domain. The evaluator is unnormalized; log_normalizer is the cached
/// log of its integral, so log_pdf = evaluator - log_normalizer.
struct Numeric {
    Interval domain;
    std::function<double(double)> log_density;
    double log_normalizer = 0.0;
};

using DensitySpec = std::variant<Gaussian, GaussianMixture, ChiSquared,
                                 Uniform, DiagonalGaussian, Numeric>;

/// Throws ConfigError if parameters violate the family invariants
/// (non-positive std, mixture weights not summing to 1, lo >= hi, ...).
void validate(const DensitySpec& spec);

std::size_t dimension(const DensitySpec& spec);

double log_pdf(const DensitySpec& spec, double theta);
double log_pdf(const DensitySpec& spec, const std::vector<double>& theta);

double mean(const DensitySpec& spec);
double variance(const DensitySpec& spec);

/// Support with hard (density identically zero outside) boundaries;
/// unbounded sides are infinite.
Interval hard_support(const DensitySpec& spec);

/// Finite interval containing all but a negligible fraction of the
/// mass: mean +- k_sigma stds per component for Gaussian families, the
/// 1-1e-12 quantile (stretched with k_sigma above 12) for chi-squared,
/// the exact support for Uniform/Numeric.
Interval soft_range(const DensitySpec& spec, double k_sigma = 12.0);

/// Abscissae where the density concentrates or changes character
/// (component means +- a few stds, edges of a uniform, the chi-squared
/// mode). Intended as quadrature breakpoints so integrands built from
/// the density cannot hide between the nodes of a coarse opening pass.
std::vector<double> salient_points(const DensitySpec& spec);

/// Normalizes a pointwise log evaluator over a finite domain into a
/// Numeric density. Breakpoints seed the normalizing quadrature (see
/// integrate). Throws Error on a zero or non-finite integral.
DensitySpec normalize(const std::function<double(double)>& log_evaluator,
                      Interval domain,
                      const std::vector<double>& breakpoints = {});

/// Convolution with a zero-mean Gaussian of the given variance.
/// Analytic for Gaussian/GaussianMixture, numerical (Numeric output on
/// an extended domain) for ChiSquared/Uniform.
DensitySpec convolve_gaussian(const DensitySpec& spec, double added_variance);

struct SupRatioResult {
    double theta_star = 0.0;
    double sup_value = 0.0;
    /// Set when the best value sits on the search boundary with outward
    /// growth, i.e. the ratio is likely unbounded.
    bool boundary_warning = false;
};

/// Supremum of p/prior over search_domain: 2048-node grid scan plus
/// golden-section refinement to relative tolerance 1e-10.
SupRatioResult sup_ratio(const DensitySpec& p, const DensitySpec& prior,
                         Interval search_domain);

/// i.i.d. draws from a one-dimensional analytic variant. Numeric
/// variants cannot be sampled directly; use mh_sample. DiagonalGaussian
/// is rejected for dimensionality.
template <class URBG>
std::vector<double> sample(const DensitySpec& spec, URBG& rng, std::size_t n) {
    if (std::holds_alternative<Numeric>(spec))
        throw ConfigError(
            "Numeric densities have no direct sampler; use mh_sample");
    if (dimension(spec) != 1)
        throw ConfigError("sample: expected a one-dimensional density");

    std::vector<double> draws;
    draws.reserve(n);
    if (const auto* g = std::get_if<Gaussian>(&spec)) {
        std::normal_distribution<double> d(g->mean, g->std);
        for (std::size_t i = 0; i < n; ++i) draws.push_back(d(rng));
    } else if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        std::vector<double> weights;
        for (const auto& c : m->components) weights.push_back(c.weight);
        std::discrete_distribution<std::size_t> pick(weights.begin(),
                                                     weights.end());
        std::normal_distribution<double> unit(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = m->components[pick(rng)];
            draws.push_back(c.mean + c.std * unit(rng));
        }
    } else if (const auto* c = std::get_if<ChiSquared>(&spec)) {
        std::chi_squared_distribution<double> d(c->dof);
        for (std::size_t i = 0; i < n; ++i) draws.push_back(d(rng));
    } else if (const auto* u = std::get_if<Uniform>(&spec)) {
        std::uniform_real_distribution<double> d(u->lo, u->hi);
        for (std::size_t i = 0; i < n; ++i) draws.push_back(d(rng));
    }
    return draws;
}

} // namespace abcopt
