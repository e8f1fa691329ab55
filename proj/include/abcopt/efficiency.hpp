#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "abcopt/density.hpp"

namespace abcopt {

enum class Method { quadrature, analytic, monte_carlo };

enum class Scheme {
    prior,
    posterior,
    beaumont_kde,
    geometric_mean,
    bounded,
    optimal,
    series,
};

std::string to_string(Scheme scheme);
std::string to_string(Method method);
Scheme scheme_from_string(const std::string& name);

/// Acceptance functional A, inverse-ESS functional B, and their ratio,
/// the sampling efficiency omega = A/B. The constant prefactors shared
/// by all proposals are dropped throughout.
struct EfficiencyReport {
    double A = 0.0;
    double B = 0.0;
    double omega = 0.0;
    Method method = Method::quadrature;
    double est_error = 0.0;
};

/// A[q] = integral of (q/prior) p dtheta, proportional to the expected
/// acceptance fraction when proposing from q.
double functional_A(const DensitySpec& q, const DensitySpec& p,
                    const DensitySpec& prior);

/// B[q] = integral of (prior/q) p dtheta, the reciprocal of the
/// effective-sample-size fraction of the weighted population.
double functional_B(const DensitySpec& q, const DensitySpec& p,
                    const DensitySpec& prior);

EfficiencyReport sampling_efficiency(const DensitySpec& q,
                                     const DensitySpec& p,
                                     const DensitySpec& prior);

struct McFunctionals {
    double A_hat = 0.0;
    double B_hat = 0.0;
    double A_se = 0.0;
    double B_se = 0.0;
};

/// Self-normalized Monte Carlo estimates of A and B from a weighted
/// posterior sample, with delete-one jackknife standard errors.
McFunctionals mc_functionals(const DensitySpec& q,
                             const std::vector<double>& thetas,
                             const std::vector<double>& weights,
                             const DensitySpec& prior);

/// Kish effective sample size (sum w)^2 / sum w^2.
double kish_ess(const std::vector<double>& weights);

/// Isotropic Gaussian toy: posterior N(0,1) per dimension, prior
/// N(mu_pi, sigma_pi^2) per dimension.
struct GaussianToyParams {
    int n_theta = 1;
    double mu_pi = 0.0;
    double sigma_pi = 1.0;
};

/// Per-dimension log A and log B for the closed-form schemes.
/// Throws DivergenceError when the scheme's A integral diverges
/// (posterior: sigma_pi <= 1/sqrt(2); KDE: sigma_pi <= sqrt(3)/2;
/// geometric mean: sigma_pi <= 1/sqrt(3), in units of the posterior
/// std 1).
void analytic_gaussian_log_functionals(const GaussianToyParams& params,
                                       Scheme scheme, double& log_A1,
                                       double& log_B1);

/// Closed-form efficiency for scheme in {prior, posterior,
/// beaumont_kde, geometric_mean}; factorizes over dimensions.
EfficiencyReport analytic_gaussian_efficiency(const GaussianToyParams& params,
                                              Scheme scheme);

struct SurfaceRow {
    double mu_pi = 0.0;
    double sigma_pi = 1.0;
    int n_theta = 1;
    double a = 0.0;
    bool admissible = true;
};

/// a = omega[numerator] / omega[denominator] on each grid point,
/// computed on the log scale so extreme cells degrade to 0/inf rather
/// than NaN. Inadmissible points are flagged, not dropped.
std::vector<SurfaceRow> improvement_surface(
    const std::vector<GaussianToyParams>& grid, Scheme numerator_scheme,
    Scheme denominator_scheme);

/// Integration domain for the ratio functionals: the intersection of
/// the three hard supports with the hull of the three soft ranges.
Interval functional_domain(const DensitySpec& q, const DensitySpec& p,
                           const DensitySpec& prior, double k_sigma = 12.0);

} // namespace abcopt
