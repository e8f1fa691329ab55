#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "abcopt/density.hpp"
#include "abcopt/efficiency.hpp"
#include "abcopt/proposals.hpp"
#include "abcopt/rng.hpp"

namespace abcopt {

struct ForwardProblem {
    std::function<std::vector<double>(double, CounterRng&)> simulate;
    std::vector<double> observed;
    std::function<double(const std::vector<double>&,
                         const std::vector<double>&)>
        distance; // defaults to Euclidean when empty
    DensitySpec prior;
};

double euclidean_distance(const std::vector<double>& a,
                          const std::vector<double>& b);

/// Built-in toy problems: "gaussian_mean" (mean of 10 unit-variance
/// draws, observed summary 0, prior N(0,5)) and
/// "gaussian_mean_bimodal_prior" (same likelihood, two-component
/// mixture prior).
ForwardProblem make_toy(const std::string& name);

struct Population {
    std::vector<double> thetas;
    std::vector<double> weights;
    double epsilon = 0.0;
    double ess = 0.0;
    std::size_t n_proposed = 0;
    std::size_t accepted = 0;
};

struct MhResult {
    std::vector<double> samples;
    double acceptance_rate = 0.0;
};

/// Random-walk Metropolis for densities that cannot be sampled
/// directly. Returns n post-burn-in, thinned states.
MhResult mh_sample(const std::function<double(double)>& log_q, std::size_t n,
                   double init, double step_std, CounterRng& rng,
                   std::size_t burn_in = 1000, std::size_t thin = 10);

/// prior(theta)/q(theta) for each accepted particle. Throws
/// DivergenceError if q vanishes at an accepted theta.
std::vector<double> importance_weights(const std::vector<double>& thetas,
                                       const DensitySpec& prior,
                                       const DensitySpec& proposal);

enum class FitMethod { weighted_kde, gaussian_mixture };

enum class BandwidthRule {
    ess_pow_neg_2_5, // h^2 = var * ess^(-2/5), the default
    ess_pow_neg_1_3, // h^2 = var * ess^(-1/3)
    variance,        // h^2 = var
    twice_variance,  // h^2 = 2 var
};

FitMethod fit_method_from_string(const std::string& name);
BandwidthRule bandwidth_rule_from_string(const std::string& name);

/// Density estimate of the current posterior from a weighted
/// population: Gaussian KDE at the particle locations, or a weighted
/// EM Gaussian mixture with k components.
DensitySpec fit_density(const Population& population, FitMethod method,
                        int k = 2,
                        BandwidthRule rule = BandwidthRule::ess_pow_neg_2_5);

struct IterationDiagnostics {
    double epsilon = 0.0;
    double acceptance_fraction = 0.0;
    double ess = 0.0;
    double ess_per_proposal = 0.0;
    /// acceptance_fraction * ess_per_proposal: the empirical analogue
    /// of omega up to a scheme-independent constant, so ratios between
    /// schemes estimate ratios of omega = A/B.
    double empirical_omega = 0.0;
    Scheme scheme = Scheme::prior;
    double mh_acceptance_rate = -1.0; // -1 when sampled directly
    bool mh_warning = false;
};

struct RunDiagnostics {
    std::vector<IterationDiagnostics> iterations;
    std::size_t total_proposals = 0;
};

struct SmcOptions {
    FitMethod fit = FitMethod::weighted_kde;
    int fit_components = 2;
    BandwidthRule bandwidth_rule = BandwidthRule::ess_pow_neg_2_5;
    std::size_t max_proposals_factor = 10000;
    std::size_t mh_burn_in = 1000;
    std::size_t mh_thin = 10;
    double mh_step_scale = 2.4;
};

struct IterationResult {
    Population population;
    double mh_acceptance_rate = -1.0;
};

/// One ABC rejection round at threshold epsilon. Proposal draws and
/// forward simulations are keyed by (seed, iteration, counter), with
/// acceptance bookkeeping merged in counter order, so results do not
/// depend on scheduling.
IterationResult abc_iteration(const ForwardProblem& problem,
                              const Proposal& proposal, double epsilon,
                              std::size_t n_target,
                              std::size_t max_proposals, std::uint64_t seed,
                              std::uint64_t iteration_index,
                              const SmcOptions& options = {});

struct SmcResult {
    std::vector<Population> populations;
    RunDiagnostics diagnostics;
};

/// Full SMC-ABC run: iteration 1 proposes from the prior; later
/// iterations fit the previous population and propose from the scheme
/// built on that fit. Stalls propagate as StallError naming the
/// iteration.
SmcResult smc_run(const ForwardProblem& problem,
                  const std::vector<double>& epsilon_schedule, Scheme scheme,
                  std::size_t n_particles, std::uint64_t seed,
                  const SmcOptions& options = {});

/// Same as smc_run but fills `out` iteration by iteration, so the
/// completed populations and diagnostics survive a StallError.
void smc_run_into(SmcResult& out, const ForwardProblem& problem,
                  const std::vector<double>& epsilon_schedule, Scheme scheme,
                  std::size_t n_particles, std::uint64_t seed,
                  const SmcOptions& options = {});

} // namespace abcopt
