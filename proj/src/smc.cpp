#include "abcopt/smc.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "abcopt/errors.hpp"

namespace abcopt {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

/// Sequential Metropolis chain that hands out one state per proposal
/// counter. The chain has its own stream, so forward simulations can
/// be scheduled freely without touching the proposal sequence.
class MhProposalStream {
  public:
    MhProposalStream(std::function<double(double)> log_q, double init,
                     double step_std, CounterRng rng, std::size_t burn_in,
                     std::size_t thin)
        : log_q_(std::move(log_q)), rng_(rng), step_(0.0, step_std),
          unit_(0.0, 1.0), thin_(thin), x_(init), lx_(log_q_(init)) {
        if (!std::isfinite(lx_))
            throw ConfigError("mh: log density not finite at init = " +
                              fmt(init));
        if (!(step_std > 0.0))
            throw ConfigError("mh: step_std must be positive");
        for (std::size_t i = 0; i < burn_in; ++i) advance();
    }

    double next() {
        for (std::size_t i = 0; i < thin_; ++i) advance();
        return x_;
    }

    double acceptance_rate() const {
        return steps_ == 0 ? 0.0
                           : static_cast<double>(accepted_) /
                                 static_cast<double>(steps_);
    }

  private:
    void advance() {
        const double cand = x_ + step_(rng_);
        const double lc = log_q_(cand);
        const double delta = lc - lx_;
        if (delta >= 0.0 || unit_(rng_) < std::exp(delta)) {
            x_ = cand;
            lx_ = lc;
            ++accepted_;
        }
        ++steps_;
    }

    std::function<double(double)> log_q_;
    CounterRng rng_;
    std::normal_distribution<double> step_;
    std::uniform_real_distribution<double> unit_;
    std::size_t thin_;
    double x_;
    double lx_;
    std::size_t accepted_ = 0;
    std::size_t steps_ = 0;
};

} // namespace

double euclidean_distance(const std::vector<double>& a,
                          const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ConfigError("distance: summary vectors of unequal length");
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

ForwardProblem make_toy(const std::string& name) {
    ForwardProblem problem;
    problem.simulate = [](double theta, CounterRng& rng) {
        std::normal_distribution<double> noise(0.0, 1.0);
        double sum = 0.0;
        for (int i = 0; i < 10; ++i) sum += theta + noise(rng);
        return std::vector<double>{sum / 10.0};
    };
    problem.observed = {0.0};
    problem.distance = euclidean_distance;
    if (name == "gaussian_mean") {
        problem.prior = Gaussian{0.0, 5.0};
        return problem;
    }
    if (name == "gaussian_mean_bimodal_prior") {
        problem.prior =
            GaussianMixture{{{0.5, -2.0, 1.0}, {0.5, 2.0, 1.0}}};
        return problem;
    }
    throw ConfigError("unknown toy problem: " + name);
}

MhResult mh_sample(const std::function<double(double)>& log_q, std::size_t n,
                   double init, double step_std, CounterRng& rng,
                   std::size_t burn_in, std::size_t thin) {
    if (thin == 0) throw ConfigError("mh_sample: thin must be >= 1");
    MhProposalStream chain(log_q, init, step_std, rng, burn_in, thin);
    MhResult out;
    out.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.samples.push_back(chain.next());
    out.acceptance_rate = chain.acceptance_rate();
    return out;
}

std::vector<double> importance_weights(const std::vector<double>& thetas,
                                       const DensitySpec& prior,
                                       const DensitySpec& proposal) {
    std::vector<double> weights;
    weights.reserve(thetas.size());
    for (double theta : thetas) {
        const double lq = log_pdf(proposal, theta);
        if (lq == -std::numeric_limits<double>::infinity())
            throw DivergenceError(
                "inadmissible proposal: zero density at accepted theta = " +
                fmt(theta));
        const double lpi = log_pdf(prior, theta);
        weights.push_back(
            lpi == -std::numeric_limits<double>::infinity()
                ? 0.0
                : std::exp(lpi - lq));
    }
    return weights;
}

IterationResult abc_iteration(const ForwardProblem& problem,
                              const Proposal& proposal, double epsilon,
                              std::size_t n_target,
                              std::size_t max_proposals, std::uint64_t seed,
                              std::uint64_t iteration_index,
                              const SmcOptions& options) {
    if (n_target == 0) throw ConfigError("abc_iteration: n_target must be > 0");
    if (max_proposals < n_target)
        throw ConfigError("abc_iteration: max_proposals below n_target");
    if (!problem.simulate) throw ConfigError("abc_iteration: no simulator");
    if (!(epsilon > 0.0))
        throw ConfigError("abc_iteration: epsilon must be positive");
    const auto& distance =
        problem.distance ? problem.distance : euclidean_distance;

    const bool needs_mh =
        std::holds_alternative<Numeric>(proposal.density);
    std::unique_ptr<MhProposalStream> chain;
    if (needs_mh) {
        const double init = mean(proposal.density);
        const double step =
            options.mh_step_scale * std::sqrt(variance(proposal.density));
        auto log_q = [density = proposal.density](double x) {
            return log_pdf(density, x);
        };
        chain = std::make_unique<MhProposalStream>(
            std::move(log_q), init, step,
            CounterRng(seed, iteration_index, 0, StreamPurpose::mh_chain),
            options.mh_burn_in, options.mh_thin);
    }

    Population pop;
    pop.epsilon = epsilon;
    pop.thetas.reserve(n_target);

    std::uint64_t counter = 0;
    for (; counter < max_proposals && pop.thetas.size() < n_target;
         ++counter) {
        double theta;
        if (needs_mh) {
            theta = chain->next();
        } else {
            CounterRng rng(seed, iteration_index, counter,
                           StreamPurpose::proposal);
            theta = sample(proposal.density, rng, 1)[0];
        }
        CounterRng sim_rng(seed, iteration_index, counter,
                           StreamPurpose::simulate);
        const std::vector<double> summary = problem.simulate(theta, sim_rng);
        if (distance(problem.observed, summary) <= epsilon)
            pop.thetas.push_back(theta);
    }

    if (pop.thetas.size() < n_target)
        throw StallError("abc_iteration stalled: " +
                         std::to_string(pop.thetas.size()) + " of " +
                         std::to_string(n_target) +
                         " target acceptances at epsilon = " + fmt(epsilon) +
                         " after " + std::to_string(counter) + " proposals");

    pop.n_proposed = counter;
    pop.accepted = pop.thetas.size();
    pop.weights =
        importance_weights(pop.thetas, problem.prior, proposal.density);
    pop.ess = kish_ess(pop.weights);

    IterationResult result;
    result.population = std::move(pop);
    result.mh_acceptance_rate = needs_mh ? chain->acceptance_rate() : -1.0;
    return result;
}

SmcResult smc_run(const ForwardProblem& problem,
                  const std::vector<double>& epsilon_schedule, Scheme scheme,
                  std::size_t n_particles, std::uint64_t seed,
                  const SmcOptions& options) {
    SmcResult result;
    smc_run_into(result, problem, epsilon_schedule, scheme, n_particles, seed,
                 options);
    return result;
}

void smc_run_into(SmcResult& result, const ForwardProblem& problem,
                  const std::vector<double>& epsilon_schedule, Scheme scheme,
                  std::size_t n_particles, std::uint64_t seed,
                  const SmcOptions& options) {
    if (epsilon_schedule.empty())
        throw ConfigError("smc_run: empty epsilon schedule");
    for (std::size_t t = 0; t < epsilon_schedule.size(); ++t) {
        if (!(epsilon_schedule[t] > 0.0))
            throw ConfigError("smc_run: epsilons must be positive");
        if (t > 0 && !(epsilon_schedule[t] < epsilon_schedule[t - 1]))
            throw ConfigError("smc_run: epsilon schedule must be strictly "
                              "decreasing");
    }
    if (scheme == Scheme::series)
        throw ConfigError("smc_run: series scheme needs explicit parameters "
                          "and is not a run-time scheme");
    if (n_particles == 0)
        throw ConfigError("smc_run: n_particles must be > 0");

    const std::size_t max_proposals =
        options.max_proposals_factor * n_particles;

    for (std::size_t t = 0; t < epsilon_schedule.size(); ++t) {
        Proposal proposal;
        if (t == 0) {
            proposal = make_proposal(Scheme::prior, problem.prior,
                                     problem.prior);
        } else {
            const DensitySpec fit =
                fit_density(result.populations.back(), options.fit,
                            options.fit_components, options.bandwidth_rule);
            proposal = make_proposal(scheme, fit, problem.prior);
        }

        IterationResult iter;
        try {
            iter = abc_iteration(problem, proposal, epsilon_schedule[t],
                                 n_particles, max_proposals, seed,
                                 static_cast<std::uint64_t>(t + 1), options);
        } catch (const StallError& e) {
            throw StallError("iteration " + std::to_string(t + 1) + ": " +
                             e.what());
        }

        IterationDiagnostics diag;
        diag.epsilon = epsilon_schedule[t];
        diag.acceptance_fraction =
            static_cast<double>(iter.population.accepted) /
            static_cast<double>(iter.population.n_proposed);
        diag.ess = iter.population.ess;
        diag.ess_per_proposal =
            iter.population.ess /
            static_cast<double>(iter.population.n_proposed);
        diag.empirical_omega =
            diag.acceptance_fraction * diag.ess_per_proposal;
        diag.scheme = t == 0 ? Scheme::prior : scheme;
        diag.mh_acceptance_rate = iter.mh_acceptance_rate;
        diag.mh_warning = iter.mh_acceptance_rate >= 0.0 &&
                          (iter.mh_acceptance_rate < 0.05 ||
                           iter.mh_acceptance_rate > 0.95);
        result.diagnostics.iterations.push_back(diag);
        result.diagnostics.total_proposals += iter.population.n_proposed;
        result.populations.push_back(std::move(iter.population));
    }
}

} // namespace abcopt
