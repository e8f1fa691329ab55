#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "abcopt/errors.hpp"
#include "abcopt/smc.hpp"

namespace abcopt {

namespace {

constexpr double log_2pi = 1.8378770664093453;

struct WeightedMoments {
    std::vector<double> v; // weights normalized to sum 1
    double mean = 0.0;
    double var = 0.0;
};

WeightedMoments weighted_moments(const Population& population) {
    const auto& thetas = population.thetas;
    const auto& weights = population.weights;
    WeightedMoments m;
    m.v.resize(weights.size());
    long double sum = 0.0L;
    for (double w : weights) sum += w;
    for (std::size_t i = 0; i < weights.size(); ++i)
        m.v[i] = static_cast<double>(weights[i] / sum);

    // Nudge the largest weight so the normalized sum is exactly 1
    // within one rounding step; large mixtures must still validate.
    long double vsum = 0.0L;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < m.v.size(); ++i) {
        vsum += m.v[i];
        if (m.v[i] > m.v[imax]) imax = i;
    }
    m.v[imax] += static_cast<double>(1.0L - vsum);

    long double mean = 0.0L;
    for (std::size_t i = 0; i < thetas.size(); ++i)
        mean += static_cast<long double>(m.v[i]) * thetas[i];
    m.mean = static_cast<double>(mean);
    long double var = 0.0L;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const long double d = thetas[i] - m.mean;
        var += static_cast<long double>(m.v[i]) * d * d;
    }
    m.var = static_cast<double>(var);
    return m;
}

DensitySpec fit_weighted_kde(const Population& population, double ess,
                             BandwidthRule rule) {
    const WeightedMoments m = weighted_moments(population);
    if (!(m.var > 0.0))
        throw Error("fit_density: degenerate population, zero weighted "
                    "variance");
    double h2 = m.var;
    switch (rule) {
    case BandwidthRule::ess_pow_neg_2_5: h2 *= std::pow(ess, -0.4); break;
    case BandwidthRule::ess_pow_neg_1_3: h2 *= std::pow(ess, -1.0 / 3.0); break;
    case BandwidthRule::variance: break;
    case BandwidthRule::twice_variance: h2 *= 2.0; break;
    }
    const double h = std::sqrt(h2);
    GaussianMixture mix;
    mix.components.reserve(population.thetas.size());
    for (std::size_t i = 0; i < population.thetas.size(); ++i) {
        if (m.v[i] == 0.0) continue;
        mix.components.push_back({m.v[i], population.thetas[i], h});
    }
    DensitySpec spec = mix;
    validate(spec);
    return spec;
}

DensitySpec fit_gaussian_mixture(const Population& population, int k) {
    const auto& thetas = population.thetas;
    const std::size_t n = thetas.size();
    if (k < 1) throw ConfigError("fit_density: k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw ConfigError("fit_density: more components than particles");

    const WeightedMoments m = weighted_moments(population);
    if (!(m.var > 0.0))
        throw Error("fit_density: degenerate population, zero weighted "
                    "variance");
    const double sigma0 = std::sqrt(m.var);
    const double sigma_floor = 1e-6 * sigma0;

    // Initialize component means at weighted quantiles.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return thetas[a] < thetas[b];
    });
    std::vector<double> mu(k), sigma(k, sigma0), weight(k, 1.0 / k);
    {
        std::size_t pos = 0;
        long double cum = 0.0L;
        for (int j = 0; j < k; ++j) {
            const double target = (j + 0.5) / k;
            while (pos + 1 < n && static_cast<double>(cum) < target) {
                cum += m.v[order[pos]];
                ++pos;
            }
            mu[j] = thetas[order[pos > 0 ? pos - 1 : 0]];
        }
    }

    std::vector<double> resp(n * static_cast<std::size_t>(k));
    std::vector<long double> Nj(k), mu_acc(k), var_acc(k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
        long double ll = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            double* r = &resp[i * k];
            if (m.v[i] == 0.0) {
                std::fill(r, r + k, 0.0);
                continue;
            }
            double max_log = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                const double d = (thetas[i] - mu[j]) / sigma[j];
                r[j] = std::log(weight[j]) - 0.5 * (d * d + log_2pi) -
                       std::log(sigma[j]);
                max_log = std::max(max_log, r[j]);
            }
            double denom = 0.0;
            for (int j = 0; j < k; ++j) {
                r[j] = std::exp(r[j] - max_log);
                denom += r[j];
            }
            ll += static_cast<long double>(m.v[i]) *
                  (max_log + std::log(denom));
            for (int j = 0; j < k; ++j) r[j] *= m.v[i] / denom;
        }

        std::fill(Nj.begin(), Nj.end(), 0.0L);
        std::fill(mu_acc.begin(), mu_acc.end(), 0.0L);
        std::fill(var_acc.begin(), var_acc.end(), 0.0L);
        for (std::size_t i = 0; i < n; ++i) {
            const double* r = &resp[i * k];
            for (int j = 0; j < k; ++j) {
                Nj[j] += r[j];
                mu_acc[j] += static_cast<long double>(r[j]) * thetas[i];
            }
        }
        for (int j = 0; j < k; ++j)
            if (Nj[j] > 0.0L)
                mu[j] = static_cast<double>(mu_acc[j] / Nj[j]);
        for (std::size_t i = 0; i < n; ++i) {
            const double* r = &resp[i * k];
            for (int j = 0; j < k; ++j) {
                const double d = thetas[i] - mu[j];
                var_acc[j] += static_cast<long double>(r[j]) * d * d;
            }
        }
        for (int j = 0; j < k; ++j) {
            if (Nj[j] > 0.0L) {
                weight[j] = static_cast<double>(Nj[j]);
                sigma[j] = std::max(
                    sigma_floor,
                    std::sqrt(static_cast<double>(var_acc[j] / Nj[j])));
            } else {
                weight[j] = 1e-12;
            }
        }
        long double wsum = 0.0L;
        for (int j = 0; j < k; ++j) wsum += weight[j];
        for (int j = 0; j < k; ++j)
            weight[j] = static_cast<double>(weight[j] / wsum);

        const double cur = static_cast<double>(ll);
        if (std::fabs(cur - prev_ll) <= 1e-8 * std::max(1.0, std::fabs(cur)))
            break;
        prev_ll = cur;
    }

    std::vector<int> comp_order(k);
    std::iota(comp_order.begin(), comp_order.end(), 0);
    std::sort(comp_order.begin(), comp_order.end(),
              [&](int a, int b) { return mu[a] < mu[b]; });
    GaussianMixture mix;
    long double wsum = 0.0L;
    for (int j : comp_order) {
        mix.components.push_back({weight[j], mu[j], sigma[j]});
        wsum += weight[j];
    }
    mix.components.front().weight +=
        static_cast<double>(1.0L - wsum);
    DensitySpec spec = mix;
    validate(spec);
    return spec;
}

} // namespace

FitMethod fit_method_from_string(const std::string& name) {
    if (name == "weighted_kde") return FitMethod::weighted_kde;
    if (name == "gaussian_mixture") return FitMethod::gaussian_mixture;
    throw ConfigError("unknown fit method: " + name);
}

BandwidthRule bandwidth_rule_from_string(const std::string& name) {
    if (name == "ess_pow_neg_2_5") return BandwidthRule::ess_pow_neg_2_5;
    if (name == "ess_pow_neg_1_3") return BandwidthRule::ess_pow_neg_1_3;
    if (name == "variance") return BandwidthRule::variance;
    if (name == "twice_variance") return BandwidthRule::twice_variance;
    throw ConfigError("unknown bandwidth rule: " + name);
}

DensitySpec fit_density(const Population& population, FitMethod method, int k,
                        BandwidthRule rule) {
    if (population.thetas.empty() ||
        population.thetas.size() != population.weights.size())
        throw ConfigError("fit_density: population thetas and weights must "
                          "be nonempty and of equal length");
    const double ess = kish_ess(population.weights);
    if (ess < 10.0)
        throw Error("fit_density: degenerate population, ess = " +
                    std::to_string(ess) + " < 10");
    switch (method) {
    case FitMethod::weighted_kde:
        return fit_weighted_kde(population, ess, rule);
    case FitMethod::gaussian_mixture:
        return fit_gaussian_mixture(population, k);
    }
    throw ConfigError("unknown fit method value");
}

} // namespace abcopt
