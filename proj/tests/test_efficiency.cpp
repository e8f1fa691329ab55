#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "abcopt/efficiency.hpp"
#include "abcopt/errors.hpp"
#include "abcopt/rng.hpp"
#include "abcopt/scenarios.hpp"

using namespace abcopt;

TEST_CASE("proposing from the prior is the unit baseline") {
    for (const auto& sc : all_scenarios()) {
        const auto r = sampling_efficiency(sc.prior, sc.posterior, sc.prior);
        CHECK(r.omega == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.A == r.B);
    }
}

TEST_CASE("case I closed forms") {
    const DensitySpec p = Gaussian{0.0, 1.0};
    const DensitySpec prior = Gaussian{0.0, 5.0};

    CHECK(functional_A(p, p, prior) ==
          doctest::Approx(25.0 / 7.0).epsilon(1e-9));
    CHECK(functional_B(p, p, prior) == doctest::Approx(1.0).epsilon(1e-10));

    const DensitySpec kde = Gaussian{0.0, std::sqrt(3.0)};
    CHECK(functional_A(kde, p, prior) ==
          doctest::Approx(2.538365413).epsilon(1e-8));
    CHECK(functional_B(kde, p, prior) ==
          doctest::Approx(0.4120816918).epsilon(1e-8));
    CHECK(sampling_efficiency(kde, p, prior).omega ==
          doctest::Approx(6.159859715).epsilon(1e-8));

    const DensitySpec q0 = Gaussian{0.0, std::sqrt(25.0 / 13.0)};
    CHECK(functional_A(q0, p, prior) ==
          doctest::Approx(2.963744892).epsilon(1e-8));
    CHECK(functional_B(q0, p, prior) ==
          doctest::Approx(5.0 / 13.0).epsilon(1e-9));
}

TEST_CASE("closed-form toys factorize over dimensions") {
    const GaussianToyParams one{1, 2.0, 4.0};
    const GaussianToyParams three{3, 2.0, 4.0};
    for (Scheme s : {Scheme::posterior, Scheme::beaumont_kde,
                     Scheme::geometric_mean, Scheme::prior}) {
        const double w1 = analytic_gaussian_efficiency(one, s).omega;
        const double w3 = analytic_gaussian_efficiency(three, s).omega;
        CHECK(w3 == doctest::Approx(std::pow(w1, 3)).epsilon(1e-12));
    }
}

TEST_CASE("closed forms agree with quadrature") {
    const GaussianToyParams params{1, 3.7, 2.2};
    const DensitySpec p = Gaussian{0.0, 1.0};
    const DensitySpec prior = Gaussian{params.mu_pi, params.sigma_pi};

    struct Row {
        Scheme scheme;
        DensitySpec q;
    };
    const double lam_pi = 1.0 / (params.sigma_pi * params.sigma_pi);
    const std::vector<Row> rows = {
        {Scheme::posterior, Gaussian{0.0, 1.0}},
        {Scheme::beaumont_kde, Gaussian{0.0, std::sqrt(3.0)}},
        {Scheme::geometric_mean,
         Gaussian{lam_pi * params.mu_pi / (1.0 + lam_pi),
                  std::sqrt(2.0 / (1.0 + lam_pi))}},
    };
    for (const auto& row : rows) {
        const auto closed = analytic_gaussian_efficiency(params, row.scheme);
        CHECK(functional_A(row.q, p, prior) ==
              doctest::Approx(closed.A).epsilon(1e-7));
        CHECK(functional_B(row.q, p, prior) ==
              doctest::Approx(closed.B).epsilon(1e-7));
    }
}

TEST_CASE("divergent functionals raise instead of returning garbage") {
    const DensitySpec p = Gaussian{0.0, 1.0};

    CHECK_THROWS_AS(functional_A(p, p, DensitySpec{Gaussian{0.0, 0.6}}),
                    DivergenceError);
    CHECK_THROWS_AS(functional_A(DensitySpec{Gaussian{0.0, std::sqrt(3.0)}},
                                 p, DensitySpec{Gaussian{0.0, 0.8}}),
                    DivergenceError);

    double la = 0.0, lb = 0.0;
    CHECK_THROWS_AS(analytic_gaussian_log_functionals({1, 0.0, 0.6},
                                                      Scheme::posterior, la,
                                                      lb),
                    DivergenceError);
    CHECK_THROWS_AS(analytic_gaussian_log_functionals({1, 0.0, 0.8},
                                                      Scheme::beaumont_kde,
                                                      la, lb),
                    DivergenceError);
    CHECK_THROWS_AS(analytic_gaussian_log_functionals({1, 0.0, 0.55},
                                                      Scheme::geometric_mean,
                                                      la, lb),
                    DivergenceError);
}

TEST_CASE("functional B rejects proposals that vanish on the posterior") {
    const DensitySpec p = Gaussian{0.0, 1.0};
    const DensitySpec prior = Gaussian{0.0, 5.0};
    const DensitySpec holey = normalize(
        [](double x) {
            return std::fabs(x) < 2.0
                       ? -0.5 * x * x
                       : -std::numeric_limits<double>::infinity();
        },
        {-40.0, 40.0});
    CHECK_THROWS_AS(functional_B(holey, p, prior), DivergenceError);
    CHECK_NOTHROW(functional_A(holey, p, prior));
}

TEST_CASE("kish effective sample size") {
    CHECK(kish_ess({1.0, 1.0, 1.0, 1.0}) == doctest::Approx(4.0));
    CHECK(kish_ess({1.0, 0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(kish_ess({2.0, 4.0, 6.0}) ==
          doctest::Approx(kish_ess({1.0, 2.0, 3.0})).epsilon(1e-15));
    CHECK_THROWS_AS(kish_ess({1.0, -0.5}), ConfigError);
    CHECK_THROWS_AS(kish_ess({0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(kish_ess({}), ConfigError);
}

TEST_CASE("monte carlo functionals track quadrature within error bars") {
    const DensitySpec p = Gaussian{0.0, 1.0};
    const DensitySpec prior = Gaussian{0.0, 5.0};
    const DensitySpec q = Gaussian{0.0, std::sqrt(3.0)};

    CounterRng rng(9, 1, 0, StreamPurpose::generic);
    const auto thetas = sample(p, rng, 100000);
    const std::vector<double> weights(thetas.size(), 1.0);
    const auto mc = mc_functionals(q, thetas, weights, prior);

    CHECK(mc.A_se > 0.0);
    CHECK(mc.B_se > 0.0);
    CHECK(std::fabs(mc.A_hat - 2.538365413) < 5.0 * mc.A_se);
    CHECK(std::fabs(mc.B_hat - 0.4120816918) < 5.0 * mc.B_se);
    CHECK(mc.A_se < 0.02);
}

TEST_CASE("improvement surface stays in logs and flags inadmissible cells") {
    const std::vector<GaussianToyParams> grid = {
        {1, 0.0, 5.0}, {3, 0.0, 5.0}, {1, 0.0, 0.5}, {1, 10.0, 20.0}};
    const auto rows =
        improvement_surface(grid, Scheme::geometric_mean, Scheme::posterior);
    REQUIRE(rows.size() == 4);

    const double a1 = 7.705736719 / 3.571428571;
    CHECK(rows[0].admissible);
    CHECK(rows[0].a == doctest::Approx(a1).epsilon(1e-8));
    CHECK(rows[1].admissible);
    CHECK(rows[1].a == doctest::Approx(std::pow(a1, 3)).epsilon(1e-8));
    CHECK_FALSE(rows[2].admissible);
    CHECK(std::isnan(rows[2].a));
    CHECK(rows[3].admissible);
    CHECK(rows[3].a > 0.0);
}

TEST_CASE("functional domain respects hard supports") {
    const DensitySpec q = Gaussian{3.0, 1.0};
    const DensitySpec p = Gaussian{3.0, 1.0};
    const DensitySpec prior = Uniform{0.0, 30.0};
    const Interval d = functional_domain(q, p, prior);
    CHECK(d.lo == 0.0);
    CHECK(d.hi == 30.0);
}

TEST_CASE("scheme names round-trip") {
    for (Scheme s : {Scheme::prior, Scheme::posterior, Scheme::beaumont_kde,
                     Scheme::geometric_mean, Scheme::bounded, Scheme::optimal,
                     Scheme::series})
        CHECK(scheme_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(scheme_from_string("bogus"), ConfigError);
}
