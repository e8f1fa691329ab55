// Acceptance gate: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Tolerances are fixed here, not tuned to output.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "abcopt/density.hpp"
#include "abcopt/efficiency.hpp"
#include "abcopt/io.hpp"
#include "abcopt/proposals.hpp"
#include "abcopt/rng.hpp"
#include "abcopt/scenarios.hpp"
#include "abcopt/smc.hpp"

namespace fs = std::filesystem;
using namespace abcopt;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

double uniform01(CounterRng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng);
}

const Scheme kTableSchemes[5] = {Scheme::posterior, Scheme::beaumont_kde,
                                 Scheme::geometric_mean, Scheme::bounded,
                                 Scheme::optimal};

Outcome reference_table() {
    const auto t0 = Clock::now();
    constexpr double tol_a = 0.015, tol_b = 0.015, tol_omega = 0.05;
    const auto& reference = embedded_reference_table();

    std::vector<std::string> deviations;
    for (const auto& scen : all_scenarios()) {
        for (const Scheme scheme : kTableSchemes) {
            const Proposal proposal =
                make_proposal(scheme, scen.posterior, scen.prior);
            const EfficiencyReport rep = sampling_efficiency(
                proposal.density, scen.posterior, scen.prior);

            const ReferenceCell* cell = nullptr;
            for (const auto& c : reference)
                if (c.case_name == scen.name && c.scheme == to_string(scheme))
                    cell = &c;
            if (!cell) return {false, "missing reference cell " + scen.name +
                                          "/" + to_string(scheme)};

            std::string fields;
            if (std::fabs(rep.A - cell->A) > tol_a) fields += "A";
            if (std::fabs(rep.B - cell->B) > tol_b) fields += fields.empty() ? "B" : ",B";
            if (std::fabs(rep.omega - cell->omega) > tol_omega)
                fields += fields.empty() ? "omega" : ",omega";
            if (!fields.empty())
                deviations.push_back(scen.name + "." + to_string(scheme) +
                                     "{" + fields + "}");
        }
    }

    const double elapsed = seconds_since(t0);
    Outcome out;
    out.pass = deviations.empty() && elapsed < 60.0;
    std::ostringstream os;
    if (deviations.empty()) {
        os << "all 15 cells within tolerance";
    } else {
        os << deviations.size() << " cells deviate:";
        for (const auto& d : deviations) os << " " << d;
    }
    os << " (" << fmt(elapsed, 2) << "s)";
    out.detail = os.str();
    return out;
}

Outcome prior_unit_efficiency() {
    double worst = 0.0;
    for (const auto& scen : all_scenarios()) {
        const EfficiencyReport rep =
            sampling_efficiency(scen.prior, scen.posterior, scen.prior);
        worst = std::max(worst, std::fabs(rep.omega - 1.0));
    }
    for (int i = 0; i < 20; ++i) {
        CounterRng rng(2026, 201, i, StreamPurpose::generic);
        const DensitySpec p =
            Gaussian{-5.0 + 10.0 * uniform01(rng), 0.3 + 3.0 * uniform01(rng)};
        const DensitySpec prior = Gaussian{-5.0 + 10.0 * uniform01(rng),
                                           0.5 + 19.5 * uniform01(rng)};
        const EfficiencyReport rep = sampling_efficiency(prior, p, prior);
        worst = std::max(worst, std::fabs(rep.omega - 1.0));
    }
    return {worst <= 1e-10,
            "max |omega[prior] - 1| = " + fmt(worst, 3) + " over 23 pairs"};
}

Outcome jensen_bounds() {
    double min_q0 = std::numeric_limits<double>::infinity();
    double min_post = min_q0;
    for (int i = 0; i < 50; ++i) {
        CounterRng rng(2026, 301, i, StreamPurpose::generic);
        DensitySpec p;
        double widest = 0.0;
        if (i % 2 == 1) {
            const double s1 = 0.5 + 1.5 * uniform01(rng);
            const double s2 = 0.5 + 1.5 * uniform01(rng);
            const double delta = 0.5 + 2.5 * uniform01(rng);
            const double w = 0.3 + 0.4 * uniform01(rng);
            p = GaussianMixture{{{w, -delta, s1}, {1.0 - w, delta, s2}}};
            widest = std::max(s1, s2) + delta;
        } else {
            const double m = -3.0 + 6.0 * uniform01(rng);
            p = Gaussian{m, 0.4 + 2.6 * uniform01(rng)};
            widest = std::get<Gaussian>(p).std;
        }
        const double mu_pi = mean(p) + (2.0 * uniform01(rng) - 1.0) * 3.0;
        const double sigma_pi = widest * (1.2 + 3.8 * uniform01(rng));
        const DensitySpec prior = Gaussian{mu_pi, sigma_pi};

        const Proposal q0 = geometric_mean_proposal(p, prior);
        min_q0 = std::min(min_q0,
                          sampling_efficiency(q0.density, p, prior).omega);
        min_post = std::min(min_post, sampling_efficiency(p, p, prior).omega);
    }
    const bool pass = min_q0 >= 1.0 - 1e-9 && min_post >= 1.0 - 1e-9;
    return {pass, "over 50 pairs: min omega[q0] = " + fmt(min_q0, 6) +
                      ", min omega[posterior] = " + fmt(min_post, 6)};
}

Outcome hoelder_bracket() {
    std::ostringstream os;
    bool pass = true;
    for (const auto& scen : all_scenarios()) {
        const Proposal opt = optimal_proposal(scen.posterior, scen.prior);
        const double sup = opt.params.sup_ratio;
        const double a_star = *opt.params.A_star;
        const double a_direct =
            functional_A(opt.density, scen.posterior, scen.prior);

        bool ok = a_star > 0.5 * sup && a_star <= sup * (1.0 + 1e-9) &&
                  std::fabs(a_direct - a_star) <= 1e-3 * a_star;
        if (scen.name == "I")
            ok = ok && std::fabs(sup - 5.0) <= 1e-6 && a_star > 2.5 &&
                 a_star <= 5.0 && std::fabs(a_star - 3.34) <= 0.005;
        pass = pass && ok;
        os << (scen.name == "I" ? "" : "; ") << scen.name
           << ": A*=" << fmt(a_star, 6) << " in (" << fmt(0.5 * sup, 4) << ", "
           << fmt(sup, 4) << "]" << (ok ? "" : " VIOLATED");
    }
    return {pass, os.str()};
}

Outcome optimal_dominates() {
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& scen : all_scenarios()) {
        const Proposal opt = optimal_proposal(scen.posterior, scen.prior);
        const double w_star =
            sampling_efficiency(opt.density, scen.posterior, scen.prior).omega;
        for (const Scheme other :
             {Scheme::bounded, Scheme::geometric_mean, Scheme::beaumont_kde,
              Scheme::posterior}) {
            const Proposal q = make_proposal(other, scen.posterior, scen.prior);
            const double w =
                sampling_efficiency(q.density, scen.posterior, scen.prior)
                    .omega;
            min_margin = std::min(min_margin, w_star / w - 1.0);
        }
    }
    return {min_margin >= -1e-3,
            "min omega*/omega - 1 = " + fmt(min_margin, 3) +
                " over 12 scheme comparisons"};
}

Outcome series_limit() {
    const ScenarioSpec scen = scenario("I");
    const Proposal opt = optimal_proposal(scen.posterior, scen.prior);
    const double a_star = *opt.params.A_star;
    const double w_star =
        sampling_efficiency(opt.density, scen.posterior, scen.prior).omega;

    const Proposal q0 = geometric_mean_proposal(scen.posterior, scen.prior);
    const Proposal s0 = series_proposal(scen.posterior, scen.prior, 0, a_star);
    double max_mismatch = 0.0;
    for (int i = 0; i < 33; ++i) {
        const double theta = -8.0 + 16.0 * i / 32.0;
        const double l0 = log_pdf(q0.density, theta);
        const double ls = log_pdf(s0.density, theta);
        max_mismatch = std::max(
            max_mismatch, std::fabs(ls - l0) / std::max(1.0, std::fabs(l0)));
    }

    const int orders[6] = {0, 1, 2, 4, 8, 12};
    double omegas[6];
    bool monotone = true;
    for (int j = 0; j < 6; ++j) {
        const Proposal s =
            series_proposal(scen.posterior, scen.prior, orders[j], a_star);
        omegas[j] =
            sampling_efficiency(s.density, scen.posterior, scen.prior).omega;
        if (j > 0 && omegas[j] < omegas[j - 1] * (1.0 - 1e-9))
            monotone = false;
    }

    const double gap = std::fabs(omegas[5] - w_star);
    const bool pass = max_mismatch <= 1e-12 && monotone && gap <= 1e-3;
    return {pass, "omega(12) = " + fmt(omegas[5], 8) + " vs omega* = " +
                      fmt(w_star, 8) + ", order-0 mismatch " +
                      fmt(max_mismatch, 2) +
                      (monotone ? "" : ", NOT monotone")};
}

Outcome analytic_quadrature_match() {
    double max_rel = 0.0;
    for (int i = 0; i < 100; ++i) {
        CounterRng rng(2026, 701, i, StreamPurpose::generic);
        const double mu_pi = 10.0 * uniform01(rng);
        const double sigma_pi = 1.0 + 19.0 * uniform01(rng);
        const GaussianToyParams params{1, mu_pi, sigma_pi};
        const DensitySpec p = Gaussian{0.0, 1.0};
        const DensitySpec prior = Gaussian{mu_pi, sigma_pi};

        for (const Scheme scheme :
             {Scheme::posterior, Scheme::beaumont_kde, Scheme::geometric_mean}) {
            DensitySpec q;
            if (scheme == Scheme::posterior) {
                q = Gaussian{0.0, 1.0};
            } else if (scheme == Scheme::beaumont_kde) {
                q = Gaussian{0.0, std::sqrt(3.0)};
            } else {
                const double lam_pi = 1.0 / (sigma_pi * sigma_pi);
                q = Gaussian{lam_pi * mu_pi / (1.0 + lam_pi),
                             std::sqrt(2.0 / (1.0 + lam_pi))};
            }
            const EfficiencyReport analytic =
                analytic_gaussian_efficiency(params, scheme);
            const double a_quad = functional_A(q, p, prior);
            const double b_quad = functional_B(q, p, prior);
            max_rel = std::max(max_rel,
                               std::fabs(a_quad - analytic.A) / analytic.A);
            max_rel = std::max(max_rel,
                               std::fabs(b_quad - analytic.B) / analytic.B);
        }
    }

    const EfficiencyReport pinned =
        analytic_gaussian_efficiency({1, 0.0, 5.0}, Scheme::posterior);
    const bool pin_ok = std::fabs(pinned.A - 3.5714) <= 1e-4;
    return {max_rel <= 1e-6 && pin_ok,
            "max rel error " + fmt(max_rel, 3) +
                " over 300 functional pairs; A(0,5) = " + fmt(pinned.A, 6)};
}

Outcome surface_scaling() {
    const double cells[3][2] = {{0.0, 5.0}, {3.0, 2.0}, {7.0, 10.0}};
    double max_rel = 0.0;
    for (const auto& cell : cells) {
        const auto base = improvement_surface({{1, cell[0], cell[1]}},
                                              Scheme::geometric_mean,
                                              Scheme::posterior);
        for (const int n : {2, 3, 10}) {
            const auto row = improvement_surface({{n, cell[0], cell[1]}},
                                                 Scheme::geometric_mean,
                                                 Scheme::posterior);
            const double expected = std::pow(base[0].a, n);
            max_rel = std::max(max_rel,
                               std::fabs(row[0].a - expected) / expected);
        }
    }

    constexpr int kGrid = 101;
    std::vector<GaussianToyParams> grid;
    grid.reserve(kGrid * kGrid);
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j)
            grid.push_back(
                {1, 10.0 * i / (kGrid - 1), 1.0 + 19.0 * j / (kGrid - 1)});

    std::size_t counts[2] = {0, 0};
    bool confined = true;
    const Scheme refs[2] = {Scheme::posterior, Scheme::beaumont_kde};
    for (int r = 0; r < 2; ++r) {
        const auto rows =
            improvement_surface(grid, Scheme::geometric_mean, refs[r]);
        for (const auto& row : rows) {
            // a ties at exactly 1 (up to rounding) where the prior equals
            // the posterior, so count genuine shortfalls only.
            if (!row.admissible || !(row.a < 1.0 - 1e-12)) continue;
            ++counts[r];
            // Wedge: the prior is barely wider than the posterior, or
            // shifted by at least its own width. Wide centered priors
            // must never land here.
            if (row.sigma_pi > 3.5 ||
                (row.sigma_pi > 1.2 && row.mu_pi < row.sigma_pi))
                confined = false;
        }
    }

    const bool pass = max_rel <= 1e-9 && counts[0] > 0 && counts[1] > 0 &&
                      confined;
    return {pass, "a(n) vs a(1)^n rel " + fmt(max_rel, 3) + "; a<1 cells: " +
                      std::to_string(counts[0]) + " (posterior ref), " +
                      std::to_string(counts[1]) + " (kde ref)" +
                      (confined ? ", confined to corner" : ", NOT confined")};
}

Outcome smc_ranking() {
    const auto t0 = Clock::now();
    const std::vector<double> schedule = {1.6, 0.8, 0.4, 0.2, 0.1, 0.05};
    constexpr std::size_t kParticles = 40000;
    constexpr int kSeeds = 10;

    const Scheme schemes[6] = {Scheme::prior,          Scheme::posterior,
                               Scheme::beaumont_kde,   Scheme::geometric_mean,
                               Scheme::bounded,        Scheme::optimal};
    // Limiting efficiencies of the schemes on this toy as the
    // threshold shrinks to zero, used as the band centers below.
    const double theory[6] = {1.0,       11.213853, 59.426632,
                              72.939351, 77.904752, 78.17814772};

    SmcOptions options;
    options.fit = FitMethod::gaussian_mixture;
    options.fit_components = 1;
    const ForwardProblem toy = make_toy("gaussian_mean");

    double emp[6][kSeeds];
    double esspp[6][kSeeds];
    for (int s = 0; s < 6; ++s) {
        for (int k = 0; k < kSeeds; ++k) {
            const SmcResult res = smc_run(toy, schedule, schemes[s],
                                          kParticles, k + 1, options);
            emp[s][k] = res.diagnostics.iterations.back().empirical_omega;
            esspp[s][k] = res.diagnostics.iterations.back().ess_per_proposal;
        }
    }

    const int gate_pairs[5][2] = {{1, 0}, {2, 1}, {3, 2}, {4, 3}, {5, 3}};
    int min_wins = kSeeds;
    for (const auto& pair : gate_pairs) {
        int wins = 0;
        for (int k = 0; k < kSeeds; ++k)
            if (emp[pair[0]][k] > emp[pair[1]][k]) ++wins;
        min_wins = std::min(min_wins, wins);
    }

    // Ratio bands are checked among the four fit-based schemes with
    // heavier-than-posterior proposal tails. The posterior scheme has no
    // consistent empirical omega at finite sample sizes: its second
    // weight moment is carried by a region several sigma outside the
    // accepted population, so a finite run measures a truncated moment
    // (2.2x inflated here). Ratios against the prior scheme retain the
    // finite-threshold and fit-width systematics (3-4% at this
    // schedule) that fit-based pairs cancel, so they are ranked in the
    // gate above but not banded.
    const int band_pairs[6][2] = {{3, 2}, {4, 3}, {5, 3},
                                  {5, 4}, {4, 2}, {5, 2}};
    int bands_ok = 0;
    double worst_band = 0.0;
    for (const auto& pair : band_pairs) {
        double logs[kSeeds];
        double sum = 0.0;
        for (int k = 0; k < kSeeds; ++k) {
            logs[k] = std::log(emp[pair[0]][k] / emp[pair[1]][k]);
            sum += logs[k];
        }
        const double mean_log = sum / kSeeds;
        double ss = 0.0;
        for (int k = 0; k < kSeeds; ++k)
            ss += (logs[k] - mean_log) * (logs[k] - mean_log);
        const double sd = std::sqrt(ss / (kSeeds - 1));
        const double target = std::log(theory[pair[0]] / theory[pair[1]]);
        const double band = 3.0 * std::max(sd, 0.005);
        const double dev = std::fabs(mean_log - target);
        worst_band = std::max(worst_band, dev - band);
        if (dev <= band) ++bands_ok;
    }

    double mean_esspp[6];
    for (int s = 0; s < 6; ++s) {
        double sum = 0.0;
        for (int k = 0; k < kSeeds; ++k) sum += esspp[s][k];
        mean_esspp[s] = sum / kSeeds;
    }
    std::printf("    note: mean ess/proposal at the final threshold: "
                "q0 %.3g, bounded %.3g, optimal %.3g, kde %.3g, "
                "posterior %.3g, prior %.3g (1/B predicts q0 > bounded > "
                "optimal > kde > posterior ~ prior)\n",
                mean_esspp[3], mean_esspp[4], mean_esspp[5], mean_esspp[2],
                mean_esspp[1], mean_esspp[0]);

    const double elapsed = seconds_since(t0);
    const bool pass = min_wins >= 9 && bands_ok == 6 && elapsed < 600.0;
    return {pass, "gate pairs min " + std::to_string(min_wins) + "/10 seeds, " +
                      std::to_string(bands_ok) +
                      "/6 ratio bands (fit-based schemes), worst excess " +
                      fmt(worst_band, 3) + " (" + fmt(elapsed, 3) + "s)"};
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(ABC_OPTIMAL_BIN) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const ForwardProblem toy = make_toy("gaussian_mean");
    const std::vector<double> schedule = {1.6, 0.8};
    const SmcResult r1 =
        smc_run(toy, schedule, Scheme::posterior, 2000, 2026);
    const SmcResult r2 =
        smc_run(toy, schedule, Scheme::posterior, 2000, 2026);
    const SmcResult r3 =
        smc_run(toy, schedule, Scheme::posterior, 2000, 2027);

    bool in_process = r1.populations.size() == r2.populations.size();
    for (std::size_t i = 0; in_process && i < r1.populations.size(); ++i)
        in_process = r1.populations[i].thetas == r2.populations[i].thetas &&
                     r1.populations[i].weights == r2.populations[i].weights;
    in_process = in_process && diagnostics_to_json(r1.diagnostics) ==
                                   diagnostics_to_json(r2.diagnostics);
    const bool seed_sensitive =
        r1.populations.back().thetas != r3.populations.back().thetas;

    const fs::path base = fs::temp_directory_path() / "abcopt_acceptance";
    fs::create_directories(base);
    auto config = [&](const fs::path& out_dir, int seed) {
        const fs::path cfg = base / ("cfg_" + out_dir.filename().string() +
                                     ".json");
        std::ofstream out(cfg);
        out << "{\"toy\": \"gaussian_mean\", \"scheme\": \"beaumont_kde\", "
            << "\"schedule\": [1.6, 0.8], \"particles\": 500, \"seed\": "
            << seed << ", \"fit\": \"weighted_kde\", \"out_dir\": \""
            << out_dir.string() << "\"}";
        return cfg;
    };
    const fs::path d1 = base / "rep1", d2 = base / "rep2", d3 = base / "rep3";
    bool cli_ok = run_cli("smc --config " + config(d1, 11).string()) == 0 &&
                  run_cli("smc --config " + config(d2, 11).string()) == 0 &&
                  run_cli("smc --config " + config(d3, 12).string()) == 0;
    bool cli_identical = false, cli_seed_sensitive = false;
    if (cli_ok) {
        cli_identical =
            slurp(d1 / "population_1.csv") == slurp(d2 / "population_1.csv") &&
            slurp(d1 / "population_2.csv") == slurp(d2 / "population_2.csv") &&
            slurp(d1 / "diagnostics.json") == slurp(d2 / "diagnostics.json");
        cli_seed_sensitive =
            slurp(d1 / "population_2.csv") != slurp(d3 / "population_2.csv");
    }

    const bool pass =
        in_process && seed_sensitive && cli_ok && cli_identical &&
        cli_seed_sensitive;
    std::string detail = std::string("in-process rerun ") +
                         (in_process ? "bitwise equal" : "DIFFERS") +
                         ", CLI rerun " +
                         (cli_identical ? "byte-identical" : "DIFFERS") +
                         ", seed change " +
                         (seed_sensitive && cli_seed_sensitive ? "alters output"
                                                               : "IGNORED");
    if (!cli_ok) detail += ", CLI run failed";
    return {pass, detail};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[10] = {
        {"reference_table", reference_table},
        {"prior_unit_efficiency", prior_unit_efficiency},
        {"jensen_bounds", jensen_bounds},
        {"hoelder_bracket", hoelder_bracket},
        {"optimal_dominates", optimal_dominates},
        {"series_limit", series_limit},
        {"analytic_quadrature_match", analytic_quadrature_match},
        {"surface_scaling", surface_scaling},
        {"smc_ranking", smc_ranking},
        {"determinism", determinism},
    };

    int failures = 0;
    for (int i = 0; i < 10; ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("criterion %2d %-28s %s  %s\n", i + 1, criteria[i].name,
                    outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
