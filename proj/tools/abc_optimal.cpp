#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "abcopt/commands.hpp"
#include "abcopt/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Optimal proposal densities for SMC-ABC: benchmark tables, "
                 "figure data, SMC runs and invariant checks"};
    app.require_subcommand(1);
    app.fallthrough(true);

    abcopt::CliContext ctx;
    ctx.exe_dir =
        std::filesystem::absolute(argv[0]).parent_path().string();

    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value,
                                    "Seed for stochastic commands");
    app.add_flag("--allow-default-seed", ctx.allow_default_seed,
                 "Run stochastic commands with seed 0 when --seed is absent");

    auto* table1 = app.add_subcommand(
        "table1", "Efficiency functionals for Cases I-III vs the published "
                  "reference values");
    std::string case_arg = "all";
    std::string table1_out = "table1.csv";
    table1->add_option("--case", case_arg, "I, II, III or all");
    table1->add_option("--out", table1_out, "Output CSV path");

    auto* curves = app.add_subcommand(
        "curves", "Proposal density curves for one case on a theta grid");
    std::string curves_case;
    double lo = 0.0, hi = 0.0;
    int n_nodes = 0;
    std::string curves_out;
    curves->add_option("--case", curves_case, "I, II or III")->required();
    curves->add_option("--lo", lo, "Grid lower bound")->required();
    curves->add_option("--hi", hi, "Grid upper bound")->required();
    curves->add_option("--n", n_nodes, "Grid node count")->required();
    curves->add_option("--out", curves_out, "Output CSV path")->required();

    auto* surface = app.add_subcommand(
        "surface", "Improvement factor a over the (mu_pi, sigma_pi) grid");
    int ndim = 1;
    std::string ref = "posterior";
    std::string surface_out;
    surface->add_option("--ndim", ndim, "Number of dimensions");
    surface->add_option("--ref", ref, "posterior or kde");
    surface->add_option("--out", surface_out, "Output CSV path")->required();

    auto* smc = app.add_subcommand("smc", "Run SMC-ABC from a config file");
    std::string config_path;
    smc->add_option("--config", config_path, "JSON config path")->required();

    auto* verify =
        app.add_subcommand("verify", "Cross-module invariant suite");
    bool inject_bad_abar = false;
    verify
        ->add_flag("--inject-bad-abar", inject_bad_abar,
                   "Negative control: corrupt the checked A to 0.4*sup")
        ->group(""); // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }
    if (*seed_opt) ctx.seed = seed_value;

    try {
        if (*table1) return abcopt::cmd_table1(ctx, case_arg, table1_out);
        if (*curves)
            return abcopt::cmd_proposal_curves(ctx, curves_case, lo, hi,
                                               n_nodes, curves_out);
        if (*surface) return abcopt::cmd_surface(ctx, ndim, ref, surface_out);
        if (*smc) return abcopt::cmd_smc(ctx, config_path);
        if (*verify) return abcopt::cmd_verify(ctx, inject_bad_abar);
    } catch (const abcopt::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const abcopt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
