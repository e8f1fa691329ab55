#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace abcopt {

/// Global CLI state shared by all subcommands. exe_dir locates the
/// reference data file shipped next to the binary.
struct CliContext {
    std::optional<std::uint64_t> seed;
    bool allow_default_seed = false;
    std::string exe_dir = ".";
};

/// Exit codes: 0 success, 1 tolerance/invariant failure, 2 usage or
/// configuration error.
int cmd_table1(const CliContext& ctx, const std::string& case_arg,
               const std::string& out_path);
int cmd_proposal_curves(const CliContext& ctx, const std::string& case_name,
                        double lo, double hi, int n,
                        const std::string& out_path);
int cmd_surface(const CliContext& ctx, int n_theta,
                const std::string& reference, const std::string& out_path);
int cmd_smc(const CliContext& ctx, const std::string& config_path);
int cmd_verify(const CliContext& ctx, bool inject_bad_abar = false);

} // namespace abcopt
