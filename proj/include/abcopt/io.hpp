#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abcopt/density.hpp"
#include "abcopt/efficiency.hpp"
#include "abcopt/smc.hpp"

namespace abcopt {

struct ReferenceCell {
    std::string case_name;
    std::string scheme;
    double A = 0.0;
    double B = 0.0;
    double omega = 0.0;
};

/// Published reference values compiled into the binary; the data file
/// shipped alongside holds the same numbers.
const std::vector<ReferenceCell>& embedded_reference_table();

/// Reads `case,scheme,A,B,omega` rows; returns nullopt if the file is
/// missing or malformed so callers can fall back to the embedded copy.
std::optional<std::vector<ReferenceCell>> load_reference_table(
    const std::string& path);

struct Table1Row {
    std::string case_name;
    std::string scheme;
    EfficiencyReport report;
};

void write_table1_csv(const std::vector<Table1Row>& rows,
                      const std::string& path);

struct CurveRow {
    double theta = 0.0;
    double posterior = 0.0;
    double kde = 0.0;
    double q0 = 0.0;
    double q_bounded = 0.0;
    double q_optimal = 0.0;
};

void write_curves_csv(const std::vector<CurveRow>& rows,
                      const std::string& path);

void write_surface_csv(const std::vector<SurfaceRow>& rows,
                       const std::string& path);

void write_population_csv(const Population& population,
                          const std::string& path);

std::string diagnostics_to_json(const RunDiagnostics& diagnostics);
std::string efficiency_report_to_json(const EfficiencyReport& report);

/// SMC run settings parsed from a JSON config file.
struct RunConfig {
    std::string toy = "gaussian_mean";
    Scheme scheme = Scheme::prior;
    std::vector<double> schedule;
    std::size_t particles = 1000;
    std::optional<std::uint64_t> seed;
    SmcOptions options;
    std::string out_dir = ".";
};

RunConfig load_run_config(const std::string& path);

} // namespace abcopt
