#include "abcopt/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "abcopt/errors.hpp"

namespace abcopt {

namespace {

using nlohmann::json;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    return out;
}

} // namespace

const std::vector<ReferenceCell>& embedded_reference_table() {
    static const std::vector<ReferenceCell> table = {
        {"I", "posterior", 3.57, 1.00, 3.57},
        {"I", "beaumont_kde", 2.54, 0.41, 6.16},
        {"I", "geometric_mean", 2.96, 0.38, 7.71},
        {"I", "bounded", 3.26, 0.40, 8.20},
        {"I", "optimal", 3.34, 0.41, 8.22},
        {"II", "posterior", 3.68, 1.00, 3.68},
        {"II", "beaumont_kde", 2.55, 0.40, 6.36},
        {"II", "geometric_mean", 3.22, 0.34, 9.47},
        {"II", "bounded", 3.48, 0.35, 9.93},
        {"II", "optimal", 3.52, 0.35, 9.94},
        {"III", "posterior", 4.77, 1.00, 4.77},
        {"III", "beaumont_kde", 3.80, 0.57, 6.68},
        {"III", "geometric_mean", 3.56, 0.35, 10.23},
        {"III", "bounded", 4.05, 0.36, 11.23},
        {"III", "optimal", 4.34, 0.38, 11.40},
    };
    return table;
}

std::optional<std::vector<ReferenceCell>> load_reference_table(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string line;
    if (!std::getline(in, line) || line != "case,scheme,A,B,omega")
        return std::nullopt;
    std::vector<ReferenceCell> table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        ReferenceCell cell;
        std::string field;
        if (!std::getline(row, cell.case_name, ',')) return std::nullopt;
        if (!std::getline(row, cell.scheme, ',')) return std::nullopt;
        try {
            if (!std::getline(row, field, ',')) return std::nullopt;
            cell.A = std::stod(field);
            if (!std::getline(row, field, ',')) return std::nullopt;
            cell.B = std::stod(field);
            if (!std::getline(row, field, ',')) return std::nullopt;
            cell.omega = std::stod(field);
        } catch (const std::exception&) {
            return std::nullopt;
        }
        table.push_back(cell);
    }
    if (table.empty()) return std::nullopt;
    return table;
}

void write_table1_csv(const std::vector<Table1Row>& rows,
                      const std::string& path) {
    auto out = open_out(path);
    out << "case,scheme,A,B,omega,est_error\n";
    for (const auto& row : rows)
        out << row.case_name << ',' << row.scheme << ','
            << num(row.report.A) << ',' << num(row.report.B) << ','
            << num(row.report.omega) << ',' << num(row.report.est_error)
            << '\n';
}

void write_curves_csv(const std::vector<CurveRow>& rows,
                      const std::string& path) {
    auto out = open_out(path);
    out << "theta,posterior,kde,q0,q_bounded,q_optimal\n";
    for (const auto& row : rows)
        out << num(row.theta) << ',' << num(row.posterior) << ','
            << num(row.kde) << ',' << num(row.q0) << ','
            << num(row.q_bounded) << ',' << num(row.q_optimal) << '\n';
}

void write_surface_csv(const std::vector<SurfaceRow>& rows,
                       const std::string& path) {
    auto out = open_out(path);
    out << "mu_pi,sigma_pi,n_theta,a,admissible\n";
    for (const auto& row : rows)
        out << num(row.mu_pi) << ',' << num(row.sigma_pi) << ','
            << row.n_theta << ',' << num(row.a) << ','
            << (row.admissible ? 1 : 0) << '\n';
}

void write_population_csv(const Population& population,
                          const std::string& path) {
    auto out = open_out(path);
    out << "theta_0,weight\n";
    for (std::size_t i = 0; i < population.thetas.size(); ++i)
        out << num(population.thetas[i]) << ',' << num(population.weights[i])
            << '\n';
}

std::string diagnostics_to_json(const RunDiagnostics& diagnostics) {
    json iterations = json::array();
    for (const auto& it : diagnostics.iterations) {
        json rec = {
            {"epsilon", it.epsilon},
            {"acceptance_fraction", it.acceptance_fraction},
            {"ess", it.ess},
            {"ess_per_proposal", it.ess_per_proposal},
            {"empirical_omega", it.empirical_omega},
            {"scheme", to_string(it.scheme)},
        };
        if (it.mh_acceptance_rate >= 0.0) {
            rec["mh_acceptance_rate"] = it.mh_acceptance_rate;
            rec["mh_warning"] = it.mh_warning;
        }
        iterations.push_back(rec);
    }
    json doc = {
        {"iterations", iterations},
        {"total_proposals", diagnostics.total_proposals},
    };
    return doc.dump(2) + "\n";
}

std::string efficiency_report_to_json(const EfficiencyReport& report) {
    json doc = {
        {"A", report.A},
        {"B", report.B},
        {"omega", report.omega},
        {"method", to_string(report.method)},
        {"est_error", report.est_error},
    };
    return doc.dump(2) + "\n";
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    RunConfig config;
    try {
        config.toy = doc.value("toy", config.toy);
        config.scheme = scheme_from_string(doc.value("scheme", "prior"));
        if (!doc.contains("schedule") || !doc["schedule"].is_array() ||
            doc["schedule"].empty())
            throw ConfigError("config requires a nonempty `schedule` array");
        config.schedule = doc["schedule"].get<std::vector<double>>();
        config.particles = doc.value("particles", config.particles);
        if (doc.contains("seed"))
            config.seed = doc["seed"].get<std::uint64_t>();
        config.options.fit =
            fit_method_from_string(doc.value("fit", "weighted_kde"));
        config.options.fit_components =
            doc.value("fit_components", config.options.fit_components);
        config.options.bandwidth_rule = bandwidth_rule_from_string(
            doc.value("bandwidth_rule", "ess_pow_neg_2_5"));
        config.options.max_proposals_factor = doc.value(
            "max_proposals_factor", config.options.max_proposals_factor);
        config.out_dir = doc.value("out_dir", config.out_dir);
    } catch (const json::exception& e) {
        throw ConfigError("config field error in " + path + ": " + e.what());
    }
    return config;
}

} // namespace abcopt
