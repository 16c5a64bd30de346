#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfgpdi/reference_io.hpp"

namespace mfgpdi::cli {

using nlohmann::json;

namespace {

std::string format17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void reject_unknown(const json& user, const json& schema, const std::string& prefix)
{
    if (!user.is_object()) {
        throw ConfigError("configuration " + (prefix.empty() ? std::string("root") : prefix) +
                          " must be a JSON object");
    }
    for (const auto& [key, value] : user.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (!schema.contains(key)) {
            throw ConfigError("unknown configuration key '" + path + "'");
        }
        if (schema[key].is_object()) {
            reject_unknown(value, schema[key], path);
        }
    }
}

void merge(json& target, const json& patch)
{
    for (const auto& [key, value] : patch.items()) {
        if (value.is_object() && target.contains(key) && target[key].is_object()) {
            merge(target[key], value);
        } else {
            target[key] = value;
        }
    }
}

void apply_override(json& config, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    json* node = &config;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
        node = &(*node)[parts[i]];
    }
    if (!node->contains(parts.back())) {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
    if (parts.back() == "n_levels" && value.is_number_integer()) {
        value = json::array({value});
    }
    (*node)[parts.back()] = value;
}

template <typename T>
T get_field(const json& config, const std::string& dotted)
{
    const json* node = &config;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        node = &node->at(part);
    }
    try {
        return node->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("configuration field '" + dotted + "' has the wrong type");
    }
}

} // namespace

std::string RunConfig::reference_path() const
{
    if (!reference.path.empty()) {
        return reference.path;
    }
    return (std::filesystem::path(output_dir) /
            ("reference_exp2_n" + std::to_string(reference.n) + ".txt"))
        .string();
}

json default_config_json()
{
    return json{
        {"experiment", "exp1"},
        {"n_levels", {8, 16, 32}},
        {"nu", 1.0},
        {"kappa", 0.0},
        {"stabilization", {{"mode", "zero"}, {"mu", 2.0}, {"theta", std::numbers::pi / 6.0}}},
        {"quadrature_degree", 4},
        {"hjb", {{"tol_increment", 1e-10}, {"tol_residual", 1e-10}, {"max_iters", 100}}},
        {"mfg", {{"tol_m", 1e-9}, {"tol_u", 1e-9}, {"max_outer", 200}, {"damping", 1.0}}},
        {"output_dir", "mfgpdi_out"},
        {"write_nodal", false},
        {"write_mesh", false},
        {"reference", {{"path", ""}, {"n", 512}, {"tol", 1e-11}}},
        {"custom",
         {{"hamiltonian", "eikonal"},
          {"num_controls", 8},
          {"coupling_constant", 0.0},
          {"source_constant", 1.0}}},
    };
}

RunConfig parse_config(const json& user, const std::vector<std::string>& overrides)
{
    const json schema = default_config_json();
    reject_unknown(user, schema, "");
    json merged = schema;
    merge(merged, user);
    for (const auto& o : overrides) {
        apply_override(merged, o);
    }

    RunConfig cfg;
    cfg.experiment = get_field<std::string>(merged, "experiment");
    if (cfg.experiment != "exp1" && cfg.experiment != "exp2" && cfg.experiment != "custom") {
        throw ConfigError("experiment must be one of exp1, exp2, custom");
    }
    cfg.n_levels = get_field<std::vector<int>>(merged, "n_levels");
    if (cfg.n_levels.empty()) {
        throw ConfigError("n_levels must list at least one subdivision count");
    }
    for (int n : cfg.n_levels) {
        if (n < 1) {
            throw ConfigError("n_levels entries must be >= 1");
        }
    }
    cfg.nu = get_field<double>(merged, "nu");
    cfg.kappa = get_field<double>(merged, "kappa");
    if (!(cfg.nu > 0.0)) {
        throw ConfigError("nu must be > 0");
    }
    if (!(cfg.kappa >= 0.0)) {
        throw ConfigError("kappa must be >= 0");
    }

    const auto mode = get_field<std::string>(merged, "stabilization.mode");
    if (mode == "zero") {
        cfg.stabilization.mode = StabilizationMode::zero;
    } else if (mode == "formula") {
        cfg.stabilization.mode = StabilizationMode::formula;
    } else {
        throw ConfigError("stabilization.mode must be \"zero\" or \"formula\"");
    }
    cfg.stabilization.mu = get_field<double>(merged, "stabilization.mu");
    cfg.stabilization.theta = get_field<double>(merged, "stabilization.theta");
    if (cfg.stabilization.mode == StabilizationMode::formula) {
        if (!(cfg.stabilization.theta > 0.0 && cfg.stabilization.theta < std::numbers::pi / 2.0)) {
            throw ConfigError("stabilization.theta must lie in (0, pi/2) when mode = formula");
        }
        if (!(cfg.stabilization.mu > 1.0)) {
            throw ConfigError("stabilization.mu must be > 1 when mode = formula");
        }
    }

    cfg.quadrature_degree = get_field<int>(merged, "quadrature_degree");
    if (cfg.quadrature_degree < 1) {
        throw ConfigError("quadrature_degree must be >= 1");
    }
    cfg.mfg.quadrature_degree = cfg.quadrature_degree;
    cfg.mfg.hjb.tol_increment = get_field<double>(merged, "hjb.tol_increment");
    cfg.mfg.hjb.tol_residual = get_field<double>(merged, "hjb.tol_residual");
    cfg.mfg.hjb.max_iters = get_field<int>(merged, "hjb.max_iters");
    cfg.mfg.tol_m = get_field<double>(merged, "mfg.tol_m");
    cfg.mfg.tol_u = get_field<double>(merged, "mfg.tol_u");
    cfg.mfg.max_outer = get_field<int>(merged, "mfg.max_outer");
    cfg.mfg.damping = get_field<double>(merged, "mfg.damping");
    try {
        cfg.mfg.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }

    cfg.output_dir = get_field<std::string>(merged, "output_dir");
    cfg.write_nodal = get_field<bool>(merged, "write_nodal");
    cfg.write_mesh = get_field<bool>(merged, "write_mesh");
    cfg.reference.path = get_field<std::string>(merged, "reference.path");
    cfg.reference.n = get_field<int>(merged, "reference.n");
    cfg.reference.tol = get_field<double>(merged, "reference.tol");
    if (cfg.reference.n < 1 || !(cfg.reference.tol > 0.0)) {
        throw ConfigError("reference.n must be >= 1 and reference.tol > 0");
    }
    cfg.custom.hamiltonian = get_field<std::string>(merged, "custom.hamiltonian");
    cfg.custom.num_controls = get_field<int>(merged, "custom.num_controls");
    cfg.custom.coupling_constant = get_field<double>(merged, "custom.coupling_constant");
    cfg.custom.source_constant = get_field<double>(merged, "custom.source_constant");
    if (cfg.custom.hamiltonian != "eikonal" && cfg.custom.hamiltonian != "finite") {
        throw ConfigError("custom.hamiltonian must be \"eikonal\" or \"finite\"");
    }
    if (cfg.custom.num_controls < 1) {
        throw ConfigError("custom.num_controls must be >= 1");
    }
    cfg.custom.nu = cfg.nu;
    cfg.custom.kappa = cfg.kappa;
    return cfg;
}

namespace {

ProblemData make_problem(const RunConfig& cfg)
{
    ProblemData data;
    if (cfg.experiment == "exp1") {
        data = experiment1::problem();
    } else if (cfg.experiment == "exp2") {
        data = experiment2::problem();
    } else {
        data = custom_problem(cfg.custom);
    }
    data.nu = cfg.nu;
    data.kappa = cfg.kappa;
    return data;
}

struct LevelResult {
    int n = 0;
    double h = 0.0;
    MfgSolution solution;
    std::optional<ErrorBundle> errors;
};

void ensure_output_dir(const RunConfig& cfg)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory '" + cfg.output_dir +
                          "': " + ec.message());
    }
}

std::string output_file(const RunConfig& cfg, const std::string& name)
{
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

std::optional<MfgSolution> load_exp2_reference(const RunConfig& cfg, const ProblemData& data,
                                               bool required)
{
    const std::string path = cfg.reference_path();
    if (!std::filesystem::exists(path)) {
        if (required) {
            throw ConfigError("reference solution '" + path +
                              "' not found; run `mfgpdi reference` with the same configuration "
                              "first");
        }
        return std::nullopt;
    }
    ReferenceSolution ref;
    try {
        ref = load_reference(path);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (ref.experiment != "exp2") {
        throw ConfigError("reference file '" + path + "' was not computed for exp2");
    }
    return reference_to_solution(ref, *data.hamiltonian);
}

void check_levels_against_reference(const RunConfig& cfg, int ref_n)
{
    for (int n : cfg.n_levels) {
        if (n >= ref_n) {
            throw ConfigError("level n = " + std::to_string(n) +
                              " is not coarser than the reference (n = " +
                              std::to_string(ref_n) + "); the reference must be strictly finer");
        }
        if (ref_n % n != 0) {
            throw ConfigError("level n = " + std::to_string(n) +
                              " is not nested in the reference mesh (n = " +
                              std::to_string(ref_n) + ")");
        }
    }
}

LevelResult solve_level(const RunConfig& cfg, const ProblemData& data, int n,
                        const std::optional<MfgSolution>& reference, std::ostream& err)
{
    LevelResult level;
    level.n = n;
    level.h = std::sqrt(2.0) / n;
    const Mesh mesh = uniform_unit_square_mesh(n);
    auto space = make_space(mesh);
    const QuadratureRule quad = triangle_rule(cfg.quadrature_degree);
    if (cfg.experiment == "exp2") {
        const std::size_t hits = experiment2::sign_zero_hits(*space, quad);
        if (hits > 0) {
            err << "note: n = " << n << ": " << hits
                << " quadrature points hit a zero of a sign argument (sgn(0) = 0 used)\n";
        }
    }
    level.solution = solve_mfg(data, space, cfg.stabilization, cfg.mfg);
    if (level.solution.diagnostics.stabilization_warning) {
        err << "warning: n = " << n << ": " << *level.solution.diagnostics.stabilization_warning
            << '\n';
    }
    if (cfg.experiment == "exp1") {
        level.errors = exact_errors_experiment1(level.solution, quad);
    } else if (cfg.experiment == "exp2" && reference) {
        level.errors = reference_errors(*data.hamiltonian, level.solution, *reference, quad);
    }
    if (cfg.write_mesh) {
        std::ofstream os(output_file(cfg, "mesh_n" + std::to_string(n) + ".txt"));
        write_mesh(os, mesh);
    }
    if (cfg.write_nodal) {
        std::ofstream os(output_file(cfg, "nodal_n" + std::to_string(n) + ".csv"));
        os << "x,y,u,m\n";
        const Vector u = level.solution.u.all_node_values();
        const Vector m = level.solution.m.all_node_values();
        for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            os << format17(mesh.nodes[i].x()) << ',' << format17(mesh.nodes[i].y()) << ','
               << format17(u[k]) << ',' << format17(m[k]) << '\n';
        }
    }
    return level;
}

void write_summary(std::ostream& os, const RunConfig& cfg, const LevelResult& level)
{
    const MfgSolution& s = level.solution;
    int hjb_total = 0;
    for (const auto& it : s.history) {
        hjb_total += it.hjb_iterations;
    }
    os << "experiment " << cfg.experiment << '\n';
    os << "n " << level.n << '\n';
    os << "h " << format17(level.h) << '\n';
    os << "dofs " << s.u.space->n_dofs() << '\n';
    os << "outer_iterations " << s.outer_iterations << '\n';
    os << "hjb_iterations_total " << hjb_total << '\n';
    os << "h1_norm_u " << format17(s.diagnostics.h1_norm_u) << '\n';
    os << "h1_norm_m " << format17(s.diagnostics.h1_norm_m) << '\n';
    os << "hjb_residual " << format17(s.diagnostics.hjb_residual) << '\n';
    os << "kfp_residual " << format17(s.diagnostics.kfp_residual) << '\n';
    os << "min_nodal_m " << format17(s.diagnostics.min_nodal_m) << '\n';
    os << "dmp_violated " << (s.diagnostics.dmp_violation ? "true" : "false") << '\n';
    if (level.errors) {
        os << "u_h1_rel " << format17(level.errors->u_h1_rel) << '\n';
        os << "m_l2_rel " << format17(level.errors->m_l2_rel) << '\n';
        os << "m_h1_rel " << format17(level.errors->m_h1_rel) << '\n';
        os << "drift_l2_rel " << format17(level.errors->drift_l2_rel) << '\n';
    }
    os << '\n';
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const ProblemData data = make_problem(cfg);
    std::optional<MfgSolution> reference;
    if (cfg.experiment == "exp2") {
        reference = load_exp2_reference(cfg, data, false);
        if (reference) {
            check_levels_against_reference(cfg, reference->u.space->mesh().subdivisions_per_side);
        }
    }
    ensure_output_dir(cfg);
    std::ostringstream summary;
    for (int n : cfg.n_levels) {
        write_summary(summary, cfg, solve_level(cfg, data, n, reference, err));
    }
    std::ofstream(output_file(cfg, "summary.txt")) << summary.str();
    out << summary.str();
    return ok;
}

int cmd_convergence(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.n_levels.size() < 2) {
        throw ConfigError("convergence needs at least two entries in n_levels");
    }
    if (cfg.experiment == "custom") {
        throw ConfigError("convergence studies are available for exp1 and exp2 only");
    }
    const ProblemData data = make_problem(cfg);
    std::optional<MfgSolution> reference;
    if (cfg.experiment == "exp2") {
        reference = load_exp2_reference(cfg, data, true);
        check_levels_against_reference(cfg, reference->u.space->mesh().subdivisions_per_side);
    }
    ensure_output_dir(cfg);

    std::vector<LevelResult> levels;
    for (int n : cfg.n_levels) {
        levels.push_back(solve_level(cfg, data, n, reference, err));
    }

    std::ostringstream csv;
    csv << "h,u_h1_rel,m_l2_rel,m_h1_rel,drift_l2_rel,outer_iters\n";
    for (const auto& l : levels) {
        csv << format17(l.h) << ',' << format17(l.errors->u_h1_rel) << ','
            << format17(l.errors->m_l2_rel) << ',' << format17(l.errors->m_h1_rel) << ','
            << format17(l.errors->drift_l2_rel) << ',' << l.solution.outer_iterations << '\n';
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const auto& a = levels[i - 1];
        const auto& b = levels[i];
        auto rate = [&](double ErrorBundle::*field) {
            return format17(observed_rate(a.h, (*a.errors).*field, b.h, (*b.errors).*field));
        };
        csv << "rate," << rate(&ErrorBundle::u_h1_rel) << ',' << rate(&ErrorBundle::m_l2_rel)
            << ',' << rate(&ErrorBundle::m_h1_rel) << ',' << rate(&ErrorBundle::drift_l2_rel)
            << ",\n";
    }
    std::ofstream(output_file(cfg, "convergence.csv")) << csv.str();
    out << csv.str();
    return ok;
}

int cmd_check_mesh(const RunConfig& cfg, std::ostream& out)
{
    for (int n : cfg.n_levels) {
        const Mesh mesh = uniform_unit_square_mesh(n);
        const AcutenessReport report = acuteness_report(mesh);
        double h = 0.0;
        for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
            h = std::max(h, element_geometry(mesh, e).diameter);
        }
        out << "n " << n << '\n';
        out << "nodes " << mesh.num_nodes() << '\n';
        out << "elements " << mesh.num_elements() << '\n';
        out << "interior_nodes " << mesh.num_nodes() - mesh.boundary_nodes.size() << '\n';
        out << "h " << format17(h) << '\n';
        out << "sigma " << format17(report.sigma_mesh) << '\n';
        out << "min_margin " << format17(report.min_margin + 0.0) << '\n';
        out << "classification " << to_string(report.classification) << '\n';
        if (report.classification == Acuteness::strictly_acute) {
            out << "theta " << format17(report.theta) << '\n';
        }
        out << '\n';
    }
    return ok;
}

int cmd_reference(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.experiment != "exp2") {
        throw ConfigError("reference solutions are only needed (and supported) for exp2");
    }
    const ProblemData data = make_problem(cfg);
    MfgConfig mfg = cfg.mfg;
    mfg.tol_m = cfg.reference.tol;
    mfg.tol_u = cfg.reference.tol;
    mfg.hjb.tol_increment = std::min(mfg.hjb.tol_increment, cfg.reference.tol);
    mfg.hjb.tol_residual = std::min(mfg.hjb.tol_residual, cfg.reference.tol);
    ensure_output_dir(cfg);

    auto space = make_space(uniform_unit_square_mesh(cfg.reference.n));
    const MfgSolution sol = solve_mfg(data, space, cfg.stabilization, mfg);
    if (sol.diagnostics.stabilization_warning) {
        err << "warning: " << *sol.diagnostics.stabilization_warning << '\n';
    }
    ReferenceSolution ref;
    ref.experiment = cfg.experiment;
    ref.n = cfg.reference.n;
    ref.nu = data.nu;
    ref.kappa = data.kappa;
    ref.quadrature_degree = cfg.quadrature_degree;
    ref.tol_m = mfg.tol_m;
    ref.tol_u = mfg.tol_u;
    ref.tol_hjb = mfg.hjb.tol_residual;
    ref.outer_iterations = sol.outer_iterations;
    ref.u = sol.u.values;
    ref.m = sol.m.values;
    const std::string path = cfg.reference_path();
    save_reference(path, ref);
    out << "reference written to " << path << " (n = " << ref.n << ", "
        << sol.outer_iterations << " outer iterations, min nodal m "
        << format17(sol.diagnostics.min_nodal_m) << ")\n";
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Monotone P1 finite element solver for stationary mean field game inclusions",
                 "mfgpdi"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> overrides;
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"solve", "solve each level in n_levels and print a summary"},
             {"convergence", "convergence study over n_levels, CSV output"},
             {"check-mesh", "report geometry and acuteness of the uniform meshes in n_levels"},
             {"reference", "compute and store the fine-mesh reference solution for exp2"}}) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--set", overrides, "override a configuration value, key=value");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    }

    try {
        json user = json::object();
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) {
                throw ConfigError("cannot open configuration file '" + config_path + "'");
            }
            user = json::parse(is, nullptr, false);
            if (user.is_discarded()) {
                throw ConfigError("configuration file '" + config_path + "' is not valid JSON");
            }
        }
        const RunConfig cfg = parse_config(user, overrides);
        const std::string command = app.get_subcommands().front()->get_name();
        if (command == "solve") {
            return cmd_solve(cfg, out, err);
        }
        if (command == "convergence") {
            return cmd_convergence(cfg, out, err);
        }
        if (command == "check-mesh") {
            return cmd_check_mesh(cfg, out);
        }
        return cmd_reference(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const MfgNonConvergence& e) {
        err << "solver failure: " << e.what() << '\n';
        return solver_failure;
    } catch (const HjbNonConvergence& e) {
        err << "solver failure: " << e.what() << '\n';
        return solver_failure;
    } catch (const SingularMatrixError& e) {
        err << "solver failure: " << e.what() << '\n';
        return solver_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    }
}

} // namespace mfgpdi::cli
