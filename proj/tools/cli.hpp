#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfgpdi/assembly.hpp"
#include "mfgpdi/mfg_driver.hpp"
#include "mfgpdi/problems.hpp"

namespace mfgpdi::cli {

enum ExitCode : int { ok = 0, solver_failure = 2, config_error = 3 };

/// Bad configuration or command-line usage; maps to exit code 3.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct ReferenceSettings {
    std::string path;  // empty: <output_dir>/reference_exp2_n<n>.txt
    int n = 512;
    double tol = 1e-11;
};

struct RunConfig {
    std::string experiment = "exp1";  // exp1 | exp2 | custom
    std::vector<int> n_levels{8, 16, 32};
    double nu = 1.0;
    double kappa = 0.0;
    StabilizationParams stabilization;
    int quadrature_degree = 4;
    MfgConfig mfg;
    std::string output_dir = "mfgpdi_out";
    bool write_nodal = false;
    bool write_mesh = false;
    ReferenceSettings reference;
    CustomProblemSpec custom;

    [[nodiscard]] std::string reference_path() const;
};

/// Built-in defaults as JSON; also the schema for unknown-key checks.
[[nodiscard]] nlohmann::json default_config_json();

/// Overlays `user` on the defaults and applies `key=value` overrides (dotted
/// keys, values parsed as JSON with a plain-string fallback), then validates.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& user,
                                     const std::vector<std::string>& overrides);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mfgpdi::cli
