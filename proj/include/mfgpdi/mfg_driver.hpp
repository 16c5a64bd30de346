#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfgpdi/assembly.hpp"
#include "mfgpdi/hjb_solver.hpp"

namespace mfgpdi {

struct MfgConfig {
    double tol_m = 1e-9;  // L2 increment of the density
    double tol_u = 1e-9;  // L2 increment of the value function
    int max_outer = 200;
    double damping = 1.0;  // omega in (0, 1]
    HjbConfig hjb;
    int quadrature_degree = 4;
    /// Residual bound the final pair must satisfy in both equations.
    double verify_tol = 1e-8;

    void validate() const;
};

struct OuterIteration {
    double increment_u = 0.0;
    double increment_m = 0.0;
    int hjb_iterations = 0;
};

struct MfgDiagnostics {
    double min_nodal_m = 0.0;
    double h1_norm_m = 0.0;
    double h1_norm_u = 0.0;
    bool dmp_violation = false;
    double hjb_residual = 0.0;  // max-norm, final pair
    double kfp_residual = 0.0;  // max-norm, final pair
    std::optional<std::string> stabilization_warning;
};

struct MfgSolution {
    NodalFunction u;
    NodalFunction m;
    TransportField field;
    std::vector<double> gamma;
    int outer_iterations = 0;
    std::vector<OuterIteration> history;
    MfgDiagnostics diagnostics;
};

class MfgNonConvergence : public Error {
public:
    MfgNonConvergence(const std::string& what, MfgSolution last)
        : Error(what), last_(std::move(last))
    {
    }
    [[nodiscard]] const MfgSolution& last() const { return last_; }

private:
    MfgSolution last_;
};

/// Solves [(nu + gamma) K + B(field)^T + kappa M] m = load(G).
[[nodiscard]] NodalFunction solve_kfp(const ProblemData& data,
                                      const std::shared_ptr<const FESpace>& space,
                                      const std::vector<double>& gamma, const TransportField& field,
                                      const QuadratureRule& quad);

/// Max-norm residual of the density equation for a given pair (m, field).
[[nodiscard]] double kfp_residual(const ProblemData& data, const FESpace& space,
                                  const std::vector<double>& gamma, const TransportField& field,
                                  const NodalFunction& m, const QuadratureRule& quad);

/// Outer fixed point: u_j solves the value-function equation with F[m_j],
/// its policy b_j drives the density equation for m_{j+1}, then
/// m <- (1 - omega) m_j + omega m_{j+1}. Stops when both L2 increments meet
/// their tolerances and re-checks the final pair against both equations.
/// The density starts from `initial_m` (zero by default).
[[nodiscard]] MfgSolution solve_mfg(const ProblemData& data,
                                    const std::shared_ptr<const FESpace>& space,
                                    const StabilizationParams& stab, const MfgConfig& cfg,
                                    const std::optional<NodalFunction>& initial_m = std::nullopt);

struct DmpCheck {
    double min_value = 0.0;
    bool violated = false;
};

/// Minimum interior nodal value; violated when below -1e-10.
[[nodiscard]] DmpCheck dmp_check(const NodalFunction& m);

struct MonotonicityDiagnostic {
    double lambda12_max = 0.0;
    double lambda21_max = 0.0;
    /// <F[m1] - F[m2], m1 - m2>
    double duality_gap = 0.0;
    /// int m1 lambda12 + m2 lambda21
    double weighted_lambda = 0.0;
};

/// lambda_ij = H(x, grad u_i) - H(x, grad u_j) + b_i . (grad u_j - grad u_i),
/// evaluated at the quadrature points of the solutions' transport fields.
[[nodiscard]] MonotonicityDiagnostic monotonicity_diagnostic(const ProblemData& data,
                                                             const MfgSolution& sol1,
                                                             const MfgSolution& sol2);

} // namespace mfgpdi
