#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfgpdi/assembly.hpp"
#include "mfgpdi/errors.hpp"
#include "mfgpdi/problem.hpp"

namespace mfgpdi {

struct HjbConfig {
    double tol_increment = 1e-10;  // H1 norm of successive iterates
    double tol_residual = 1e-10;   // max-norm of the nonlinear residual
    int max_iters = 100;

    void validate() const;
};

struct HjbIteration {
    double increment = 0.0;
    double residual = 0.0;
};

struct HjbResult {
    NodalFunction u;
    TransportField field;  // policy selected from the returned u
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::vector<HjbIteration> history;
};

/// Howard's policy iteration failed to meet both tolerances.
class HjbNonConvergence : public Error {
public:
    HjbNonConvergence(const std::string& what, HjbResult last)
        : Error(what), last_(std::move(last))
    {
    }
    [[nodiscard]] const HjbResult& last() const { return last_; }

private:
    HjbResult last_;
};

/// r_i = int (nu + gamma) grad u . grad xi_i + H(x, grad u) xi_i + kappa u xi_i - rhs_i,
/// with H evaluated directly (no policy).
[[nodiscard]] Vector nonlinear_residual(const ProblemData& data, const FESpace& space,
                                        const std::vector<double>& gamma, const NodalFunction& u,
                                        const Vector& rhs, const QuadratureRule& quad);

/// Solves the discrete value-function equation for a fixed right-hand side
/// rhs_i = <F[m], xi_i> by policy iteration:
///   1. select the drift b and cost f* on each element from grad u,
///   2. solve [(nu + gamma) K + B(b) + kappa M] u = rhs + load(f*),
///   3. stop once the H1 increment and the recomputed nonlinear residual
///      both meet their tolerances.
/// Starts from `initial` when given, from zero otherwise.
[[nodiscard]] HjbResult solve_hjb(const ProblemData& data,
                                  const std::shared_ptr<const FESpace>& space,
                                  const std::vector<double>& gamma, const Vector& rhs,
                                  const QuadratureRule& quad, const HjbConfig& cfg,
                                  const std::optional<NodalFunction>& initial = std::nullopt);

} // namespace mfgpdi
