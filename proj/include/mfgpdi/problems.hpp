#pragma once

#include <functional>
#include <memory>
#include <string>

#include "mfgpdi/mfg_driver.hpp"
#include "mfgpdi/problem.hpp"

namespace mfgpdi {

/// sgn with sgn(0) = 0.
[[nodiscard]] double sign(double v);

/// <F[m], psi> = int (g(m) + s(x)) psi + t(x) . grad psi.
///
/// g is evaluated on the piecewise-linear reconstruction of m at the
/// quadrature points. For non-decreasing g the operator is monotone.
class LocalCoupling final : public CouplingOperator {
public:
    using Nonlinearity = std::function<double(double)>;

    LocalCoupling(Nonlinearity g, ScalarField s, VectorField t);

    [[nodiscard]] Vector load(const FESpace& space, const NodalFunction& m,
                              const QuadratureRule& quad) const override;

    [[nodiscard]] const Nonlinearity& nonlinearity() const { return g_; }

private:
    Nonlinearity g_;
    ScalarField s_;
    VectorField t_;
};

[[nodiscard]] inline Vector coupling_load(const CouplingOperator& op, const FESpace& space,
                                          const NodalFunction& m, const QuadratureRule& quad)
{
    return op.load(space, m, quad);
}

/// Manufactured pair u = xy log x log y, m = xy(1-x)(1-y), eikonal Hamiltonian,
/// nu = 1, kappa = 0.
namespace experiment1 {

[[nodiscard]] double exact_u(const Point& p);
/// Also the vector field t used in the data.
[[nodiscard]] Vec2 exact_grad_u(const Point& p);
[[nodiscard]] double exact_m(const Point& p);
[[nodiscard]] Vec2 exact_grad_m(const Point& p);
/// t / |t|, zero where t vanishes.
[[nodiscard]] Vec2 exact_drift(const Point& p);
/// |t| - tanh(m*)
[[nodiscard]] double h(const Point& p);
/// -Laplacian of m*: 2(x(1-x) + y(1-y))
[[nodiscard]] double r(const Point& p);
/// m* t / |t|, zero where t vanishes.
[[nodiscard]] Vec2 g(const Point& p);

[[nodiscard]] ProblemData problem();

} // namespace experiment1

/// Rough data with unknown solution: arctan coupling with a sign-pattern
/// source, a checkerboard density source and a flux that jumps at x = 2/3.
namespace experiment2 {

/// 2 sgn((x - 0.5) cos(8 pi y))
[[nodiscard]] double coupling_source(const Point& p);
/// (sgn(sin 4 pi x sin 4 pi y) + 1) / 2
[[nodiscard]] double r(const Point& p);
/// y (1, 0) for 0 < x < 2/3, y^2 (-1, 0) otherwise.
[[nodiscard]] Vec2 c(const Point& p);

[[nodiscard]] ProblemData problem();

/// Quadrature points where an argument of a sign function is exactly zero.
[[nodiscard]] std::size_t sign_zero_hits(const FESpace& space, const QuadratureRule& quad);

} // namespace experiment2

struct CustomProblemSpec {
    std::string hamiltonian = "eikonal";  // or "finite"
    int num_controls = 8;                 // controls on the unit circle for "finite"
    double nu = 1.0;
    double kappa = 0.0;
    double coupling_constant = 0.0;  // F[m] = tanh(m) + coupling_constant
    double source_constant = 1.0;    // G = source_constant
};

[[nodiscard]] ProblemData custom_problem(const CustomProblemSpec& spec);

struct ErrorBundle {
    double u_h1_rel = 0.0;
    double m_l2_rel = 0.0;
    double m_h1_rel = 0.0;
    double drift_l2_rel = 0.0;
};

/// Relative errors of a solution against the manufactured pair; the drift
/// error compares the stored field with t/|t| at the same quadrature points.
[[nodiscard]] ErrorBundle exact_errors_experiment1(const MfgSolution& sol,
                                                   const QuadratureRule& quad);

/// Value of a nodal function at the nodes of a nested finer uniform mesh.
[[nodiscard]] NodalFunction prolongate(const NodalFunction& coarse,
                                       const std::shared_ptr<const FESpace>& fine);

/// Relative errors against a reference solution on a strictly finer nested
/// uniform mesh, measured in the fine space after exact nodal injection.
[[nodiscard]] ErrorBundle reference_errors(const ControlHamiltonian& h, const MfgSolution& sol,
                                           const MfgSolution& ref, const QuadratureRule& quad);

/// Observed convergence rate log(e_coarse / e_fine) / log(h_coarse / h_fine).
[[nodiscard]] double observed_rate(double h_coarse, double e_coarse, double h_fine, double e_fine);

} // namespace mfgpdi
