#include "mfgpdi/mfg_driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mfgpdi {

void MfgConfig::validate() const
{
    if (!(tol_m > 0.0) || !(tol_u > 0.0)) {
        throw InvalidArgument("mfg tolerances must be positive");
    }
    if (max_outer < 1) {
        throw InvalidArgument("mfg.max_outer must be >= 1");
    }
    if (!(damping > 0.0 && damping <= 1.0)) {
        throw InvalidArgument("mfg.damping must lie in (0, 1]");
    }
    if (quadrature_degree < 1) {
        throw InvalidArgument("quadrature_degree must be >= 1");
    }
    hjb.validate();
}

NodalFunction solve_kfp(const ProblemData& data, const std::shared_ptr<const FESpace>& space,
                        const std::vector<double>& gamma, const TransportField& field,
                        const QuadratureRule& quad)
{
    const SparseMatrix a = kfp_operator(*space, gamma, data.nu, data.kappa, field);
    const Vector load = assemble_load(*space, data.source, quad);
    return NodalFunction{space, solve(a, load)};
}

double kfp_residual(const ProblemData& data, const FESpace& space,
                    const std::vector<double>& gamma, const TransportField& field,
                    const NodalFunction& m, const QuadratureRule& quad)
{
    const SparseMatrix a = kfp_operator(space, gamma, data.nu, data.kappa, field);
    const Vector r = a.matvec(m.values) - assemble_load(space, data.source, quad);
    return r.lpNorm<Eigen::Infinity>();
}

namespace {

MfgDiagnostics diagnose(const ProblemData& data, const MfgSolution& sol, const Vector& rhs,
                        const QuadratureRule& quad)
{
    MfgDiagnostics d;
    const DmpCheck dmp = dmp_check(sol.m);
    d.min_nodal_m = dmp.min_value;
    d.dmp_violation = dmp.violated;
    d.h1_norm_m = h1_norm(sol.m, quad);
    d.h1_norm_u = h1_norm(sol.u, quad);
    d.hjb_residual = nonlinear_residual(data, *sol.u.space, sol.gamma, sol.u, rhs, quad)
                         .lpNorm<Eigen::Infinity>();
    d.kfp_residual = kfp_residual(data, *sol.m.space, sol.gamma, sol.field, sol.m, quad);
    return d;
}

} // namespace

MfgSolution solve_mfg(const ProblemData& data, const std::shared_ptr<const FESpace>& space,
                      const StabilizationParams& stab, const MfgConfig& cfg,
                      const std::optional<NodalFunction>& initial_m)
{
    data.validate();
    cfg.validate();
    const QuadratureRule quad = triangle_rule(cfg.quadrature_degree);
    const ArtificialDiffusion diffusion = artificial_diffusion(
        space->mesh(), stab, data.hamiltonian->drift_bound(), data.kappa, data.nu);

    MfgSolution sol;
    sol.gamma = diffusion.gamma;
    sol.m = initial_m ? *initial_m : NodalFunction::zero(space);
    if (sol.m.values.size() != space->n_dofs()) {
        throw InvalidArgument("solve_mfg: initial density does not match the space");
    }
    sol.m.space = space;
    sol.u = NodalFunction::zero(space);

    bool converged = false;
    Vector rhs;
    for (int j = 1; j <= cfg.max_outer; ++j) {
        rhs = data.coupling->load(*space, sol.m, quad);
        HjbResult hjb = solve_hjb(data, space, sol.gamma, rhs, quad, cfg.hjb, sol.u);
        const NodalFunction m_next = solve_kfp(data, space, sol.gamma, hjb.field, quad);

        OuterIteration step;
        step.hjb_iterations = hjb.iterations;
        const NodalFunction du{space, hjb.u.values - sol.u.values};
        const NodalFunction dm{space, cfg.damping * (m_next.values - sol.m.values)};
        step.increment_u = l2_norm(du, quad);
        step.increment_m = l2_norm(dm, quad);
        sol.history.push_back(step);
        sol.outer_iterations = j;

        sol.u = std::move(hjb.u);
        sol.field = std::move(hjb.field);
        sol.m.values += dm.values;

        if (step.increment_u <= cfg.tol_u && step.increment_m <= cfg.tol_m) {
            converged = true;
            break;
        }
    }

    rhs = data.coupling->load(*space, sol.m, quad);
    sol.diagnostics = diagnose(data, sol, rhs, quad);
    sol.diagnostics.stabilization_warning = diffusion.warning;
    if (!converged) {
        std::ostringstream msg;
        msg << "fixed-point iteration did not converge in " << cfg.max_outer
            << " outer iterations (last increments u " << sol.history.back().increment_u << ", m "
            << sol.history.back().increment_m << ")";
        throw MfgNonConvergence(msg.str(), std::move(sol));
    }
    if (sol.diagnostics.hjb_residual > cfg.verify_tol ||
        sol.diagnostics.kfp_residual > cfg.verify_tol) {
        std::ostringstream msg;
        msg << "final pair fails verification (HJB residual " << sol.diagnostics.hjb_residual
            << ", KFP residual " << sol.diagnostics.kfp_residual << ")";
        throw MfgNonConvergence(msg.str(), std::move(sol));
    }
    return sol;
}

DmpCheck dmp_check(const NodalFunction& m)
{
    DmpCheck out;
    if (m.values.size() > 0) {
        out.min_value = m.values.minCoeff();
    }
    out.violated = out.min_value < -1e-10;
    return out;
}

MonotonicityDiagnostic monotonicity_diagnostic(const ProblemData& data, const MfgSolution& sol1,
                                               const MfgSolution& sol2)
{
    if (sol1.u.space != sol2.u.space || sol1.m.space != sol2.m.space ||
        sol1.u.space != sol1.m.space) {
        throw InvalidArgument("monotonicity_diagnostic: solutions live on different spaces");
    }
    if (sol1.field.quad.size() != sol2.field.quad.size() ||
        sol1.field.quad.degree != sol2.field.quad.degree) {
        throw InvalidArgument("monotonicity_diagnostic: transport fields use different rules");
    }
    const FESpace& space = *sol1.u.space;
    const QuadratureRule& quad = sol1.field.quad;
    const ControlHamiltonian& h = *data.hamiltonian;

    MonotonicityDiagnostic out;
    out.lambda12_max = -std::numeric_limits<double>::infinity();
    out.lambda21_max = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const Vec2 g1 = element_gradient(sol1.u, e);
        const Vec2 g2 = element_gradient(sol2.u, e);
        const double area = space.geometry(e).area;
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const Point x = space.map_point(e, quad.points[q]);
            const double h1 = h.eval(x, g1);
            const double h2 = h.eval(x, g2);
            const double l12 = h1 - h2 + sol1.field.drift_at(e, q).dot(g2 - g1);
            const double l21 = h2 - h1 + sol2.field.drift_at(e, q).dot(g1 - g2);
            out.lambda12_max = std::max(out.lambda12_max, l12);
            out.lambda21_max = std::max(out.lambda21_max, l21);
            out.weighted_lambda += area * quad.weights[q] *
                                   (sol1.m.value(e, quad.points[q]) * l12 +
                                    sol2.m.value(e, quad.points[q]) * l21);
        }
    }
    const Vector f1 = data.coupling->load(space, sol1.m, quad);
    const Vector f2 = data.coupling->load(space, sol2.m, quad);
    out.duality_gap = (f1 - f2).dot(sol1.m.values - sol2.m.values);
    return out;
}

} // namespace mfgpdi
