#include "mfgpdi/hjb_solver.hpp"

#include <cmath>
#include <sstream>

namespace mfgpdi {

void HjbConfig::validate() const
{
    if (!(tol_increment > 0.0) || !(tol_residual > 0.0)) {
        throw InvalidArgument("hjb tolerances must be positive");
    }
    if (max_iters < 1) {
        throw InvalidArgument("hjb.max_iters must be >= 1");
    }
}

Vector nonlinear_residual(const ProblemData& data, const FESpace& space,
                          const std::vector<double>& gamma, const NodalFunction& u,
                          const Vector& rhs, const QuadratureRule& quad)
{
    if (rhs.size() != space.n_dofs() || u.values.size() != space.n_dofs() ||
        gamma.size() != space.num_elements()) {
        throw InvalidArgument("nonlinear_residual: dimension mismatch");
    }
    const ControlHamiltonian& h = *data.hamiltonian;
    Vector r = -rhs;
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const ElementGeometry& g = space.geometry(e);
        const auto dofs = space.element_dofs(e);
        const Vec2 grad = element_gradient(u, e);
        std::array<double, 3> local{};
        for (std::size_t a = 0; a < 3; ++a) {
            local[a] = (data.nu + gamma[e]) * g.area * grad.dot(g.basis_gradients[a]);
        }
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const auto& l = quad.points[q];
            const double hv = h.eval(space.map_point(e, l), grad);
            const double uv = u.value(e, l);
            for (std::size_t a = 0; a < 3; ++a) {
                local[a] += g.area * quad.weights[q] * (hv + data.kappa * uv) * l[a];
            }
        }
        for (std::size_t a = 0; a < 3; ++a) {
            if (dofs[a] >= 0) {
                r[dofs[a]] += local[a];
            }
        }
    }
    return r;
}

HjbResult solve_hjb(const ProblemData& data, const std::shared_ptr<const FESpace>& space,
                    const std::vector<double>& gamma, const Vector& rhs,
                    const QuadratureRule& quad, const HjbConfig& cfg,
                    const std::optional<NodalFunction>& initial)
{
    data.validate();
    cfg.validate();
    if (rhs.size() != space->n_dofs()) {
        throw InvalidArgument("solve_hjb: right-hand side does not match the space");
    }
    const ControlHamiltonian& h = *data.hamiltonian;

    HjbResult result;
    result.u = initial ? *initial : NodalFunction::zero(space);
    if (result.u.values.size() != space->n_dofs()) {
        throw InvalidArgument("solve_hjb: initial guess does not match the space");
    }
    result.u.space = space;

    for (int it = 1; it <= cfg.max_iters; ++it) {
        const TransportField policy = select_transport_field(h, result.u, quad);
        const SparseMatrix a = linearized_hjb_operator(*space, gamma, data.nu, data.kappa, policy);
        const Vector b = rhs + assemble_cost_load(*space, policy);
        NodalFunction next{space, solve(a, b)};

        const NodalFunction delta{space, next.values - result.u.values};
        HjbIteration step;
        step.increment = h1_norm(delta, quad);
        step.residual =
            nonlinear_residual(data, *space, gamma, next, rhs, quad).lpNorm<Eigen::Infinity>();
        result.history.push_back(step);
        result.u = std::move(next);
        result.iterations = it;
        result.final_residual = step.residual;
        if (step.increment <= cfg.tol_increment && step.residual <= cfg.tol_residual) {
            result.converged = true;
            break;
        }
    }
    result.field = select_transport_field(h, result.u, quad);
    if (!result.converged) {
        std::ostringstream msg;
        msg << "policy iteration did not converge in " << cfg.max_iters
            << " iterations (residual " << result.final_residual << ")";
        throw HjbNonConvergence(msg.str(), std::move(result));
    }
    return result;
}

} // namespace mfgpdi
