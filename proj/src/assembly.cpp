#include "mfgpdi/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mfgpdi/errors.hpp"

namespace mfgpdi {

namespace {

using Local = std::array<std::array<double, 3>, 3>;

void scatter(TripletBuffer& buffer, const FESpace& space, std::size_t element, const Local& local)
{
    const auto dofs = space.element_dofs(element);
    for (std::size_t a = 0; a < 3; ++a) {
        if (dofs[a] < 0) {
            continue;
        }
        for (std::size_t b = 0; b < 3; ++b) {
            if (dofs[b] < 0) {
                continue;
            }
            buffer.add(dofs[a], dofs[b], local[a][b]);
        }
    }
}

Local local_stiffness(const ElementGeometry& g, double coefficient)
{
    Local k{};
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            k[a][b] = coefficient * g.area * g.basis_gradients[a].dot(g.basis_gradients[b]);
        }
    }
    return k;
}

Local local_mass(const ElementGeometry& g, const QuadratureRule& quad)
{
    Local m{};
    for (std::size_t q = 0; q < quad.size(); ++q) {
        const auto& l = quad.points[q];
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                m[a][b] += quad.weights[q] * l[a] * l[b];
            }
        }
    }
    for (auto& row : m) {
        for (auto& v : row) {
            v *= g.area;
        }
    }
    return m;
}

// local[a][b] = int (b . grad xi_b) xi_a
Local local_advection(const ElementGeometry& g, const TransportField& field, std::size_t element)
{
    Local adv{};
    const QuadratureRule& quad = field.quad;
    for (std::size_t q = 0; q < quad.size(); ++q) {
        const Vec2& drift = field.drift_at(element, q);
        const auto& l = quad.points[q];
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                adv[a][b] += quad.weights[q] * (drift.dot(g.basis_gradients[b]) * l[a]);
            }
        }
    }
    for (auto& row : adv) {
        for (auto& v : row) {
            v *= g.area;
        }
    }
    return adv;
}

Local transposed(const Local& m)
{
    Local t{};
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            t[a][b] = m[b][a];
        }
    }
    return t;
}

void check_field(const FESpace& space, const TransportField& field)
{
    if (field.drift.size() != space.num_elements() * field.quad.size() ||
        field.cost.size() != field.drift.size()) {
        throw InvalidArgument("transport field does not match the space");
    }
}

SparseMatrix assemble_operator(const FESpace& space, const std::vector<double>& gamma, double nu,
                               double kappa, const TransportField& field, bool adjoint)
{
    if (gamma.size() != space.num_elements()) {
        throw InvalidArgument("artificial diffusion has the wrong number of elements");
    }
    check_field(space, field);
    TripletBuffer buffer(space.n_dofs(), space.n_dofs());
    buffer.reserve(9 * space.num_elements());
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const ElementGeometry& g = space.geometry(e);
        Local local = local_stiffness(g, nu + gamma[e]);
        const Local adv = adjoint ? transposed(local_advection(g, field, e))
                                  : local_advection(g, field, e);
        const Local mass = kappa != 0.0 ? local_mass(g, field.quad) : Local{};
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                local[a][b] += adv[a][b] + kappa * mass[a][b];
            }
        }
        scatter(buffer, space, e, local);
    }
    return compress(buffer);
}

} // namespace

void StabilizationParams::validate() const
{
    if (mode == StabilizationMode::zero) {
        return;
    }
    if (!(mu > 1.0)) {
        throw InvalidArgument("stabilization.mu must be > 1 in formula mode");
    }
    if (!(theta > 0.0 && theta < std::numbers::pi / 2.0)) {
        throw InvalidArgument("stabilization.theta must lie in (0, pi/2) in formula mode");
    }
}

ArtificialDiffusion artificial_diffusion(const Mesh& mesh, const StabilizationParams& params,
                                         double drift_bound, double kappa, double nu)
{
    ArtificialDiffusion out;
    out.gamma.assign(mesh.num_elements(), 0.0);
    if (params.mode == StabilizationMode::zero) {
        return out;
    }
    params.validate();
    const AcutenessReport report = acuteness_report(mesh);
    if (!(report.sigma_mesh > 0.0)) {
        throw InvalidArgument("artificial_diffusion: mesh has sigma <= 0");
    }
    const double sin_theta = std::sin(params.theta);
    if (report.min_margin < sin_theta - 1e-12) {
        std::ostringstream msg;
        msg << "mesh acuteness margin " << report.min_margin << " is below sin(theta) = "
            << sin_theta << "; the discrete maximum principle is not guaranteed";
        out.warning = msg.str();
    }
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const double diam = element_geometry(mesh, e).diameter;
        const double value =
            params.mu * (drift_bound * diam + kappa * diam * diam) / (report.sigma_mesh * sin_theta) -
            nu;
        out.gamma[e] = std::max(value, 0.0);
    }
    return out;
}

double TransportField::max_drift_norm() const
{
    double result = 0.0;
    for (const auto& d : drift) {
        result = std::max(result, d.norm());
    }
    return result;
}

TransportField constant_field(const FESpace& space, const Vec2& drift, const QuadratureRule& quad)
{
    TransportField field;
    field.quad = quad;
    field.drift.assign(space.num_elements() * quad.size(), drift);
    field.cost.assign(field.drift.size(), 0.0);
    return field;
}

TransportField select_transport_field(const ControlHamiltonian& h, const NodalFunction& u,
                                      const QuadratureRule& quad)
{
    const FESpace& space = *u.space;
    TransportField field;
    field.quad = quad;
    field.drift.resize(space.num_elements() * quad.size());
    field.cost.resize(field.drift.size());
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const Vec2 grad = element_gradient(u, e);
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const SubgradientChoice choice = h.select(space.map_point(e, quad.points[q]), grad);
            field.drift[e * quad.size() + q] = choice.drift;
            field.cost[e * quad.size() + q] = choice.cost;
        }
    }
    return field;
}

SparseMatrix assemble_diffusion(const FESpace& space, const std::vector<double>& coefficient)
{
    if (coefficient.size() != space.num_elements()) {
        throw InvalidArgument("assemble_diffusion: one coefficient per element required");
    }
    TripletBuffer buffer(space.n_dofs(), space.n_dofs());
    buffer.reserve(9 * space.num_elements());
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        scatter(buffer, space, e, local_stiffness(space.geometry(e), coefficient[e]));
    }
    return compress(buffer);
}

SparseMatrix assemble_mass(const FESpace& space, const QuadratureRule& quad)
{
    TripletBuffer buffer(space.n_dofs(), space.n_dofs());
    buffer.reserve(9 * space.num_elements());
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        scatter(buffer, space, e, local_mass(space.geometry(e), quad));
    }
    return compress(buffer);
}

SparseMatrix assemble_full_mass(const FESpace& space, const QuadratureRule& quad)
{
    const Mesh& mesh = space.mesh();
    const int n = static_cast<int>(mesh.num_nodes());
    TripletBuffer buffer(n, n);
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const Local m = local_mass(space.geometry(e), quad);
        const auto& tri = mesh.elements[e];
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                buffer.add(tri[a], tri[b], m[a][b]);
            }
        }
    }
    return compress(buffer);
}

SparseMatrix assemble_advection_hjb(const FESpace& space, const TransportField& field)
{
    check_field(space, field);
    TripletBuffer buffer(space.n_dofs(), space.n_dofs());
    buffer.reserve(9 * space.num_elements());
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        scatter(buffer, space, e, local_advection(space.geometry(e), field, e));
    }
    return compress(buffer);
}

SparseMatrix assemble_advection_kfp(const FESpace& space, const TransportField& field)
{
    check_field(space, field);
    TripletBuffer buffer(space.n_dofs(), space.n_dofs());
    buffer.reserve(9 * space.num_elements());
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        scatter(buffer, space, e, transposed(local_advection(space.geometry(e), field, e)));
    }
    return compress(buffer);
}

Vector assemble_load(const FESpace& space, const SourceFunctional& source,
                     const QuadratureRule& quad)
{
    Vector load = Vector::Zero(space.n_dofs());
    if (!source.r && !source.g) {
        return load;
    }
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const ElementGeometry& g = space.geometry(e);
        const auto dofs = space.element_dofs(e);
        std::array<double, 3> local{};
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const Point x = space.map_point(e, quad.points[q]);
            const double r = source.r ? source.r(x) : 0.0;
            const Vec2 gv = source.g ? source.g(x) : Vec2::Zero();
            if (!std::isfinite(r) || !std::isfinite(gv.x()) || !std::isfinite(gv.y())) {
                throw NonFiniteValue("assemble_load: non-finite source on element " +
                                     std::to_string(e));
            }
            for (std::size_t a = 0; a < 3; ++a) {
                local[a] += quad.weights[q] * (r * quad.points[q][a] + gv.dot(g.basis_gradients[a]));
            }
        }
        for (std::size_t a = 0; a < 3; ++a) {
            if (dofs[a] >= 0) {
                load[dofs[a]] += g.area * local[a];
            }
        }
    }
    return load;
}

Vector assemble_cost_load(const FESpace& space, const TransportField& field)
{
    check_field(space, field);
    Vector load = Vector::Zero(space.n_dofs());
    const QuadratureRule& quad = field.quad;
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const auto dofs = space.element_dofs(e);
        const double area = space.geometry(e).area;
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const double f = field.cost_at(e, q);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t a = 0; a < 3; ++a) {
                if (dofs[a] >= 0) {
                    load[dofs[a]] += area * quad.weights[q] * f * quad.points[q][a];
                }
            }
        }
    }
    return load;
}

SparseMatrix linearized_hjb_operator(const FESpace& space, const std::vector<double>& gamma,
                                     double nu, double kappa, const TransportField& field)
{
    return assemble_operator(space, gamma, nu, kappa, field, false);
}

SparseMatrix kfp_operator(const FESpace& space, const std::vector<double>& gamma, double nu,
                          double kappa, const TransportField& field)
{
    return assemble_operator(space, gamma, nu, kappa, field, true);
}

double max_offdiagonal(const SparseMatrix& a)
{
    double result = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = a.row_offsets()[static_cast<std::size_t>(i)];
             k < a.row_offsets()[static_cast<std::size_t>(i) + 1]; ++k) {
            if (a.col_indices()[static_cast<std::size_t>(k)] != i) {
                result = std::max(result, a.values()[static_cast<std::size_t>(k)]);
            }
        }
    }
    return result;
}

} // namespace mfgpdi
