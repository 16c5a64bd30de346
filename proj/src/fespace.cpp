#include "mfgpdi/fespace.hpp"

#include <cmath>
#include <string>

#include "mfgpdi/errors.hpp"

namespace mfgpdi {

FESpace::FESpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh))
{
    if (!mesh_) {
        throw InvalidArgument("FESpace: null mesh");
    }
    node_to_dof_.assign(mesh_->num_nodes(), -1);
    for (std::size_t node = 0; node < mesh_->num_nodes(); ++node) {
        if (!mesh_->is_boundary(static_cast<int>(node))) {
            node_to_dof_[node] = static_cast<int>(interior_nodes_.size());
            interior_nodes_.push_back(static_cast<int>(node));
        }
    }
    geometry_.reserve(mesh_->num_elements());
    for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
        geometry_.push_back(element_geometry(*mesh_, e));
        if (!(geometry_.back().area > 0.0)) {
            throw InvalidArgument("FESpace: element " + std::to_string(e) +
                                  " has non-positive area");
        }
    }
}

std::array<int, 3> FESpace::element_dofs(std::size_t element) const
{
    const auto& tri = mesh_->elements[element];
    return {node_to_dof(tri[0]), node_to_dof(tri[1]), node_to_dof(tri[2])};
}

Point FESpace::map_point(std::size_t element, const std::array<double, 3>& bary) const
{
    const auto& tri = mesh_->elements[element];
    return bary[0] * mesh_->nodes[static_cast<std::size_t>(tri[0])] +
           bary[1] * mesh_->nodes[static_cast<std::size_t>(tri[1])] +
           bary[2] * mesh_->nodes[static_cast<std::size_t>(tri[2])];
}

std::shared_ptr<const FESpace> make_space(const Mesh& mesh)
{
    return std::make_shared<const FESpace>(std::make_shared<const Mesh>(mesh));
}

NodalFunction NodalFunction::zero(std::shared_ptr<const FESpace> space)
{
    const int n = space->n_dofs();
    return NodalFunction{std::move(space), Vector::Zero(n)};
}

double NodalFunction::node_value(int node) const
{
    const int dof = space->node_to_dof(node);
    return dof < 0 ? 0.0 : values[dof];
}

Vector NodalFunction::all_node_values() const
{
    const auto n = static_cast<Eigen::Index>(space->mesh().num_nodes());
    Vector out = Vector::Zero(n);
    const auto& nodes = space->interior_nodes();
    for (std::size_t d = 0; d < nodes.size(); ++d) {
        out[nodes[d]] = values[static_cast<Eigen::Index>(d)];
    }
    return out;
}

double NodalFunction::value(std::size_t element, const std::array<double, 3>& bary) const
{
    const auto& tri = space->mesh().elements[element];
    return bary[0] * node_value(tri[0]) + bary[1] * node_value(tri[1]) +
           bary[2] * node_value(tri[2]);
}

NodalFunction interpolate(std::shared_ptr<const FESpace> space, const ScalarField& f)
{
    NodalFunction v = NodalFunction::zero(space);
    const auto& nodes = space->interior_nodes();
    for (std::size_t d = 0; d < nodes.size(); ++d) {
        const double value = f(space->mesh().nodes[static_cast<std::size_t>(nodes[d])]);
        if (!std::isfinite(value)) {
            throw NonFiniteValue("interpolate: non-finite value at node " +
                                 std::to_string(nodes[d]));
        }
        v.values[static_cast<Eigen::Index>(d)] = value;
    }
    return v;
}

Vec2 element_gradient(const NodalFunction& v, std::size_t element)
{
    const auto& tri = v.space->mesh().elements[element];
    const auto& grads = v.space->geometry(element).basis_gradients;
    Vec2 g = Vec2::Zero();
    for (std::size_t i = 0; i < 3; ++i) {
        g += v.node_value(tri[i]) * grads[i];
    }
    return g;
}

double integrate(const FESpace& space, const ElementIntegrand& integrand,
                 const QuadratureRule& quad)
{
    double total = 0.0;
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        double local = 0.0;
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const double value = integrand(e, space.map_point(e, quad.points[q]), quad.points[q]);
            if (!std::isfinite(value)) {
                throw NonFiniteValue("integrate: non-finite integrand on element " +
                                     std::to_string(e));
            }
            local += quad.weights[q] * value;
        }
        total += space.geometry(e).area * local;
    }
    return total;
}

double l2_norm(const NodalFunction& v, const QuadratureRule& quad)
{
    const double sq = integrate(
        *v.space,
        [&](std::size_t e, const Point&, const std::array<double, 3>& bary) {
            const double value = v.value(e, bary);
            return value * value;
        },
        quad);
    return std::sqrt(sq);
}

double h1_norm(const NodalFunction& v, const QuadratureRule& quad)
{
    double grad_sq = 0.0;
    for (std::size_t e = 0; e < v.space->num_elements(); ++e) {
        grad_sq += v.space->geometry(e).area * element_gradient(v, e).squaredNorm();
    }
    const double l2 = l2_norm(v, quad);
    return std::sqrt(l2 * l2 + grad_sq);
}

ErrorNorms error_norms(const NodalFunction& v, const ScalarField& exact,
                       const VectorField& exact_gradient, const QuadratureRule& quad)
{
    const FESpace& space = *v.space;
    double err_l2 = 0.0;
    double err_grad = 0.0;
    double ref_l2 = 0.0;
    double ref_grad = 0.0;
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const Vec2 grad = element_gradient(v, e);
        double el2 = 0.0;
        double egr = 0.0;
        double rl2 = 0.0;
        double rgr = 0.0;
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const Point x = space.map_point(e, quad.points[q]);
            const double u = exact(x);
            const Vec2 du = exact_gradient(x);
            if (!std::isfinite(u) || !std::isfinite(du.x()) || !std::isfinite(du.y())) {
                throw NonFiniteValue("error_norms: exact solution not finite at a quadrature point");
            }
            const double w = quad.weights[q];
            const double diff = v.value(e, quad.points[q]) - u;
            el2 += w * diff * diff;
            egr += w * (grad - du).squaredNorm();
            rl2 += w * u * u;
            rgr += w * du.squaredNorm();
        }
        const double area = space.geometry(e).area;
        err_l2 += area * el2;
        err_grad += area * egr;
        ref_l2 += area * rl2;
        ref_grad += area * rgr;
    }
    ErrorNorms out;
    out.l2_abs = std::sqrt(err_l2);
    out.h1_abs = std::sqrt(err_l2 + err_grad);
    const double l2_ref = std::sqrt(ref_l2);
    const double h1_ref = std::sqrt(ref_l2 + ref_grad);
    if (!(l2_ref > 0.0) || !(h1_ref > 0.0)) {
        throw InvalidArgument("error_norms: exact solution has zero norm");
    }
    out.l2_rel = out.l2_abs / l2_ref;
    out.h1_rel = out.h1_abs / h1_ref;
    return out;
}

} // namespace mfgpdi
