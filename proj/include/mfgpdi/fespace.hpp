#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "mfgpdi/mesh.hpp"
#include "mfgpdi/quadrature.hpp"
#include "mfgpdi/types.hpp"

namespace mfgpdi {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Vec2(const Point&)>;

/// Continuous piecewise-linear functions vanishing on the boundary.
///
/// Degrees of freedom are the interior nodes in increasing node order.
class FESpace {
public:
    explicit FESpace(std::shared_ptr<const Mesh> mesh);

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int n_dofs() const { return static_cast<int>(interior_nodes_.size()); }
    [[nodiscard]] std::size_t num_elements() const { return mesh_->num_elements(); }

    /// Node index of each dof.
    [[nodiscard]] const std::vector<int>& interior_nodes() const { return interior_nodes_; }
    /// Dof index of a node, -1 for boundary nodes.
    [[nodiscard]] int node_to_dof(int node) const
    {
        return node_to_dof_[static_cast<std::size_t>(node)];
    }
    /// Dof indices of the three element vertices (-1 on the boundary).
    [[nodiscard]] std::array<int, 3> element_dofs(std::size_t element) const;

    [[nodiscard]] const ElementGeometry& geometry(std::size_t element) const
    {
        return geometry_[element];
    }

    /// Physical point of a barycentric coordinate in an element.
    [[nodiscard]] Point map_point(std::size_t element, const std::array<double, 3>& bary) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<int> interior_nodes_;
    std::vector<int> node_to_dof_;
    std::vector<ElementGeometry> geometry_;
};

[[nodiscard]] std::shared_ptr<const FESpace> make_space(const Mesh& mesh);

/// A member of the finite element space: values at interior dofs, implicit
/// zeros on the boundary.
struct NodalFunction {
    std::shared_ptr<const FESpace> space;
    Vector values;

    [[nodiscard]] static NodalFunction zero(std::shared_ptr<const FESpace> space);
    [[nodiscard]] double node_value(int node) const;
    /// Values at every mesh node, boundary included.
    [[nodiscard]] Vector all_node_values() const;
    [[nodiscard]] double value(std::size_t element, const std::array<double, 3>& bary) const;
};

[[nodiscard]] NodalFunction interpolate(std::shared_ptr<const FESpace> space, const ScalarField& f);

[[nodiscard]] Vec2 element_gradient(const NodalFunction& v, std::size_t element);

using ElementIntegrand =
    std::function<double(std::size_t element, const Point& x, const std::array<double, 3>& bary)>;

/// Sum over elements of area * sum_q w_q g(x_q).
[[nodiscard]] double integrate(const FESpace& space, const ElementIntegrand& integrand,
                               const QuadratureRule& quad);

[[nodiscard]] double l2_norm(const NodalFunction& v, const QuadratureRule& quad);
/// Full norm (||v||^2 + ||grad v||^2)^(1/2).
[[nodiscard]] double h1_norm(const NodalFunction& v, const QuadratureRule& quad);

struct ErrorNorms {
    double l2_abs = 0.0;
    double l2_rel = 0.0;
    double h1_abs = 0.0;
    double h1_rel = 0.0;
};

/// Errors of v against an exact function given with its gradient; relative
/// values divide by the norms of the exact function under the same rule.
[[nodiscard]] ErrorNorms error_norms(const NodalFunction& v, const ScalarField& exact,
                                     const VectorField& exact_gradient,
                                     const QuadratureRule& quad);

} // namespace mfgpdi
