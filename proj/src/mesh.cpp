#include "mfgpdi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "mfgpdi/errors.hpp"

namespace mfgpdi {

bool Mesh::is_boundary(int node) const
{
    return std::binary_search(boundary_nodes.begin(), boundary_nodes.end(), node);
}

std::string to_string(Acuteness a)
{
    switch (a) {
    case Acuteness::strictly_acute: return "strictly_acute";
    case Acuteness::weakly_acute: return "weakly_acute";
    case Acuteness::not_acute: return "not_acute";
    }
    return "unknown";
}

Mesh uniform_unit_square_mesh(int n)
{
    if (n < 1) {
        throw InvalidArgument("uniform_unit_square_mesh: n must be >= 1");
    }
    Mesh mesh;
    mesh.subdivisions_per_side = n;
    mesh.uniform_square = true;
    // Level counts dyadic refinements relative to the odd part of n.
    int level = 0;
    for (int k = n; k % 2 == 0; k /= 2) {
        ++level;
    }
    mesh.level = level;

    const double dn = static_cast<double>(n);
    mesh.nodes.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            mesh.nodes.emplace_back(static_cast<double>(i) / dn, static_cast<double>(j) / dn);
            if (i == 0 || j == 0 || i == n || j == n) {
                mesh.boundary_nodes.push_back(grid_node(n, i, j));
            }
        }
    }

    mesh.elements.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = grid_node(n, i, j);
            const int v10 = grid_node(n, i + 1, j);
            const int v01 = grid_node(n, i, j + 1);
            const int v11 = grid_node(n, i + 1, j + 1);
            mesh.elements.push_back({v00, v10, v11});  // below the diagonal
            mesh.elements.push_back({v00, v11, v01});  // above the diagonal
        }
    }
    return mesh;
}

Mesh refine_uniform(const Mesh& mesh)
{
    if (!mesh.uniform_square) {
        throw InvalidArgument("refine_uniform: only uniform unit-square meshes can be refined");
    }
    return uniform_unit_square_mesh(2 * mesh.subdivisions_per_side);
}

Mesh equilateral_rhombus_mesh(int n)
{
    if (n < 1) {
        throw InvalidArgument("equilateral_rhombus_mesh: n must be >= 1");
    }
    Mesh mesh;
    mesh.subdivisions_per_side = n;
    const double dn = static_cast<double>(n);
    const Vec2 a(1.0, 0.0);
    const Vec2 b(0.5, std::sqrt(3.0) / 2.0);
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            mesh.nodes.push_back((static_cast<double>(i) * a + static_cast<double>(j) * b) / dn);
            if (i == 0 || j == 0 || i == n || j == n) {
                mesh.boundary_nodes.push_back(grid_node(n, i, j));
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = grid_node(n, i, j);
            const int v10 = grid_node(n, i + 1, j);
            const int v01 = grid_node(n, i, j + 1);
            const int v11 = grid_node(n, i + 1, j + 1);
            // Short diagonal v10-v01 gives two equilateral triangles.
            mesh.elements.push_back({v00, v10, v01});
            mesh.elements.push_back({v10, v11, v01});
        }
    }
    return mesh;
}

ElementGeometry element_geometry(const Mesh& mesh, std::size_t element)
{
    if (element >= mesh.elements.size()) {
        throw InvalidArgument("element_geometry: element index out of range");
    }
    const auto& tri = mesh.elements[element];
    const Point& p0 = mesh.nodes[static_cast<std::size_t>(tri[0])];
    const Point& p1 = mesh.nodes[static_cast<std::size_t>(tri[1])];
    const Point& p2 = mesh.nodes[static_cast<std::size_t>(tri[2])];

    const Vec2 e1 = p1 - p0;
    const Vec2 e2 = p2 - p0;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();

    ElementGeometry g;
    g.area = 0.5 * det;
    // grad xi_i is the inward normal of the opposite edge scaled by 1/(2 area).
    const std::array<Vec2, 3> opposite = {p2 - p1, p0 - p2, p1 - p0};
    for (int i = 0; i < 3; ++i) {
        const Vec2& e = opposite[static_cast<std::size_t>(i)];
        g.basis_gradients[static_cast<std::size_t>(i)] = Vec2(-e.y(), e.x()) / det;
    }
    g.diameter = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
    double min_grad = std::numeric_limits<double>::infinity();
    for (const auto& grad : g.basis_gradients) {
        min_grad = std::min(min_grad, grad.norm());
    }
    g.sigma = g.diameter * min_grad;
    return g;
}

AcutenessReport acuteness_report(const Mesh& mesh)
{
    AcutenessReport report;
    report.min_margin = std::numeric_limits<double>::infinity();
    report.sigma_mesh = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        report.sigma_mesh = std::min(report.sigma_mesh, g.sigma);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = i + 1; j < 3; ++j) {
                const Vec2& gi = g.basis_gradients[i];
                const Vec2& gj = g.basis_gradients[j];
                const double margin = -gi.dot(gj) / (gi.norm() * gj.norm());
                report.min_margin = std::min(report.min_margin, margin);
            }
        }
    }
    constexpr double tol = 1e-12;
    if (report.min_margin > tol) {
        report.classification = Acuteness::strictly_acute;
        report.theta = std::asin(std::min(report.min_margin, 1.0));
    } else if (report.min_margin >= -tol) {
        report.classification = Acuteness::weakly_acute;
    } else {
        report.classification = Acuteness::not_acute;
    }
    return report;
}

void write_mesh(std::ostream& os, const Mesh& mesh)
{
    const auto old_precision = os.precision(17);
    for (const auto& p : mesh.nodes) {
        os << "v " << p.x() << ' ' << p.y() << '\n';
    }
    for (const auto& t : mesh.elements) {
        os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    os.precision(old_precision);
}

} // namespace mfgpdi
