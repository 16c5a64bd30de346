#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfgpdi/types.hpp"

namespace mfgpdi {

/// Conforming 2D triangulation.
///
/// Elements are stored counterclockwise. Meshes produced by
/// uniform_unit_square_mesh() carry the grid parameters `subdivisions_per_side`
/// and `level`; other generators set `subdivisions_per_side` to their own
/// resolution and `uniform_square` to false.
struct Mesh {
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> elements;
    std::vector<int> boundary_nodes;  // sorted ascending
    int level = 0;
    int subdivisions_per_side = 1;
    bool uniform_square = false;

    [[nodiscard]] std::size_t num_nodes() const { return nodes.size(); }
    [[nodiscard]] std::size_t num_elements() const { return elements.size(); }
    [[nodiscard]] bool is_boundary(int node) const;
};

struct ElementGeometry {
    double diameter = 0.0;
    double area = 0.0;
    std::array<Vec2, 3> basis_gradients;
    double sigma = 0.0;  // diameter * min_i |grad xi_i|
};

enum class Acuteness { strictly_acute, weakly_acute, not_acute };

struct AcutenessReport {
    /// min over elements and local pairs i != j of -cos(angle(grad xi_i, grad xi_j)).
    double min_margin = 0.0;
    Acuteness classification = Acuteness::not_acute;
    /// Only meaningful for strictly acute meshes: theta with sin(theta) = min_margin.
    double theta = 0.0;
    double sigma_mesh = 0.0;
};

[[nodiscard]] std::string to_string(Acuteness a);

/// n x n squares on [0,1]^2, each split by its lower-left to upper-right diagonal.
[[nodiscard]] Mesh uniform_unit_square_mesh(int n);

/// Doubles the resolution of a uniform unit-square mesh. Parent nodes keep
/// their coordinates.
[[nodiscard]] Mesh refine_uniform(const Mesh& mesh);

/// Rhombus with unit sides spanned by (1,0) and (1/2, sqrt(3)/2), cut into
/// 2 n^2 equilateral triangles. Strictly acute with min_margin = 1/2.
[[nodiscard]] Mesh equilateral_rhombus_mesh(int n);

[[nodiscard]] ElementGeometry element_geometry(const Mesh& mesh, std::size_t element);

[[nodiscard]] AcutenessReport acuteness_report(const Mesh& mesh);

/// Plain-text dump: `v x y` per node then `t i j k` per element, 17 digits.
void write_mesh(std::ostream& os, const Mesh& mesh);

/// Index of the node at grid position (i, j) of a uniform unit-square mesh.
[[nodiscard]] inline int grid_node(int n, int i, int j) { return j * (n + 1) + i; }

} // namespace mfgpdi
