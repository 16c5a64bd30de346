#pragma once

#include <array>
#include <vector>

namespace mfgpdi {

/// Quadrature on the reference triangle in barycentric coordinates.
/// Weights are normalised to sum to one, so a physical integral is
/// area * sum_q w_q f(x_q).
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// Symmetric Dunavant rules up to degree 5, collapsed Gauss-Legendre
/// (conical product) rules above. Every point lies strictly inside the triangle.
[[nodiscard]] QuadratureRule triangle_rule(int degree);

/// n-point Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace mfgpdi
