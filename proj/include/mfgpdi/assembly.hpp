#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfgpdi/fespace.hpp"
#include "mfgpdi/hamiltonian.hpp"
#include "mfgpdi/linalg.hpp"
#include "mfgpdi/problem.hpp"

namespace mfgpdi {

enum class StabilizationMode { formula, zero };

struct StabilizationParams {
    double mu = 2.0;
    double theta = 0.0;  // acuteness angle, radians in (0, pi/2)
    StabilizationMode mode = StabilizationMode::zero;

    void validate() const;
};

struct ArtificialDiffusion {
    std::vector<double> gamma;  // one value per element
    /// Set when the mesh is not strictly acute with the requested angle.
    std::optional<std::string> warning;
};

/// gamma_K = max(mu (|b| diam K + kappa diam K^2) / (sigma sin theta) - nu, 0),
/// sigma the mesh minimum of diam K * min_i |grad xi_i|. Zero mode gives all zeros.
[[nodiscard]] ArtificialDiffusion artificial_diffusion(const Mesh& mesh,
                                                       const StabilizationParams& params,
                                                       double drift_bound, double kappa, double nu);

/// Selected drift and running cost at each quadrature point of each element.
struct TransportField {
    QuadratureRule quad;
    std::vector<Vec2> drift;   // index element * quad.size() + q
    std::vector<double> cost;  // same layout

    [[nodiscard]] const Vec2& drift_at(std::size_t element, std::size_t q) const
    {
        return drift[element * quad.size() + q];
    }
    [[nodiscard]] double cost_at(std::size_t element, std::size_t q) const
    {
        return cost[element * quad.size() + q];
    }
    [[nodiscard]] double max_drift_norm() const;
};

/// Constant field (zero running cost) on every quadrature point.
[[nodiscard]] TransportField constant_field(const FESpace& space, const Vec2& drift,
                                            const QuadratureRule& quad);

/// Policy selection: on each element, select(x_q, grad u|_K) at every quadrature point.
[[nodiscard]] TransportField select_transport_field(const ControlHamiltonian& h,
                                                    const NodalFunction& u,
                                                    const QuadratureRule& quad);

/// int c_K grad xi_j . grad xi_i over interior dofs.
[[nodiscard]] SparseMatrix assemble_diffusion(const FESpace& space,
                                              const std::vector<double>& coefficient);

/// Consistent mass matrix over interior dofs.
[[nodiscard]] SparseMatrix assemble_mass(const FESpace& space, const QuadratureRule& quad);

/// Mass matrix including boundary nodes (rows/columns indexed by node).
[[nodiscard]] SparseMatrix assemble_full_mass(const FESpace& space, const QuadratureRule& quad);

/// Entry (i, j) = int (b . grad xi_j) xi_i.
[[nodiscard]] SparseMatrix assemble_advection_hjb(const FESpace& space, const TransportField& field);

/// Entry (i, j) = int xi_j b . grad xi_i, the transpose of the HJB advection.
[[nodiscard]] SparseMatrix assemble_advection_kfp(const FESpace& space, const TransportField& field);

/// load_i = int r xi_i + g . grad xi_i.
[[nodiscard]] Vector assemble_load(const FESpace& space, const SourceFunctional& source,
                                   const QuadratureRule& quad);

/// load_i = int f* xi_i with the running cost stored in the field.
[[nodiscard]] Vector assemble_cost_load(const FESpace& space, const TransportField& field);

/// (nu + gamma) K + B(field) + kappa M: the value-function operator linearised
/// at a fixed policy.
[[nodiscard]] SparseMatrix linearized_hjb_operator(const FESpace& space,
                                                   const std::vector<double>& gamma, double nu,
                                                   double kappa, const TransportField& field);

/// (nu + gamma) K + B(field)^T + kappa M.
[[nodiscard]] SparseMatrix kfp_operator(const FESpace& space, const std::vector<double>& gamma,
                                        double nu, double kappa, const TransportField& field);

/// Largest off-diagonal entry; <= 0 means the M-matrix sign pattern holds.
[[nodiscard]] double max_offdiagonal(const SparseMatrix& a);

} // namespace mfgpdi
