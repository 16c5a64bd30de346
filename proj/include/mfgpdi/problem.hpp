#pragma once

#include <memory>

#include "mfgpdi/fespace.hpp"
#include "mfgpdi/hamiltonian.hpp"

namespace mfgpdi {

/// Right-hand side F[m] of the value-function equation, tested against every
/// interior basis function.
///
/// The theory asks for F Lipschitz from L2 to H^-1 with linear growth
/// (constants c1, c2); nothing here enforces those bounds.
class CouplingOperator {
public:
    virtual ~CouplingOperator() = default;

    /// Entry i is <F[m], xi_i> for the i-th interior basis function.
    [[nodiscard]] virtual Vector load(const FESpace& space, const NodalFunction& m,
                                      const QuadratureRule& quad) const = 0;
};

/// <G, phi> = int r phi + g . grad phi. Either part may be left empty (zero).
struct SourceFunctional {
    ScalarField r;
    VectorField g;
};

struct ProblemData {
    double nu = 1.0;
    double kappa = 0.0;
    std::shared_ptr<const ControlHamiltonian> hamiltonian;
    std::shared_ptr<const CouplingOperator> coupling;
    SourceFunctional source;

    /// Throws InvalidArgument unless nu > 0, kappa >= 0 and both operators are set.
    void validate() const;
};

} // namespace mfgpdi
