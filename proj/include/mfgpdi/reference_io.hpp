#pragma once

#include <iosfwd>
#include <string>

#include "mfgpdi/mfg_driver.hpp"

namespace mfgpdi {

/// Persisted fine-mesh solution used as the yardstick for problems without a
/// closed-form solution.
///
/// Text container, first line `mfgpdi-reference <version>`, then `key value`
/// metadata lines, then `u` and `m` blocks with one interior nodal value per
/// line (17 significant digits).
struct ReferenceSolution {
    static constexpr int format_version = 1;

    std::string experiment;
    int n = 0;  // subdivisions per side of the uniform unit-square mesh
    double nu = 1.0;
    double kappa = 0.0;
    int quadrature_degree = 4;
    double tol_m = 0.0;
    double tol_u = 0.0;
    double tol_hjb = 0.0;
    int outer_iterations = 0;
    Vector u;
    Vector m;
};

void write_reference(std::ostream& os, const ReferenceSolution& ref);
[[nodiscard]] ReferenceSolution read_reference(std::istream& is);

void save_reference(const std::string& path, const ReferenceSolution& ref);
[[nodiscard]] ReferenceSolution load_reference(const std::string& path);

/// Rebuilds the solution on its mesh; the transport field is re-selected from u.
[[nodiscard]] MfgSolution reference_to_solution(const ReferenceSolution& ref,
                                                const ControlHamiltonian& h);

} // namespace mfgpdi
