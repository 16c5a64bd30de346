#include "mfgpdi/reference_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mfgpdi/errors.hpp"

namespace mfgpdi {

namespace {

void write_block(std::ostream& os, const char* name, const Vector& v)
{
    os << name << ' ' << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        os << v[i] << '\n';
    }
}

Vector read_block(std::istream& is, const std::string& name)
{
    std::string tag;
    Eigen::Index size = 0;
    if (!(is >> tag >> size) || tag != name || size < 0) {
        throw InvalidArgument("reference file: expected block '" + name + "'");
    }
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        if (!(is >> v[i])) {
            throw InvalidArgument("reference file: truncated block '" + name + "'");
        }
    }
    return v;
}

} // namespace

void write_reference(std::ostream& os, const ReferenceSolution& ref)
{
    const auto old_precision = os.precision(17);
    os << "mfgpdi-reference " << ReferenceSolution::format_version << '\n';
    os << "experiment " << ref.experiment << '\n';
    os << "n " << ref.n << '\n';
    os << "nu " << ref.nu << '\n';
    os << "kappa " << ref.kappa << '\n';
    os << "quadrature_degree " << ref.quadrature_degree << '\n';
    os << "tol_m " << ref.tol_m << '\n';
    os << "tol_u " << ref.tol_u << '\n';
    os << "tol_hjb " << ref.tol_hjb << '\n';
    os << "outer_iterations " << ref.outer_iterations << '\n';
    write_block(os, "u", ref.u);
    write_block(os, "m", ref.m);
    os.precision(old_precision);
}

ReferenceSolution read_reference(std::istream& is)
{
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "mfgpdi-reference") {
        throw InvalidArgument("reference file: missing 'mfgpdi-reference' header");
    }
    if (version != ReferenceSolution::format_version) {
        throw InvalidArgument("reference file: unsupported format version " +
                              std::to_string(version));
    }
    ReferenceSolution ref;
    auto expect = [&is](const char* key, auto& value) {
        std::string k;
        if (!(is >> k >> value) || k != key) {
            throw InvalidArgument(std::string("reference file: expected key '") + key + "'");
        }
    };
    expect("experiment", ref.experiment);
    expect("n", ref.n);
    expect("nu", ref.nu);
    expect("kappa", ref.kappa);
    expect("quadrature_degree", ref.quadrature_degree);
    expect("tol_m", ref.tol_m);
    expect("tol_u", ref.tol_u);
    expect("tol_hjb", ref.tol_hjb);
    expect("outer_iterations", ref.outer_iterations);
    ref.u = read_block(is, "u");
    ref.m = read_block(is, "m");
    const Eigen::Index expected = static_cast<Eigen::Index>(ref.n - 1) * (ref.n - 1);
    if (ref.n < 1 || ref.u.size() != expected || ref.m.size() != expected) {
        throw InvalidArgument("reference file: nodal vectors do not match n = " +
                              std::to_string(ref.n));
    }
    return ref;
}

void save_reference(const std::string& path, const ReferenceSolution& ref)
{
    std::ofstream os(path);
    if (!os) {
        throw InvalidArgument("cannot open '" + path + "' for writing");
    }
    write_reference(os, ref);
    if (!os) {
        throw InvalidArgument("failed writing '" + path + "'");
    }
}

ReferenceSolution load_reference(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw InvalidArgument("cannot open reference file '" + path + "'");
    }
    return read_reference(is);
}

MfgSolution reference_to_solution(const ReferenceSolution& ref, const ControlHamiltonian& h)
{
    auto space = make_space(uniform_unit_square_mesh(ref.n));
    MfgSolution sol;
    sol.u = NodalFunction{space, ref.u};
    sol.m = NodalFunction{space, ref.m};
    sol.gamma.assign(space->num_elements(), 0.0);
    sol.field = select_transport_field(h, sol.u, triangle_rule(ref.quadrature_degree));
    sol.outer_iterations = ref.outer_iterations;
    return sol;
}

} // namespace mfgpdi
