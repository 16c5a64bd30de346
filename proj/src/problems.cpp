#include "mfgpdi/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfgpdi/errors.hpp"

namespace mfgpdi {

void ProblemData::validate() const
{
    if (!(nu > 0.0)) {
        throw InvalidArgument("nu must be positive");
    }
    if (!(kappa >= 0.0)) {
        throw InvalidArgument("kappa must be non-negative");
    }
    if (!hamiltonian || !coupling) {
        throw InvalidArgument("problem data needs a Hamiltonian and a coupling operator");
    }
}

double sign(double v)
{
    return static_cast<double>((v > 0.0) - (v < 0.0));
}

LocalCoupling::LocalCoupling(Nonlinearity g, ScalarField s, VectorField t)
    : g_(std::move(g)), s_(std::move(s)), t_(std::move(t))
{
    if (!g_) {
        throw InvalidArgument("LocalCoupling: nonlinearity is required");
    }
}

Vector LocalCoupling::load(const FESpace& space, const NodalFunction& m,
                           const QuadratureRule& quad) const
{
    if (m.values.size() != space.n_dofs()) {
        throw InvalidArgument("coupling load: density does not match the space");
    }
    Vector out = Vector::Zero(space.n_dofs());
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const ElementGeometry& geo = space.geometry(e);
        const auto dofs = space.element_dofs(e);
        std::array<double, 3> local{};
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const auto& l = quad.points[q];
            const Point x = space.map_point(e, l);
            const double scalar = g_(m.value(e, l)) + (s_ ? s_(x) : 0.0);
            const Vec2 flux = t_ ? t_(x) : Vec2::Zero();
            if (!std::isfinite(scalar) || !std::isfinite(flux.x()) || !std::isfinite(flux.y())) {
                throw NonFiniteValue("coupling load: non-finite integrand on element " +
                                     std::to_string(e));
            }
            for (std::size_t a = 0; a < 3; ++a) {
                local[a] += quad.weights[q] * (scalar * l[a] + flux.dot(geo.basis_gradients[a]));
            }
        }
        for (std::size_t a = 0; a < 3; ++a) {
            if (dofs[a] >= 0) {
                out[dofs[a]] += geo.area * local[a];
            }
        }
    }
    return out;
}

namespace experiment1 {

double exact_u(const Point& p)
{
    return p.x() * p.y() * std::log(p.x()) * std::log(p.y());
}

Vec2 exact_grad_u(const Point& p)
{
    const double x = p.x();
    const double y = p.y();
    return {(1.0 + std::log(x)) * y * std::log(y), (1.0 + std::log(y)) * x * std::log(x)};
}

double exact_m(const Point& p)
{
    return p.x() * p.y() * (1.0 - p.x()) * (1.0 - p.y());
}

Vec2 exact_grad_m(const Point& p)
{
    const double x = p.x();
    const double y = p.y();
    return {y * (1.0 - y) * (1.0 - 2.0 * x), x * (1.0 - x) * (1.0 - 2.0 * y)};
}

Vec2 exact_drift(const Point& p)
{
    const Vec2 t = exact_grad_u(p);
    const double norm = t.norm();
    return norm > 0.0 ? Vec2(t / norm) : Vec2::Zero();
}

double h(const Point& p)
{
    return exact_grad_u(p).norm() - std::tanh(exact_m(p));
}

double r(const Point& p)
{
    return 2.0 * (p.x() * (1.0 - p.x()) + p.y() * (1.0 - p.y()));
}

Vec2 g(const Point& p)
{
    return exact_m(p) * exact_drift(p);
}

ProblemData problem()
{
    ProblemData data;
    data.nu = 1.0;
    data.kappa = 0.0;
    data.hamiltonian = std::make_shared<EikonalHamiltonian>();
    data.coupling = std::make_shared<LocalCoupling>([](double m) { return std::tanh(m); }, &h,
                                                    &exact_grad_u);
    data.source = SourceFunctional{&r, &g};
    return data;
}

} // namespace experiment1

namespace experiment2 {

namespace {

double coupling_argument(const Point& p)
{
    return (p.x() - 0.5) * std::cos(8.0 * std::numbers::pi * p.y());
}

double source_argument(const Point& p)
{
    return std::sin(4.0 * std::numbers::pi * p.x()) * std::sin(4.0 * std::numbers::pi * p.y());
}

} // namespace

double coupling_source(const Point& p)
{
    return 2.0 * sign(coupling_argument(p));
}

double r(const Point& p)
{
    return 0.5 * (sign(source_argument(p)) + 1.0);
}

Vec2 c(const Point& p)
{
    if (p.x() > 0.0 && p.x() < 2.0 / 3.0) {
        return {p.y(), 0.0};
    }
    return {-p.y() * p.y(), 0.0};
}

ProblemData problem()
{
    ProblemData data;
    data.nu = 1.0;
    data.kappa = 0.0;
    data.hamiltonian = std::make_shared<EikonalHamiltonian>();
    data.coupling = std::make_shared<LocalCoupling>([](double m) { return std::atan(m); },
                                                    &coupling_source, VectorField{});
    data.source = SourceFunctional{&r, &c};
    return data;
}

std::size_t sign_zero_hits(const FESpace& space, const QuadratureRule& quad)
{
    std::size_t hits = 0;
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        for (const auto& l : quad.points) {
            const Point x = space.map_point(e, l);
            if (coupling_argument(x) == 0.0 || source_argument(x) == 0.0) {
                ++hits;
            }
        }
    }
    return hits;
}

} // namespace experiment2

ProblemData custom_problem(const CustomProblemSpec& spec)
{
    ProblemData data;
    data.nu = spec.nu;
    data.kappa = spec.kappa;
    if (spec.hamiltonian == "eikonal") {
        data.hamiltonian = std::make_shared<EikonalHamiltonian>();
    } else if (spec.hamiltonian == "finite") {
        if (spec.num_controls < 1) {
            throw InvalidArgument("custom.num_controls must be >= 1");
        }
        std::vector<Vec2> controls;
        for (int k = 0; k < spec.num_controls; ++k) {
            const double angle = 2.0 * std::numbers::pi * k / spec.num_controls;
            controls.emplace_back(std::cos(angle), std::sin(angle));
        }
        data.hamiltonian =
            std::make_shared<FiniteControlHamiltonian>(FiniteControlHamiltonian::linear(controls));
    } else {
        throw InvalidArgument("custom.hamiltonian must be \"eikonal\" or \"finite\"");
    }
    const double cc = spec.coupling_constant;
    const double sc = spec.source_constant;
    data.coupling = std::make_shared<LocalCoupling>([](double m) { return std::tanh(m); },
                                                    [cc](const Point&) { return cc; },
                                                    VectorField{});
    data.source = SourceFunctional{[sc](const Point&) { return sc; }, VectorField{}};
    return data;
}

ErrorBundle exact_errors_experiment1(const MfgSolution& sol, const QuadratureRule& quad)
{
    ErrorBundle out;
    out.u_h1_rel =
        error_norms(sol.u, &experiment1::exact_u, &experiment1::exact_grad_u, quad).h1_rel;
    const ErrorNorms m_err =
        error_norms(sol.m, &experiment1::exact_m, &experiment1::exact_grad_m, quad);
    out.m_l2_rel = m_err.l2_rel;
    out.m_h1_rel = m_err.h1_rel;

    const FESpace& space = *sol.u.space;
    const QuadratureRule& fq = sol.field.quad;
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        double le = 0.0;
        double lr = 0.0;
        for (std::size_t q = 0; q < fq.size(); ++q) {
            const Vec2 exact = experiment1::exact_drift(space.map_point(e, fq.points[q]));
            le += fq.weights[q] * (sol.field.drift_at(e, q) - exact).squaredNorm();
            lr += fq.weights[q] * exact.squaredNorm();
        }
        err += space.geometry(e).area * le;
        ref += space.geometry(e).area * lr;
    }
    out.drift_l2_rel = std::sqrt(err / ref);
    return out;
}

namespace {

struct CoarseLocation {
    std::size_t element;
    std::array<double, 3> bary;
};

// Element of a uniform n x n mesh containing p (grid-cell arithmetic).
CoarseLocation locate_uniform(int n, const Point& p)
{
    const double sx = p.x() * n;
    const double sy = p.y() * n;
    const int i = std::clamp(static_cast<int>(std::floor(sx)), 0, n - 1);
    const int j = std::clamp(static_cast<int>(std::floor(sy)), 0, n - 1);
    const double lx = sx - i;
    const double ly = sy - j;
    const auto cell = static_cast<std::size_t>(2 * (j * n + i));
    if (lx >= ly) {
        return {cell, {1.0 - lx, lx - ly, ly}};
    }
    return {cell + 1, {1.0 - ly, lx, ly - lx}};
}

void check_nested(const Mesh& coarse, const Mesh& fine)
{
    if (!coarse.uniform_square || !fine.uniform_square) {
        throw InvalidArgument("reference comparison requires uniform unit-square meshes");
    }
    if (fine.subdivisions_per_side % coarse.subdivisions_per_side != 0) {
        throw InvalidArgument("meshes are not nested: " +
                              std::to_string(coarse.subdivisions_per_side) + " does not divide " +
                              std::to_string(fine.subdivisions_per_side));
    }
}

} // namespace

NodalFunction prolongate(const NodalFunction& coarse, const std::shared_ptr<const FESpace>& fine)
{
    const Mesh& cm = coarse.space->mesh();
    const Mesh& fm = fine->mesh();
    check_nested(cm, fm);
    NodalFunction out = NodalFunction::zero(fine);
    const auto& nodes = fine->interior_nodes();
    for (std::size_t d = 0; d < nodes.size(); ++d) {
        const CoarseLocation loc =
            locate_uniform(cm.subdivisions_per_side, fm.nodes[static_cast<std::size_t>(nodes[d])]);
        out.values[static_cast<Eigen::Index>(d)] = coarse.value(loc.element, loc.bary);
    }
    return out;
}

ErrorBundle reference_errors(const ControlHamiltonian& h, const MfgSolution& sol,
                             const MfgSolution& ref, const QuadratureRule& quad)
{
    const auto& fine = ref.u.space;
    const Mesh& cm = sol.u.space->mesh();
    check_nested(cm, fine->mesh());
    const NodalFunction u_inj = prolongate(sol.u, fine);
    const NodalFunction m_inj = prolongate(sol.m, fine);
    const NodalFunction du{fine, u_inj.values - ref.u.values};
    const NodalFunction dm{fine, m_inj.values - ref.m.values};

    ErrorBundle out;
    out.u_h1_rel = h1_norm(du, quad) / h1_norm(ref.u, quad);
    out.m_l2_rel = l2_norm(dm, quad) / l2_norm(ref.m, quad);
    out.m_h1_rel = h1_norm(dm, quad) / h1_norm(ref.m, quad);

    const QuadratureRule& fq = ref.field.quad;
    const int n = cm.subdivisions_per_side;
    double err = 0.0;
    double nrm = 0.0;
    for (std::size_t e = 0; e < fine->num_elements(); ++e) {
        const Point centroid = fine->map_point(e, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        const Vec2 coarse_grad = element_gradient(sol.u, locate_uniform(n, centroid).element);
        double le = 0.0;
        double ln = 0.0;
        for (std::size_t q = 0; q < fq.size(); ++q) {
            const Vec2 b = h.select(fine->map_point(e, fq.points[q]), coarse_grad).drift;
            const Vec2& b_ref = ref.field.drift_at(e, q);
            le += fq.weights[q] * (b - b_ref).squaredNorm();
            ln += fq.weights[q] * b_ref.squaredNorm();
        }
        err += fine->geometry(e).area * le;
        nrm += fine->geometry(e).area * ln;
    }
    out.drift_l2_rel = nrm > 0.0 ? std::sqrt(err / nrm) : std::sqrt(err);
    return out;
}

double observed_rate(double h_coarse, double e_coarse, double h_fine, double e_fine)
{
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

} // namespace mfgpdi
