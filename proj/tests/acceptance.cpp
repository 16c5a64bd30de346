// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mfgpdi/assembly.hpp"
#include "mfgpdi/hamiltonian.hpp"
#include "mfgpdi/mfg_driver.hpp"
#include "mfgpdi/problems.hpp"
#include "mfgpdi/reference_io.hpp"
#include "support.hpp"

using namespace mfgpdi;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += (ok ? "" : "!") + what;
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

const QuadratureRule& quad()
{
    static const QuadratureRule q = triangle_rule(4);
    return q;
}

MfgSolution solve_level(const ProblemData& data, int n, const MfgConfig& cfg = {},
                        const std::optional<NodalFunction>& m0 = std::nullopt)
{
    const auto space = make_space(uniform_unit_square_mesh(n));
    return solve_mfg(data, space, StabilizationParams{}, cfg, m0 ? std::optional<NodalFunction>(NodalFunction{space, m0->values}) : std::nullopt);
}

struct Exp1Level {
    int n;
    ErrorBundle err;
};

std::vector<Exp1Level> g_exp1;

const std::vector<Exp1Level>& exp1_levels()
{
    if (g_exp1.empty()) {
        const ProblemData data = experiment1::problem();
        for (int n : {32, 64, 128}) {
            g_exp1.push_back({n, exact_errors_experiment1(solve_level(data, n), quad())});
        }
    }
    return g_exp1;
}

Verdict criterion1()
{
    const ErrorBundle e = exp1_levels().front().err;
    Verdict v;
    v.require(within(e.u_h1_rel, 0.1852, 0.25), "u_h1 " + fmt("%.4g", e.u_h1_rel) + " vs 0.1852");
    v.require(within(e.m_l2_rel, 0.003613, 0.25), "m_l2 " + fmt("%.4g", e.m_l2_rel) + " vs 0.003613");
    v.require(within(e.m_h1_rel, 0.04978, 0.25), "m_h1 " + fmt("%.4g", e.m_h1_rel) + " vs 0.04978");
    v.require(within(e.drift_l2_rel, 0.07990, 0.25), "drift " + fmt("%.4g", e.drift_l2_rel) + " vs 0.07990");
    return v;
}

double level_rate(const Exp1Level& a, const Exp1Level& b, double ErrorBundle::*f)
{
    return observed_rate(std::sqrt(2.0) / a.n, a.err.*f, std::sqrt(2.0) / b.n, b.err.*f);
}

Verdict criterion2()
{
    const auto& lv = exp1_levels();
    Verdict v;
    for (std::size_t i = 1; i < lv.size(); ++i) {
        const std::string tag = std::to_string(lv[i - 1].n) + "->" + std::to_string(lv[i].n) + " ";
        const double ru = level_rate(lv[i - 1], lv[i], &ErrorBundle::u_h1_rel);
        const double rm1 = level_rate(lv[i - 1], lv[i], &ErrorBundle::m_h1_rel);
        const double rm0 = level_rate(lv[i - 1], lv[i], &ErrorBundle::m_l2_rel);
        v.require(ru >= 0.4 && ru <= 0.65, tag + "u_h1 " + fmt("%.3f", ru));
        v.require(rm1 >= 0.85 && rm1 <= 1.15, tag + "m_h1 " + fmt("%.3f", rm1));
        v.require(rm0 >= 1.4, tag + "m_l2 " + fmt("%.3f", rm0));
    }
    return v;
}

constexpr int reference_n = 512;
constexpr double reference_tol = 1e-11;

MfgSolution exp2_reference(const std::filesystem::path& cache_dir, const ProblemData& data, double& min_m)
{
    const auto path = cache_dir / ("reference_exp2_n" + std::to_string(reference_n) + ".txt");
    if (std::filesystem::exists(path)) {
        try {
            const ReferenceSolution ref = load_reference(path.string());
            if (ref.experiment == "exp2" && ref.n == reference_n && ref.tol_m <= reference_tol &&
                ref.quadrature_degree == quad().degree) {
                min_m = ref.m.minCoeff();
                std::printf("  (loaded cached reference %s)\n", path.string().c_str());
                return reference_to_solution(ref, *data.hamiltonian);
            }
        } catch (const Error&) {
            // stale or damaged cache; recompute
        }
    }
    std::printf("  (computing n=%d reference, this takes a few minutes)\n", reference_n);
    std::fflush(stdout);
    MfgConfig cfg;
    cfg.tol_m = cfg.tol_u = reference_tol;
    cfg.hjb.tol_increment = cfg.hjb.tol_residual = reference_tol;
    const auto space = make_space(uniform_unit_square_mesh(reference_n));
    MfgSolution sol = solve_mfg(data, space, StabilizationParams{}, cfg);
    ReferenceSolution ref;
    ref.experiment = "exp2";
    ref.n = reference_n;
    ref.nu = data.nu;
    ref.kappa = data.kappa;
    ref.quadrature_degree = quad().degree;
    ref.tol_m = cfg.tol_m;
    ref.tol_u = cfg.tol_u;
    ref.tol_hjb = cfg.hjb.tol_residual;
    ref.outer_iterations = sol.outer_iterations;
    ref.u = sol.u.values;
    ref.m = sol.m.values;
    std::filesystem::create_directories(cache_dir);
    save_reference(path.string(), ref);
    min_m = sol.diagnostics.min_nodal_m;
    return sol;
}

struct Exp2Run {
    std::vector<int> n;
    std::vector<ErrorBundle> err;
    std::vector<double> min_m;
    double ref_min_m = 0.0;
};

Exp2Run g_exp2;

const Exp2Run& exp2_run(const std::filesystem::path& cache_dir)
{
    if (g_exp2.n.empty()) {
        const ProblemData data = experiment2::problem();
        const MfgSolution ref = exp2_reference(cache_dir, data, g_exp2.ref_min_m);
        for (int n : {32, 64, 128}) {
            const MfgSolution s = solve_level(data, n);
            g_exp2.n.push_back(n);
            g_exp2.err.push_back(reference_errors(*data.hamiltonian, s, ref, quad()));
            g_exp2.min_m.push_back(s.diagnostics.min_nodal_m);
        }
    }
    return g_exp2;
}

Verdict criterion3(const std::filesystem::path& cache_dir)
{
    const Exp2Run& r = exp2_run(cache_dir);
    Verdict v;
    for (std::size_t i = 1; i < r.n.size(); ++i) {
        const double h0 = std::sqrt(2.0) / r.n[i - 1], h1 = std::sqrt(2.0) / r.n[i];
        const std::string tag = std::to_string(r.n[i - 1]) + "->" + std::to_string(r.n[i]) + " ";
        const double ru = observed_rate(h0, r.err[i - 1].u_h1_rel, h1, r.err[i].u_h1_rel);
        const double rm = observed_rate(h0, r.err[i - 1].m_h1_rel, h1, r.err[i].m_h1_rel);
        v.require(ru >= 0.85 && ru <= 1.15, tag + "u_h1 " + fmt("%.3f", ru));
        v.require(rm >= 0.35 && rm <= 0.65, tag + "m_h1 " + fmt("%.3f", rm));
    }
    return v;
}

TransportField random_field(const FESpace& space, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TransportField f = constant_field(space, Vec2::Zero(), quad());
    for (auto& d : f.drift) {
        d = Vec2(u(rng), u(rng));
        if (d.norm() > 1.0) {
            d.normalize();
        }
    }
    return f;
}

Verdict criterion4(const std::filesystem::path& cache_dir)
{
    const Exp2Run& r = exp2_run(cache_dir);
    Verdict v;
    for (std::size_t i = 0; i < r.n.size(); ++i) {
        v.require(r.min_m[i] >= -1e-10, "n=" + std::to_string(r.n[i]) + " min m " + fmt("%.3g", r.min_m[i]));
    }
    v.require(r.ref_min_m >= -1e-10, "n=512 min m " + fmt("%.3g", r.ref_min_m));

    const Mesh mesh = equilateral_rhombus_mesh(16);
    const AcutenessReport report = acuteness_report(mesh);
    v.require(report.classification == Acuteness::strictly_acute, "rhombus mesh " + to_string(report.classification));
    StabilizationParams p;
    p.mode = StabilizationMode::formula;
    p.theta = report.theta;
    const auto space = make_space(mesh);
    std::mt19937 rng(41);
    double worst = -INFINITY;
    for (double nu : {1e-4, 1e-2, 1.0}) {
        for (double kappa : {0.0, 2.0}) {
            const ArtificialDiffusion ad = artificial_diffusion(mesh, p, 1.0, kappa, nu);
            for (int k = 0; k < 5; ++k) {
                worst = std::max(worst, max_offdiagonal(linearized_hjb_operator(*space, ad.gamma, nu, kappa,
                                                                                 random_field(*space, rng))));
            }
        }
    }
    v.require(worst <= 1e-12, "acute max offdiag " + fmt("%.3g", worst));
    return v;
}

Verdict criterion5()
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::normal_distribution<double> np(0.0, 3.0);
    std::vector<Vec2> circle;
    for (int k = 0; k < 9; ++k) {
        circle.emplace_back(std::cos(2 * std::numbers::pi * k / 9), std::sin(2 * std::numbers::pi * k / 9));
    }
    const EikonalHamiltonian eik;
    const auto lin = FiniteControlHamiltonian::linear(circle);
    const FiniteControlHamiltonian xdep(
        circle, [](const Point& x, const Vec2& a) { return (0.25 + 0.75 * x.y()) * a; },
        [](const Point& x, const Vec2& a) { return a.x() * std::cos(5.0 * x.x()); }, 1.0, 1.0);
    const std::vector<std::pair<std::string, const ControlHamiltonian*>> hs{
        {"eikonal", &eik}, {"finite", &lin}, {"finite-x", &xdep}};
    Verdict v;
    double eik_dev = 0.0;
    for (const auto& [name, h] : hs) {
        int failures = 0;
        for (int k = 0; k < 1000; ++k) {
            const Point x(ux(rng), ux(rng));
            const Vec2 p(np(rng), np(rng));
            std::vector<Vec2> probes;
            for (int j = 0; j < 64; ++j) {
                probes.emplace_back(np(rng), np(rng));
            }
            const SubgradientChoice c = h->select(x, p);
            if (!verify_subgradient(*h, x, p, c, probes)) {
                ++failures;
            }
            if (h == &eik) {
                eik_dev = std::max(eik_dev, (c.drift - p / p.norm()).cwiseAbs().maxCoeff());
            }
        }
        v.require(failures == 0, name + " failures " + std::to_string(failures) + "/1000");
    }
    v.require(eik_dev <= 1e-14, "eikonal |drift - p/|p|| " + fmt("%.2g", eik_dev));
    return v;
}

Verdict criterion6()
{
    std::mt19937 rng(6);
    const auto space = make_space(uniform_unit_square_mesh(16));
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const TransportField f = random_field(*space, rng);
        const Eigen::MatrixXd d = assemble_advection_kfp(*space, f).to_dense() -
                                  assemble_advection_hjb(*space, f).to_dense().transpose();
        worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
    Verdict v;
    v.require(worst == 0.0, "20 fields, max |B_kfp - B_hjb^T| " + fmt("%.3g", worst));
    return v;
}

Verdict criterion7()
{
    const ProblemData data = experiment1::problem();
    const auto space = make_space(uniform_unit_square_mesh(32));
    const MfgSolution a = solve_mfg(data, space, StabilizationParams{}, MfgConfig{}, NodalFunction::zero(space));
    const MfgSolution b = solve_mfg(data, space, StabilizationParams{}, MfgConfig{},
                                    interpolate(space, [](const Point&) { return 1.0; }));
    const double du = l2_norm(NodalFunction{space, a.u.values - b.u.values}, quad());
    const double dm = l2_norm(NodalFunction{space, a.m.values - b.m.values}, quad());
    const MonotonicityDiagnostic md = monotonicity_diagnostic(data, a, b);
    Verdict v;
    v.require(dm <= 1e-7, "|m1-m2|_L2 " + fmt("%.2g", dm));
    v.require(du <= 1e-7, "|u1-u2|_L2 " + fmt("%.2g", du));
    v.require(md.lambda12_max <= 1e-10, "lambda12 " + fmt("%.2g", md.lambda12_max));
    v.require(md.lambda21_max <= 1e-10, "lambda21 " + fmt("%.2g", md.lambda21_max));
    return v;
}

Verdict criterion8()
{
    ProblemData data;
    data.hamiltonian = std::make_shared<EikonalHamiltonian>();
    data.coupling = std::make_shared<LocalCoupling>([](double) { return 0.0; },
                                                    [](const Point&) { return 0.0; }, VectorField{});
    data.source = SourceFunctional{experiment1::r, {}};
    const auto space = make_space(uniform_unit_square_mesh(8));
    const std::vector<double> gamma(space->num_elements(), 0.0);
    const NodalFunction m = solve_kfp(data, space, gamma, constant_field(*space, Vec2::Zero(), quad()), quad());
    const Vector oracle = oracle::dense_solve(assemble_diffusion(*space, std::vector<double>(gamma.size(), 1.0)).to_dense(),
                                               assemble_load(*space, data.source, quad()));
    const auto err = [&](const Vector& values) {
        return error_norms(NodalFunction{space, values}, experiment1::exact_m, experiment1::exact_grad_m, quad()).l2_abs;
    };
    const double e_fem = err(m.values);
    const double e_oracle = err(oracle);
    Verdict v;
    v.require(std::abs(e_fem - e_oracle) <= 1e-10,
              "L2 error " + fmt("%.12g", e_fem) + " vs oracle " + fmt("%.12g", e_oracle));
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    std::filesystem::path cache_dir = std::filesystem::current_path();
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cache-dir") {
            cache_dir = argv[i + 1];
        }
    }
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"1 experiment 1 errors at n=32", criterion1},
        {"2 experiment 1 rates", criterion2},
        {"3 experiment 2 rates vs n=512 reference", [&] { return criterion3(cache_dir); }},
        {"4 discrete maximum principle", [&] { return criterion4(cache_dir); }},
        {"5 subgradient selection", criterion5},
        {"6 KFP advection is the HJB transpose", criterion6},
        {"7 uniqueness from two initial densities", criterion7},
        {"8 Poisson limit vs dense oracle", criterion8},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
