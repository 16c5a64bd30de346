#include <sstream>

#include <gtest/gtest.h>

#include "mfgpdi/errors.hpp"
#include "mfgpdi/problems.hpp"
#include "mfgpdi/reference_io.hpp"

using namespace mfgpdi;

namespace {

ReferenceSolution sample()
{
    ReferenceSolution r;
    r.experiment = "exp2";
    r.n = 4;
    r.nu = 1.0;
    r.kappa = 0.25;
    r.quadrature_degree = 4;
    r.tol_m = 1e-11;
    r.tol_u = 1e-11;
    r.tol_hjb = 1e-11;
    r.outer_iterations = 7;
    r.u = Vector::LinSpaced(9, -1.0 / 3.0, 2.0 / 7.0);
    r.m = Vector::LinSpaced(9, 0.1, 0.9).array().exp();
    return r;
}

} // namespace

TEST(ReferenceIo, RoundTripIsExact)
{
    const ReferenceSolution a = sample();
    std::stringstream ss;
    write_reference(ss, a);
    EXPECT_EQ(ss.str().rfind("mfgpdi-reference 1\n", 0), 0u);
    const ReferenceSolution b = read_reference(ss);
    EXPECT_EQ(b.experiment, a.experiment);
    EXPECT_EQ(b.n, a.n);
    EXPECT_EQ(b.kappa, a.kappa);
    EXPECT_EQ(b.tol_m, a.tol_m);
    EXPECT_EQ(b.outer_iterations, a.outer_iterations);
    EXPECT_EQ(b.u, a.u);
    EXPECT_EQ(b.m, a.m);
    std::stringstream again;
    write_reference(again, b);
    EXPECT_EQ(again.str(), ss.str());
}

TEST(ReferenceIo, RejectsMalformedInput)
{
    std::stringstream wrong_magic("something 1\n");
    EXPECT_THROW((void)read_reference(wrong_magic), InvalidArgument);
    std::stringstream wrong_version("mfgpdi-reference 99\n");
    EXPECT_THROW((void)read_reference(wrong_version), InvalidArgument);

    std::stringstream full;
    write_reference(full, sample());
    const std::string text = full.str();
    std::stringstream truncated(text.substr(0, text.size() - 30));
    EXPECT_THROW((void)read_reference(truncated), InvalidArgument);

    ReferenceSolution bad = sample();
    bad.n = 5;
    std::stringstream mismatch;
    write_reference(mismatch, bad);
    EXPECT_THROW((void)read_reference(mismatch), InvalidArgument);
    EXPECT_THROW((void)load_reference("/nonexistent/dir/ref.txt"), InvalidArgument);
}

TEST(ReferenceIo, RebuildsSolution)
{
    const ReferenceSolution r = sample();
    const MfgSolution s = reference_to_solution(r, EikonalHamiltonian{});
    EXPECT_EQ(s.u.space->mesh().subdivisions_per_side, 4);
    EXPECT_EQ(s.u.values, r.u);
    EXPECT_EQ(s.m.values, r.m);
    EXPECT_EQ(s.field.drift.size(), s.u.space->num_elements() * triangle_rule(4).size());
}
