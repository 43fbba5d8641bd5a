#include <doctest.h>

#include <cmath>

#include "curvforge/error.hpp"
#include "curvforge/monotone.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace curvforge;
using Eigen::VectorXd;

namespace {

Errc error_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return Errc::io;
}

} // namespace

TEST_SUITE("monotone_solver")
{
    TEST_CASE("bm1 super-solution on the disk approaches the radial solution")
    {
        // −Δu₀ = 1, ∂νu₀ + u₀ = 1 on the unit disk: u₀ = (1 − r²)/4 + 3/2,
        // so C₀ = e^{−2·7/4} and, for σ ≡ 1, C₁ = e^{−3/2}.
        const auto m = fixtures::hex_disk(16);
        const auto ops = assemble(m.mesh, m.metric);
        const auto sup = bm1_supersolution(ops, ScalarField::constant(m.mesh, 1.0, FieldDomain::boundary), 1.0);
        CHECK(sup.C_interior == doctest::Approx(std::exp(-3.5)).epsilon(5e-3));
        CHECK(sup.C_boundary == doctest::Approx(std::exp(-1.5)).epsilon(5e-3));
    }

    TEST_CASE("bm2 super-solution on the disk matches the Bessel solution")
    {
        // −Δu₀ + u₀ = 1, ∂νu₀ = 1: u₀ = 1 + I₀(r)/I₁(1).
        const auto m = fixtures::hex_disk(16);
        const auto ops = assemble(m.mesh, m.metric);
        const auto sup = bm2_supersolution(ops, ScalarField::constant(m.mesh, 1.0, FieldDomain::boundary), 1.0);
        const double umax = 1.0 + std::cyl_bessel_i(0.0, 1.0) / std::cyl_bessel_i(1.0, 1.0);
        CHECK(sup.C_interior == doctest::Approx(std::exp(-2.0 * umax)).epsilon(2e-2));
        CHECK(sup.C_boundary == doctest::Approx(std::exp(-umax)).epsilon(1e-2));
    }

    TEST_CASE("super-solution data must be positive")
    {
        const auto m = fixtures::spherical_cap(4, 1.0);
        const auto ops = assemble(m.mesh, m.metric);
        BracketKnobs knobs;
        knobs.b = 0.0;
        const auto sigma = ScalarField::constant(m.mesh, 1.0, FieldDomain::boundary);
        CHECK(error_of([&] { (void)bm2_supersolution(ops, sigma, 2.0, knobs); }) == Errc::precondition);
    }

    TEST_CASE("bm2 threshold is infinite for nonpositive sigma")
    {
        const auto m = fixtures::spherical_cap(4, 1.0);
        const auto ops = assemble(m.mesh, m.metric);
        const auto sup = bm2_supersolution(ops, ScalarField::constant(m.mesh, -1.0, FieldDomain::boundary), 2.0);
        CHECK(std::isinf(sup.C_boundary));
        CHECK(sup.C_interior == doctest::Approx(std::exp(-2.0 * sup.u0.maxCoeff())));
    }

    TEST_CASE("bracket checker detects misordered and wrong-signed brackets")
    {
        const auto m = fixtures::hex_disk(4);
        const auto ops = assemble(m.mesh, m.metric);
        auto problem = SemilinearProblem::zero(m.mesh);
        problem.kappa = 1.0;
        problem.K = ScalarField::constant(m.mesh, -1.0);
        // Constants: r(c) = κBc + M e^{2c}, positive for c ≥ 0.
        Bracket wrong_sign{ScalarField::constant(m.mesh, -5.0), ScalarField::constant(m.mesh, 0.0), {}};
        CHECK(!check_bracket(ops, problem, wrong_sign).ok()); // r(−5) > 0 at interior vertices
        Bracket swapped{ScalarField::constant(m.mesh, 1.0), ScalarField::constant(m.mesh, 0.0), {}};
        const auto c = check_bracket(ops, problem, swapped);
        CHECK(!c.ordered);
        CHECK(!c.describe().empty());
        CHECK(error_of([&] { (void)iterate(ops, problem, swapped); }) == Errc::bracket);
    }

    TEST_CASE("iteration on a known constant solution")
    {
        // K = −1 at boundary vertices only and Bσ = M there make u ≡ 0 an
        // exact discrete solution.
        const auto m = fixtures::prism_cylinder(12, 3);
        const auto ops = assemble(m.mesh, m.metric);
        auto problem = SemilinearProblem::zero(m.mesh);
        VectorXd s = VectorXd::Zero(ops.size());
        for (int v : m.mesh.boundary_vertices()) s[v] = ops.interior_mass[v] / ops.boundary_mass[v];
        VectorXd K = VectorXd::Zero(ops.size());
        for (int v : m.mesh.boundary_vertices()) K[v] = -1.0;
        problem.K = ScalarField::from_values(K);
        problem.sigma = ScalarField::from_values(s, FieldDomain::boundary);
        CHECK(semilinear_residual(ops, problem, VectorXd::Zero(ops.size())).cwiseAbs().maxCoeff() < 1e-14);

        Bracket b{ScalarField::constant(m.mesh, -0.5), ScalarField::constant(m.mesh, 0.5), {}};
        REQUIRE(check_bracket(ops, problem, b).ok());
        const auto res = iterate(ops, problem, b);
        CHECK(res.trace.converged);
        CHECK(res.u.values.cwiseAbs().maxCoeff() < 1e-8);
        for (bool mono : res.trace.monotone) CHECK(mono);
    }

    TEST_CASE("chi = 0 bracket and Newton oracle agree on a perturbed annulus")
    {
        const auto m = fixtures::perturbed_annulus(10, 3);
        const auto ops = assemble(m.mesh, m.metric);
        VectorXd K = (-1.0 - 0.3 * fixtures::smooth_random_field(m.positions, 3, 1.0).array().abs()).matrix();
        const auto built = build_bracket_chi0(ops, ScalarField::from_values(K),
                                              ScalarField::constant(m.mesh, 1.0, FieldDomain::boundary));
        REQUIRE(check_bracket(ops, built.problem, built.bracket).ok());
        REQUIRE(built.bracket.thresholds.D.has_value());
        IterationConfig config;
        config.tol = 1e-12;
        const auto res = iterate(ops, built.problem, built.bracket, config);
        const auto dense = oracles::dense_assemble(m.mesh, m.metric);
        const VectorXd newton = oracles::damped_newton(dense, built.problem, built.bracket.u_plus.values);
        CHECK((newton - res.u.values).cwiseAbs().maxCoeff() < 1e-8);
    }

    TEST_CASE("nonconvergence after the iteration cap")
    {
        const auto m = fixtures::planar_annulus(10, 2);
        const auto ops = assemble(m.mesh, m.metric);
        const auto built = build_bracket_chi0(ops, ScalarField::constant(m.mesh, -1.0),
                                              ScalarField::constant(m.mesh, 1.0, FieldDomain::boundary));
        IterationConfig config;
        config.max_iters = 2;
        CHECK(error_of([&] { (void)iterate(ops, built.problem, built.bracket, config); }) == Errc::nonconvergence);
    }

    TEST_CASE("negative-K Neumann bracket")
    {
        const auto m = fixtures::hex_disk(6);
        const auto ops = assemble(m.mesh, m.metric);
        const auto built = build_bracket_neg_neumann(ops, ScalarField::constant(m.mesh, -1.0));
        CHECK(check_bracket(ops, built.problem, built.bracket).ok());
        CHECK(built.bracket.thresholds.kappa_tilde.has_value());
        const auto res = iterate(ops, built.problem, built.bracket);
        CHECK(res.trace.converged);
    }
}
