#include <doctest.h>

#include <cmath>
#include <numbers>

#include "curvforge/error.hpp"
#include "curvforge/surface_mesh.hpp"
#include "fixtures.hpp"

using namespace curvforge;
using std::numbers::pi;

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

TEST_SUITE("surface_mesh")
{
    TEST_CASE("single triangle connectivity and angles")
    {
        const auto m = fixtures::single_triangle();
        CHECK(m.mesh.vertex_count() == 3);
        CHECK(m.mesh.edge_count() == 3);
        CHECK(m.mesh.boundary_loops().size() == 1);
        CHECK(m.mesh.interior_vertices().empty());
        CHECK(euler_characteristic(m.mesh) == 1);

        const auto curv = discrete_curvatures(m.mesh, m.metric);
        // Equilateral: each corner turns by π − π/3.
        for (int v = 0; v < 3; ++v) CHECK(curv.boundary_turning[v] == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-14));
        CHECK(curv.dual_area.sum() == doctest::Approx(std::sqrt(3.0) / 4.0).epsilon(1e-14));
        CHECK(curv.boundary_dual_length.sum() == doctest::Approx(3.0).epsilon(1e-14));
    }

    TEST_CASE("boundary loops keep the surface on the left")
    {
        const auto m = fixtures::planar_annulus(12, 3);
        REQUIRE(m.mesh.boundary_loops().size() == 2);
        // Signed area swept by each loop: outer positive, inner negative.
        int positive = 0, negative = 0;
        for (const auto& loop : m.mesh.boundary_loops()) {
            double area = 0.0;
            for (std::size_t i = 0; i < loop.size(); ++i) {
                const auto& p = m.positions[loop[i]];
                const auto& q = m.positions[loop[(i + 1) % loop.size()]];
                area += p[0] * q[1] - q[0] * p[1];
            }
            (area > 0 ? positive : negative) += 1;
            for (std::size_t i = 0; i < loop.size(); ++i)
                CHECK(m.mesh.boundary_next(loop[i]) == loop[(i + 1) % loop.size()]);
        }
        CHECK(positive == 1);
        CHECK(negative == 1);
    }

    TEST_CASE("euler characteristic of the fixtures")
    {
        CHECK(euler_characteristic(fixtures::hex_disk(4).mesh) == 1);
        CHECK(euler_characteristic(fixtures::planar_annulus(12, 3).mesh) == 0);
        CHECK(euler_characteristic(fixtures::prism_cylinder(12, 3).mesh) == 0);
        const auto pants = fixtures::pair_of_pants(2);
        CHECK(euler_characteristic(pants.mesh) == -1);
        CHECK(pants.mesh.boundary_loops().size() == 3);
        CHECK(euler_characteristic(fixtures::spherical_cap(4, 1.0).mesh) == 1);
    }

    TEST_CASE("triangles are reoriented consistently")
    {
        const std::vector<Vec3> pos{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
        auto m = build_mesh(pos, {{0, 1, 2}, {0, 3, 2}});
        CHECK(m.mesh.was_reoriented());
        CHECK(euler_characteristic(m.mesh) == 1);
    }

    TEST_CASE("invalid complexes are rejected")
    {
        CHECK(error_of([] { (void)SurfaceMesh::from_triangles(5, {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}); }) ==
              Errc::non_manifold);
        // Two fans meeting at vertex 0.
        CHECK(error_of([] { (void)SurfaceMesh::from_triangles(5, {{0, 1, 2}, {0, 3, 4}}); }) == Errc::non_manifold);
    }

    TEST_CASE("disconnected and non-orientable surfaces")
    {
        CHECK(error_of([] { (void)SurfaceMesh::from_triangles(6, {{0, 1, 2}, {3, 4, 5}}); }) == Errc::disconnected);

        // Möbius strip from a 3×1 band with the ends glued with a flip.
        std::vector<Triangle> tris;
        const int n = 6;
        auto top = [&](int i) { return i % n; };
        auto bottom = [&](int i) { return n + i % n; };
        for (int i = 0; i < n - 1; ++i) {
            tris.push_back({top(i), top(i + 1), bottom(i + 1)});
            tris.push_back({top(i), bottom(i + 1), bottom(i)});
        }
        tris.push_back({top(n - 1), bottom(0), top(0)});
        tris.push_back({top(n - 1), top(0), bottom(n - 1)});
        CHECK(error_of([&] { (void)SurfaceMesh::from_triangles(2 * n, tris); }) == Errc::non_orientable);
    }

    TEST_CASE("metric validation")
    {
        const auto m = fixtures::single_triangle();
        CHECK(error_of([&] { (void)IntrinsicMetric::from_lengths(m.mesh, {1.0, 1.0, 2.0}); }) ==
              Errc::triangle_inequality);
        CHECK(error_of([&] { (void)IntrinsicMetric::from_lengths(m.mesh, {1.0, -1.0, 1.0}); }) ==
              Errc::triangle_inequality);
        CHECK(error_of([&] { (void)IntrinsicMetric::from_lengths(m.mesh, {1.0, 1.0}); }) == Errc::invalid_field);
        CHECK(error_of([] { (void)build_mesh({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}); }) ==
              Errc::degenerate_triangle);
    }

    TEST_CASE("triangle geometry matches the law of cosines")
    {
        const auto g = triangle_geometry({3.0, 4.0, 5.0});
        CHECK(g.angles[2] == doctest::Approx(pi / 2).epsilon(1e-14));
        CHECK(g.angles[0] == doctest::Approx(std::acos(4.0 / 5.0)).epsilon(1e-14));
        CHECK(g.area == doctest::Approx(6.0).epsilon(1e-14));
        CHECK(triangle_area({3.0, 4.0, 5.0}) == doctest::Approx(6.0));
    }

    TEST_CASE("conformal rescale scales edges by the mean exponential")
    {
        const auto m = fixtures::square_pair();
        Eigen::VectorXd u(4);
        u << 0.1, -0.2, 0.3, 0.0;
        const auto r = conformal_rescale(m.mesh, m.metric, ScalarField::from_values(u));
        for (int e = 0; e < m.mesh.edge_count(); ++e) {
            const auto [a, b] = m.mesh.edges()[e];
            CHECK(r.length(e) == doctest::Approx(std::exp(0.5 * (u[a] + u[b])) * m.metric.length(e)).epsilon(1e-15));
        }
        const auto s = scale_metric(m.mesh, m.metric, 4.0);
        CHECK(s.length(0) == doctest::Approx(2.0 * m.metric.length(0)));
    }

    TEST_CASE("constant u scales curvature densities by e^{-2u} and e^{-u}")
    {
        const auto m = fixtures::spherical_cap(6, 1.0);
        const auto before = discrete_curvatures(m.mesh, m.metric);
        const auto after =
            discrete_curvatures(m.mesh, conformal_rescale(m.mesh, m.metric, ScalarField::constant(m.mesh, 0.7)));
        const Eigen::VectorXd k0 = before.gaussian_density(), k1 = after.gaussian_density();
        const Eigen::VectorXd s0 = before.geodesic_density(), s1 = after.geodesic_density();
        CHECK((k1 - std::exp(-1.4) * k0).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((s1 - std::exp(-0.7) * s0).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("obtuse triangle count")
    {
        CHECK(obtuse_triangle_count(fixtures::hex_disk(4).mesh, fixtures::hex_disk(4).metric) == 0);
        const auto flat = build_mesh({{0, 0, 0}, {2, 0, 0}, {1, 0.1, 0}}, {{0, 1, 2}});
        CHECK(obtuse_triangle_count(flat.mesh, flat.metric) == 1);
    }
}
