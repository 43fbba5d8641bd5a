#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "curvforge/error.hpp"
#include "curvforge/prescribe.hpp"
#include "fixtures.hpp"

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

VectorXd coordinate(const fixtures::LoadedMesh& m, int axis)
{
    VectorXd x(static_cast<Eigen::Index>(m.positions.size()));
    for (std::size_t i = 0; i < m.positions.size(); ++i) x[static_cast<Eigen::Index>(i)] = m.positions[i][axis];
    return x;
}

} // namespace

TEST_SUITE("prescribe")
{
    TEST_CASE("model names and constants")
    {
        for (const char* name : {"flat-geodesic", "flat-unit", "flat-unit-neg", "constant-K", "constant-K-neg"})
            CHECK(ModelForm::parse(name).name() == name);
        const auto m = ModelForm::parse("flat-unit-neg");
        CHECK(m.K_g() == 0.0);
        CHECK(m.sigma_g() == -1.0);
        CHECK(ModelForm::parse("constant-K").K_g() == 1.0);
        CHECK(error_of([] { (void)ModelForm::parse("round"); }) == Errc::precondition);
    }

    TEST_CASE("declared models must agree with the sign of chi")
    {
        const auto disk = fixtures::hex_disk(3);
        CHECK(error_of([&] { (void)declare_model(disk.mesh, ModelKind::flat_unit_boundary, -1); }) ==
              Errc::precondition);
        CHECK(error_of([&] { (void)declare_model(disk.mesh, ModelKind::flat_geodesic_boundary); }) ==
              Errc::precondition);
        const auto pants = fixtures::pair_of_pants(1);
        CHECK(declare_model(pants.mesh, ModelKind::constant_K_minimal_boundary, -1).K_g() == -1.0);
    }

    TEST_CASE("certification")
    {
        const auto cyl = fixtures::prism_cylinder(24, 4);
        auto flat = declare_model(cyl.mesh, ModelKind::flat_geodesic_boundary);
        certify_model(cyl.mesh, cyl.metric, flat);
        CHECK(flat.certified);
        CHECK(flat.certification_error < 1e-12);

        const auto bumped = fixtures::bumped_cylinder(24, 6);
        auto bumpy = declare_model(bumped.mesh, ModelKind::flat_geodesic_boundary);
        certify_model(bumped.mesh, bumped.metric, bumpy);
        CHECK(!bumpy.certified);
    }

    TEST_CASE("uniformization flattens a bumped cylinder")
    {
        const auto m = fixtures::bumped_cylinder(24, 6);
        const auto res = uniformize_chi0(m.mesh, m.metric);
        CHECK(res.final_curvature < 1e-3 * res.initial_curvature);
        CHECK(res.model.certified);
        const auto ops = assemble(m.mesh, m.metric);
        CHECK(std::abs(ops.interior_mass.dot(res.u.values)) < 1e-10);
        const auto disk = fixtures::hex_disk(3);
        CHECK(error_of([&] { (void)uniformize_chi0(disk.mesh, disk.metric); }) == Errc::precondition);
    }

    TEST_CASE("gaussian pipeline realizes K on the unit disk")
    {
        const auto m = fixtures::hex_disk(8);
        const auto model = declare_model(m.mesh, ModelKind::flat_unit_boundary, 1);
        const auto K = ScalarField::from_values((0.2 - coordinate(m, 0).array()).matrix());
        const auto r = prescribe_gaussian(m.mesh, m.metric, model, K);
        CHECK(r.trace.converged);
        CHECK(r.report.passed());
        CHECK(r.metric_scale > 0.0);
        CHECK(r.metric_scale <= 1.0);
        CHECK(r.report.pde_residual_sup <= 1e-10);

        const auto pipeline_errors = [&](ModelForm bad) { (void)prescribe_gaussian(m.mesh, m.metric, bad, K); };
        CHECK(error_of([&] { pipeline_errors(declare_model(m.mesh, ModelKind::constant_K_minimal_boundary, 1)); }) ==
              Errc::precondition);
    }

    TEST_CASE("small K needs no rescaling constant")
    {
        const auto m = fixtures::hex_disk(6);
        const auto model = declare_model(m.mesh, ModelKind::flat_unit_boundary, 1);
        const auto r = prescribe_gaussian(m.mesh, m.metric, model, ScalarField::constant(m.mesh, -0.5));
        CHECK(r.metric_scale == 1.0);
        CHECK(r.trace.converged);
    }

    TEST_CASE("geodesic pipeline on the hemisphere")
    {
        const auto m = fixtures::spherical_cap(8, std::numbers::pi / 2);
        const auto model = declare_model(m.mesh, ModelKind::constant_K_minimal_boundary, 1);
        const auto sigma = ScalarField::from_values(coordinate(m, 0), FieldDomain::boundary);
        const auto r = prescribe_geodesic(m.mesh, m.metric, model, sigma);
        CHECK(r.trace.converged);
        CHECK(r.report.pde_residual_sup <= 1e-10);
        for (int v : m.mesh.boundary_vertices()) CHECK(r.realized_sigma[v] == sigma[v]);
    }

    TEST_CASE("pair pipeline on the annulus")
    {
        const auto m = fixtures::planar_annulus(16, 3);
        const auto model = declare_model(m.mesh, ModelKind::flat_geodesic_boundary);
        const auto K = ScalarField::constant(m.mesh, -1.0);
        const auto sigma = ScalarField::constant(m.mesh, 2.0, FieldDomain::boundary);
        PrescribeOptions options;
        options.knobs.c = 0.05;
        const auto r = prescribe_pair_chi0(m.mesh, m.metric, model, K, sigma, options);
        CHECK(r.trace.converged);
        CHECK(r.report.metric_value("c") == 0.05);
        CHECK(r.report.find_check("realized_gauss_bonnet")->pass);

        const auto disk = fixtures::hex_disk(3);
        CHECK(error_of([&] {
                  (void)prescribe_pair_chi0(disk.mesh, disk.metric, model, ScalarField::constant(disk.mesh, -1.0),
                                            ScalarField::constant(disk.mesh, 1.0, FieldDomain::boundary));
              }) == Errc::precondition);
    }

    TEST_CASE("feasibility checker")
    {
        const auto m = fixtures::pair_of_pants(2);
        const auto zero = ScalarField::constant(m.mesh, 0.0, FieldDomain::boundary);
        const auto neg = check_necessary_negative_chi(m.mesh, m.metric, ScalarField::constant(m.mesh, -1.0), zero);
        CHECK(neg.pass);
        CHECK(neg.w_min > 0.0);
        CHECK(neg.warnings == std::vector<std::string>{"K is not positive anywhere"});

        const auto pos = check_necessary_negative_chi(m.mesh, m.metric, ScalarField::constant(m.mesh, 1.0), zero);
        CHECK(!pos.pass);
        CHECK(pos.reasons == std::vector<std::string>{"integral_K >= 0", "w_min <= 0"});

        const auto negative_sigma = ScalarField::constant(m.mesh, -0.1, FieldDomain::boundary);
        CHECK(error_of([&] {
                  (void)check_necessary_negative_chi(m.mesh, m.metric, ScalarField::constant(m.mesh, -1.0),
                                                     negative_sigma);
              }) == Errc::precondition);
        const auto disk = fixtures::hex_disk(3);
        CHECK(error_of([&] {
                  (void)check_necessary_negative_chi(disk.mesh, disk.metric, ScalarField::constant(disk.mesh, -1.0),
                                                     ScalarField::constant(disk.mesh, 0.0, FieldDomain::boundary));
              }) == Errc::precondition);
    }

    TEST_CASE("sign patterns")
    {
        VectorXd v(4);
        v << 0.0, 1.0, 2.0, -1.0;
        const std::vector<int> first3{0, 1, 2}, all{0, 1, 2, 3};
        CHECK(has_sign_pattern(v, first3, SignPattern::nonnegative));
        CHECK(!has_sign_pattern(v, first3, SignPattern::positive));
        CHECK(has_sign_pattern(v, all, SignPattern::changes));
        CHECK(!has_sign_pattern(v, first3, SignPattern::changes));
        CHECK(to_string(SignPattern::changes) == "changes sign");
    }

    TEST_CASE("example table")
    {
        CHECK(example_cases().size() == 9);
        CHECK(example_case("6").K_pattern == SignPattern::changes);
        CHECK(example_case("chi0").model_kind == ModelKind::flat_geodesic_boundary);
        CHECK(error_of([] { (void)example_case("9"); }) == Errc::precondition);
    }

    TEST_CASE("example pairs solve their equations")
    {
        const auto m = fixtures::hex_disk(6);
        const auto model = declare_model(m.mesh, ModelKind::flat_unit_boundary, 1);
        const auto pair = construct_example_pair(m.mesh, m.metric, model, "2");
        CHECK(pair.result.report.find_check("pde_residual_interior")->pass);
        CHECK(std::abs(pair.constant) < 1e-10);
        ExampleOptions flat;
        flat.amplitude = 0.0;
        const auto zero = construct_example_pair(m.mesh, m.metric, model, "1", flat);
        CHECK(zero.u.values.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(error_of([&] { (void)construct_example_pair(m.mesh, m.metric, model, "4"); }) == Errc::precondition);
    }

    TEST_CASE("mode patterns are mean zero and sign changing")
    {
        const auto m = fixtures::hex_disk(6);
        const auto ops = assemble(m.mesh, m.metric);
        const auto p = sign_changing_patterns(m.mesh, m.metric, ops);
        CHECK(std::abs(ops.interior_mass.dot(p.interior)) < 1e-10);
        CHECK(std::abs(ops.boundary_mass.dot(p.boundary)) < 1e-10);
        CHECK(p.interior.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
        CHECK(p.interior.minCoeff() < 0.0);
        CHECK(p.interior.maxCoeff() > 0.0);
    }
}
