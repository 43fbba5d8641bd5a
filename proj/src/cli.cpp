#include "curvforge/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvforge/error.hpp"
#include "curvforge/field_io.hpp"
#include "curvforge/log.hpp"
#include "curvforge/report.hpp"
#include "strfmt.hpp"

namespace curvforge {

namespace fs = std::filesystem;
using detail::strfmt;

namespace {

struct RunConfig {
    std::string command;
    std::string mesh;
    std::string K;
    std::string sigma;
    std::string model;
    std::string out = ".";
    std::string case_id;
    std::optional<double> kappa;
    std::optional<double> A;
    std::optional<double> c;
    double tol = 1e-10;
    int max_iters = 20000;
    std::uint64_t seed = 42;
    bool export_matrices = false;
    bool no_fields = false;
};

bool is_input_error(Errc code)
{
    switch (code) {
    case Errc::nonconvergence:
    case Errc::bracket:
    case Errc::iteration:
    case Errc::triangle_inequality:
        return false;
    default:
        return true;
    }
}

Json inputs_json(const RunConfig& cfg)
{
    Json j = {{"mesh", cfg.mesh}, {"tol", cfg.tol}, {"max_iters", cfg.max_iters}, {"seed", cfg.seed}};
    if (!cfg.K.empty()) j["K"] = cfg.K;
    if (!cfg.sigma.empty()) {
        j["sigma"] = cfg.sigma;
        j["sigma_extension"] = cfg.sigma.ends_with(".csv") ? "zero at interior vertices"
                                                           : "expression evaluated at all vertices";
    }
    if (!cfg.model.empty()) j["model"] = cfg.model;
    if (!cfg.case_id.empty()) j["case"] = cfg.case_id;
    if (cfg.kappa) j["kappa"] = *cfg.kappa;
    if (cfg.A) j["A"] = *cfg.A;
    if (cfg.c) j["c"] = *cfg.c;
    return j;
}

Json mesh_json(const LoadedMesh& lm)
{
    const auto& m = lm.mesh;
    return {{"vertices", m.vertex_count()},
            {"edges", m.edge_count()},
            {"faces", m.face_count()},
            {"boundary_loops", m.boundary_loops().size()},
            {"euler_characteristic", euler_characteristic(m)},
            {"h", lm.metric.max_edge_length()},
            {"obtuse_triangles", obtuse_triangle_count(m, lm.metric)},
            {"warnings", lm.warnings}};
}

void validate(const RunConfig& cfg)
{
    if (!(cfg.tol > 0.0)) throw Error(Errc::precondition, "--tol must be positive");
    if (cfg.max_iters <= 0) throw Error(Errc::precondition, "--max-iters must be positive");
    if (cfg.kappa && !(*cfg.kappa > 0.0)) throw Error(Errc::precondition, "--kappa must be positive");
    if (cfg.A && !(*cfg.A > 0.0)) throw Error(Errc::precondition, "--A must be positive");
    if (cfg.c && !(*cfg.c > 0.0)) throw Error(Errc::precondition, "--c must be positive");
    if (!fs::exists(cfg.mesh)) throw Error(Errc::io, "mesh file not found: " + cfg.mesh);
}

ModelForm resolve_model(const RunConfig& cfg, const SurfaceMesh& mesh, bool flat)
{
    if (!cfg.model.empty()) {
        const auto m = ModelForm::parse(cfg.model);
        return declare_model(mesh, m.kind, m.sign);
    }
    const int chi = euler_characteristic(mesh);
    if (chi == 0) return declare_model(mesh, ModelKind::flat_geodesic_boundary);
    return declare_model(mesh, flat ? ModelKind::flat_unit_boundary : ModelKind::constant_K_minimal_boundary,
                         chi > 0 ? 1 : -1);
}

class Runner {
public:
    explicit Runner(RunConfig cfg) : cfg_(std::move(cfg)) {}

    int run()
    {
        validate(cfg_);
        lm_ = load_mesh(cfg_.mesh);
        for (const auto& w : lm_->warnings) std::cerr << "warning: " << w << '\n';
        report_ = {{"schema_version", kReportSchemaVersion},
                   {"command", cfg_.command},
                   {"timestamp", utc_timestamp()},
                   {"inputs", inputs_json(cfg_)},
                   {"mesh", mesh_json(*lm_)}};
        fs::create_directories(cfg_.out);
        if (cfg_.export_matrices) export_matrices();

        bool passed = false;
        try {
            passed = dispatch();
        } catch (const Error& e) {
            if (is_input_error(e.code())) throw;
            report_["status"] = "error";
            report_["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
            write_report();
            std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
            return exit_verification_failed;
        }
        report_["status"] = passed ? "pass" : "fail";
        write_report();
        if (!cfg_.no_fields && !columns_.empty()) {
            std::vector<std::pair<std::string, const ScalarField*>> cols;
            for (const auto& [name, field] : columns_) cols.emplace_back(name, &field);
            write_fields_csv(fs::path(cfg_.out) / "fields.csv", cols, lm_->mesh);
        }
        log::info(std::string("status: ") + (passed ? "pass" : "fail"));
        return passed ? exit_pass : exit_verification_failed;
    }

private:
    bool dispatch()
    {
        const auto& c = cfg_.command;
        if (c == "verify") return verify();
        if (c == "uniformize") return uniformize();
        if (c == "prescribe-gaussian") return prescribe(c);
        if (c == "prescribe-geodesic") return prescribe(c);
        if (c == "prescribe-pair") return prescribe(c);
        if (c == "check-feasibility") return feasibility();
        if (c == "make-example") return example();
        throw Error(Errc::precondition, "unknown command " + c);
    }

    ScalarField field(const std::string& source, FieldDomain domain, const char* flag)
    {
        if (source.empty()) throw Error(Errc::precondition, std::string(flag) + " is required for " + cfg_.command);
        return field_from_source(source, *lm_, domain);
    }

    PrescribeOptions options() const
    {
        PrescribeOptions o;
        if (cfg_.kappa) o.kappa = *cfg_.kappa;
        if (cfg_.A) o.A = *cfg_.A;
        o.iteration.tol = cfg_.tol;
        o.iteration.max_iters = cfg_.max_iters;
        o.knobs.iteration.tol = cfg_.tol;
        o.knobs.iteration.max_iters = cfg_.max_iters;
        if (cfg_.c) o.knobs.c = *cfg_.c;
        return o;
    }

    bool verify()
    {
        const auto& mesh = lm_->mesh;
        VerificationReport rep;
        rep.gauss_bonnet_residual = gauss_bonnet_residual(mesh, lm_->metric);
        rep.check_at_most("gauss_bonnet", rep.gauss_bonnet_residual, 1e-10);
        const auto ops = assemble(mesh, lm_->metric);
        const auto probe = maximum_principle_probe(ops, cfg_.kappa.value_or(1.0), 100, cfg_.seed);
        rep.maxprin_applicable = probe.applicable;
        if (probe.applicable) rep.check("maximum_principle", probe.passed());
        const auto dc = discrete_curvatures(mesh, lm_->metric);
        rep.metric("total_defect", dc.interior_defect.sum());
        rep.metric("total_turning", dc.boundary_turning.sum());
        rep.metric("two_pi_chi", 2.0 * std::numbers::pi * euler_characteristic(mesh));
        rep.metric("min_cotangent_weight", ops.min_weight);
        if (!cfg_.model.empty()) {
            auto model = resolve_model(cfg_, mesh, true);
            certify_model(mesh, lm_->metric, model);
            rep.check("model_certified", model.certified, model.certification_error, model.model_tol);
            report_["model"] = to_json(model);
        }
        report_["verification"] = to_json(rep);
        report_["maximum_principle"] = to_json(probe);
        columns_.emplace_back("gaussian_density", ScalarField::from_values(dc.gaussian_density()));
        columns_.emplace_back("geodesic_density",
                              ScalarField::from_values(dc.geodesic_density(), FieldDomain::boundary));
        return rep.passed();
    }

    bool uniformize()
    {
        const auto res = uniformize_chi0(lm_->mesh, lm_->metric);
        VerificationReport rep;
        rep.check("model_certified", res.model.certified, res.model.certification_error, res.model.model_tol);
        rep.gauss_bonnet_residual = gauss_bonnet_residual(lm_->mesh, res.metric);
        rep.check_at_most("gauss_bonnet", rep.gauss_bonnet_residual, 1e-10);
        rep.metric("initial_curvature", res.initial_curvature);
        rep.metric("final_curvature", res.final_curvature);
        rep.metric("newton_steps", res.newton_steps);
        report_["model"] = to_json(res.model);
        report_["verification"] = to_json(rep);
        report_["u"] = to_json(res.u.values);
        columns_.emplace_back("u", res.u);
        return rep.passed();
    }

    bool prescribe(const std::string& which)
    {
        const auto& mesh = lm_->mesh;
        ModelForm model = resolve_model(cfg_, mesh, which != "prescribe-geodesic");
        IntrinsicMetric metric = lm_->metric;
        std::optional<ScalarField> u_model;
        if (model.kind == ModelKind::flat_geodesic_boundary) {
            certify_model(mesh, metric, model);
            if (!model.certified) {
                auto uni = uniformize_chi0(mesh, metric);
                log::info("input metric is not flat with geodesic boundary; uniformizing first");
                metric = uni.metric;
                model = uni.model;
                u_model = uni.u;
            }
        }
        const auto opts = options();
        PrescriptionResult res;
        if (which == "prescribe-gaussian") {
            res = prescribe_gaussian(mesh, metric, model, field(cfg_.K, FieldDomain::vertices, "--K"), opts);
        } else if (which == "prescribe-geodesic") {
            res = prescribe_geodesic(mesh, metric, model, field(cfg_.sigma, FieldDomain::boundary, "--sigma"), opts);
        } else {
            res = prescribe_pair_chi0(mesh, metric, model, field(cfg_.K, FieldDomain::vertices, "--K"),
                                      field(cfg_.sigma, FieldDomain::boundary, "--sigma"), opts);
        }
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
        report_["result"] = to_json(res);
        report_["uniformized"] = u_model.has_value();
        columns_.emplace_back("u", res.u);
        if (u_model) {
            columns_.emplace_back("u_model", *u_model);
            columns_.emplace_back("u_total", ScalarField::from_values(u_model->values + res.u.values));
            report_["u_model"] = to_json(u_model->values);
        }
        columns_.emplace_back("realized_K", res.realized_K);
        columns_.emplace_back("realized_sigma", res.realized_sigma);
        return res.report.passed();
    }

    bool feasibility()
    {
        const auto K = field(cfg_.K, FieldDomain::vertices, "--K");
        const auto sigma = cfg_.sigma.empty() ? ScalarField::constant(lm_->mesh, 0.0, FieldDomain::boundary)
                                              : field(cfg_.sigma, FieldDomain::boundary, "--sigma");
        const auto rep = check_necessary_negative_chi(lm_->mesh, lm_->metric, K, sigma);
        for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& r : rep.reasons) std::cerr << "fail: " << r << '\n';
        report_["result"] = to_json(rep);
        columns_.emplace_back("K", K);
        columns_.emplace_back("w", rep.w);
        return rep.pass;
    }

    bool example()
    {
        if (cfg_.case_id.empty()) throw Error(Errc::precondition, "--case is required for make-example");
        const auto& entry = example_case(cfg_.case_id);
        const ModelForm model = cfg_.model.empty() ? declare_model(lm_->mesh, entry.model_kind, entry.model_sign)
                                                   : resolve_model(cfg_, lm_->mesh, true);
        const auto pair = construct_example_pair(lm_->mesh, lm_->metric, model, cfg_.case_id);
        for (const auto& w : pair.result.warnings) std::cerr << "warning: " << w << '\n';
        report_["case"] = {{"id", entry.id},
                           {"K_pattern", to_string(entry.K_pattern)},
                           {"sigma_pattern", to_string(entry.sigma_pattern)},
                           {"constant", pair.constant}};
        report_["result"] = to_json(pair.result);
        columns_.emplace_back("u", pair.u);
        columns_.emplace_back("K", pair.K);
        columns_.emplace_back("sigma", pair.sigma);
        return pair.result.report.passed();
    }

    void export_matrices() const
    {
        const auto ops = assemble(lm_->mesh, lm_->metric);
        const fs::path dir(cfg_.out);
        write_matrix_market(dir / "stiffness.mtx", ops.stiffness);
        auto diagonal = [](const Eigen::VectorXd& d) {
            SparseMatrix m(d.size(), d.size());
            m.setIdentity();
            m.diagonal() = d;
            return m;
        };
        write_matrix_market(dir / "interior_mass.mtx", diagonal(ops.interior_mass));
        write_matrix_market(dir / "boundary_mass.mtx", diagonal(ops.boundary_mass));
    }

    void write_report() const
    {
        const auto path = fs::path(cfg_.out) / "report.json";
        std::ofstream out(path);
        if (!out) throw Error(Errc::io, "cannot write " + path.string());
        out << dump_json(report_);
    }

    RunConfig cfg_;
    std::optional<LoadedMesh> lm_;
    Json report_;
    std::vector<std::pair<std::string, ScalarField>> columns_;
};

} // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"curvforge: prescribe Gaussian and geodesic curvature by conformal change on triangle meshes"};
    app.require_subcommand(1);
    RunConfig cfg;

    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"prescribe-gaussian", "realize an interior curvature K (up to a constant factor)"},
        {"prescribe-geodesic", "realize a boundary geodesic curvature sigma"},
        {"prescribe-pair", "realize K < 0 and c*sigma with sigma > 0 on a chi = 0 surface"},
        {"check-feasibility", "necessary conditions for (K, sigma >= 0) when chi < 0"},
        {"make-example", "build one of the sign-pattern example pairs"},
        {"uniformize", "conformal factor to the flat model with geodesic boundary (chi = 0)"},
        {"verify", "Gauss-Bonnet, maximum principle probe and optional model certification"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--mesh", cfg.mesh, "OFF or OBJ mesh")->required();
        sub->add_option("--K", cfg.K, "interior curvature: expression in x, y, z or CSV file");
        sub->add_option("--sigma", cfg.sigma, "boundary curvature: expression or CSV file");
        sub->add_option("--kappa", cfg.kappa, "Robin coefficient (default 1)");
        sub->add_option("--A", cfg.A, "zeroth-order coefficient (default 1)");
        sub->add_option("--c", cfg.c, "boundary multiplier for prescribe-pair (default: bisected D)");
        sub->add_option("--tol", cfg.tol, "iteration tolerance")->capture_default_str();
        sub->add_option("--max-iters", cfg.max_iters, "iteration cap")->capture_default_str();
        sub->add_option("--model", cfg.model,
                        "flat-geodesic | flat-unit | flat-unit-neg | constant-K | constant-K-neg");
        sub->add_option("--seed", cfg.seed, "seed of randomized probes")->capture_default_str();
        sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
        sub->add_option("--case", cfg.case_id, "example case: 1..8 or chi0");
        sub->add_flag("--export-matrices", cfg.export_matrices, "write S, M and B as MatrixMarket files");
        sub->add_flag("--no-fields", cfg.no_fields, "skip fields.csv");
        sub->callback([&cfg, sub] { cfg.command = sub->get_name(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_input_error;
    }

    try {
        return Runner(cfg).run();
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
        return is_input_error(e.code()) ? exit_input_error : exit_verification_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input_error;
    }
}

} // namespace curvforge
