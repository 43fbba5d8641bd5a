#include "curvforge/prescribe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "curvforge/error.hpp"
#include "curvforge/log.hpp"
#include "strfmt.hpp"

namespace curvforge {

using detail::strfmt;

namespace {

Eigen::VectorXd boundary_only(const EllipticOperators& ops, Eigen::VectorXd v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!(ops.boundary_mass[i] > 0.0)) v[i] = 0.0;
    return v;
}

double boundary_max(const SurfaceMesh& mesh, const Eigen::VectorXd& v)
{
    double m = -std::numeric_limits<double>::infinity();
    for (int i : mesh.boundary_vertices()) m = std::max(m, v[i]);
    return m;
}

double boundary_min(const SurfaceMesh& mesh, const Eigen::VectorXd& v)
{
    return -boundary_max(mesh, -v);
}

const char* pattern_slug(SignPattern pattern)
{
    switch (pattern) {
    case SignPattern::nonnegative: return "nonnegative";
    case SignPattern::nonpositive: return "nonpositive";
    case SignPattern::positive: return "positive";
    case SignPattern::negative: return "negative";
    case SignPattern::changes: return "changes";
    }
    return "unknown";
}

std::vector<int> all_vertices(const SurfaceMesh& mesh)
{
    std::vector<int> v(static_cast<std::size_t>(mesh.vertex_count()));
    for (int i = 0; i < mesh.vertex_count(); ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
}

// Shared report section of the semilinear pipelines.
void finish_report(PrescriptionResult& r, const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                   const EllipticOperators& ops, const IterationConfig& config)
{
    const auto residual = pde_residual(ops, r.problem, r.u.values);
    r.report.pde_residual_sup = residual.interior_sup;
    r.report.boundary_residual_sup = residual.boundary_sup;
    r.report.check_at_most("pde_residual_interior", residual.interior_sup, config.tol);
    r.report.check_at_most("pde_residual_boundary", residual.boundary_sup, config.tol);

    const double slack = 1e-9 * (1.0 + r.bracket.u_plus.values.cwiseAbs().maxCoeff());
    const double below = (r.bracket.u_minus.values - r.u.values).maxCoeff();
    const double above = (r.u.values - r.bracket.u_plus.values).maxCoeff();
    r.report.check("solution_within_bracket", below <= slack && above <= slack, std::max(below, above), slack);

    auto rescale = conformal_rescale_verify(mesh, metric, r.u, r.metric_scale, r.realized_K, r.realized_sigma);
    r.report.gauss_bonnet_residual = rescale.gauss_bonnet_residual;
    r.report.merge(rescale, "");

    r.report.metric("metric_scale", r.metric_scale);
    r.report.metric("iterations", r.trace.iterations);
    r.report.metric("lambda", r.trace.lambda);
    r.report.metric("mu", r.trace.mu);
    r.report.metric("smallness_G_sup", r.trace.smallness_G_sup);
    r.report.metric("smallness_G_gradient", r.trace.smallness_G_gradient);
    const auto& t = r.bracket.thresholds;
    const std::pair<const char*, const std::optional<double>*> named[] = {
        {"C0", &t.C0}, {"C1", &t.C1}, {"C2", &t.C2}, {"C3", &t.C3},
        {"D", &t.D},   {"shift", &t.shift}, {"xi", &t.xi}, {"kappa_tilde", &t.kappa_tilde}};
    for (const auto& [name, value] : named)
        if (value->has_value()) r.report.metric(std::string("threshold_") + name, **value);

    ModelForm probe = r.model;
    certify_model(mesh, metric, probe);
    r.report.metric("model_certification_error", probe.certification_error);
    r.report.metric("model_tol", probe.model_tol);
    if (!probe.certified)
        r.warnings.push_back(strfmt("mesh metric does not certify as %s (rms error %.3e > %.3e); "
                                    "curvature checks include the model discrepancy",
                                    r.model.name().c_str(), probe.certification_error, probe.model_tol));
}

} // namespace

double ModelForm::K_g() const noexcept
{
    return kind == ModelKind::constant_K_minimal_boundary ? static_cast<double>(sign) : 0.0;
}

double ModelForm::sigma_g() const noexcept
{
    return kind == ModelKind::flat_unit_boundary ? static_cast<double>(sign) : 0.0;
}

std::string ModelForm::name() const
{
    switch (kind) {
    case ModelKind::flat_geodesic_boundary: return "flat-geodesic";
    case ModelKind::flat_unit_boundary: return sign > 0 ? "flat-unit" : "flat-unit-neg";
    case ModelKind::constant_K_minimal_boundary: return sign > 0 ? "constant-K" : "constant-K-neg";
    }
    return "unknown";
}

ModelForm ModelForm::parse(const std::string& name)
{
    ModelForm m;
    if (name == "flat-geodesic") m = {ModelKind::flat_geodesic_boundary, 0};
    else if (name == "flat-unit") m = {ModelKind::flat_unit_boundary, 1};
    else if (name == "flat-unit-neg") m = {ModelKind::flat_unit_boundary, -1};
    else if (name == "constant-K") m = {ModelKind::constant_K_minimal_boundary, 1};
    else if (name == "constant-K-neg") m = {ModelKind::constant_K_minimal_boundary, -1};
    else
        throw Error(Errc::precondition, "unknown model '" + name +
                                            "' (flat-geodesic, flat-unit, flat-unit-neg, constant-K, constant-K-neg)");
    return m;
}

ModelForm declare_model(const SurfaceMesh& mesh, ModelKind kind, int sign)
{
    ModelForm m;
    m.kind = kind;
    m.sign = kind == ModelKind::flat_geodesic_boundary ? 0 : (sign >= 0 ? 1 : -1);
    const int chi = euler_characteristic(mesh);
    const int chi_sign = (chi > 0) - (chi < 0);
    if (chi_sign != m.sign)
        throw Error(Errc::precondition,
                    strfmt("model %s needs sign(chi) = %d but chi = %d", m.name().c_str(), m.sign, chi));
    return m;
}

void certify_model(const SurfaceMesh& mesh, const IntrinsicMetric& metric, ModelForm& model)
{
    const auto dc = discrete_curvatures(mesh, metric);
    const double Kg = model.K_g();
    const double sg = model.sigma_g();
    double area = 0.0, e_in = 0.0, length = 0.0, e_bd = 0.0;
    for (int v : mesh.interior_vertices()) {
        const double e = dc.interior_defect[v] / dc.dual_area[v] - Kg;
        e_in += dc.dual_area[v] * e * e;
        area += dc.dual_area[v];
    }
    for (int v : mesh.boundary_vertices()) {
        const double e = (dc.boundary_turning[v] - Kg * dc.dual_area[v]) / dc.boundary_dual_length[v] - sg;
        e_bd += dc.boundary_dual_length[v] * e * e;
        length += dc.boundary_dual_length[v];
    }
    const double rms_in = area > 0.0 ? std::sqrt(e_in / area) : 0.0;
    const double rms_bd = length > 0.0 ? std::sqrt(e_bd / length) : 0.0;
    model.certification_error = std::max(rms_in, rms_bd);
    model.model_tol = 0.1 * metric.max_edge_length();
    model.certified = model.certification_error <= model.model_tol;
}

UniformizeResult uniformize_chi0(const SurfaceMesh& mesh, const IntrinsicMetric& metric, int max_newton)
{
    const int chi = euler_characteristic(mesh);
    if (chi != 0) throw Error(Errc::precondition, strfmt("uniformize_chi0 needs chi = 0, got %d", chi));

    auto curvature_vector = [&](const IntrinsicMetric& m) {
        const auto dc = discrete_curvatures(mesh, m);
        return Eigen::VectorXd(dc.interior_defect + dc.boundary_turning);
    };
    // S u = −F as a compatible Neumann problem in density form.
    auto step = [&](const IntrinsicMetric& m, const Eigen::VectorXd& F) {
        const auto ops = assemble(mesh, m);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(F.size());
        Eigen::VectorXd g = Eigen::VectorXd::Zero(F.size());
        for (int v : mesh.interior_vertices()) f[v] = -F[v] / ops.interior_mass[v];
        for (int v : mesh.boundary_vertices()) g[v] = -F[v] / ops.boundary_mass[v];
        return solve_neumann_compatible(ops, ScalarField::from_values(f),
                                        ScalarField::from_values(g, FieldDomain::boundary),
                                        NeumannOptions{1e-8, true})
            .u.values;
    };

    UniformizeResult out{ScalarField::constant(mesh, 0.0), metric, {}, 0.0, 0.0, 0};
    Eigen::VectorXd F = curvature_vector(metric);
    out.initial_curvature = F.cwiseAbs().sum();
    Eigen::VectorXd u = step(metric, F);
    IntrinsicMetric current = conformal_rescale(mesh, metric, ScalarField::from_values(u));
    F = curvature_vector(current);

    // Newton on the angle sums; their Jacobian in u is the cotangent stiffness.
    for (int k = 0; k < max_newton && F.cwiseAbs().maxCoeff() > 1e-13; ++k) {
        const Eigen::VectorXd trial_u = u + step(current, F);
        try {
            IntrinsicMetric trial = conformal_rescale(mesh, metric, ScalarField::from_values(trial_u));
            const Eigen::VectorXd trial_F = curvature_vector(trial);
            if (!(trial_F.cwiseAbs().sum() < F.cwiseAbs().sum())) break;
            u = trial_u;
            current = std::move(trial);
            F = trial_F;
            ++out.newton_steps;
        } catch (const Error&) {
            break;
        }
    }

    const auto ops = assemble(mesh, metric);
    u.array() -= ops.interior_mass.dot(u) / ops.volume();
    out.u = ScalarField::from_values(u);
    out.metric = conformal_rescale(mesh, metric, out.u);
    out.final_curvature = curvature_vector(out.metric).cwiseAbs().sum();
    out.model = declare_model(mesh, ModelKind::flat_geodesic_boundary);
    certify_model(mesh, out.metric, out.model);
    log::info(strfmt("uniformize: |curvature| %.3e -> %.3e after %d Newton steps", out.initial_curvature,
                     out.final_curvature, out.newton_steps));
    return out;
}

PrescriptionResult prescribe_gaussian(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                      const ModelForm& model, const ScalarField& K, const PrescribeOptions& options)
{
    if (model.K_g() != 0.0) throw Error(Errc::precondition, "prescribe_gaussian needs a flat model (K_g = 0)");
    validate_field(mesh, K, "K");
    const auto ops = assemble(mesh, metric);
    const Eigen::Index n = ops.size();
    const auto zero_sigma = ScalarField::from_values(Eigen::VectorXd::Zero(n), FieldDomain::boundary);

    const auto sup = bm1_supersolution(ops, zero_sigma, options.kappa, options.knobs);
    const double k_plus = std::max(K.values.maxCoeff(), 0.0);
    const double b = k_plus <= sup.C_interior ? 1.0 : options.safety * sup.C_interior / k_plus;
    log::info(strfmt("prescribe_gaussian: C0 = %.6g, max K+ = %.6g, b = %.6g", sup.C_interior, k_plus, b));

    auto built = build_bracket_bm1(ops, ScalarField::from_values(b * K.values), zero_sigma, options.kappa, 1.0,
                                   options.knobs);
    auto iterated = iterate(ops, built.problem, built.bracket, options.iteration);

    PrescriptionResult r;
    r.pipeline = "prescribe-gaussian";
    r.model = model;
    r.u = std::move(iterated.u);
    r.metric_scale = b;
    r.realized_K = K;
    const Eigen::ArrayXd u = r.u.values.array();
    const Eigen::VectorXd sigma_i = ((model.sigma_g() - options.kappa * u) * (-u).exp()).matrix();
    r.realized_sigma = ScalarField::from_values(boundary_only(ops, sigma_i / std::sqrt(b)), FieldDomain::boundary);
    r.problem = std::move(built.problem);
    r.bracket = std::move(built.bracket);
    r.trace = std::move(iterated.trace);
    r.report.metric("kappa", options.kappa);
    finish_report(r, mesh, metric, ops, options.iteration);
    return r;
}

PrescriptionResult prescribe_geodesic(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                      const ModelForm& model, const ScalarField& sigma, const PrescribeOptions& options)
{
    if (model.sigma_g() != 0.0)
        throw Error(Errc::precondition, "prescribe_geodesic needs a model with geodesic boundary (sigma_g = 0)");
    validate_field(mesh, sigma, "sigma");
    const auto ops = assemble(mesh, metric);
    const Eigen::Index n = ops.size();

    const auto sup = bm2_supersolution(ops, sigma, options.A, options.knobs);
    const double c = sup.C_boundary >= 1.0 ? 1.0 : options.safety * sup.C_boundary;
    log::info(strfmt("prescribe_geodesic: C3 = %.6g, c = %.6g", sup.C_boundary, c));

    auto built = build_bracket_bm2(ops, ScalarField::from_values(Eigen::VectorXd::Zero(n)), sigma, options.A, c,
                                   options.knobs);
    auto iterated = iterate(ops, built.problem, built.bracket, options.iteration);

    PrescriptionResult r;
    r.pipeline = "prescribe-geodesic";
    r.model = model;
    r.u = std::move(iterated.u);
    r.metric_scale = c * c;
    const Eigen::ArrayXd u = r.u.values.array();
    r.realized_K = ScalarField::from_values(((model.K_g() - options.A * u) * (-2.0 * u).exp() / (c * c)).matrix());
    r.realized_sigma = ScalarField::from_values(boundary_only(ops, sigma.values), FieldDomain::boundary);
    r.problem = std::move(built.problem);
    r.bracket = std::move(built.bracket);
    r.trace = std::move(iterated.trace);
    r.report.metric("A", options.A);
    r.report.metric("c", c);
    finish_report(r, mesh, metric, ops, options.iteration);
    return r;
}

PrescriptionResult prescribe_pair_chi0(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                       const ModelForm& model, const ScalarField& K, const ScalarField& sigma,
                                       const PrescribeOptions& options)
{
    if (euler_characteristic(mesh) != 0) throw Error(Errc::precondition, "prescribe_pair_chi0 needs chi = 0");
    if (model.kind != ModelKind::flat_geodesic_boundary)
        throw Error(Errc::precondition, "prescribe_pair_chi0 needs the flat-geodesic model");
    validate_field(mesh, K, "K");
    validate_field(mesh, sigma, "sigma");
    const auto ops = assemble(mesh, metric);

    auto built = build_bracket_chi0(ops, K, sigma, options.knobs);
    auto iterated = iterate(ops, built.problem, built.bracket, options.iteration);
    const double c = built.problem.c;

    PrescriptionResult r;
    r.pipeline = "prescribe-pair";
    r.model = model;
    r.u = std::move(iterated.u);
    r.metric_scale = 1.0;
    r.realized_K = K;
    r.realized_sigma = ScalarField::from_values(boundary_only(ops, c * sigma.values), FieldDomain::boundary);
    r.problem = std::move(built.problem);
    r.bracket = std::move(built.bracket);
    r.trace = std::move(iterated.trace);

    // ∫K dVol + ∮cσ dS of the new metric; zero by Gauss–Bonnet for χ = 0.
    const Eigen::ArrayXd u = r.u.values.array();
    const double total = ops.interior_mass.dot((K.values.array() * (2.0 * u).exp()).matrix()) +
                         ops.boundary_mass.dot((c * sigma.values.array() * u.exp()).matrix());
    r.report.check_at_most("realized_gauss_bonnet", total, 1e-3);
    r.report.metric("c", c);
    finish_report(r, mesh, metric, ops, options.iteration);
    return r;
}

FeasibilityReport check_necessary_negative_chi(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                               const ScalarField& K, const ScalarField& sigma)
{
    const int chi = euler_characteristic(mesh);
    if (chi >= 0) throw Error(Errc::precondition, strfmt("feasibility check needs chi < 0, got %d", chi));
    validate_field(mesh, K, "K");
    validate_field(mesh, sigma, "sigma");
    for (int v : mesh.boundary_vertices())
        if (sigma[v] < 0.0)
            throw Error(Errc::precondition, strfmt("sigma must be nonnegative (sigma = %g at vertex %d)", sigma[v], v));

    const auto ops = assemble(mesh, metric);
    FeasibilityReport rep;
    if (!(K.values.maxCoeff() > 0.0)) rep.warnings.push_back("K is not positive anywhere");
    if (!(K.values.minCoeff() < 0.0)) rep.warnings.push_back("K does not change sign");

    RobinProblem problem{&ops, ScalarField::constant(mesh, 2.0, FieldDomain::boundary),
                         ScalarField::from_values(-2.0 * K.values),
                         ScalarField::constant(mesh, 0.0, FieldDomain::boundary), 0.0};
    rep.w = solve_robin(problem).u;
    rep.w_min = rep.w.values.minCoeff();
    rep.integral_K = ops.interior_mass.dot(K.values);
    if (!(rep.integral_K < 0.0)) rep.reasons.push_back("integral_K >= 0");
    if (!(rep.w_min > 0.0)) rep.reasons.push_back("w_min <= 0");
    rep.pass = rep.reasons.empty();
    return rep;
}

std::string to_string(SignPattern pattern)
{
    switch (pattern) {
    case SignPattern::nonnegative: return ">= 0";
    case SignPattern::nonpositive: return "<= 0";
    case SignPattern::positive: return "> 0";
    case SignPattern::negative: return "< 0";
    case SignPattern::changes: return "changes sign";
    }
    return "?";
}

bool has_sign_pattern(const Eigen::VectorXd& values, std::span<const int> vertices, SignPattern pattern)
{
    if (vertices.empty()) return false;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int v : vertices) {
        if (!std::isfinite(values[v])) return false;
        lo = std::min(lo, values[v]);
        hi = std::max(hi, values[v]);
    }
    switch (pattern) {
    case SignPattern::nonnegative: return lo >= 0.0;
    case SignPattern::nonpositive: return hi <= 0.0;
    case SignPattern::positive: return lo > 0.0;
    case SignPattern::negative: return hi < 0.0;
    case SignPattern::changes: return lo < 0.0 && hi > 0.0;
    }
    return false;
}

const std::vector<ExampleCase>& example_cases()
{
    using enum SignPattern;
    static const std::vector<ExampleCase> cases{
        {"1", ModelKind::flat_unit_boundary, 1, nonnegative, nonnegative},
        {"2", ModelKind::flat_unit_boundary, 1, changes, nonnegative},
        {"3", ModelKind::flat_unit_boundary, 1, nonpositive, nonnegative},
        {"4", ModelKind::constant_K_minimal_boundary, 1, nonnegative, changes},
        {"5", ModelKind::constant_K_minimal_boundary, 1, nonnegative, nonpositive},
        {"6", ModelKind::flat_unit_boundary, 1, changes, changes},
        {"7", ModelKind::constant_K_minimal_boundary, 1, nonpositive, changes},
        {"8", ModelKind::flat_unit_boundary, 1, changes, nonpositive},
        {"chi0", ModelKind::flat_geodesic_boundary, 0, positive, negative},
    };
    return cases;
}

const ExampleCase& example_case(const std::string& id)
{
    for (const auto& c : example_cases())
        if (c.id == id) return c;
    throw Error(Errc::precondition, "unknown example case '" + id + "' (1..8 or chi0)");
}

ModePatterns sign_changing_patterns(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                    const EllipticOperators& ops)
{
    const Eigen::Index n = ops.size();
    const Eigen::VectorXd& M = ops.interior_mass;
    const Eigen::VectorXd& B = ops.boundary_mass;
    const double vol = ops.volume();

    // Inverse iteration with a small shift, constants projected out each step.
    const RobinSolver solver(ops, 1e-3 / vol, Eigen::VectorXd::Zero(n));
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = unit(rng);
    for (int it = 0; it < 200; ++it) {
        x.array() -= M.dot(x) / vol;
        Eigen::VectorXd y = solver.solve(M.cwiseProduct(x)).u.values;
        y.array() -= M.dot(y) / vol;
        y /= std::sqrt(y.dot(M.cwiseProduct(y)));
        const double change = std::min((y - x).cwiseAbs().maxCoeff(), (y + x).cwiseAbs().maxCoeff());
        x = std::move(y);
        if (it > 5 && change < 1e-10) break;
    }
    auto normalize = [](Eigen::VectorXd& v, std::span<const int> support) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int i : support) {
            lo = std::min(lo, v[i]);
            hi = std::max(hi, v[i]);
        }
        if (-lo > hi) {
            v = -v;
            std::swap(lo, hi);
            lo = -lo;
            hi = -hi;
        }
        if (hi > 0.0) v /= hi;
        return lo < 0.0 && hi > 0.0;
    };

    ModePatterns out;
    out.interior = x;
    const auto everything = all_vertices(mesh);
    if (!normalize(out.interior, everything))
        throw Error(Errc::precondition, "could not build a sign-changing interior pattern");

    const double length = ops.boundary_length();
    auto boundary_pattern = [&](Eigen::VectorXd q) {
        q = boundary_only(ops, q);
        q = boundary_only(ops, (q.array() - B.dot(q) / length).matrix());
        return q;
    };
    out.boundary = boundary_pattern(x);
    const double spread = boundary_max(mesh, out.boundary) - boundary_min(mesh, out.boundary);
    if (!(spread > 1e-3) || !normalize(out.boundary, mesh.boundary_vertices())) {
        Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
        for (const auto& loop : mesh.boundary_loops()) {
            double loop_length = 0.0;
            std::vector<double> s;
            for (std::size_t k = 0; k < loop.size(); ++k) {
                s.push_back(loop_length);
                loop_length += metric.length(*mesh.find_edge(loop[k], loop[(k + 1) % loop.size()]));
            }
            for (std::size_t k = 0; k < loop.size(); ++k)
                q[loop[k]] = std::cos(2.0 * std::numbers::pi * s[k] / loop_length);
        }
        out.boundary = boundary_pattern(q);
        if (!normalize(out.boundary, mesh.boundary_vertices()))
            throw Error(Errc::precondition, "could not build a sign-changing boundary pattern");
    }
    return out;
}

ExamplePair construct_example_pair(const SurfaceMesh& mesh, const IntrinsicMetric& metric, const ModelForm& model,
                                   const std::string& case_id, const ExampleOptions& options)
{
    const ExampleCase& entry = example_case(case_id);
    if (model.kind != entry.model_kind || model.sign != entry.model_sign)
        throw Error(Errc::precondition, strfmt("case %s needs a different model than %s", case_id.c_str(),
                                               model.name().c_str()));
    const auto ops = assemble(mesh, metric);
    const Eigen::Index n = ops.size();
    const double vol = ops.volume();
    const double len = ops.boundary_length();
    const auto pat = sign_changing_patterns(mesh, metric, ops);
    const Eigen::VectorXd& p = pat.interior;
    const Eigen::VectorXd& q = pat.boundary;
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd bone = boundary_only(ops, one);

    // Amplitude making base + α·pattern change sign with margin.
    auto crossing = [&](double base, const Eigen::VectorXd& pattern, std::span<const int> support) {
        double lo = 0.0, hi = 0.0;
        for (int i : support) {
            lo = std::min(lo, pattern[i]);
            hi = std::max(hi, pattern[i]);
        }
        return 2.0 * std::abs(base) / std::min(-lo, hi);
    };
    const auto everything = all_vertices(mesh);

    ExamplePair out;
    out.entry = entry;
    Eigen::VectorXd f, g;
    VerificationReport window;
    const int id = case_id == "chi0" ? 0 : std::stoi(case_id);
    switch (id) {
    case 1:
    case 3: {
        const double s = (id == 1 ? 1.0 : -1.0) * options.amplitude * len / vol;
        f = s * 0.5 * (one + p);
        out.constant = -ops.interior_mass.dot(f) / len;
        g = out.constant * bone;
        window.check("constant_abs_below_1", std::abs(out.constant) < 1.0, std::abs(out.constant), 1.0);
        break;
    }
    case 2:
        f = options.amplitude * len / vol * p;
        out.constant = -ops.interior_mass.dot(f) / len;
        g = out.constant * bone;
        window.check("constant_abs_below_1", std::abs(out.constant) < 1.0, std::abs(out.constant), 1.0);
        break;
    case 4:
        g = boundary_only(ops, 0.5 * vol / len * (q - 0.25 * one));
        out.constant = -ops.boundary_mass.dot(g) / vol;
        f = out.constant * one;
        window.check("constant_abs_below_1", std::abs(out.constant) < 1.0, std::abs(out.constant), 1.0);
        break;
    case 5:
        g = boundary_only(ops, -vol / len * 0.5 * (one + q));
        out.constant = -ops.boundary_mass.dot(g) / vol;
        f = out.constant * one;
        window.check("constant_abs_below_1", std::abs(out.constant) < 1.0, std::abs(out.constant), 1.0);
        break;
    case 6: {
        g = boundary_only(ops, -one + 0.4 * q);
        const double base = -ops.boundary_mass.dot(g) / vol;
        f = base * one + crossing(base, p, everything) * p;
        out.constant = ops.boundary_mass.dot(g) / len;
        const double lo = boundary_min(mesh, g), hi = boundary_max(mesh, g);
        window.check("boundary_data_above_-1.5", lo > -1.5, lo, -1.5);
        window.check("boundary_data_below_-0.5", hi < -0.5, hi, -0.5);
        break;
    }
    case 7: {
        out.constant = -1.5;
        f = out.constant * one;
        const double base = 1.5 * vol / len;
        g = boundary_only(ops, base * one + crossing(base, q, mesh.boundary_vertices()) * q);
        window.check("interior_constant_below_-1", out.constant < -1.0, out.constant, -1.0);
        break;
    }
    case 8: {
        out.constant = -1.5;
        g = out.constant * bone;
        const double base = 1.5 * len / vol;
        f = base * one + crossing(base, p, everything) * p;
        window.check("boundary_constant_below_-1", out.constant < -1.0, out.constant, -1.0);
        break;
    }
    default: // chi0
        f = one;
        out.constant = -vol / len;
        g = out.constant * bone;
        window.check("b2_negative_b1_positive", out.constant < 0.0, out.constant, 0.0);
        break;
    }

    out.interior_data = ScalarField::from_values(f);
    out.boundary_data = ScalarField::from_values(g, FieldDomain::boundary);
    out.u = solve_neumann_compatible(ops, out.interior_data, out.boundary_data).u;
    const Eigen::ArrayXd u = out.u.values.array();
    out.K = ScalarField::from_values(((f.array() + model.K_g()) * (-2.0 * u).exp()).matrix());
    out.sigma = ScalarField::from_values(boundary_only(ops, ((g.array() + model.sigma_g()) * (-u).exp()).matrix()),
                                         FieldDomain::boundary);

    PrescriptionResult& r = out.result;
    r.pipeline = "make-example";
    r.model = model;
    r.u = out.u;
    r.realized_K = out.K;
    r.realized_sigma = out.sigma;
    r.problem = SemilinearProblem::zero(mesh);
    r.problem.K = out.K;
    r.problem.sigma = out.sigma;
    r.problem.interior_affine = ScalarField::constant(mesh, model.K_g());
    r.problem.boundary_affine = ScalarField::constant(mesh, model.sigma_g(), FieldDomain::boundary);
    const auto residual = pde_residual(ops, r.problem, r.u.values);
    r.report.pde_residual_sup = residual.interior_sup;
    r.report.boundary_residual_sup = residual.boundary_sup;
    // Linear solve accuracy relative to the data scale.
    const double data_scale = 1.0 + f.cwiseAbs().maxCoeff() + g.cwiseAbs().maxCoeff();
    r.report.check_at_most("pde_residual_interior", residual.interior_sup, 1e-8 * data_scale);
    r.report.check_at_most("pde_residual_boundary", residual.boundary_sup, 1e-8 * data_scale);
    r.report.check(std::string("K_sign_") + pattern_slug(entry.K_pattern),
                   has_sign_pattern(out.K.values, everything, entry.K_pattern), out.K.values.minCoeff(), 0.0);
    r.report.check(std::string("sigma_sign_") + pattern_slug(entry.sigma_pattern),
                   has_sign_pattern(out.sigma.values, mesh.boundary_vertices(), entry.sigma_pattern),
                   boundary_min(mesh, out.sigma.values), 0.0);
    r.report.merge(window, "");
    auto rescale = conformal_rescale_verify(mesh, metric, r.u, 1.0, r.realized_K, r.realized_sigma);
    r.report.gauss_bonnet_residual = rescale.gauss_bonnet_residual;
    r.report.merge(rescale, "");
    r.report.metric("case_constant", out.constant);
    r.report.metric("K_min", out.K.values.minCoeff());
    r.report.metric("K_max", out.K.values.maxCoeff());
    r.report.metric("sigma_min", boundary_min(mesh, out.sigma.values));
    r.report.metric("sigma_max", boundary_max(mesh, out.sigma.values));
    ModelForm probe = model;
    certify_model(mesh, metric, probe);
    r.report.metric("model_certification_error", probe.certification_error);
    r.report.metric("model_tol", probe.model_tol);
    if (!probe.certified)
        r.warnings.push_back(strfmt("mesh metric does not certify as %s (rms error %.3e > %.3e)",
                                    model.name().c_str(), probe.certification_error, probe.model_tol));
    return out;
}

} // namespace curvforge
