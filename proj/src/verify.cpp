#include "curvforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "curvforge/error.hpp"

namespace curvforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-vertex outward normal derivative of the piecewise linear interpolant,
// averaged over the two incident boundary edges with half-length weights.
Eigen::VectorXd boundary_normal_derivative(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                           const Eigen::VectorXd& u)
{
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(u.size());
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(u.size());
    for (int e : mesh.boundary_edges()) {
        const int f = mesh.edge_faces(e)[0];
        const auto& tri = mesh.triangles()[f];
        const auto& fe = mesh.face_edges(f);
        const int k = static_cast<int>(std::find(fe.begin(), fe.end(), e) - fe.begin());
        const int i = tri[(k + 1) % 3];
        const int j = tri[(k + 2) % 3];
        const auto g = triangle_geometry(metric.face_lengths(mesh, f));
        const double l = metric.length(e);
        const double dn = (u[i] * g.cotangents[(k + 2) % 3] + u[j] * g.cotangents[(k + 1) % 3]) / l -
                          u[tri[k]] * l / (2.0 * g.area);
        for (int v : {i, j}) {
            acc[v] += 0.5 * l * dn;
            weight[v] += 0.5 * l;
        }
    }
    for (Eigen::Index v = 0; v < u.size(); ++v)
        if (weight[v] > 0.0) acc[v] /= weight[v];
    return acc;
}

// Dual-area weighted vertex average of the per-triangle |∇w|².
Eigen::VectorXd gradient_norm_squared(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                      const Eigen::VectorXd& w)
{
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(w.size());
    Eigen::VectorXd area = Eigen::VectorXd::Zero(w.size());
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& tri = mesh.triangles()[f];
        const auto g = triangle_geometry(metric.face_lengths(mesh, f));
        double energy = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double d = w[tri[(k + 1) % 3]] - w[tri[(k + 2) % 3]];
            energy += g.cotangents[k] * d * d;
        }
        const double grad2 = energy / (2.0 * g.area);
        for (int v : tri) {
            acc[v] += g.area / 3.0 * grad2;
            area[v] += g.area / 3.0;
        }
    }
    return acc.cwiseQuotient(area);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace

void VerificationReport::check_at_most(std::string name, double value, double tolerance)
{
    checks.push_back({std::move(name), std::abs(value) <= tolerance, value, tolerance});
}

void VerificationReport::check(std::string name, bool pass, double value, double tolerance)
{
    checks.push_back({std::move(name), pass, value, tolerance});
}

void VerificationReport::metric(std::string name, double value)
{
    metrics.push_back({std::move(name), value});
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix)
{
    for (const auto& c : other.checks) checks.push_back({prefix + c.name, c.pass, c.value, c.tolerance});
    for (const auto& m : other.metrics) metrics.push_back({prefix + m.name, m.value});
}

bool VerificationReport::passed() const noexcept
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* VerificationReport::find_check(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

double VerificationReport::metric_value(const std::string& name) const
{
    for (const auto& m : metrics)
        if (m.name == name) return m.value;
    return kNaN;
}

double gauss_bonnet_residual(const SurfaceMesh& mesh, const IntrinsicMetric& metric)
{
    return discrete_curvatures(mesh, metric).total() - 2.0 * std::numbers::pi * euler_characteristic(mesh);
}

PdeResidual pde_residual(const EllipticOperators& ops, const SemilinearProblem& problem, const Eigen::VectorXd& u)
{
    const Eigen::VectorXd r = semilinear_residual(ops, problem, u);
    PdeResidual out;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (ops.boundary_mass[i] > 0.0)
            out.boundary_sup = std::max(out.boundary_sup, std::abs(r[i]) / ops.boundary_mass[i]);
        else
            out.interior_sup = std::max(out.interior_sup, std::abs(r[i]) / ops.interior_mass[i]);
    }
    return out;
}

bool MaximumPrincipleReport::passed() const noexcept
{
    return applicable &&
           std::all_of(variants.begin(), variants.end(), [](const ProbeVariant& v) { return v.failures == 0; });
}

MaximumPrincipleReport maximum_principle_probe(const EllipticOperators& ops, double kappa, int trials,
                                               std::uint64_t seed)
{
    MaximumPrincipleReport report;
    if (!ops.nonnegative_weights()) {
        report.reason = "negative cotangent weight " + std::to_string(ops.min_weight);
        return report;
    }
    if (!(kappa > 0.0)) {
        report.reason = "kappa must be positive";
        return report;
    }
    report.applicable = true;

    const Eigen::Index n = ops.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto one_signed = [&](double sign) {
        // Sparse-ish data: about a third of the entries vanish.
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = unit(rng);
            v[i] = x < 1.0 / 3.0 ? 0.0 : sign * unit(rng);
        }
        return v;
    };

    struct Variant {
        const char* name;
        double data_sign;
        double interior_coefficient;
        double robin;
    };
    const Variant variants[] = {
        {"robin_nonpositive", -1.0, 0.0, kappa},
        {"robin_nonnegative", 1.0, 0.0, kappa},
        {"shifted_neumann_nonpositive", -1.0, 1.0, 0.0},
    };
    for (const auto& var : variants) {
        const RobinSolver solver(ops, var.interior_coefficient, Eigen::VectorXd::Constant(n, var.robin));
        ProbeVariant out{var.name, trials, 0, 0.0};
        for (int t = 0; t < trials; ++t) {
            const Eigen::VectorXd f = one_signed(var.data_sign);
            const Eigen::VectorXd g = one_signed(var.data_sign);
            const Eigen::VectorXd u = solver.solve(ops.load(f, g)).u.values;
            const double slack = 1e-12 * (1.0 + u.cwiseAbs().maxCoeff());
            // Wrong-signed part: u for the nonpositive variants, −u otherwise.
            const double violation = (var.data_sign < 0.0 ? u : Eigen::VectorXd(-u)).maxCoeff();
            out.worst_violation = std::max(out.worst_violation, violation);
            if (violation > slack) ++out.failures;
        }
        report.variants.push_back(out);
    }
    return report;
}

TransformIdentityReport transform_identity_check(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                               const ScalarField& u_field, const ScalarField& K_g,
                                               const ScalarField& sigma_g, std::uint64_t seed, int trials)
{
    validate_field(mesh, u_field, "u");
    validate_field(mesh, K_g, "K_g");
    validate_field(mesh, sigma_g, "sigma_g");
    const Eigen::VectorXd& u = u_field.values;
    if (u.cwiseAbs().maxCoeff() > 5.0)
        throw Error(Errc::precondition, "transform identity check needs |u| <= 5");

    const auto ops = assemble(mesh, metric);
    const Eigen::VectorXd& M = ops.interior_mass;
    const Eigen::VectorXd w = (-2.0 * u).array().exp().matrix();
    const Eigen::VectorXd Sw = ops.stiffness * w;
    const Eigen::VectorXd Su = ops.stiffness * u;
    const Eigen::VectorXd grad2 = gradient_norm_squared(mesh, metric, w);

    // Weak residuals of both sides. Boundary fluxes hidden in Sw and Su cancel
    // to leading order because ∂νw = −2w∂νu.
    Eigen::VectorXd d(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double lhs = Sw[i] + M[i] * (-2.0 * w[i] * K_g[i] + grad2[i] / w[i]);
        const double rhs = -2.0 * w[i] * (Su[i] + M[i] * K_g[i]);
        d[i] = lhs - rhs;
    }

    TransformIdentityReport report;
    report.h = metric.max_edge_length();
    const RobinSolver energy(ops, 1.0, Eigen::VectorXd::Zero(u.size()));
    report.interior_weak = std::sqrt(std::max(d.dot(energy.solve(d).u.values), 0.0));
    for (int v : mesh.interior_vertices()) report.interior_sup = std::max(report.interior_sup, std::abs(d[v]) / M[v]);

    const Eigen::VectorXd dn_u = boundary_normal_derivative(mesh, metric, u);
    const Eigen::VectorXd dn_w = boundary_normal_derivative(mesh, metric, w);
    double bl2 = 0.0;
    for (int v : mesh.boundary_vertices()) {
        const double e = (dn_w[v] - 2.0 * w[v] * sigma_g[v]) + 2.0 * w[v] * (dn_u[v] + sigma_g[v]);
        bl2 += ops.boundary_mass[v] * e * e;
    }
    report.boundary_l2 = std::sqrt(bl2);

    // Data for which u is an exact discrete solution, then perturbed by
    // random one-signed amounts well above the discretization error.
    Eigen::VectorXd K_star(u.size()), sigma_star(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        K_star[i] = std::exp(-2.0 * u[i]) * (Su[i] / M[i] + K_g[i]);
        sigma_star[i] = std::exp(-u[i]) * (dn_u[i] + sigma_g[i]);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        ++report.inequality_trials;
        for (int v : mesh.interior_vertices()) {
            const double delta = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * unit(rng)) *
                                 (1.0 + std::abs(K_star[v]));
            const double K = K_star[v] + delta;
            const double r_u = Su[v] / M[v] + K_g[v] - K * std::exp(2.0 * u[v]);
            const double r_w = Sw[v] / M[v] - 2.0 * w[v] * K_g[v] + grad2[v] / w[v] + 2.0 * K;
            if (sign_of(r_w) != -sign_of(r_u)) report.inequality_preserved = false;
        }
        for (int v : mesh.boundary_vertices()) {
            const double delta = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * unit(rng)) *
                                 (1.0 + std::abs(sigma_star[v]));
            const double s = sigma_star[v] + delta;
            const double r_u = dn_u[v] + sigma_g[v] - s * std::exp(u[v]);
            const double r_w = dn_w[v] - 2.0 * w[v] * sigma_g[v] + 2.0 * s * std::sqrt(w[v]);
            if (sign_of(r_w) != -sign_of(r_u)) report.inequality_preserved = false;
        }
    }
    return report;
}

VerificationReport conformal_rescale_verify(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                            const ScalarField& u, double scale, const ScalarField& K_target,
                                            const ScalarField& sigma_target, RescaleErrors* errors)
{
    validate_field(mesh, u, "u");
    validate_field(mesh, K_target, "K_target");
    validate_field(mesh, sigma_target, "sigma_target");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(Errc::precondition, "scale must be positive");

    const IntrinsicMetric rescaled = scale_metric(mesh, conformal_rescale(mesh, metric, u), scale);
    const auto dc = discrete_curvatures(mesh, rescaled);

    RescaleErrors err;
    err.h = metric.max_edge_length();
    double area = 0.0, length = 0.0;
    for (int v : mesh.interior_vertices()) {
        const double e = dc.interior_defect[v] / dc.dual_area[v] - K_target[v];
        err.interior_l2 += dc.dual_area[v] * e * e;
        err.interior_sup = std::max(err.interior_sup, std::abs(e));
        area += dc.dual_area[v];
    }
    for (int v : mesh.boundary_vertices()) {
        const double density =
            (dc.boundary_turning[v] - K_target[v] * dc.dual_area[v]) / dc.boundary_dual_length[v];
        const double e = density - sigma_target[v];
        err.boundary_l2 += dc.boundary_dual_length[v] * e * e;
        err.boundary_sup = std::max(err.boundary_sup, std::abs(e));
        length += dc.boundary_dual_length[v];
    }
    err.interior_l2 = std::sqrt(err.interior_l2);
    err.boundary_l2 = std::sqrt(err.boundary_l2);

    double k_max = 0.0, s_max = 0.0;
    for (int v : mesh.interior_vertices()) k_max = std::max(k_max, std::abs(K_target[v]));
    for (int v : mesh.boundary_vertices()) s_max = std::max(s_max, std::abs(sigma_target[v]));
    const double h_rescaled = rescaled.max_edge_length();

    VerificationReport report;
    report.gauss_bonnet_residual = gauss_bonnet_residual(mesh, rescaled);
    report.check_at_most("rescaled_gauss_bonnet", report.gauss_bonnet_residual, 1e-10);
    if (area > 0.0)
        report.check_at_most("interior_curvature_rms", err.interior_l2 / std::sqrt(area),
                             h_rescaled * (1.0 + k_max));
    report.check_at_most("boundary_curvature_rms", err.boundary_l2 / std::sqrt(length),
                         h_rescaled * (1.0 + s_max));
    report.metric("interior_l2_error", err.interior_l2);
    report.metric("interior_sup_error", err.interior_sup);
    report.metric("boundary_l2_error", err.boundary_l2);
    report.metric("boundary_sup_error", err.boundary_sup);
    report.metric("h", err.h);
    report.metric("h_rescaled", h_rescaled);
    if (errors) *errors = err;
    return report;
}

} // namespace curvforge
