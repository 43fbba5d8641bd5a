#include "curvforge/monotone.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "curvforge/error.hpp"
#include "curvforge/log.hpp"

namespace curvforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

// Magnitude of the terms that enter each residual entry.
Eigen::VectorXd residual_scale(const EllipticOperators& ops, const SemilinearProblem& p,
                               const Eigen::VectorXd& u)
{
    const Eigen::VectorXd abs_u = u.cwiseAbs();
    Eigen::VectorXd s = Eigen::VectorXd::Zero(u.size());
    for (int k = 0; k < ops.stiffness.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(ops.stiffness, k); it; ++it)
            s[it.row()] += std::abs(it.value()) * abs_u[it.col()];
    s += ops.interior_mass.cwiseProduct(p.A * abs_u + p.interior_reaction(u).cwiseAbs());
    s += ops.boundary_mass.cwiseProduct(p.kappa * abs_u + p.boundary_reaction(u).cwiseAbs());
    s += ops.interior_mass + ops.boundary_mass;
    return s;
}

void validate_problem(const EllipticOperators& ops, const SemilinearProblem& p)
{
    for (const auto* f : {&p.K, &p.sigma, &p.interior_affine, &p.boundary_affine})
        if (f->size() != ops.size() || !f->values.allFinite())
            throw Error(Errc::invalid_field, "semilinear problem field has wrong length or non-finite entries");
    if (p.A < 0.0 || p.kappa < 0.0 || p.c < 0.0)
        throw Error(Errc::precondition, "A, kappa and c must be nonnegative");
}

double boundary_max(const EllipticOperators& ops, const Eigen::VectorXd& v)
{
    double m = -kInf;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (ops.boundary_mass[i] > 0.0) m = std::max(m, v[i]);
    return m;
}

// Doubling search u₋ = base − C until the sub-solution side and the order verify.
Bracket shift_down(const EllipticOperators& ops, const SemilinearProblem& problem,
                   const Eigen::VectorXd& base, const Eigen::VectorXd& u_plus, const BracketKnobs& knobs)
{
    Bracket bracket{ScalarField::from_values(base), ScalarField::from_values(u_plus), {}};
    BracketCheck last;
    for (double C = 1.0; C <= knobs.shift_cap; C *= 2.0) {
        bracket.u_minus.values = base.array() - C;
        last = check_bracket(ops, problem, bracket, knobs.bracket_tol);
        if (last.ordered && last.sub_ok) {
            bracket.thresholds.shift = C;
            return bracket;
        }
    }
    throw Error(Errc::bracket, "sub-solution shift search exceeded its cap: " + last.describe());
}

} // namespace

SemilinearProblem SemilinearProblem::zero(Eigen::Index n)
{
    SemilinearProblem p;
    const auto z = ScalarField::from_values(Eigen::VectorXd::Zero(n));
    p.K = z;
    p.sigma = ScalarField::from_values(Eigen::VectorXd::Zero(n), FieldDomain::boundary);
    p.interior_affine = z;
    p.boundary_affine = ScalarField::from_values(Eigen::VectorXd::Zero(n), FieldDomain::boundary);
    return p;
}

SemilinearProblem SemilinearProblem::zero(const SurfaceMesh& mesh)
{
    return zero(mesh.vertex_count());
}

Eigen::VectorXd SemilinearProblem::interior_reaction(const Eigen::VectorXd& u) const
{
    return K.values.cwiseProduct((2.0 * u).array().exp().matrix()) - interior_affine.values;
}

Eigen::VectorXd SemilinearProblem::boundary_reaction(const Eigen::VectorXd& u) const
{
    return c * sigma.values.cwiseProduct(u.array().exp().matrix()) - boundary_affine.values;
}

Eigen::VectorXd semilinear_residual(const EllipticOperators& ops, const SemilinearProblem& p,
                                    const Eigen::VectorXd& u)
{
    Eigen::VectorXd r = ops.stiffness * u;
    r += ops.interior_mass.cwiseProduct(p.A * u - p.interior_reaction(u));
    r += ops.boundary_mass.cwiseProduct(p.kappa * u - p.boundary_reaction(u));
    return r;
}

std::string BracketCheck::describe() const
{
    std::string s = ordered ? "ordered" : "u_minus > u_plus somewhere";
    s += super_ok ? ", super ok" : fmt(", super violated (%.3e at vertex %.0f)", worst_super, worst_super_vertex);
    s += sub_ok ? ", sub ok" : fmt(", sub violated (%.3e at vertex %.0f)", worst_sub, worst_sub_vertex);
    return s;
}

BracketCheck check_bracket(const EllipticOperators& ops, const SemilinearProblem& problem,
                           const Bracket& bracket, double tol)
{
    validate_problem(ops, problem);
    const auto& up = bracket.u_plus.values;
    const auto& um = bracket.u_minus.values;
    BracketCheck out;
    out.ordered = (um.array() <= up.array()).all();

    const Eigen::VectorXd r_plus = semilinear_residual(ops, problem, up);
    const Eigen::VectorXd s_plus = residual_scale(ops, problem, up);
    out.worst_super = kInf;
    for (Eigen::Index i = 0; i < up.size(); ++i) {
        const double v = r_plus[i] / s_plus[i];
        if (v < out.worst_super) {
            out.worst_super = v;
            out.worst_super_vertex = static_cast<int>(i);
        }
    }
    out.super_ok = out.worst_super >= -tol;

    const Eigen::VectorXd r_minus = semilinear_residual(ops, problem, um);
    const Eigen::VectorXd s_minus = residual_scale(ops, problem, um);
    out.worst_sub = -kInf;
    for (Eigen::Index i = 0; i < um.size(); ++i) {
        const double v = r_minus[i] / s_minus[i];
        if (!std::isfinite(v)) continue;
        if (v > out.worst_sub) {
            out.worst_sub = v;
            out.worst_sub_vertex = static_cast<int>(i);
        }
    }
    out.sub_ok = out.worst_sub <= tol && r_minus.allFinite();
    return out;
}

IterationResult iterate(const EllipticOperators& ops, const SemilinearProblem& problem,
                        const Bracket& bracket, const IterationConfig& config)
{
    if (!(config.tol > 0.0) || config.max_iters < 1)
        throw Error(Errc::precondition, "iteration needs tol > 0 and max_iters >= 1");
    validate_problem(ops, problem);
    const auto check = check_bracket(ops, problem, bracket, config.bracket_tol);
    if (!check.ok()) throw Error(Errc::bracket, "bracket does not verify: " + check.describe());

    const Eigen::VectorXd& up = bracket.u_plus.values;
    const Eigen::VectorXd& um = bracket.u_minus.values;
    const Eigen::Index n = up.size();

    double lambda0 = problem.A;
    double mu0 = problem.kappa;
    {
        double env_in = 0.0, env_bd = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            env_in = std::max(env_in, 2.0 * std::max(-problem.K[i], 0.0) * std::exp(2.0 * up[i]));
            if (ops.boundary_mass[i] > 0.0)
                env_bd = std::max(env_bd, problem.c * std::max(-problem.sigma[i], 0.0) * std::exp(up[i]));
        }
        lambda0 += env_in;
        mu0 += env_bd;
    }

    IterationTrace trace;
    trace.lambda = lambda0 + config.shift_margin.value_or(0.1 * (1.0 + lambda0));
    trace.mu = mu0 + config.shift_margin.value_or(0.1 * (1.0 + mu0));

    if (config.smallness_check) {
        const Eigen::VectorXd G = problem.boundary_reaction(up);
        double sup = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (ops.boundary_mass[i] > 0.0) sup = std::max(sup, std::abs(G[i]));
        trace.smallness_G_sup = sup;
        trace.smallness_G_gradient = std::sqrt(std::max(G.dot(ops.stiffness * G), 0.0) / ops.volume());
    }

    const RobinSolver solver(ops, trace.lambda, Eigen::VectorXd::Constant(n, trace.mu));
    Eigen::VectorXd u = up;
    int stalled = 0;
    for (int k = 1; k <= config.max_iters; ++k) {
        const Eigen::VectorXd rhs =
            ops.load((trace.lambda - problem.A) * u + problem.interior_reaction(u),
                     (trace.mu - problem.kappa) * u + problem.boundary_reaction(u));
        Eigen::VectorXd next = solver.solve(rhs).u.values;

        const double slack = config.monotone_slack * std::max(1.0, u.cwiseAbs().maxCoeff());
        const bool monotone = ((next - u).array() <= slack).all();
        trace.monotone.push_back(monotone);
        trace.deltas.push_back((next - u).cwiseAbs().maxCoeff());
        trace.iterations = k;
        if (!monotone) {
            Eigen::Index at = 0;
            const double rise = (next - u).maxCoeff(&at);
            throw Error(Errc::iteration,
                        fmt("iterate %.0f increased by %.3e at vertex %.0f; shifts too small or mesh too coarse",
                            k, rise, static_cast<double>(at)));
        }
        if (((um - next).array() > slack).any()) {
            Eigen::Index at = 0;
            (um - next).maxCoeff(&at);
            throw Error(Errc::iteration, fmt("iterate %.0f dropped below the sub-solution at vertex %.0f", k,
                                             static_cast<double>(at)));
        }
        u = std::move(next);

        const Eigen::VectorXd r = semilinear_residual(ops, problem, u);
        double res = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = ops.boundary_mass[i] > 0.0 ? ops.boundary_mass[i] : ops.interior_mass[i];
            res = std::max(res, std::abs(r[i]) / w);
        }
        trace.residuals.push_back(res);
        if (k % 100 == 0) log::debug(fmt("iteration %.0f residual %.3e delta %.3e", k, res, trace.deltas.back()));
        if (res <= config.tol) {
            trace.converged = true;
            break;
        }
        stalled = trace.deltas.back() == 0.0 ? stalled + 1 : 0;
        if (stalled >= 20)
            throw Error(Errc::nonconvergence,
                        fmt("iteration stalled at residual %.3e above tol %.3e", res, config.tol));
    }
    if (!trace.converged) {
        std::string msg = fmt("monotone iteration did not reach tol %.3e in %.0f iterations (residual %.3e)",
                              config.tol, config.max_iters, trace.residuals.back());
        if (config.smallness_check)
            msg += fmt("; smallness diagnostic sup|G| = %.3e, rms|grad G| = %.3e", trace.smallness_G_sup,
                       trace.smallness_G_gradient);
        throw Error(Errc::nonconvergence, msg);
    }
    log::info(fmt("monotone iteration converged in %.0f iterations (lambda %.4g, mu %.4g)", trace.iterations,
                  trace.lambda, trace.mu));
    return {ScalarField::from_values(std::move(u)), std::move(trace)};
}

SuperSolution bm1_supersolution(const EllipticOperators& ops, const ScalarField& sigma, double kappa,
                                const BracketKnobs& knobs)
{
    if (!(kappa > 0.0)) throw Error(Errc::precondition, "bm1 bracket needs kappa > 0");
    if (!(knobs.f > 0.0) || !(knobs.a > 0.0)) throw Error(Errc::precondition, "bm1 needs f > 0 and a > 0");
    const Eigen::Index n = ops.size();
    const RobinSolver solver(ops, 0.0, Eigen::VectorXd::Constant(n, kappa));
    SuperSolution s;
    s.u0 = solver.solve(ops.load(Eigen::VectorXd::Constant(n, knobs.f), Eigen::VectorXd::Constant(n, knobs.a)))
               .u.values;
    s.C_interior = (knobs.f * (-2.0 * s.u0).array().exp()).minCoeff();
    const double peak = boundary_max(ops, sigma.values.cwiseMax(0.0).cwiseProduct(s.u0.array().exp().matrix()));
    s.C_boundary = peak > 0.0 ? knobs.a / peak : kInf;
    return s;
}

SuperSolution bm2_supersolution(const EllipticOperators& ops, const ScalarField& sigma, double A,
                                const BracketKnobs& knobs)
{
    if (!(A > 0.0)) throw Error(Errc::precondition, "bm2 bracket needs A > 0");
    if (!(knobs.a > 0.0) || !(knobs.b > 0.0)) throw Error(Errc::precondition, "bm2 needs a > 0 and b > 0");
    const Eigen::Index n = ops.size();
    const RobinSolver solver(ops, A, Eigen::VectorXd::Zero(n));
    SuperSolution s;
    s.u0 = solver.solve(ops.load(Eigen::VectorXd::Constant(n, knobs.a), Eigen::VectorXd::Constant(n, knobs.b)))
               .u.values;
    s.C_interior = knobs.a * std::exp(-2.0 * s.u0.maxCoeff());
    const double peak = boundary_max(ops, sigma.values.cwiseMax(0.0).cwiseProduct(s.u0.array().exp().matrix()));
    s.C_boundary = peak > 0.0 ? knobs.b / peak : kInf;
    return s;
}

BracketResult build_bracket_bm1(const EllipticOperators& ops, const ScalarField& K, const ScalarField& sigma,
                                double kappa, double c, const BracketKnobs& knobs)
{
    const auto sup = bm1_supersolution(ops, sigma, kappa, knobs);
    SemilinearProblem problem = SemilinearProblem::zero(ops.size());
    problem.kappa = kappa;
    problem.K = K;
    problem.sigma = sigma;
    problem.c = c;
    validate_problem(ops, problem);
    if (K.values.maxCoeff() > sup.C_interior)
        throw Error(Errc::bracket, fmt("max K = %.6g exceeds C0 = %.6g; scale K down", K.values.maxCoeff(),
                                       sup.C_interior));
    if (c > sup.C_boundary)
        throw Error(Errc::bracket, fmt("c = %.6g exceeds C1 = %.6g", c, sup.C_boundary));

    const Eigen::Index n = ops.size();
    const double b2 = knobs.b1 * ops.volume() / ops.boundary_length();
    const auto u1 = solve_neumann_compatible(ops, ScalarField::from_values(Eigen::VectorXd::Constant(n, -knobs.b1)),
                                             ScalarField::from_values(Eigen::VectorXd::Constant(n, b2)));
    auto bracket = shift_down(ops, problem, u1.u.values, sup.u0, knobs);
    bracket.thresholds.C0 = sup.C_interior;
    bracket.thresholds.C1 = sup.C_boundary;
    if (!check_bracket(ops, problem, bracket, knobs.bracket_tol).super_ok)
        throw Error(Errc::bracket, "bm1 super-solution does not verify discretely");
    return {std::move(problem), std::move(bracket)};
}

BracketResult build_bracket_bm2(const EllipticOperators& ops, const ScalarField& K, const ScalarField& sigma,
                                double A, double c, const BracketKnobs& knobs)
{
    const auto sup = bm2_supersolution(ops, sigma, A, knobs);
    SemilinearProblem problem = SemilinearProblem::zero(ops.size());
    problem.A = A;
    problem.K = K;
    problem.sigma = sigma;
    problem.c = c;
    validate_problem(ops, problem);
    if (K.values.maxCoeff() > sup.C_interior)
        throw Error(Errc::bracket, fmt("max K = %.6g exceeds C2 = %.6g; scale K down", K.values.maxCoeff(),
                                       sup.C_interior));
    if (c > sup.C_boundary)
        throw Error(Errc::bracket, fmt("c = %.6g exceeds C3 = %.6g", c, sup.C_boundary));

    const Eigen::Index n = ops.size();
    const double b2 = -knobs.b1 * ops.volume() / ops.boundary_length();
    const auto u1 = solve_neumann_compatible(ops, ScalarField::from_values(Eigen::VectorXd::Constant(n, knobs.b1)),
                                             ScalarField::from_values(Eigen::VectorXd::Constant(n, b2)));
    auto bracket = shift_down(ops, problem, u1.u.values, sup.u0, knobs);
    bracket.thresholds.C2 = sup.C_interior;
    bracket.thresholds.C3 = sup.C_boundary;
    if (!check_bracket(ops, problem, bracket, knobs.bracket_tol).super_ok)
        throw Error(Errc::bracket, "bm2 super-solution does not verify discretely");
    return {std::move(problem), std::move(bracket)};
}

BracketResult build_bracket_chi0(const EllipticOperators& ops, const ScalarField& K, const ScalarField& sigma,
                                 const BracketKnobs& knobs)
{
    const Eigen::Index n = ops.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(K[static_cast<int>(i)] < 0.0))
            throw Error(Errc::precondition, fmt("K must be negative everywhere (K = %.6g at vertex %.0f)",
                                                K[static_cast<int>(i)], static_cast<double>(i)));
        if (ops.boundary_mass[i] > 0.0 && !(sigma[static_cast<int>(i)] > 0.0))
            throw Error(Errc::precondition, fmt("sigma must be positive on the boundary (sigma = %.6g at vertex %.0f)",
                                                sigma[static_cast<int>(i)], static_cast<double>(i)));
    }
    if (!(knobs.w_scale > 0.0 && knobs.w_scale <= 1.0))
        throw Error(Errc::precondition, "w_scale must lie in (0, 1]");

    // Super-solution: −Δu₀ = K e^{2u₀}, ∂νu₀ + κu₀ = 0, solved by the same engine.
    const auto zero_sigma = ScalarField::from_values(Eigen::VectorXd::Zero(n), FieldDomain::boundary);
    const auto inner = build_bracket_bm1(ops, K, zero_sigma, knobs.kappa, 0.0, knobs);
    const auto u0 = iterate(ops, inner.problem, inner.bracket, knobs.iteration).u.values;
    if (!(u0.maxCoeff() < 0.0))
        throw Error(Errc::bracket, fmt("chi0 super-solution is not negative (max %.3e); cotangent weights "
                                       "may be negative on this mesh", u0.maxCoeff()));

    SemilinearProblem problem = SemilinearProblem::zero(n);
    problem.K = K;
    problem.sigma = sigma;

    // Sub-solution in w = e^{−2u}: S w₀ = M(−2K/a) + B·A_w with A_w forced by compatibility.
    const double A_w = 2.0 * ops.interior_mass.dot(K.values) / (knobs.w_scale * ops.boundary_length());
    const auto w0 = solve_neumann_compatible(ops, ScalarField::from_values(-2.0 * K.values / knobs.w_scale),
                                             ScalarField::from_values(Eigen::VectorXd::Constant(n, A_w)))
                        .u.values;

    auto try_c = [&](double c, Bracket& out) {
        problem.c = c;
        Bracket b{ScalarField::from_values(u0), ScalarField::from_values(u0), {}};
        if (!check_bracket(ops, problem, b, knobs.bracket_tol).super_ok) return false;
        for (double C = 1.0; C <= knobs.shift_cap; C *= 2.0) {
            const Eigen::VectorXd w1 = w0.array() + (C - w0.minCoeff());
            b.u_minus.values = -0.5 * w1.array().log();
            const auto chk = check_bracket(ops, problem, b, knobs.bracket_tol);
            if (chk.ordered && chk.sub_ok) {
                b.thresholds.shift = C - w0.minCoeff();
                out = std::move(b);
                return true;
            }
        }
        return false;
    };

    Bracket best;
    double D = 0.0;
    if (try_c(knobs.c_max, best)) {
        D = knobs.c_max;
    } else {
        Bracket probe;
        if (!try_c(knobs.c_min, probe))
            throw Error(Errc::bracket, fmt("no admissible c above c_min = %.3e", knobs.c_min));
        double lo = knobs.c_min, hi = knobs.c_max;
        for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            Bracket trial;
            if (try_c(mid, trial)) lo = mid;
            else hi = mid;
        }
        D = lo;
    }
    const double c = knobs.c.value_or(D);
    if (c > D) throw Error(Errc::bracket, fmt("requested c = %.6g exceeds D = %.6g", c, D));
    if (!try_c(c, best)) throw Error(Errc::bracket, fmt("bracket does not verify at c = %.6g", c));
    problem.c = c;
    best.thresholds.D = D;
    return {std::move(problem), std::move(best)};
}

BracketResult build_bracket_neg_neumann(const EllipticOperators& ops, const ScalarField& K,
                                        const BracketKnobs& knobs)
{
    const Eigen::Index n = ops.size();
    if (!(K.values.maxCoeff() < 0.0))
        throw Error(Errc::precondition, "K must be negative everywhere");
    if (!(knobs.q > 2.0)) throw Error(Errc::precondition, "q must exceed 2");
    const double vol = ops.volume();
    const double kt = knobs.kappa_tilde_factor * std::pow(vol, -1.0 / knobs.q);
    if (!(kt * std::pow(vol, 1.0 / knobs.q) < 1.0) || !(kt > 0.0))
        throw Error(Errc::precondition, "kappa_tilde * Vol^(1/q) must lie in (0, 1)");

    SemilinearProblem problem = SemilinearProblem::zero(n);
    problem.K = K;
    problem.c = 0.0;
    problem.boundary_affine.values.setConstant(-kt);

    const RobinSolver robin(ops, 0.0, Eigen::VectorXd::Constant(n, 2.0 * kt));
    const Eigen::VectorXd w0 = robin.solve(ops.load(-K.values, Eigen::VectorXd::Zero(n))).u.values;
    if (!(w0.minCoeff() > 0.0))
        throw Error(Errc::bracket, fmt("w0 is not positive (min %.3e); mesh quality issue", w0.minCoeff()));

    Bracket bracket;
    double xi = 1.0;
    BracketCheck chk;
    bool found = false;
    for (int halvings = 0; halvings < 200; ++halvings, xi *= 0.5) {
        bracket.u_plus = ScalarField::from_values(-0.5 * (xi * w0).array().log().matrix());
        bracket.u_minus = bracket.u_plus;
        chk = check_bracket(ops, problem, bracket, knobs.bracket_tol);
        if (chk.super_ok) {
            found = true;
            break;
        }
    }
    if (!found) throw Error(Errc::bracket, "xi search failed: " + chk.describe());

    const double A_c = -kt * ops.boundary_length() / vol;
    const auto u0 = solve_neumann_compatible(ops, ScalarField::from_values(Eigen::VectorXd::Constant(n, A_c)),
                                             ScalarField::from_values(Eigen::VectorXd::Constant(n, kt)));
    auto shifted = shift_down(ops, problem, u0.u.values, bracket.u_plus.values, knobs);
    shifted.thresholds.xi = xi;
    shifted.thresholds.kappa_tilde = kt;
    return {std::move(problem), std::move(shifted)};
}

} // namespace curvforge
