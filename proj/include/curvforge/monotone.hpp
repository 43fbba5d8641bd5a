#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvforge/elliptic.hpp"

namespace curvforge {

/// Discrete form of
///   −Δu + A u = K e^{2u} − interior_affine          in M
///   ∂νu + κ u = c σ e^{u} − boundary_affine         on ∂M
/// with residual r(u) = S u + A M u + κ B u − M F(u) − B G(u).
struct SemilinearProblem {
    double A = 0.0;
    double kappa = 0.0;
    ScalarField K;
    ScalarField sigma;
    double c = 1.0;
    ScalarField interior_affine; // e.g. K_g of a model metric
    ScalarField boundary_affine; // e.g. σ_g of a model metric

    /// All fields zero, A = κ = 0, c = 1.
    static SemilinearProblem zero(const SurfaceMesh& mesh);
    static SemilinearProblem zero(Eigen::Index vertex_count);

    [[nodiscard]] Eigen::VectorXd interior_reaction(const Eigen::VectorXd& u) const; // F(u)
    [[nodiscard]] Eigen::VectorXd boundary_reaction(const Eigen::VectorXd& u) const; // G(u)
};

[[nodiscard]] Eigen::VectorXd semilinear_residual(const EllipticOperators& ops,
                                                  const SemilinearProblem& problem,
                                                  const Eigen::VectorXd& u);

/// Entries are set only by the builder that estimates them.
struct Thresholds {
    std::optional<double> C0, C1, C2, C3, D;
    std::optional<double> shift;       // C or C̃ of the sub-solution
    std::optional<double> xi;          // neg_neumann super-solution factor
    std::optional<double> kappa_tilde; // neg_neumann boundary constant
};

struct Bracket {
    ScalarField u_minus;
    ScalarField u_plus;
    Thresholds thresholds;
};

struct BracketCheck {
    bool ordered = false;
    bool super_ok = false;
    bool sub_ok = false;
    double worst_super = 0.0; // most negative scaled super residual (≥ −tol passes)
    double worst_sub = 0.0;   // most positive scaled sub residual (≤ tol passes)
    int worst_super_vertex = -1;
    int worst_sub_vertex = -1;

    [[nodiscard]] bool ok() const noexcept { return ordered && super_ok && sub_ok; }
    [[nodiscard]] std::string describe() const;
};

/// Sign test of the discrete weak residual: r(u₊) ≥ −tol·sᵢ and r(u₋) ≤ tol·sᵢ
/// where sᵢ is the magnitude of the terms summed into rᵢ plus the vertex masses.
[[nodiscard]] BracketCheck check_bracket(const EllipticOperators& ops, const SemilinearProblem& problem,
                                         const Bracket& bracket, double tol = 1e-9);

struct IterationConfig {
    std::optional<double> shift_margin; // default 0.1·(1 + envelope)
    double tol = 1e-10;
    int max_iters = 20000;
    bool smallness_check = true;
    double bracket_tol = 1e-9;
    double monotone_slack = 1e-12;
};

struct IterationTrace {
    std::vector<double> deltas;    // ‖u_k − u_{k+1}‖∞
    std::vector<double> residuals; // max of interior and boundary normalized residuals
    std::vector<bool> monotone;    // u_{k+1} ≤ u_k within slack
    double lambda = 0.0;
    double mu = 0.0;
    int iterations = 0;
    bool converged = false;
    double smallness_G_sup = 0.0;      // sup |G(u₊)| on ∂M
    double smallness_G_gradient = 0.0; // rms gradient √(GᵀSG/Vol) of G(u₊)
};

struct IterationResult {
    ScalarField u;
    IterationTrace trace;
};

/// Shifted monotone iteration
///   (S + λM + μB) u_{k+1} = M[(λ−A)u_k + F(u_k)] + B[(μ−κ)u_k + G(u_k)],  u₀ = u₊,
/// with λ ≥ A + sup 2(−K)₊e^{2u₊} and μ ≥ κ + sup c(−σ)₊e^{u₊} so that the
/// update is order preserving. Throws Errc::bracket if the bracket does not
/// verify, Errc::iteration if an iterate leaves the bracket or increases,
/// Errc::nonconvergence after max_iters.
[[nodiscard]] IterationResult iterate(const EllipticOperators& ops, const SemilinearProblem& problem,
                                      const Bracket& bracket, const IterationConfig& config = {});

struct BracketKnobs {
    double f = 1.0;            // bm1 super-solution interior data
    double a = 1.0;            // bm1 boundary data / bm2 interior data
    double b = 1.0;            // bm2 boundary data
    double b1 = 1.0;           // magnitude of the constant Neumann interior data of the sub-solution
    double shift_cap = 0x1p60; // cap of the doubling search for C
    double kappa = 1.0;        // Robin constant of the χ = 0 super-solution problem
    double w_scale = 1.0;      // a in −aΔw₀ = −2K of the χ = 0 sub-solution (0 < a ≤ 1)
    double c_max = 1.0;
    double c_min = 1e-8;
    std::optional<double> c;   // χ = 0: use this c instead of the bisected D
    double q = 3.0;
    double kappa_tilde_factor = 0.9;
    double bracket_tol = 1e-9;
    IterationConfig iteration; // inner solves (χ = 0 super-solution)
};

struct BracketResult {
    SemilinearProblem problem;
    Bracket bracket;
};

struct SuperSolution {
    Eigen::VectorXd u0;
    double C_interior = 0.0; // C₀ or C₂
    double C_boundary = 0.0; // C₁ or C₃ (+∞ when σ ≤ 0)
};

/// −Δu₀ = f, ∂νu₀ + κu₀ = a; C₀ = min f e^{−2u₀}, C₁ = a / max σ₊e^{u₀}.
[[nodiscard]] SuperSolution bm1_supersolution(const EllipticOperators& ops, const ScalarField& sigma,
                                              double kappa, const BracketKnobs& knobs = {});

/// −Δu₀ + Au₀ = a, ∂νu₀ = b; C₂ = a e^{−2 max u₀}, C₃ = b / max σ₊e^{u₀}.
[[nodiscard]] SuperSolution bm2_supersolution(const EllipticOperators& ops, const ScalarField& sigma,
                                              double A, const BracketKnobs& knobs = {});

/// Bracket for −Δu = K e^{2u}, ∂νu + κu = cσe^{u}. Requires K ≤ C₀ and c ≤ C₁.
[[nodiscard]] BracketResult build_bracket_bm1(const EllipticOperators& ops, const ScalarField& K,
                                              const ScalarField& sigma, double kappa, double c,
                                              const BracketKnobs& knobs = {});

/// Bracket for −Δu + Au = K e^{2u}, ∂νu = cσe^{u}. Requires K ≤ C₂ and c ≤ C₃.
[[nodiscard]] BracketResult build_bracket_bm2(const EllipticOperators& ops, const ScalarField& K,
                                              const ScalarField& sigma, double A, double c,
                                              const BracketKnobs& knobs = {});

/// Bracket for −Δu = K e^{2u}, ∂νu = cσe^{u} with K < 0 < σ. The reported D
/// is the largest c in (0, c_max] found by bisection for which both halves verify.
[[nodiscard]] BracketResult build_bracket_chi0(const EllipticOperators& ops, const ScalarField& K,
                                               const ScalarField& sigma, const BracketKnobs& knobs = {});

/// Bracket for −Δu = K e^{2u}, ∂νu = κ̃ with K < 0 and κ̃ = factor·Vol^{−1/q}.
[[nodiscard]] BracketResult build_bracket_neg_neumann(const EllipticOperators& ops, const ScalarField& K,
                                                      const BracketKnobs& knobs = {});

} // namespace curvforge
