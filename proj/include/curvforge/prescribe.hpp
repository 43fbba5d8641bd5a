#pragma once

#include <string>
#include <vector>

#include "curvforge/monotone.hpp"
#include "curvforge/verify.hpp"

namespace curvforge {

enum class ModelKind {
    flat_geodesic_boundary,      // K_g = 0, σ_g = 0, χ = 0
    flat_unit_boundary,          // K_g = 0, σ_g = ±1, sign χ = ±1
    constant_K_minimal_boundary, // K_g = ±1, σ_g = 0, sign χ = ±1
};

/// Constant-curvature representative declared for the input metric.
struct ModelForm {
    ModelKind kind = ModelKind::flat_geodesic_boundary;
    int sign = 0; // ±1 for the nonzero constant, 0 for flat_geodesic_boundary
    bool certified = false;
    double certification_error = 0.0; // max of interior and boundary rms density errors
    double model_tol = 0.0;

    [[nodiscard]] double K_g() const noexcept;
    [[nodiscard]] double sigma_g() const noexcept;
    [[nodiscard]] std::string name() const;

    /// flat-geodesic | flat-unit | flat-unit-neg | constant-K | constant-K-neg
    [[nodiscard]] static ModelForm parse(const std::string& name);
};

/// Checks that the declared constants agree with the sign of χ through
/// Gauss–Bonnet; throws Errc::precondition otherwise.
[[nodiscard]] ModelForm declare_model(const SurfaceMesh& mesh, ModelKind kind, int sign = 0);

/// Compares the discrete curvature densities of the metric with the model
/// constants in the root-mean-square sense. model_tol is 0.1·h.
void certify_model(const SurfaceMesh& mesh, const IntrinsicMetric& metric, ModelForm& model);

struct UniformizeResult {
    ScalarField u;          // mean-zero conformal factor to the flat geodesic model
    IntrinsicMetric metric; // conformal_rescale(metric, u)
    ModelForm model;
    double initial_curvature = 0.0; // Σ|defect| + Σ|turning| before
    double final_curvature = 0.0;   // after
    int newton_steps = 0;
};

/// χ = 0 only. Solves the compatible Neumann problem S u = −defect − turning,
/// then polishes with Newton steps on the exact angle sums while the rescaled
/// lengths stay a metric.
[[nodiscard]] UniformizeResult uniformize_chi0(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                               int max_newton = 8);

struct PrescribeOptions {
    double kappa = 1.0;  // Robin constant of the Gaussian pipeline
    double A = 1.0;      // zeroth-order coefficient of the geodesic pipeline
    double safety = 0.9; // applied to b or c only when the threshold binds
    IterationConfig iteration;
    BracketKnobs knobs;
};

struct PrescriptionResult {
    std::string pipeline;
    ModelForm model;
    ScalarField u;
    double metric_scale = 1.0; // the realized metric is metric_scale·e^{2u}g
    ScalarField realized_K;
    ScalarField realized_sigma;
    SemilinearProblem problem;
    Bracket bracket;
    IterationTrace trace;
    VerificationReport report;
    std::vector<std::string> warnings;
};

/// Realizes K (up to the constant b) with companion boundary curvature
/// (σ_g − κu)e^{−u}. Needs K_g = 0.
[[nodiscard]] PrescriptionResult prescribe_gaussian(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                                    const ModelForm& model, const ScalarField& K,
                                                    const PrescribeOptions& options = {});

/// Realizes σ exactly on the metric c²e^{2u}g with companion interior
/// curvature c⁻²(K_g − Au)e^{−2u}. Needs σ_g = 0.
[[nodiscard]] PrescriptionResult prescribe_geodesic(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                                    const ModelForm& model, const ScalarField& sigma,
                                                    const PrescribeOptions& options = {});

/// χ = 0 flat geodesic model, K < 0 and σ > 0 at every vertex. Realizes K and
/// c·σ with c = options.knobs.c or the bisected D.
[[nodiscard]] PrescriptionResult prescribe_pair_chi0(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                                     const ModelForm& model, const ScalarField& K,
                                                     const ScalarField& sigma, const PrescribeOptions& options = {});

struct FeasibilityReport {
    double integral_K = 0.0;
    ScalarField w;
    double w_min = 0.0;
    bool pass = false;
    std::vector<std::string> reasons;  // "integral_K >= 0", "w_min <= 0"
    std::vector<std::string> warnings; // unmet sign hypotheses on K
};

/// Necessary conditions for realizing (K, σ ≥ 0) when χ < 0: the solution of
/// S w = −2MK with Robin coefficient 2 is positive and ∫K < 0. A pass is
/// necessary only.
[[nodiscard]] FeasibilityReport check_necessary_negative_chi(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                                             const ScalarField& K, const ScalarField& sigma);

enum class SignPattern { nonnegative, nonpositive, positive, negative, changes };

[[nodiscard]] std::string to_string(SignPattern pattern);

/// True when the values at the listed vertices have the pattern.
[[nodiscard]] bool has_sign_pattern(const Eigen::VectorXd& values, std::span<const int> vertices,
                                    SignPattern pattern);

struct ExampleCase {
    std::string id; // "1".."8" or "chi0"
    ModelKind model_kind;
    int model_sign;
    SignPattern K_pattern;
    SignPattern sigma_pattern;
};

/// Table of the eight χ > 0 cases and the χ = 0 case.
[[nodiscard]] const std::vector<ExampleCase>& example_cases();
[[nodiscard]] const ExampleCase& example_case(const std::string& id);

struct ExampleOptions {
    double amplitude = 1.0; // scales the interior data of cases 1–3; 0 gives f ≡ 0
};

struct ExamplePair {
    ExampleCase entry;
    ScalarField interior_data; // f, B, F or b₁ (constant fields hold the constant)
    ScalarField boundary_data; // A, h, F′ or b₂
    double constant = 0.0;     // the compatibility-forced constant Aᵢ, Bᵢ, F₆′ mean, F₇, F₈′ or b₂
    ScalarField K;
    ScalarField sigma;
    ScalarField u;
    PrescriptionResult result;
};

/// Solves −Δu = data, ∂νu = boundary data (compatible) and emits
/// K = (data + K_g)e^{−2u}, σ = (boundary data + σ_g)e^{−u}. The result report
/// carries the sign-pattern and constant-window checks of the case.
[[nodiscard]] ExamplePair construct_example_pair(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                                 const ModelForm& model, const std::string& case_id,
                                                 const ExampleOptions& options = {});

/// Sign-changing interior and boundary patterns with max |·| = 1, mean zero
/// against the interior and boundary masses. Built from the lowest nonconstant
/// Neumann mode; the boundary pattern falls back to cos(2π·arc length) per loop
/// when the restricted mode does not change sign.
struct ModePatterns {
    Eigen::VectorXd interior;
    Eigen::VectorXd boundary;
};
[[nodiscard]] ModePatterns sign_changing_patterns(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                                  const EllipticOperators& ops);

} // namespace curvforge
