#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvforge/monotone.hpp"

namespace curvforge {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
};

struct Metric {
    std::string name;
    double value = 0.0;
};

struct VerificationReport {
    double gauss_bonnet_residual = 0.0;
    double pde_residual_sup = 0.0;
    double boundary_residual_sup = 0.0;
    bool maxprin_applicable = false;
    std::vector<Check> checks;
    std::vector<Metric> metrics;

    /// Records |value| ≤ tolerance; NaN fails.
    void check_at_most(std::string name, double value, double tolerance);
    void check(std::string name, bool pass, double value = 0.0, double tolerance = 0.0);
    void metric(std::string name, double value);
    /// Appends the other report's checks and metrics with a name prefix.
    void merge(const VerificationReport& other, const std::string& prefix);

    [[nodiscard]] bool passed() const noexcept;
    [[nodiscard]] const Check* find_check(const std::string& name) const;
    [[nodiscard]] double metric_value(const std::string& name) const; // NaN when absent
};

/// (total defect + total turning) − 2πχ.
[[nodiscard]] double gauss_bonnet_residual(const SurfaceMesh& mesh, const IntrinsicMetric& metric);

struct PdeResidual {
    double interior_sup = 0.0; // max |rᵢ|/Mᵢ over interior vertices
    double boundary_sup = 0.0; // max |rᵢ|/Bᵢ over boundary vertices
};

/// Mass-normalized residual of the discrete weak form, recomputed from scratch.
[[nodiscard]] PdeResidual pde_residual(const EllipticOperators& ops, const SemilinearProblem& problem,
                                       const Eigen::VectorXd& u);

struct ProbeVariant {
    std::string name;
    int trials = 0;
    int failures = 0;
    double worst_violation = 0.0; // largest wrong-signed entry over all trials
};

struct MaximumPrincipleReport {
    bool applicable = false;
    std::string reason; // set when not applicable
    std::vector<ProbeVariant> variants;

    [[nodiscard]] bool passed() const noexcept;
};

/// Solves Robin problems with random one-signed data and checks the sign of
/// the solution vertexwise: f, g ≤ 0 ⇒ u ≤ 0 and f, g ≥ 0 ⇒ u ≥ 0 with
/// coefficient κ, and f, g ≤ 0 ⇒ u ≤ 0 for −Δu + u with Neumann data.
/// Not applicable when some cotangent weight is negative.
[[nodiscard]] MaximumPrincipleReport maximum_principle_probe(const EllipticOperators& ops, double kappa,
                                                             int trials = 100, std::uint64_t seed = 42);

struct TransformIdentityReport {
    double interior_weak = 0.0;     // √(dᵀ(S+M)⁻¹d), d the weak discrepancy
    double interior_sup = 0.0;      // max |dᵢ|/Mᵢ over interior vertices
    double boundary_l2 = 0.0;       // boundary L² discrepancy of the normal derivative identity
    bool inequality_preserved = true;
    int inequality_trials = 0;
    double h = 0.0;
};

/// Compares both sides of
///   −Δw − 2wK_g + |∇w|²/w = −2e^{−2u}(−Δu + K_g),   ∂νw − 2wσ_g = −2w(∂νu + σ_g)
/// for w = e^{−2u}. The inequality test perturbs K and σ around the values that
/// make u an exact solution and checks that the sign of the u-side residual and
/// of the w-side residual agree at every vertex.
[[nodiscard]] TransformIdentityReport transform_identity_check(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                                             const ScalarField& u, const ScalarField& K_g,
                                                             const ScalarField& sigma_g, std::uint64_t seed = 42,
                                                             int trials = 20);

struct RescaleErrors {
    double interior_l2 = 0.0;  // dual-area weighted, over interior vertices
    double interior_sup = 0.0;
    double boundary_l2 = 0.0;  // dual-length weighted, over boundary vertices
    double boundary_sup = 0.0;
    double h = 0.0;            // longest edge of the input metric
};

/// Rescales lengths by √scale·e^{(uᵢ+uⱼ)/2} and compares the resulting
/// curvature densities with the targets. The boundary density is taken after
/// removing the interior curvature carried by the boundary dual cell:
/// (turningᵢ − K_targetᵢ·Ãᵢ)/ℓ̃ᵢ. The report checks the root-mean-square
/// errors against h·(1 + max|target|).
[[nodiscard]] VerificationReport conformal_rescale_verify(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                                          const ScalarField& u, double scale,
                                                          const ScalarField& K_target,
                                                          const ScalarField& sigma_target,
                                                          RescaleErrors* errors = nullptr);

} // namespace curvforge
