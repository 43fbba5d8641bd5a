#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "curvforge/surface_mesh.hpp"

namespace curvforge {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Cotangent stiffness (discretizing −Δ) with lumped interior and boundary masses.
struct EllipticOperators {
    SparseMatrix stiffness;
    Eigen::VectorXd interior_mass; // barycentric dual areas
    Eigen::VectorXd boundary_mass; // half incident boundary edge lengths, 0 inside
    double min_weight = 0.0;       // smallest edge weight ½(cot α + cot β)

    [[nodiscard]] bool nonnegative_weights() const noexcept { return min_weight >= -1e-12; }
    [[nodiscard]] double volume() const { return interior_mass.sum(); }
    [[nodiscard]] double boundary_length() const { return boundary_mass.sum(); }
    [[nodiscard]] Eigen::Index size() const { return interior_mass.size(); }

    /// M f + B g, the discrete load vector of interior data f and boundary data g.
    [[nodiscard]] Eigen::VectorXd load(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
};

[[nodiscard]] EllipticOperators assemble(const SurfaceMesh& mesh, const IntrinsicMetric& metric);

struct SolveStats {
    double residual_norm = 0.0; // relative algebraic residual
    int iterations = 0;         // refinement sweeps or CG iterations
    bool factorization_reused = false;
};

struct SolveResult {
    ScalarField u;
    SolveStats stats;
};

/// Factorization of S + a·M + diag(robin ⊙ B), cached for repeated solves.
///
/// The matrix must be positive definite: a > 0 or robin ≥ 0 and nonzero on
/// the boundary. Solves are const and may run concurrently.
class RobinSolver {
public:
    RobinSolver(const EllipticOperators& ops, double interior_coefficient,
                const Eigen::VectorXd& robin);

    /// Solves with an assembled right-hand side.
    [[nodiscard]] SolveResult solve(const Eigen::VectorXd& rhs) const;

    [[nodiscard]] const SparseMatrix& matrix() const noexcept { return matrix_; }

private:
    SparseMatrix matrix_;
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> factor_;
    std::shared_ptr<std::atomic<long>> solves_ = std::make_shared<std::atomic<long>>(0);
};

struct RobinProblem {
    const EllipticOperators* operators = nullptr;
    ScalarField robin_coefficient; // c(x) or constant κ, read at boundary vertices
    ScalarField interior_rhs;
    ScalarField boundary_rhs;
    double interior_coefficient = 0.0; // optional zeroth-order term a·u in M
};

/// (S + a M + B·diag(c)) u = M f + B f̃. Throws Errc::singular_system when
/// the operator has constants in its kernel and Errc::precondition on c < 0.
[[nodiscard]] SolveResult solve_robin(const RobinProblem& problem);

struct NeumannOptions {
    double compat_tol = 1e-8;
    bool project = false; // remove an incompatible constant from interior_rhs
};

/// Mean-zero (dual-area weighted) solution of S u = M f + B g.
/// Throws Errc::compatibility when ∫f + ∮g is not zero within compat_tol
/// relative to the data scale, unless projection is requested.
[[nodiscard]] SolveResult solve_neumann_compatible(const EllipticOperators& ops,
                                                   const ScalarField& interior_rhs,
                                                   const ScalarField& boundary_rhs,
                                                   const NeumannOptions& options = {});

/// Debug export in MatrixMarket coordinate format.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& matrix);

} // namespace curvforge
