#include "curvforge/elliptic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>

#include "curvforge/error.hpp"
#include "curvforge/log.hpp"

namespace curvforge {

namespace {

constexpr double kRelativeResidual = 1e-12;
constexpr int kMaxRefinement = 4;

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double bn = b.norm();
    const double rn = (b - a * x).norm();
    return bn > 0.0 ? rn / bn : rn;
}

} // namespace

Eigen::VectorXd EllipticOperators::load(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const
{
    return interior_mass.cwiseProduct(f) + boundary_mass.cwiseProduct(g);
}

EllipticOperators assemble(const SurfaceMesh& mesh, const IntrinsicMetric& metric)
{
    const int nv = mesh.vertex_count();
    EllipticOperators ops;
    ops.interior_mass = Eigen::VectorXd::Zero(nv);
    ops.boundary_mass = Eigen::VectorXd::Zero(nv);
    std::vector<double> edge_weight(mesh.edge_count(), 0.0);

    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto lengths = metric.face_lengths(mesh, f);
        const auto geo = triangle_geometry(lengths);
        if (!(geo.area > 0.0))
            throw Error(Errc::triangle_inequality, "triangle inequality fails in face " + std::to_string(f));
        const auto& t = mesh.triangles()[f];
        for (int k = 0; k < 3; ++k) {
            edge_weight[mesh.face_edges(f)[k]] += 0.5 * geo.cotangents[k];
            ops.interior_mass[t[k]] += geo.area / 3.0;
        }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(4 * edge_weight.size());
    ops.min_weight = edge_weight.empty() ? 0.0 : edge_weight.front();
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto [a, b] = mesh.edges()[e];
        const double w = edge_weight[e];
        ops.min_weight = std::min(ops.min_weight, w);
        triplets.emplace_back(a, b, -w);
        triplets.emplace_back(b, a, -w);
        triplets.emplace_back(a, a, w);
        triplets.emplace_back(b, b, w);
        if (mesh.is_boundary_edge(e)) {
            ops.boundary_mass[a] += 0.5 * metric.length(e);
            ops.boundary_mass[b] += 0.5 * metric.length(e);
        }
    }
    ops.stiffness.resize(nv, nv);
    ops.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    ops.stiffness.makeCompressed();
    return ops;
}

RobinSolver::RobinSolver(const EllipticOperators& ops, double interior_coefficient,
                         const Eigen::VectorXd& robin)
{
    if (robin.size() != ops.size())
        throw Error(Errc::invalid_field, "robin coefficient has the wrong length");
    if (interior_coefficient < 0.0)
        throw Error(Errc::precondition, "interior coefficient must be nonnegative");
    double boundary_weight = 0.0;
    for (Eigen::Index i = 0; i < robin.size(); ++i) {
        if (ops.boundary_mass[i] == 0.0) continue;
        if (!std::isfinite(robin[i]) || robin[i] < 0.0)
            throw Error(Errc::precondition, "robin coefficient must be finite and nonnegative");
        boundary_weight += robin[i] * ops.boundary_mass[i];
    }
    if (interior_coefficient == 0.0 && boundary_weight == 0.0)
        throw Error(Errc::singular_system,
                    "robin coefficient vanishes identically; use the compatible Neumann solver");

    Eigen::VectorXd diag = interior_coefficient * ops.interior_mass + robin.cwiseProduct(ops.boundary_mass);
    matrix_ = ops.stiffness;
    matrix_.diagonal() += diag;
    factor_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(matrix_);
    if (factor_->info() != Eigen::Success)
        throw Error(Errc::singular_system, "sparse LDLT factorization failed");
    const auto d = factor_->vectorD();
    if (d.minCoeff() <= 1e-14 * d.cwiseAbs().maxCoeff())
        throw Error(Errc::singular_system, "system matrix is not positive definite");
}

SolveResult RobinSolver::solve(const Eigen::VectorXd& rhs) const
{
    SolveResult out;
    out.stats.factorization_reused = solves_->fetch_add(1) > 0;
    Eigen::VectorXd x = factor_->solve(rhs);
    double rel = relative_residual(matrix_, x, rhs);
    int sweeps = 0;
    while (rel > kRelativeResidual && sweeps < kMaxRefinement) {
        x += factor_->solve(rhs - matrix_ * x);
        rel = relative_residual(matrix_, x, rhs);
        ++sweeps;
    }
    if (rel > kRelativeResidual) {
        log::debug("LDLT refinement stalled at " + std::to_string(rel) + "; switching to CG");
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg(matrix_);
        cg.setTolerance(0.1 * kRelativeResidual);
        cg.setMaxIterations(10 * static_cast<int>(rhs.size()) + 100);
        x = cg.solveWithGuess(rhs, x);
        rel = relative_residual(matrix_, x, rhs);
        sweeps += static_cast<int>(cg.iterations());
        if (rel > kRelativeResidual)
            throw Error(Errc::nonconvergence,
                        "linear solve did not reach relative residual 1e-12 (got " + std::to_string(rel) + ")");
    }
    out.u = ScalarField::from_values(std::move(x));
    out.stats.residual_norm = rel;
    out.stats.iterations = sweeps;
    return out;
}

SolveResult solve_robin(const RobinProblem& problem)
{
    if (!problem.operators) throw Error(Errc::precondition, "robin problem without operators");
    const auto& ops = *problem.operators;
    for (const auto* field : {&problem.robin_coefficient, &problem.interior_rhs, &problem.boundary_rhs})
        if (field->size() != ops.size() || !field->values.allFinite())
            throw Error(Errc::invalid_field, "robin problem field has wrong length or non-finite entries");
    RobinSolver solver(ops, problem.interior_coefficient, problem.robin_coefficient.values);
    return solver.solve(ops.load(problem.interior_rhs.values, problem.boundary_rhs.values));
}

SolveResult solve_neumann_compatible(const EllipticOperators& ops, const ScalarField& interior_rhs,
                                     const ScalarField& boundary_rhs, const NeumannOptions& options)
{
    if (interior_rhs.size() != ops.size() || boundary_rhs.size() != ops.size() ||
        !interior_rhs.values.allFinite() || !boundary_rhs.values.allFinite())
        throw Error(Errc::invalid_field, "neumann data has wrong length or non-finite entries");

    Eigen::VectorXd f = interior_rhs.values;
    Eigen::VectorXd rhs = ops.load(f, boundary_rhs.values);
    const double integral = rhs.sum();
    const double scale = ops.interior_mass.cwiseProduct(f).cwiseAbs().sum() +
                         ops.boundary_mass.cwiseProduct(boundary_rhs.values).cwiseAbs().sum();
    if (std::abs(integral) > options.compat_tol * std::max(scale, 1e-300) && !options.project) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "neumann data incompatible: integral f + integral g = %.3e (scale %.3e)", integral, scale);
        throw Error(Errc::compatibility, buf);
    }
    // Remove the (tolerated or projected) remainder so the singular system is consistent.
    rhs -= ops.interior_mass * (integral / ops.volume());

    // Pinning one vertex: (S + α e₀e₀ᵀ)u = b with 1ᵀb = 0 forces u₀ = 0 and S u = b.
    const double alpha = ops.stiffness.diagonal().cwiseAbs().maxCoeff();
    SparseMatrix pinned = ops.stiffness;
    pinned.coeffRef(0, 0) += alpha;
    Eigen::SimplicialLDLT<SparseMatrix> factor(pinned);
    if (factor.info() != Eigen::Success)
        throw Error(Errc::singular_system, "neumann factorization failed");
    Eigen::VectorXd x = factor.solve(rhs);
    int sweeps = 0;
    double rel = relative_residual(pinned, x, rhs);
    while (rel > kRelativeResidual && sweeps < kMaxRefinement) {
        x += factor.solve(rhs - pinned * x);
        rel = relative_residual(pinned, x, rhs);
        ++sweeps;
    }
    x.array() -= ops.interior_mass.dot(x) / ops.volume();
    rel = relative_residual(ops.stiffness, x, rhs);
    if (rel > kRelativeResidual)
        throw Error(Errc::nonconvergence,
                    "neumann solve did not reach relative residual 1e-12 (got " + std::to_string(rel) + ")");
    return {ScalarField::from_values(std::move(x)), {rel, sweeps, false}};
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& matrix)
{
    std::ofstream out(path);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
    char buf[64];
    for (int k = 0; k < matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
        }
}

} // namespace curvforge
