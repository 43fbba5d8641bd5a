#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace curvforge {

using Vec3 = std::array<double, 3>;
using Triangle = std::array<int, 3>;
using EdgeVertices = std::array<int, 2>;

/// Combinatorial triangulated surface with (possibly empty) boundary.
///
/// Construction validates the complex: every edge has one or two incident
/// triangles, every vertex has a single fan, the surface is connected and
/// orientable. Triangles are re-oriented consistently with the first input
/// triangle when needed. Edges are numbered in order of first appearance.
class SurfaceMesh {
public:
    static SurfaceMesh from_triangles(int vertex_count, std::vector<Triangle> triangles);

    [[nodiscard]] int vertex_count() const noexcept { return vertex_count_; }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    [[nodiscard]] int face_count() const noexcept { return static_cast<int>(triangles_.size()); }

    [[nodiscard]] std::span<const Triangle> triangles() const noexcept { return triangles_; }
    [[nodiscard]] std::span<const EdgeVertices> edges() const noexcept { return edges_; }

    /// Edge opposite corner k of face f, for k = 0, 1, 2.
    [[nodiscard]] const std::array<int, 3>& face_edges(int f) const { return face_edges_[f]; }
    /// Incident faces of edge e; the second entry is -1 on boundary edges.
    [[nodiscard]] const std::array<int, 2>& edge_faces(int e) const { return edge_faces_[e]; }

    [[nodiscard]] bool is_boundary_edge(int e) const { return edge_faces_[e][1] < 0; }
    [[nodiscard]] bool is_boundary_vertex(int v) const { return boundary_next_[v] >= 0; }

    /// Boundary loops traversed with the surface on the left.
    [[nodiscard]] const std::vector<std::vector<int>>& boundary_loops() const noexcept { return loops_; }
    /// All boundary vertices, loop by loop.
    [[nodiscard]] std::span<const int> boundary_vertices() const noexcept { return boundary_vertices_; }
    [[nodiscard]] std::span<const int> interior_vertices() const noexcept { return interior_vertices_; }
    [[nodiscard]] std::span<const int> boundary_edges() const noexcept { return boundary_edges_; }

    /// Successor of a boundary vertex along its loop, -1 for interior vertices.
    [[nodiscard]] int boundary_next(int v) const { return boundary_next_[v]; }
    [[nodiscard]] int boundary_prev(int v) const { return boundary_prev_[v]; }

    [[nodiscard]] std::optional<int> find_edge(int a, int b) const;
    /// Edges incident to vertex v.
    [[nodiscard]] std::span<const int> vertex_edges(int v) const { return vertex_edges_[v]; }

    /// True when some input triangles had to be flipped for consistency.
    [[nodiscard]] bool was_reoriented() const noexcept { return reoriented_; }

private:
    SurfaceMesh() = default;

    int vertex_count_ = 0;
    std::vector<Triangle> triangles_;
    std::vector<EdgeVertices> edges_;
    std::vector<std::array<int, 3>> face_edges_;
    std::vector<std::array<int, 2>> edge_faces_;
    std::vector<std::vector<int>> loops_;
    std::vector<int> boundary_vertices_;
    std::vector<int> interior_vertices_;
    std::vector<int> boundary_edges_;
    std::vector<int> boundary_next_;
    std::vector<int> boundary_prev_;
    std::vector<std::vector<int>> vertex_edges_;
    bool reoriented_ = false;
};

/// Positive edge lengths satisfying the strict triangle inequality in every face.
class IntrinsicMetric {
public:
    static IntrinsicMetric from_lengths(const SurfaceMesh& mesh, std::vector<double> lengths);
    static IntrinsicMetric from_positions(const SurfaceMesh& mesh, std::span<const Vec3> positions);

    [[nodiscard]] std::span<const double> edge_lengths() const noexcept { return lengths_; }
    [[nodiscard]] double length(int e) const { return lengths_[e]; }
    [[nodiscard]] double max_edge_length() const noexcept;

    /// Side lengths of face f, ordered opposite corners 0, 1, 2.
    [[nodiscard]] std::array<double, 3> face_lengths(const SurfaceMesh& mesh, int f) const;

private:
    std::vector<double> lengths_;
};

enum class FieldDomain { vertices, boundary };

/// One value per mesh vertex. Boundary-domain fields only carry meaning at
/// boundary vertices; their interior entries hold the extension used by the
/// pipelines (zero unless the source defines one).
struct ScalarField {
    Eigen::VectorXd values;
    FieldDomain domain = FieldDomain::vertices;

    static ScalarField constant(const SurfaceMesh& mesh, double value,
                                FieldDomain domain = FieldDomain::vertices);
    static ScalarField from_values(Eigen::VectorXd values,
                                   FieldDomain domain = FieldDomain::vertices);

    [[nodiscard]] double operator[](int v) const { return values[v]; }
    [[nodiscard]] Eigen::Index size() const noexcept { return values.size(); }
};

/// Throws Errc::invalid_field on a length mismatch or non-finite entry.
void validate_field(const SurfaceMesh& mesh, const ScalarField& field, std::string_view name);

struct TriangleGeometry {
    std::array<double, 3> angles{};
    std::array<double, 3> cotangents{};
    double area = 0.0;
};

/// Angles, cotangents and area from side lengths opposite corners 0, 1, 2.
[[nodiscard]] TriangleGeometry triangle_geometry(const std::array<double, 3>& lengths) noexcept;

/// Area by Kahan's stable Heron formula; returns 0 when the inequality fails.
[[nodiscard]] double triangle_area(const std::array<double, 3>& lengths) noexcept;

struct DiscreteCurvature {
    Eigen::VectorXd interior_defect;      // 2π − angle sum, zero at boundary vertices
    Eigen::VectorXd boundary_turning;     // π − angle sum, zero at interior vertices
    Eigen::VectorXd dual_area;            // barycentric
    Eigen::VectorXd boundary_dual_length; // half the incident boundary edge lengths

    /// defect / dual_area at interior vertices, zero elsewhere.
    [[nodiscard]] Eigen::VectorXd gaussian_density() const;
    /// turning / boundary_dual_length at boundary vertices, zero elsewhere.
    [[nodiscard]] Eigen::VectorXd geodesic_density() const;
    [[nodiscard]] double total() const;
};

[[nodiscard]] int euler_characteristic(const SurfaceMesh& mesh) noexcept;

[[nodiscard]] DiscreteCurvature discrete_curvatures(const SurfaceMesh& mesh,
                                                    const IntrinsicMetric& metric);

/// Vertex scaling l̃ᵢⱼ = e^{(uᵢ+uⱼ)/2} lᵢⱼ, the discrete form of e^{2u} g.
/// Throws Errc::triangle_inequality if the rescaled lengths are not a metric.
[[nodiscard]] IntrinsicMetric conformal_rescale(const SurfaceMesh& mesh,
                                                const IntrinsicMetric& metric,
                                                const ScalarField& u);

/// Metric s·g, i.e. every length multiplied by √s.
[[nodiscard]] IntrinsicMetric scale_metric(const SurfaceMesh& mesh,
                                           const IntrinsicMetric& metric, double s);

/// Count of triangles with an angle above π/2.
[[nodiscard]] int obtuse_triangle_count(const SurfaceMesh& mesh, const IntrinsicMetric& metric);

} // namespace curvforge
