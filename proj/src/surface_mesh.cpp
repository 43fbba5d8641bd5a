#include "curvforge/surface_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <string>
#include <unordered_map>

#include "curvforge/error.hpp"

namespace curvforge {

namespace {

std::uint64_t edge_key(int a, int b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::string edge_name(int a, int b)
{
    return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

// +1 when face t traverses the edge from a to b, -1 when from b to a.
int traversal(const Triangle& t, int a, int b)
{
    for (int k = 0; k < 3; ++k) {
        if (t[k] == a && t[(k + 1) % 3] == b) return 1;
        if (t[k] == b && t[(k + 1) % 3] == a) return -1;
    }
    return 0;
}

int corner_of(const Triangle& t, int v)
{
    for (int k = 0; k < 3; ++k)
        if (t[k] == v) return k;
    return -1;
}

} // namespace

SurfaceMesh SurfaceMesh::from_triangles(int vertex_count, std::vector<Triangle> triangles)
{
    if (vertex_count <= 0 || triangles.empty())
        throw Error(Errc::parse, "mesh has no vertices or no triangles");

    const int nf = static_cast<int>(triangles.size());
    for (int f = 0; f < nf; ++f) {
        const auto& t = triangles[f];
        for (int v : t)
            if (v < 0 || v >= vertex_count)
                throw Error(Errc::parse, "triangle " + std::to_string(f) +
                                             " references vertex " + std::to_string(v) +
                                             " out of range");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw Error(Errc::degenerate_triangle,
                        "triangle " + std::to_string(f) + " repeats a vertex");
    }

    SurfaceMesh mesh;
    mesh.vertex_count_ = vertex_count;

    std::unordered_map<std::uint64_t, int> edge_index;
    edge_index.reserve(static_cast<std::size_t>(nf) * 2);
    mesh.face_edges_.resize(nf);
    for (int f = 0; f < nf; ++f) {
        const auto& t = triangles[f];
        for (int k = 0; k < 3; ++k) {
            const int a = t[(k + 1) % 3];
            const int b = t[(k + 2) % 3];
            auto [it, inserted] = edge_index.try_emplace(edge_key(a, b), mesh.edge_count());
            if (inserted) {
                mesh.edges_.push_back({std::min(a, b), std::max(a, b)});
                mesh.edge_faces_.push_back({f, -1});
            } else {
                auto& ef = mesh.edge_faces_[it->second];
                if (ef[1] >= 0)
                    throw Error(Errc::non_manifold,
                                "edge " + edge_name(a, b) + " is shared by more than two triangles");
                ef[1] = f;
            }
            mesh.face_edges_[f][k] = it->second;
        }
    }

    // Orientation by breadth-first propagation across interior edges.
    std::vector<int> flip(nf, -1);
    flip[0] = 0;
    std::deque<int> queue{0};
    int reached = 1;
    while (!queue.empty()) {
        const int f = queue.front();
        queue.pop_front();
        for (int k = 0; k < 3; ++k) {
            const int e = mesh.face_edges_[f][k];
            const auto& ef = mesh.edge_faces_[e];
            if (ef[1] < 0) continue;
            const int g = ef[0] == f ? ef[1] : ef[0];
            const auto [a, b] = mesh.edges_[e];
            const int dir_f = traversal(triangles[f], a, b) * (flip[f] ? -1 : 1);
            const int raw_g = traversal(triangles[g], a, b);
            const int want = raw_g == -dir_f ? 0 : 1;
            if (flip[g] < 0) {
                flip[g] = want;
                ++reached;
                queue.push_back(g);
            } else if (flip[g] != want) {
                throw Error(Errc::non_orientable,
                            "surface is not orientable (conflict across edge " + edge_name(a, b) + ")");
            }
        }
    }
    if (reached != nf) {
        // A vertex touching both parts is a pinch point rather than a gap.
        std::vector<char> in_reached(vertex_count, 0);
        for (int f = 0; f < nf; ++f)
            if (flip[f] >= 0)
                for (int v : triangles[f]) in_reached[v] = 1;
        for (int f = 0; f < nf; ++f)
            if (flip[f] < 0)
                for (int v : triangles[f])
                    if (in_reached[v])
                        throw Error(Errc::non_manifold,
                                    "vertex " + std::to_string(v) + " joins several triangle fans");
        throw Error(Errc::disconnected, "mesh has more than one connected component");
    }

    for (int f = 0; f < nf; ++f) {
        if (flip[f]) {
            std::swap(triangles[f][1], triangles[f][2]);
            std::swap(mesh.face_edges_[f][1], mesh.face_edges_[f][2]);
            mesh.reoriented_ = true;
        }
    }
    mesh.triangles_ = std::move(triangles);

    std::vector<std::vector<int>> incident(vertex_count);
    for (int f = 0; f < nf; ++f)
        for (int v : mesh.triangles_[f]) incident[v].push_back(f);
    for (int v = 0; v < vertex_count; ++v)
        if (incident[v].empty())
            throw Error(Errc::disconnected,
                        "vertex " + std::to_string(v) + " is not referenced by any triangle");

    mesh.vertex_edges_.resize(vertex_count);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        mesh.vertex_edges_[mesh.edges_[e][0]].push_back(e);
        mesh.vertex_edges_[mesh.edges_[e][1]].push_back(e);
    }

    mesh.boundary_next_.assign(vertex_count, -1);
    mesh.boundary_prev_.assign(vertex_count, -1);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        mesh.boundary_edges_.push_back(e);
        const int f = mesh.edge_faces_[e][0];
        const auto [a, b] = mesh.edges_[e];
        const bool forward = traversal(mesh.triangles_[f], a, b) > 0;
        const int from = forward ? a : b;
        const int to = forward ? b : a;
        if (mesh.boundary_next_[from] >= 0 || mesh.boundary_prev_[to] >= 0)
            throw Error(Errc::non_manifold,
                        "boundary vertex " + std::to_string(mesh.boundary_next_[from] >= 0 ? from : to) +
                            " is shared by several boundary fans");
        mesh.boundary_next_[from] = to;
        mesh.boundary_prev_[to] = from;
    }

    // Every vertex must carry exactly one fan of triangles.
    for (int v = 0; v < vertex_count; ++v) {
        int start = incident[v].front();
        if (mesh.boundary_next_[v] >= 0) {
            const int e = *mesh.find_edge(v, mesh.boundary_next_[v]);
            start = mesh.edge_faces_[e][0];
        }
        int visited = 0;
        int f = start;
        do {
            ++visited;
            const auto& t = mesh.triangles_[f];
            const int k = corner_of(t, v);
            const int e = mesh.face_edges_[f][(k + 1) % 3];
            const auto& ef = mesh.edge_faces_[e];
            if (ef[1] < 0) break;
            f = ef[0] == f ? ef[1] : ef[0];
        } while (f != start && visited <= static_cast<int>(incident[v].size()));
        if (visited != static_cast<int>(incident[v].size()))
            throw Error(Errc::non_manifold,
                        "vertex " + std::to_string(v) + " joins several triangle fans");
    }

    std::vector<char> on_loop(vertex_count, 0);
    for (int v = 0; v < vertex_count; ++v) {
        if (mesh.boundary_next_[v] < 0 || on_loop[v]) continue;
        std::vector<int> loop;
        int w = v;
        do {
            on_loop[w] = 1;
            loop.push_back(w);
            w = mesh.boundary_next_[w];
        } while (w != v);
        mesh.boundary_vertices_.insert(mesh.boundary_vertices_.end(), loop.begin(), loop.end());
        mesh.loops_.push_back(std::move(loop));
    }
    for (int v = 0; v < vertex_count; ++v)
        if (mesh.boundary_next_[v] < 0) mesh.interior_vertices_.push_back(v);

    return mesh;
}

std::optional<int> SurfaceMesh::find_edge(int a, int b) const
{
    if (a < 0 || b < 0 || a >= vertex_count_ || b >= vertex_count_) return std::nullopt;
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    for (int e : vertex_edges_[lo])
        if (edges_[e][0] == lo && edges_[e][1] == hi) return e;
    return std::nullopt;
}

IntrinsicMetric IntrinsicMetric::from_lengths(const SurfaceMesh& mesh, std::vector<double> lengths)
{
    if (static_cast<int>(lengths.size()) != mesh.edge_count())
        throw Error(Errc::invalid_field, "edge length count does not match the mesh");
    for (std::size_t e = 0; e < lengths.size(); ++e)
        if (!std::isfinite(lengths[e]) || lengths[e] <= 0.0)
            throw Error(Errc::triangle_inequality,
                        "edge " + std::to_string(e) + " has a non-positive length");
    IntrinsicMetric metric;
    metric.lengths_ = std::move(lengths);
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto l = metric.face_lengths(mesh, f);
        if (!(l[0] < l[1] + l[2] && l[1] < l[0] + l[2] && l[2] < l[0] + l[1]) ||
            triangle_area(l) <= 0.0)
            throw Error(Errc::triangle_inequality,
                        "triangle inequality fails in face " + std::to_string(f));
    }
    return metric;
}

IntrinsicMetric IntrinsicMetric::from_positions(const SurfaceMesh& mesh, std::span<const Vec3> positions)
{
    if (static_cast<int>(positions.size()) != mesh.vertex_count())
        throw Error(Errc::invalid_field, "position count does not match the mesh");
    std::vector<double> lengths(mesh.edge_count());
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto& p = positions[mesh.edges()[e][0]];
        const auto& q = positions[mesh.edges()[e][1]];
        lengths[e] = std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
    }
    return from_lengths(mesh, std::move(lengths));
}

double IntrinsicMetric::max_edge_length() const noexcept
{
    return lengths_.empty() ? 0.0 : *std::max_element(lengths_.begin(), lengths_.end());
}

std::array<double, 3> IntrinsicMetric::face_lengths(const SurfaceMesh& mesh, int f) const
{
    const auto& fe = mesh.face_edges(f);
    return {lengths_[fe[0]], lengths_[fe[1]], lengths_[fe[2]]};
}

ScalarField ScalarField::constant(const SurfaceMesh& mesh, double value, FieldDomain domain)
{
    return {Eigen::VectorXd::Constant(mesh.vertex_count(), value), domain};
}

ScalarField ScalarField::from_values(Eigen::VectorXd values, FieldDomain domain)
{
    return {std::move(values), domain};
}

void validate_field(const SurfaceMesh& mesh, const ScalarField& field, std::string_view name)
{
    if (field.values.size() != mesh.vertex_count())
        throw Error(Errc::invalid_field, std::string(name) + ": expected " +
                                             std::to_string(mesh.vertex_count()) + " values, got " +
                                             std::to_string(field.values.size()));
    for (Eigen::Index i = 0; i < field.values.size(); ++i)
        if (!std::isfinite(field.values[i]))
            throw Error(Errc::invalid_field,
                        std::string(name) + ": non-finite value at vertex " + std::to_string(i));
}

double triangle_area(const std::array<double, 3>& lengths) noexcept
{
    std::array<double, 3> s = lengths;
    std::sort(s.begin(), s.end(), std::greater<>());
    const double a = s[0], b = s[1], c = s[2];
    const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    return p > 0.0 ? 0.25 * std::sqrt(p) : 0.0;
}

TriangleGeometry triangle_geometry(const std::array<double, 3>& l) noexcept
{
    TriangleGeometry g;
    g.area = triangle_area(l);
    const double four_area = 4.0 * g.area;
    for (int k = 0; k < 3; ++k) {
        const double a = l[k], b = l[(k + 1) % 3], c = l[(k + 2) % 3];
        const double num = b * b + c * c - a * a;
        g.angles[k] = std::atan2(four_area, num);
        g.cotangents[k] = num / four_area;
    }
    return g;
}

Eigen::VectorXd DiscreteCurvature::gaussian_density() const
{
    Eigen::VectorXd d = Eigen::VectorXd::Zero(interior_defect.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (boundary_dual_length[i] == 0.0) d[i] = interior_defect[i] / dual_area[i];
    return d;
}

Eigen::VectorXd DiscreteCurvature::geodesic_density() const
{
    Eigen::VectorXd d = Eigen::VectorXd::Zero(boundary_turning.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (boundary_dual_length[i] > 0.0) d[i] = boundary_turning[i] / boundary_dual_length[i];
    return d;
}

double DiscreteCurvature::total() const
{
    return interior_defect.sum() + boundary_turning.sum();
}

int euler_characteristic(const SurfaceMesh& mesh) noexcept
{
    return mesh.vertex_count() - mesh.edge_count() + mesh.face_count();
}

DiscreteCurvature discrete_curvatures(const SurfaceMesh& mesh, const IntrinsicMetric& metric)
{
    const int nv = mesh.vertex_count();
    Eigen::VectorXd angle_sum = Eigen::VectorXd::Zero(nv);
    DiscreteCurvature dc;
    dc.dual_area = Eigen::VectorXd::Zero(nv);
    dc.boundary_dual_length = Eigen::VectorXd::Zero(nv);
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto g = triangle_geometry(metric.face_lengths(mesh, f));
        const auto& t = mesh.triangles()[f];
        for (int k = 0; k < 3; ++k) {
            angle_sum[t[k]] += g.angles[k];
            dc.dual_area[t[k]] += g.area / 3.0;
        }
    }
    for (int e : mesh.boundary_edges()) {
        const double half = 0.5 * metric.length(e);
        dc.boundary_dual_length[mesh.edges()[e][0]] += half;
        dc.boundary_dual_length[mesh.edges()[e][1]] += half;
    }
    dc.interior_defect = Eigen::VectorXd::Zero(nv);
    dc.boundary_turning = Eigen::VectorXd::Zero(nv);
    constexpr double pi = std::numbers::pi;
    for (int v = 0; v < nv; ++v) {
        if (mesh.is_boundary_vertex(v))
            dc.boundary_turning[v] = pi - angle_sum[v];
        else
            dc.interior_defect[v] = 2.0 * pi - angle_sum[v];
    }
    return dc;
}

IntrinsicMetric conformal_rescale(const SurfaceMesh& mesh, const IntrinsicMetric& metric,
                                  const ScalarField& u)
{
    validate_field(mesh, u, "u");
    std::vector<double> lengths(metric.edge_lengths().begin(), metric.edge_lengths().end());
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto [a, b] = mesh.edges()[e];
        lengths[e] *= std::exp(0.5 * (u[a] + u[b]));
    }
    try {
        return IntrinsicMetric::from_lengths(mesh, std::move(lengths));
    } catch (const Error& err) {
        throw Error(Errc::triangle_inequality,
                    std::string("conformal rescaling produced an invalid metric: ") + err.what() +
                        " (conformal factor too rough for this mesh resolution)");
    }
}

IntrinsicMetric scale_metric(const SurfaceMesh& mesh, const IntrinsicMetric& metric, double s)
{
    if (!(s > 0.0) || !std::isfinite(s))
        throw Error(Errc::precondition, "metric scale must be positive");
    const double factor = std::sqrt(s);
    std::vector<double> lengths(metric.edge_lengths().begin(), metric.edge_lengths().end());
    for (double& l : lengths) l *= factor;
    return IntrinsicMetric::from_lengths(mesh, std::move(lengths));
}

int obtuse_triangle_count(const SurfaceMesh& mesh, const IntrinsicMetric& metric)
{
    int count = 0;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto g = triangle_geometry(metric.face_lengths(mesh, f));
        if (std::min({g.cotangents[0], g.cotangents[1], g.cotangents[2]}) < 0.0) ++count;
    }
    return count;
}

} // namespace curvforge
