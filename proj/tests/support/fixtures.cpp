#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <tuple>
#include <utility>

namespace fixtures {

using curvforge::build_mesh;
using curvforge::Triangle;
using curvforge::Vec3;

namespace {

constexpr double pi = std::numbers::pi;

struct Ring {
    std::vector<int> ids;
    std::vector<double> angles; // increasing in [0, 2π)
};

// Triangulates the strip between two closed rings ordered counter-clockwise.
void stitch(const Ring& inner, const Ring& outer, std::vector<Triangle>& tris)
{
    const int a = static_cast<int>(inner.ids.size());
    const int b = static_cast<int>(outer.ids.size());
    int i = 0, j = 0;
    auto ang = [](const Ring& r, int k) {
        const int n = static_cast<int>(r.ids.size());
        return r.angles[k % n] + 2.0 * pi * (k / n);
    };
    while (i < a || j < b) {
        const bool advance_outer = i >= a || (j < b && ang(outer, j + 1) <= ang(inner, i + 1) + 1e-12);
        if (advance_outer) {
            tris.push_back({inner.ids[i % a], outer.ids[j % b], outer.ids[(j + 1) % b]});
            ++j;
        } else {
            tris.push_back({inner.ids[i % a], outer.ids[j % b], inner.ids[(i + 1) % a]});
            ++i;
        }
    }
}

Ring circle(std::vector<Vec3>& pos, int n, double r, double z = 0.0, double phase = 0.0)
{
    Ring ring;
    for (int k = 0; k < n; ++k) {
        const double t = phase + 2.0 * pi * k / n;
        ring.ids.push_back(static_cast<int>(pos.size()));
        ring.angles.push_back(phase + 2.0 * pi * k / n);
        pos.push_back({r * std::cos(t), r * std::sin(t), z});
    }
    return ring;
}

} // namespace

LoadedMesh single_triangle()
{
    return build_mesh({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}}, {{0, 1, 2}});
}

LoadedMesh square_pair()
{
    return build_mesh({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
}

LoadedMesh square_grid(int n, int m, double x0, double x1, double y0, double y1)
{
    std::vector<Vec3> pos;
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= n; ++i)
            pos.push_back({x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / m, 0.0});
    std::vector<Triangle> tris;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return build_mesh(std::move(pos), std::move(tris));
}

LoadedMesh disk_from_rings(const std::vector<int>& ring_sizes, double radius)
{
    std::vector<Vec3> pos{{0, 0, 0}};
    std::vector<Triangle> tris;
    const int rings = static_cast<int>(ring_sizes.size());
    Ring prev = circle(pos, ring_sizes[0], radius / rings);
    for (int k = 0; k < ring_sizes[0]; ++k)
        tris.push_back({0, prev.ids[k], prev.ids[(k + 1) % ring_sizes[0]]});
    for (int r = 1; r < rings; ++r) {
        Ring next = circle(pos, ring_sizes[r], radius * (r + 1) / rings);
        stitch(prev, next, tris);
        prev = std::move(next);
    }
    return build_mesh(std::move(pos), std::move(tris));
}

LoadedMesh polar_disk(int rings, double radius)
{
    std::vector<int> sizes;
    for (int k = 1; k <= rings; ++k) sizes.push_back(6 * k);
    return disk_from_rings(sizes, radius);
}

LoadedMesh hex_disk(int rings, double radius, double blend)
{
    const int n = rings;
    auto hex_norm = [](int a, int b) { return std::max({std::abs(a), std::abs(b), std::abs(a + b)}); };
    std::map<std::pair<int, int>, int> index;
    std::vector<Vec3> pos;
    for (int a = -n; a <= n; ++a)
        for (int b = -n; b <= n; ++b) {
            const int k = hex_norm(a, b);
            if (k > n) continue;
            const double x = a + 0.5 * b;
            const double y = b * std::sqrt(3.0) / 2.0;
            double s = 1.0;
            if (k > 0) {
                const double t = std::pow(static_cast<double>(k) / n, blend);
                s = (1.0 - t) + t * k / std::hypot(x, y);
            }
            index[{a, b}] = static_cast<int>(pos.size());
            pos.push_back({radius * x * s / n, radius * y * s / n, 0.0});
        }
    std::vector<Triangle> tris;
    auto at = [&](int a, int b) {
        auto it = index.find({a, b});
        return it == index.end() ? -1 : it->second;
    };
    for (const auto& [ab, i] : index) {
        const auto [a, b] = ab;
        if (at(a + 1, b) >= 0 && at(a, b + 1) >= 0) tris.push_back({i, at(a + 1, b), at(a, b + 1)});
        if (at(a + 1, b) >= 0 && at(a + 1, b - 1) >= 0) tris.push_back({i, at(a + 1, b - 1), at(a + 1, b)});
    }
    return build_mesh(std::move(pos), std::move(tris));
}

LoadedMesh planar_annulus(int n_theta, int n_r, double r_in, double r_out)
{
    std::vector<Vec3> pos;
    std::vector<Triangle> tris;
    Ring prev = circle(pos, n_theta, r_in);
    for (int k = 1; k <= n_r; ++k) {
        const double r = r_in + (r_out - r_in) * k / n_r;
        Ring next = circle(pos, n_theta, r, 0.0, (k % 2) * pi / n_theta);
        stitch(prev, next, tris);
        prev = std::move(next);
    }
    return build_mesh(std::move(pos), std::move(tris));
}

namespace {

LoadedMesh cylinder(int n_theta, int n_h, double height, double amplitude)
{
    std::vector<Vec3> pos;
    for (int j = 0; j <= n_h; ++j)
        for (int i = 0; i < n_theta; ++i) {
            const double t = 2.0 * pi * i / n_theta;
            const double z = height * j / n_h;
            const double bump = amplitude * std::exp(-8.0 * ((z / height - 0.5) * (z / height - 0.5))) *
                                (1.0 + 0.5 * std::cos(t));
            const double r = 1.0 + bump;
            pos.push_back({r * std::cos(t), r * std::sin(t), z});
        }
    std::vector<Triangle> tris;
    auto id = [n_theta](int i, int j) { return j * n_theta + (i % n_theta); };
    for (int j = 0; j < n_h; ++j)
        for (int i = 0; i < n_theta; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return build_mesh(std::move(pos), std::move(tris));
}

} // namespace

LoadedMesh prism_cylinder(int n_theta, int n_h, double height)
{
    return cylinder(n_theta, n_h, height, 0.0);
}

LoadedMesh bumped_cylinder(int n_theta, int n_h, double height, double amplitude)
{
    return cylinder(n_theta, n_h, height, amplitude);
}

LoadedMesh perturbed_annulus(int n_theta, int n_r, std::uint64_t seed)
{
    auto base = planar_annulus(n_theta, n_r);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.15, 0.15);
    const double h = 0.5 / n_r;
    for (int v = 0; v < base.mesh.vertex_count(); ++v) {
        if (base.mesh.is_boundary_vertex(v)) continue;
        base.positions[v][0] += jitter(rng) * h;
        base.positions[v][1] += jitter(rng) * h;
    }
    return build_mesh(std::move(base.positions), {base.mesh.triangles().begin(), base.mesh.triangles().end()});
}

LoadedMesh pair_of_pants(int cells, double unit)
{
    // Rectangle [0,5]×[0,3] times `unit`, `cells` cells per unit, holes at [1,2]×[1,2] and [3,4]×[1,2].
    const int nx = 5 * cells, ny = 3 * cells;
    auto in_hole = [cells](int i, int j) {
        const int ci = i / cells, cj = j / cells;
        return cj == 1 && (ci == 1 || ci == 3);
    };
    std::map<std::pair<int, int>, int> index;
    std::vector<Vec3> pos;
    std::vector<Triangle> tris;
    auto vid = [&](int i, int j) {
        auto [it, inserted] = index.try_emplace({i, j}, static_cast<int>(pos.size()));
        if (inserted) pos.push_back({unit * i / cells, unit * j / cells, 0.0});
        return it->second;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (in_hole(i, j)) continue;
            tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    return build_mesh(std::move(pos), std::move(tris));
}

LoadedMesh spherical_cap(int rings, double theta_max)
{
    std::vector<Vec3> pos{{0, 0, 1}};
    std::vector<Triangle> tris;
    auto ring_at = [&](int k) {
        const double th = theta_max * k / rings;
        const int n = 6 * k;
        Ring ring;
        for (int i = 0; i < n; ++i) {
            const double t = 2.0 * pi * i / n;
            ring.ids.push_back(static_cast<int>(pos.size()));
            ring.angles.push_back(t);
            pos.push_back({std::sin(th) * std::cos(t), std::sin(th) * std::sin(t), std::cos(th)});
        }
        return ring;
    };
    Ring prev = ring_at(1);
    for (int k = 0; k < 6; ++k) tris.push_back({0, prev.ids[k], prev.ids[(k + 1) % 6]});
    for (int r = 2; r <= rings; ++r) {
        Ring next = ring_at(r);
        stitch(prev, next, tris);
        prev = std::move(next);
    }
    return build_mesh(std::move(pos), std::move(tris));
}

LoadedMesh icosahedron_cap(int subdivisions)
{
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    // Top vertex and its five neighbours of a unit icosahedron, z-axis up.
    const double zr = 1.0 / std::sqrt(5.0);
    const double rr = 2.0 / std::sqrt(5.0);
    (void)phi;
    std::vector<Vec3> corners{{0, 0, 1}};
    for (int k = 0; k < 5; ++k) {
        const double t = 2.0 * pi * k / 5;
        corners.push_back({rr * std::cos(t), rr * std::sin(t), zr});
    }
    const int n = subdivisions + 1;
    std::map<std::tuple<long, long, long>, int> index;
    std::vector<Vec3> pos;
    std::vector<Triangle> tris;
    auto key = [](const Vec3& p) {
        return std::make_tuple(std::lround(p[0] * 1e9), std::lround(p[1] * 1e9), std::lround(p[2] * 1e9));
    };
    auto vid = [&](const Vec3& p) {
        const double len = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        const Vec3 q{p[0] / len, p[1] / len, p[2] / len};
        auto [it, inserted] = index.try_emplace(key(q), static_cast<int>(pos.size()));
        if (inserted) pos.push_back(q);
        return it->second;
    };
    for (int f = 0; f < 5; ++f) {
        const Vec3& a = corners[0];
        const Vec3& b = corners[1 + f];
        const Vec3& c = corners[1 + (f + 1) % 5];
        auto point = [&](int i, int j) {
            // i steps toward b, j toward c
            const double s = static_cast<double>(i) / n, t = static_cast<double>(j) / n;
            return Vec3{a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]), a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
                        a[2] + s * (b[2] - a[2]) + t * (c[2] - a[2])};
        };
        for (int i = 0; i < n; ++i)
            for (int j = 0; i + j < n; ++j) {
                tris.push_back({vid(point(i, j)), vid(point(i + 1, j)), vid(point(i, j + 1))});
                if (i + j + 2 <= n)
                    tris.push_back({vid(point(i + 1, j)), vid(point(i + 1, j + 1)), vid(point(i, j + 1))});
            }
    }
    return build_mesh(std::move(pos), std::move(tris));
}

Eigen::VectorXd smooth_random_field(const std::vector<Vec3>& positions, std::uint64_t seed, double amplitude)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    struct Term {
        double a, bx, by, bz, c;
    };
    std::vector<Term> terms;
    for (int k = 0; k < 3; ++k)
        terms.push_back({unit(rng) / 3.0, 2.0 * unit(rng), 2.0 * unit(rng), 2.0 * unit(rng), 3.0 * unit(rng)});
    Eigen::VectorXd u(static_cast<Eigen::Index>(positions.size()));
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto& p = positions[i];
        double v = 0.0;
        for (const auto& t : terms) v += t.a * std::sin(t.bx * p[0] + t.by * p[1] + t.bz * p[2] + t.c);
        u[static_cast<Eigen::Index>(i)] = amplitude * v;
    }
    return u;
}

std::string write_off_file(const LoadedMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    curvforge::write_off(out, mesh.positions, mesh.mesh);
    return path;
}

} // namespace fixtures
