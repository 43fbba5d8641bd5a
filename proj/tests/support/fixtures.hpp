#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "curvforge/mesh_io.hpp"

namespace fixtures {

using curvforge::LoadedMesh;

LoadedMesh single_triangle();
/// Unit square split along its diagonal.
LoadedMesh square_pair();
/// n×m cells on [x0,x1]×[y0,y1], every cell cut along the same diagonal.
LoadedMesh square_grid(int n, int m, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0, double y1 = 1.0);
/// Unit disk with a centre vertex and rings r = k/n carrying 6k vertices.
LoadedMesh polar_disk(int rings, double radius = 1.0);
/// Unit disk cut from the equilateral lattice: hexagonal rings are pushed
/// onto circles with weight (k/n)^blend, so rings near the centre stay exact
/// lattice rings.
LoadedMesh hex_disk(int rings, double radius = 1.0, double blend = 2.0);
/// Disk from explicit ring sizes (ring k at radius k/len); a centre vertex is added.
LoadedMesh disk_from_rings(const std::vector<int>& ring_sizes, double radius = 1.0);
/// Planar annulus with n_theta vertices per ring and n_r + 1 rings.
LoadedMesh planar_annulus(int n_theta, int n_r, double r_in = 0.5, double r_out = 1.0);
/// Prism cylinder of circumradius 1 and given height; intrinsically a flat
/// rectangle lattice with geodesic boundary.
LoadedMesh prism_cylinder(int n_theta, int n_h, double height = 1.0);
/// Cylinder with a radial bump, intrinsically curved.
LoadedMesh bumped_cylinder(int n_theta, int n_h, double height = 1.0, double amplitude = 0.2);
/// Planar annulus with interior vertices jittered by a seeded RNG.
LoadedMesh perturbed_annulus(int n_theta, int n_r, std::uint64_t seed = 42);
/// [0,3]×[0,1]-style rectangle grid with two square holes (χ = −1). cells ≥ 1.
LoadedMesh pair_of_pants(int cells, double unit = 1.0);
/// Polar cap of the unit sphere reaching polar angle theta_max.
LoadedMesh spherical_cap(int rings, double theta_max);
/// Five icosahedron faces around the north pole, subdivided and projected.
LoadedMesh icosahedron_cap(int subdivisions);

/// Σₖ aₖ sin(bₖ·p + cₖ) with three random terms, |u| ≤ amplitude.
Eigen::VectorXd smooth_random_field(const std::vector<curvforge::Vec3>& positions, std::uint64_t seed,
                                    double amplitude = 0.3);

/// Writes an OFF file and returns its path.
std::string write_off_file(const LoadedMesh& mesh, const std::string& path);

} // namespace fixtures
