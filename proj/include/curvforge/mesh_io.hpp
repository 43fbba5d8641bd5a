#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "curvforge/surface_mesh.hpp"

namespace curvforge {

enum class MeshFormat { off, obj };

struct LoadedMesh {
    SurfaceMesh mesh;
    IntrinsicMetric metric;
    /// Load-time positions; only used to evaluate field expressions.
    std::vector<Vec3> positions;
    std::vector<std::string> warnings;
};

/// Builds and validates a mesh from an embedded triangle soup.
/// Zero-area triangles raise Errc::degenerate_triangle.
[[nodiscard]] LoadedMesh build_mesh(std::vector<Vec3> positions, std::vector<Triangle> triangles);

/// Reads ASCII OFF or OBJ. The format is taken from the extension unless given.
/// Polygons with more than three corners are fan-triangulated (with a warning).
[[nodiscard]] LoadedMesh load_mesh(const std::filesystem::path& path,
                                   std::optional<MeshFormat> format = std::nullopt);

[[nodiscard]] LoadedMesh read_off(std::istream& in);
[[nodiscard]] LoadedMesh read_obj(std::istream& in);

void write_off(std::ostream& out, const std::vector<Vec3>& positions, const SurfaceMesh& mesh);

} // namespace curvforge
