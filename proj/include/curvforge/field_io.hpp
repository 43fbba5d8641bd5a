#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "curvforge/mesh_io.hpp"

namespace curvforge {

/// A value ending in ".csv" names a file of `vertex_index,value` rows (an
/// optional header line is skipped); anything else is parsed as an
/// expression and evaluated at every load-time vertex position. Boundary
/// fields read from CSV only need boundary rows; interior entries become 0.
[[nodiscard]] ScalarField field_from_source(const std::string& source, const LoadedMesh& mesh,
                                            FieldDomain domain = FieldDomain::vertices);

[[nodiscard]] ScalarField read_field_csv(const std::filesystem::path& path, const SurfaceMesh& mesh,
                                         FieldDomain domain);

[[nodiscard]] ScalarField evaluate_expression(const std::string& expression,
                                              const std::vector<Vec3>& positions,
                                              FieldDomain domain = FieldDomain::vertices);

/// Writes `vertex,<name>...,boundary` with 17 significant digits.
void write_fields_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, const ScalarField*>>& columns,
                      const SurfaceMesh& mesh);

} // namespace curvforge
