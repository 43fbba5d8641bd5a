#include "curvforge/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "curvforge/error.hpp"
#include "curvforge/expression.hpp"

namespace curvforge {

ScalarField evaluate_expression(const std::string& expression, const std::vector<Vec3>& positions,
                                FieldDomain domain)
{
    const auto expr = Expression::parse(expression);
    Eigen::VectorXd values(static_cast<Eigen::Index>(positions.size()));
    for (std::size_t v = 0; v < positions.size(); ++v) {
        const auto& p = positions[v];
        values[static_cast<Eigen::Index>(v)] = expr.evaluate(p[0], p[1], p[2]);
    }
    return ScalarField::from_values(std::move(values), domain);
}

ScalarField read_field_csv(const std::filesystem::path& path, const SurfaceMesh& mesh, FieldDomain domain)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open field file " + path.string());
    const int nv = mesh.vertex_count();
    Eigen::VectorXd values = Eigen::VectorXd::Zero(nv);
    std::vector<char> seen(nv, 0);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        long index = 0;
        double value = 0.0;
        if (!(row >> index >> value)) {
            if (line_number == 1) continue; // header
            throw Error(Errc::parse, path.string() + ":" + std::to_string(line_number) + ": expected vertex_index,value");
        }
        if (index < 0 || index >= nv)
            throw Error(Errc::invalid_field, path.string() + ":" + std::to_string(line_number) +
                                                 ": vertex index " + std::to_string(index) + " out of range");
        values[index] = value;
        seen[index] = 1;
    }
    for (int v = 0; v < nv; ++v) {
        const bool needed = domain == FieldDomain::vertices || mesh.is_boundary_vertex(v);
        if (needed && !seen[v])
            throw Error(Errc::invalid_field, path.string() + ": no value for vertex " + std::to_string(v));
    }
    return ScalarField::from_values(std::move(values), domain);
}

ScalarField field_from_source(const std::string& source, const LoadedMesh& mesh, FieldDomain domain)
{
    const bool is_csv = source.size() > 4 && source.compare(source.size() - 4, 4, ".csv") == 0;
    auto field = is_csv ? read_field_csv(source, mesh.mesh, domain)
                        : evaluate_expression(source, mesh.positions, domain);
    validate_field(mesh.mesh, field, source);
    return field;
}

void write_fields_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, const ScalarField*>>& columns,
                      const SurfaceMesh& mesh)
{
    std::ofstream out(path);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    out << "vertex";
    for (const auto& [name, field] : columns) out << ',' << name;
    out << ",boundary\n";
    char buf[32];
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        out << v;
        for (const auto& [name, field] : columns) {
            std::snprintf(buf, sizeof buf, "%.17g", (*field)[v]);
            out << ',' << buf;
        }
        out << ',' << (mesh.is_boundary_vertex(v) ? 1 : 0) << '\n';
    }
}

} // namespace curvforge
