#include "curvforge/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "curvforge/error.hpp"

namespace curvforge {

namespace {

// Strips '#' comments and yields whitespace-separated tokens.
class TokenStream {
public:
    explicit TokenStream(std::istream& in) : in_(in) {}

    bool next(std::string& token)
    {
        while (!(line_ >> token)) {
            std::string raw;
            if (!std::getline(in_, raw)) return false;
            ++line_number_;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            line_.clear();
            line_.str(raw);
        }
        return true;
    }

    template <typename T>
    T read(const char* what)
    {
        std::string token;
        if (!next(token))
            throw Error(Errc::parse, std::string("unexpected end of file while reading ") + what);
        std::istringstream conv(token);
        T value{};
        if (!(conv >> value) || !conv.eof())
            throw Error(Errc::parse, "line " + std::to_string(line_number_) + ": bad " + what +
                                         " '" + token + "'");
        return value;
    }

    [[nodiscard]] int line_number() const { return line_number_; }

private:
    std::istream& in_;
    std::istringstream line_;
    int line_number_ = 0;
};

void fan_triangulate(const std::vector<int>& poly, std::vector<Triangle>& out, int& polygons)
{
    if (poly.size() > 3) ++polygons;
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) out.push_back({poly[0], poly[k], poly[k + 1]});
}

} // namespace

LoadedMesh build_mesh(std::vector<Vec3> positions, std::vector<Triangle> triangles)
{
    const int nv = static_cast<int>(positions.size());
    double scale = 0.0;
    for (const auto& p : positions)
        for (double c : p) {
            if (!std::isfinite(c)) throw Error(Errc::parse, "non-finite vertex coordinate");
            scale = std::max(scale, std::abs(c));
        }
    for (std::size_t f = 0; f < triangles.size(); ++f) {
        const auto& t = triangles[f];
        bool in_range = true;
        for (int v : t) in_range = in_range && v >= 0 && v < nv;
        if (!in_range) continue; // reported by from_triangles
        const auto& a = positions[t[0]];
        const auto& b = positions[t[1]];
        const auto& c = positions[t[2]];
        const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
        const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
        const double cross = std::hypot(uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx);
        if (cross <= 1e-14 * std::max(scale * scale, 1e-300))
            throw Error(Errc::degenerate_triangle,
                        "triangle " + std::to_string(f) + " has zero area");
    }

    auto mesh = SurfaceMesh::from_triangles(nv, std::move(triangles));
    auto metric = IntrinsicMetric::from_positions(mesh, positions);
    LoadedMesh loaded{std::move(mesh), std::move(metric), std::move(positions), {}};
    if (loaded.mesh.was_reoriented())
        loaded.warnings.push_back("triangle orientation was made consistent");
    if (const int obtuse = obtuse_triangle_count(loaded.mesh, loaded.metric); obtuse > 0)
        loaded.warnings.push_back(std::to_string(obtuse) +
                                  " obtuse triangles; cotangent weights may be negative");
    return loaded;
}

LoadedMesh read_off(std::istream& in)
{
    TokenStream tokens(in);
    std::string head;
    if (!tokens.next(head)) throw Error(Errc::parse, "empty OFF file");
    int nv = 0;
    if (head == "OFF") {
        nv = tokens.read<int>("vertex count");
    } else if (head.size() > 3 && head.compare(0, 3, "OFF") == 0) {
        nv = std::stoi(head.substr(3));
    } else {
        throw Error(Errc::parse, "missing OFF header");
    }
    const int nf = tokens.read<int>("face count");
    (void)tokens.read<long>("edge count");
    if (nv <= 0 || nf <= 0) throw Error(Errc::parse, "OFF header declares no vertices or faces");

    std::vector<Vec3> positions(nv);
    for (auto& p : positions)
        for (double& c : p) c = tokens.read<double>("coordinate");

    std::vector<Triangle> triangles;
    triangles.reserve(nf);
    int polygons = 0;
    for (int f = 0; f < nf; ++f) {
        const int n = tokens.read<int>("face size");
        if (n < 3) throw Error(Errc::parse, "face " + std::to_string(f) + " has fewer than 3 corners");
        std::vector<int> poly(n);
        for (int& v : poly) v = tokens.read<int>("vertex index");
        fan_triangulate(poly, triangles, polygons);
    }
    auto loaded = build_mesh(std::move(positions), std::move(triangles));
    if (polygons > 0)
        loaded.warnings.push_back(std::to_string(polygons) + " polygons were fan-triangulated");
    return loaded;
}

LoadedMesh read_obj(std::istream& in)
{
    std::vector<Vec3> positions;
    std::vector<Triangle> triangles;
    int polygons = 0;
    std::string raw;
    int line_number = 0;
    while (std::getline(in, raw)) {
        ++line_number;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream line(raw);
        std::string tag;
        if (!(line >> tag)) continue;
        if (tag == "v") {
            Vec3 p{};
            if (!(line >> p[0] >> p[1] >> p[2]))
                throw Error(Errc::parse, "line " + std::to_string(line_number) + ": bad vertex");
            positions.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string corner;
            while (line >> corner) {
                int index = 0;
                try {
                    index = std::stoi(corner.substr(0, corner.find('/')));
                } catch (const std::exception&) {
                    throw Error(Errc::parse, "line " + std::to_string(line_number) + ": bad face index");
                }
                if (index == 0)
                    throw Error(Errc::parse, "line " + std::to_string(line_number) + ": index 0");
                poly.push_back(index > 0 ? index - 1 : static_cast<int>(positions.size()) + index);
            }
            if (poly.size() < 3)
                throw Error(Errc::parse, "line " + std::to_string(line_number) + ": face with < 3 corners");
            fan_triangulate(poly, triangles, polygons);
        }
    }
    if (positions.empty() || triangles.empty()) throw Error(Errc::parse, "OBJ file has no faces");
    auto loaded = build_mesh(std::move(positions), std::move(triangles));
    if (polygons > 0)
        loaded.warnings.push_back(std::to_string(polygons) + " polygons were fan-triangulated");
    return loaded;
}

LoadedMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open mesh file " + path.string());
    if (!format) {
        auto ext = path.extension().string();
        for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (ext == ".off") format = MeshFormat::off;
        else if (ext == ".obj") format = MeshFormat::obj;
        else throw Error(Errc::parse, "unknown mesh extension '" + ext + "' (expected .off or .obj)");
    }
    return *format == MeshFormat::off ? read_off(in) : read_obj(in);
}

void write_off(std::ostream& out, const std::vector<Vec3>& positions, const SurfaceMesh& mesh)
{
    out << "OFF\n" << positions.size() << ' ' << mesh.face_count() << ' ' << mesh.edge_count() << '\n';
    out << std::setprecision(17);
    for (const auto& p : positions) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

} // namespace curvforge
