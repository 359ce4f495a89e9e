#include "shapegeo/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

namespace shapegeo {

namespace {

/// Next line that is neither blank nor a comment; false at end of stream.
bool next_content_line(std::istream& in, std::string& line, int& line_no)
{
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (std::any_of(line.begin(), line.end(), [](unsigned char c) { return !std::isspace(c); })) {
            return true;
        }
    }
    return false;
}

[[noreturn]] void parse_fail(const std::string& format, int line_no, const std::string& msg)
{
    throw ParseError(format + " line " + std::to_string(line_no) + ": " + msg);
}

} // namespace

TriMesh read_off(std::istream& in)
{
    std::string line;
    int line_no = 0;
    if (!next_content_line(in, line, line_no)) parse_fail("OFF", line_no, "empty file");

    std::istringstream header(line);
    std::string magic;
    header >> magic;
    if (magic != "OFF") parse_fail("OFF", line_no, "expected header 'OFF', got '" + magic + "'");

    // Counts may share the header line.
    long nv = -1, nf = -1, ne = -1;
    if (!(header >> nv >> nf)) {
        if (!next_content_line(in, line, line_no)) parse_fail("OFF", line_no, "missing counts line");
        std::istringstream counts(line);
        if (!(counts >> nv >> nf)) parse_fail("OFF", line_no, "malformed counts line");
        counts >> ne;
    }
    if (nv <= 0 || nf <= 0) parse_fail("OFF", line_no, "vertex and face counts must be positive");

    std::vector<Vec3> vertices(static_cast<std::size_t>(nv));
    for (auto& p : vertices) {
        if (!next_content_line(in, line, line_no)) parse_fail("OFF", line_no, "unexpected end of vertex list");
        std::istringstream s(line);
        if (!(s >> p[0] >> p[1] >> p[2])) parse_fail("OFF", line_no, "malformed vertex");
    }
    std::vector<Face> faces(static_cast<std::size_t>(nf));
    for (auto& f : faces) {
        if (!next_content_line(in, line, line_no)) parse_fail("OFF", line_no, "unexpected end of face list");
        std::istringstream s(line);
        int n = 0;
        if (!(s >> n)) parse_fail("OFF", line_no, "malformed face");
        if (n != 3) parse_fail("OFF", line_no, "only triangles are supported (got " + std::to_string(n) + "-gon)");
        if (!(s >> f[0] >> f[1] >> f[2])) parse_fail("OFF", line_no, "malformed face indices");
    }
    return TriMesh(std::move(vertices), std::move(faces));
}

TriMesh read_obj(std::istream& in)
{
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::string line;
    int line_no = 0;
    while (next_content_line(in, line, line_no)) {
        std::istringstream s(line);
        std::string tag;
        s >> tag;
        if (tag == "v") {
            Vec3 p;
            if (!(s >> p[0] >> p[1] >> p[2])) parse_fail("OBJ", line_no, "malformed vertex");
            vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (s >> tok) {
                // "i", "i/t", "i//n", "i/t/n"
                const std::string head = tok.substr(0, tok.find('/'));
                int i = 0;
                try {
                    std::size_t used = 0;
                    i = std::stoi(head, &used);
                    if (used != head.size()) throw std::invalid_argument(head);
                } catch (const std::exception&) {
                    parse_fail("OBJ", line_no, "malformed face index '" + tok + "'");
                }
                if (i == 0) parse_fail("OBJ", line_no, "face index 0 is invalid (OBJ is 1-based)");
                idx.push_back(i > 0 ? i - 1 : static_cast<int>(vertices.size()) + i);
            }
            if (idx.size() != 3) parse_fail("OBJ", line_no, "only triangles are supported");
            faces.push_back({idx[0], idx[1], idx[2]});
        }
        // other records (vn, vt, o, g, s, usemtl, ...) are ignored
    }
    if (vertices.empty() || faces.empty()) parse_fail("OBJ", line_no, "no vertices or faces");
    return TriMesh(std::move(vertices), std::move(faces));
}

void write_off(const TriMesh& mesh, std::ostream& out)
{
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << ' ' << mesh.num_edges() << '\n';
    for (const Vec3& p : mesh.vertices()) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    for (const Face& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void write_obj(const TriMesh& mesh, std::ostream& out)
{
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const Vec3& p : mesh.vertices()) out << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    for (const Face& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

MeshFormat format_from_path(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") return MeshFormat::OFF;
    if (ext == ".obj") return MeshFormat::OBJ;
    throw ParseError("cannot infer mesh format from '" + path.string() + "' (expected .off or .obj)");
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    try {
        return format == MeshFormat::OFF ? read_off(in) : read_obj(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const TopologyError& e) {
        throw TopologyError(path.string() + ": " + e.what());
    }
}

TriMesh load_mesh(const std::filesystem::path& path)
{
    return load_mesh(path, format_from_path(path));
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    if (format == MeshFormat::OFF) {
        write_off(mesh, out);
    } else {
        write_obj(mesh, out);
    }
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace shapegeo
