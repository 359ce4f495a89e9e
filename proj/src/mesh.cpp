#include "shapegeo/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <unordered_map>

namespace shapegeo {

namespace {

std::uint64_t edge_key(int a, int b)
{
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

std::string edge_name(int a, int b)
{
    std::ostringstream s;
    s << "(" << std::min(a, b) << ", " << std::max(a, b) << ")";
    return s.str();
}

} // namespace

std::shared_ptr<const Topology> Topology::build(std::vector<Face> faces, int num_vertices)
{
    if (num_vertices <= 0 || faces.empty()) {
        throw TopologyError("mesh has no vertices or no faces");
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& t = faces[f];
        for (int i : t) {
            if (i < 0 || i >= num_vertices) {
                throw TopologyError("face " + std::to_string(f) + " references vertex " + std::to_string(i) +
                                    " outside [0, " + std::to_string(num_vertices) + ")");
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw TopologyError("face " + std::to_string(f) + " has repeated vertex indices");
        }
    }

    // undirected edge -> the directed half-edges that use it
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> uses;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            const int a = faces[f][c];
            const int b = faces[f][(c + 1) % 3];
            uses[{std::min(a, b), std::max(a, b)}].emplace_back(a, b);
        }
    }

    auto topo = std::shared_ptr<Topology>(new Topology());
    topo->num_vertices_ = num_vertices;
    topo->edges_.reserve(uses.size());
    for (const auto& [e, half] : uses) {
        if (half.size() > 2) {
            throw TopologyError("non-manifold edge " + edge_name(e.first, e.second) + " shared by " +
                                std::to_string(half.size()) + " faces");
        }
        if (half.size() == 1) {
            throw TopologyError("boundary edge " + edge_name(e.first, e.second));
        }
        if (half[0] == half[1]) {
            throw TopologyError("inconsistent orientation at edge " + edge_name(e.first, e.second));
        }
        topo->edges_.push_back({e.first, e.second});
    }

    // vertex stars in cyclic order
    std::vector<std::vector<int>> incident(num_vertices);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int v : faces[f]) incident[v].push_back(static_cast<int>(f));
    }
    topo->star_offsets_.assign(num_vertices + 1, 0);
    topo->star_faces_.reserve(3 * faces.size());
    for (int v = 0; v < num_vertices; ++v) {
        const auto& inc = incident[v];
        if (inc.empty()) {
            throw TopologyError("isolated vertex " + std::to_string(v));
        }
        // For face (v, next, prev) the neighbour across edge (v, prev) has `prev` as its next vertex.
        std::unordered_map<int, int> by_next;
        auto corner = [&](int f) {
            const Face& t = faces[f];
            return t[0] == v ? 0 : (t[1] == v ? 1 : 2);
        };
        for (int f : inc) by_next[faces[f][(corner(f) + 1) % 3]] = f;

        int f = inc.front();
        std::size_t walked = 0;
        do {
            topo->star_faces_.push_back(f);
            ++walked;
            const int prev = faces[f][(corner(f) + 2) % 3];
            auto it = by_next.find(prev);
            if (it == by_next.end()) {
                throw TopologyError("non-manifold vertex " + std::to_string(v));
            }
            f = it->second;
        } while (f != inc.front() && walked <= inc.size());
        if (walked != inc.size()) {
            throw TopologyError("non-manifold vertex " + std::to_string(v) + " (star is not a single fan)");
        }
        topo->star_offsets_[v + 1] = static_cast<int>(topo->star_faces_.size());
    }

    topo->faces_ = std::move(faces);
    return topo;
}

void check_face_areas(const Topology& topology, std::span<const Vec3> vertices, double area_floor, int timestep)
{
    const auto faces = topology.faces();
    std::vector<double> areas(faces.size());
    CompensatedSum<double> total;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Vec3& p0 = vertices[faces[f][0]];
        areas[f] = 0.5 * (vertices[faces[f][1]] - p0).cross(vertices[faces[f][2]] - p0).norm();
        total += areas[f];
    }
    const double floor = area_floor * total.value() / static_cast<double>(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (!(areas[f] > floor)) {
            throw GeometryError("degenerate face " + std::to_string(f) + " (area " + std::to_string(areas[f]) + ")",
                                timestep);
        }
    }
}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces, double area_floor)
    : area_floor_(area_floor)
{
    topology_ = Topology::build(std::move(faces), static_cast<int>(vertices.size()));
    vertices_ = std::move(vertices);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!vertices_[i].allFinite()) throw GeometryError("non-finite vertex " + std::to_string(i));
    }
    check_face_areas(*topology_, vertices_, area_floor_);
}

TriMesh::TriMesh(std::shared_ptr<const Topology> topology, std::vector<Vec3> vertices, double area_floor)
    : topology_(std::move(topology)), vertices_(std::move(vertices)), area_floor_(area_floor)
{
    if (static_cast<int>(vertices_.size()) != topology_->num_vertices()) {
        throw PreconditionError("vertex count " + std::to_string(vertices_.size()) +
                                " does not match topology with " + std::to_string(topology_->num_vertices()));
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!vertices_[i].allFinite()) throw GeometryError("non-finite vertex " + std::to_string(i));
    }
    check_face_areas(*topology_, vertices_, area_floor_);
}

TriMesh TriMesh::with_vertices(std::vector<Vec3> vertices) const
{
    return TriMesh(topology_, std::move(vertices), area_floor_);
}

TriMesh make_icosphere(int level, double radius, const Vec3& center)
{
    if (level < 0) throw PreconditionError("icosphere level must be >= 0");
    if (level > 8) throw PreconditionError("icosphere level " + std::to_string(level) + " exceeds the limit of 8");
    if (!(radius > 0)) throw PreconditionError("icosphere radius must be positive");

    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> unit = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    for (auto& p : unit) p.normalize();
    std::vector<Face> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (int s = 0; s < level; ++s) {
        std::unordered_map<std::uint64_t, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = edge_key(std::min(a, b), std::max(a, b));
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            unit.push_back((unit[a] + unit[b]).normalized());
            const int idx = static_cast<int>(unit.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Face> refined;
        refined.reserve(4 * faces.size());
        for (const Face& f : faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            refined.push_back({f[0], ab, ca});
            refined.push_back({f[1], bc, ab});
            refined.push_back({f[2], ca, bc});
            refined.push_back({ab, bc, ca});
        }
        faces = std::move(refined);
    }

    std::vector<Vec3> vertices;
    vertices.reserve(unit.size());
    for (const auto& u : unit) vertices.push_back(center + radius * u);
    return TriMesh(std::move(vertices), std::move(faces));
}

TriMesh make_ellipsoid(int level, const Vec3& axes)
{
    if (!(axes.array() > 0).all()) throw PreconditionError("ellipsoid semi-axes must be positive");
    const TriMesh sphere = make_icosphere(level);
    std::vector<Vec3> v(sphere.vertices().begin(), sphere.vertices().end());
    for (auto& p : v) p = p.cwiseProduct(axes);
    return sphere.with_vertices(std::move(v));
}

double enclosed_volume(const TriMesh& mesh)
{
    CompensatedSum<double> vol;
    for (const Face& f : mesh.faces()) {
        const Vec3& p0 = mesh.vertex(f[0]);
        const Vec3& p1 = mesh.vertex(f[1]);
        const Vec3& p2 = mesh.vertex(f[2]);
        vol += p0.dot(p1.cross(p2)) / 6.0;
    }
    return vol.value();
}

double surface_area(const TriMesh& mesh)
{
    CompensatedSum<double> area;
    for (const Face& f : mesh.faces()) {
        const Vec3& p0 = mesh.vertex(f[0]);
        area += 0.5 * (mesh.vertex(f[1]) - p0).cross(mesh.vertex(f[2]) - p0).norm();
    }
    return area.value();
}

TriMesh reverse_orientation(const TriMesh& mesh)
{
    std::vector<Face> faces(mesh.faces().begin(), mesh.faces().end());
    for (auto& f : faces) std::swap(f[1], f[2]);
    return TriMesh(std::vector<Vec3>(mesh.vertices().begin(), mesh.vertices().end()), std::move(faces),
                   mesh.area_floor());
}

} // namespace shapegeo
