#pragma once

#include "shapegeo/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace shapegeo {

/// Smallest admissible triangle area, relative to the mean face area.
inline constexpr double kDefaultAreaFloor = 1e-12;

struct Edge {
    int a;  // a < b
    int b;
};

///
/// Validated combinatorics of a closed oriented triangle mesh.
///
/// Shared (by pointer) between all meshes of a path; only vertex positions vary.
/// Construction rejects faces with out-of-range or repeated indices, boundary
/// edges, edges on more than two faces, inconsistent orientation, isolated
/// vertices and non-manifold vertex stars.
///
class Topology {
public:
    static std::shared_ptr<const Topology> build(std::vector<Face> faces, int num_vertices);

    int num_vertices() const { return num_vertices_; }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }

    std::span<const Face> faces() const { return faces_; }
    const Face& face(int f) const { return faces_[f]; }
    std::span<const Edge> edges() const { return edges_; }

    /// Incident faces of `v` in cyclic order (consecutive faces share an edge).
    std::span<const int> star(int v) const
    {
        return {star_faces_.data() + star_offsets_[v],
                static_cast<std::size_t>(star_offsets_[v + 1] - star_offsets_[v])};
    }

private:
    Topology() = default;

    int num_vertices_ = 0;
    std::vector<Face> faces_;
    std::vector<Edge> edges_;
    std::vector<int> star_offsets_;
    std::vector<int> star_faces_;
};

///
/// Immutable triangle mesh: vertex positions over a validated topology.
///
class TriMesh {
public:
    TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces, double area_floor = kDefaultAreaFloor);
    TriMesh(std::shared_ptr<const Topology> topology,
            std::vector<Vec3> vertices,
            double area_floor = kDefaultAreaFloor);

    /// Same combinatorics, new positions.
    TriMesh with_vertices(std::vector<Vec3> vertices) const;

    int num_vertices() const { return topology_->num_vertices(); }
    int num_faces() const { return topology_->num_faces(); }
    int num_edges() const { return topology_->num_edges(); }
    int euler_characteristic() const { return topology_->euler_characteristic(); }

    std::span<const Vec3> vertices() const { return vertices_; }
    const Vec3& vertex(int v) const { return vertices_[v]; }
    std::span<const Face> faces() const { return topology_->faces(); }
    std::span<const Edge> edges() const { return topology_->edges(); }
    std::span<const int> star(int v) const { return topology_->star(v); }

    const std::shared_ptr<const Topology>& topology() const { return topology_; }
    double area_floor() const { return area_floor_; }

private:
    std::shared_ptr<const Topology> topology_;
    std::vector<Vec3> vertices_;
    double area_floor_;
};

/// Throws GeometryError naming the first face whose area is not above
/// `area_floor` times the mean face area.
void check_face_areas(const Topology& topology, std::span<const Vec3> vertices, double area_floor,
                      int timestep = -1);

/// Subdivided icosahedron projected onto a sphere; 20·4^level outward-oriented faces.
TriMesh make_icosphere(int level, double radius = 1.0, const Vec3& center = Vec3::Zero());

/// Axis-aligned ellipsoid with semi-axes `axes`, from an icosphere of the given level.
TriMesh make_ellipsoid(int level, const Vec3& axes);

/// Signed enclosed volume; positive for outward orientation.
double enclosed_volume(const TriMesh& mesh);
double surface_area(const TriMesh& mesh);

TriMesh reverse_orientation(const TriMesh& mesh);

enum class MeshFormat { OFF, OBJ };

/// Picks the format from the file extension (.off / .obj).
MeshFormat format_from_path(const std::filesystem::path& path);

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format = MeshFormat::OFF);

TriMesh read_off(std::istream& in);
TriMesh read_obj(std::istream& in);
void write_off(const TriMesh& mesh, std::ostream& out);
void write_obj(const TriMesh& mesh, std::ostream& out);

} // namespace shapegeo
