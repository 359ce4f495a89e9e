#pragma once

#include "shapegeo/metric.hpp"
#include "shapegeo/mesh.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace shapegeo {

///
/// Time-discretized path of meshes over [0, 1] with one shared face array.
///
/// Frame 0 and frame N are the boundary shapes; only interior frames are
/// free variables. Interval i spans frames i and i+1 and has length 1/N.
///
class MeshPath {
public:
    MeshPath(std::shared_ptr<const Topology> topology, std::vector<std::vector<Vec3>> frames,
             double area_floor = kDefaultAreaFloor);

    /// Pointwise linear interpolation with `intervals` steps. Throws PreconditionError
    /// if the meshes do not share combinatorics.
    static MeshPath linear(const TriMesh& start, const TriMesh& end, int intervals);
    static MeshPath from_meshes(std::span<const TriMesh> meshes);

    int num_frames() const { return static_cast<int>(frames_.size()); }
    int num_intervals() const { return num_frames() - 1; }
    int num_vertices() const { return topology_->num_vertices(); }
    double dt() const { return 1.0 / num_intervals(); }

    std::span<const Vec3> frame(int i) const { return frames_[i]; }
    TriMesh mesh(int i) const;
    TriMesh midpoint_mesh(int interval) const;

    const std::shared_ptr<const Topology>& topology() const { return topology_; }
    const Topology& combinatorics() const { return *topology_; }
    double area_floor() const { return area_floor_; }

    /// Number of free scalars: 3·V·(N-1).
    std::size_t num_free() const;
    void get_interior(std::span<double> out) const;
    void set_interior(std::span<const double> values);

    /// Writable access to an interior frame; boundary frames are never exposed.
    std::span<Vec3> interior_frame(int i);

    MeshPath reversed() const;

private:
    std::shared_ptr<const Topology> topology_;
    std::vector<std::vector<Vec3>> frames_;
    double area_floor_;
};

struct EnergyBreakdown {
    double horizontal = 0.0;
    double penalty = 0.0;   // unweighted
    double lambda = 0.0;
    double total = 0.0;     // horizontal + lambda·penalty
    std::vector<double> horizontal_per_interval;
    std::vector<double> penalty_per_interval;
};

/// sum_i dt · sum_p Phi·(v⊥)²·vertex_area, geometry at the interval midpoint.
double horizontal_energy(const PhiSpec& spec, const MeshPath& path);

/// sum_i dt · sum_p |v_tan|²·vertex_area.
double penalty_energy(const MeshPath& path);

EnergyBreakdown evaluate_energy(const PhiSpec& spec, const MeshPath& path, double lambda);

struct EnergyAndGradient {
    EnergyBreakdown energy;
    /// d total / d x for interior frames, frame-major: index (i-1)·V + p for frame i.
    std::vector<Vec3> gradient;
};

EnergyAndGradient total_energy_and_gradient(const PhiSpec& spec, const MeshPath& path, double lambda);

void write_energy_json(const EnergyBreakdown& energy, std::ostream& out);
/// interval,t_mid,horizontal,penalty
void write_energy_csv(const EnergyBreakdown& energy, std::ostream& out);

} // namespace shapegeo
