#pragma once

#include "shapegeo/path_energy.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shapegeo {

struct LineSearchParams {
    double c1 = 1e-4;     // Armijo sufficient-decrease constant
    double shrink = 0.5;  // backtracking factor
    int max_backtracks = 60;
};

enum class Initialization { linear, custom };

struct SolverConfig {
    int max_iterations = 20000;     // per penalty stage
    double gradient_tolerance = 1e-6;  // stop when |grad|_inf < tol · |initial grad|_inf
    int memory = 10;
    double lambda = 1.0;
    /// Penalty continuation; each stage warm-starts from the previous one. Empty means {lambda}.
    std::vector<double> lambda_schedule;
    LineSearchParams line_search;
    Initialization initialization = Initialization::linear;
    std::optional<MeshPath> initial_path;  // used when initialization == custom

    void validate() const;
    std::vector<double> stages() const;
};

enum class SolveStatus { converged, max_iter, line_search_failure, degenerate_mesh };

std::string to_string(SolveStatus status);

struct IterationRecord {
    int stage;
    double lambda;
    double energy;
    double gradient_inf;
};

struct SolveReport {
    SolveStatus status = SolveStatus::converged;
    std::string message;
    int iterations = 0;
    int evaluations = 0;
    EnergyBreakdown initial_energy;
    EnergyBreakdown final_energy;
    double gradient_threshold = 0.0;
    double final_gradient_inf = 0.0;
    std::vector<IterationRecord> history;  // one entry per accepted iterate, starting with the initial one
    double wall_time_seconds = 0.0;
    SolverConfig config;
};

struct SolveResult {
    MeshPath path;
    SolveReport report;
};

/// Minimizes total energy over the interior frames of `initial` (boundary frames stay fixed).
SolveResult minimize_path_energy(const PhiSpec& spec, MeshPath initial, const SolverConfig& config);

/// Geodesic boundary value problem between two meshes with shared combinatorics.
SolveResult solve_geodesic_bvp(const PhiSpec& spec, const TriMesh& start, const TriMesh& end, int timesteps,
                               const SolverConfig& config);

/// Adds amplitude·u·sin(pi t) along the frame's vertex normals, u uniform in [-1, 1] per vertex and frame.
MeshPath perturb_along_normals(const MeshPath& path, double amplitude, unsigned seed);

struct RadiusSample {
    Vec3 center;
    double radius_mean;
    double radius_stddev;
};

/// Per-frame vertex centroid and statistics of vertex distances to it.
std::vector<RadiusSample> center_radius_profile(const MeshPath& path);

/// frame,t,cx,cy,cz,radius_mean,radius_stddev
void write_radius_profile_csv(const std::vector<RadiusSample>& profile, std::ostream& out);

/// Deterministic report (no timing) as JSON.
void write_solve_report_json(const SolveReport& report, std::ostream& out);

} // namespace shapegeo
