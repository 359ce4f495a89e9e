#pragma once

#include "shapegeo/bvp_solver.hpp"
#include "shapegeo/sphere_geodesics.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace shapegeo::cli {

using Json = nlohmann::json;

/// Schema violation in an experiment config (unknown key, wrong type, missing field).
class ConfigError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Reads a JSON document; throws IoError if unreadable and ConfigError if malformed.
Json read_json_file(const std::filesystem::path& path);

/// A mesh given either as a file or as a generated icosphere.
struct MeshSource {
    std::optional<std::filesystem::path> file;
    int level = 2;
    double radius = 1.0;
    Vec3 center = Vec3::Zero();

    TriMesh load() const;
};

/// Normal bump added to a sphere: amplitude·½(1 + cos(pi·theta/width)) for theta < width,
/// where theta is the angle between the vertex direction and `direction`.
struct Bump {
    Vec3 direction = Vec3::UnitZ();
    double amplitude = 0.1;
    double width = 0.6;  // radians
};

struct Perturbation {
    double amplitude = 0.05;
    unsigned seed = 1;
};

struct GeodesicConfig {
    PhiSpec phi;
    SolverConfig solver;
    MeshSource start;
    MeshSource end{std::nullopt, 2, 2.0};
    int timesteps = 50;
    std::optional<Perturbation> perturbation;  // adds noise to the linear initial path
    std::optional<std::filesystem::path> initial_frames;
};

struct DeformConfig {
    PhiSpec phi{1.0, 1, 1.0, 1.0};
    SolverConfig solver;
    int level = 2;
    int timesteps = 20;
    std::vector<Bump> start_bumps{Bump{Vec3::UnitZ(), 0.1, 0.6}};
    std::vector<Bump> end_bumps{Bump{Vec3::UnitX(), 0.1, 0.6}};
};

enum class SphereMode { bvp, integrate, shrink, optimal_radius, fig1 };

struct SphereOdeConfig {
    SphereMode mode = SphereMode::bvp;
    SphereOdeParams params;
    double r0 = 1.0;
    double r1 = 2.0;
    double r_t0 = 1.0;  // initial velocity for `integrate`
    double t_end = 1.0;
    int steps = 2000;
    std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    std::vector<double> fig1_B{0.1, 1.0, 10.0, 100.0};
};

struct CurvatureConfig {
    MeshSource mesh;
};

struct MomentaConfig {
    PhiSpec phi;
    std::optional<std::filesystem::path> frames;
    double lambda = 1.0;
    double threshold = 1e-2;
};

struct IcosphereConfig {
    int level = 2;
    double radius = 1.0;
    Vec3 center = Vec3::Zero();
};

PhiSpec parse_phi(const Json& j);
SolverConfig parse_solver(const Json& j);
MeshSource parse_mesh_source(const Json& j, const std::filesystem::path& base);

// Relative file paths inside a config resolve against `base` (the config's directory).
GeodesicConfig parse_geodesic(const Json& j, const std::filesystem::path& base);
DeformConfig parse_deform(const Json& j);
SphereOdeConfig parse_sphere_ode(const Json& j);
CurvatureConfig parse_curvature(const Json& j, const std::filesystem::path& base);
MomentaConfig parse_momenta(const Json& j, const std::filesystem::path& base);
IcosphereConfig parse_icosphere(const Json& j);

SphereMode sphere_mode_from_string(const std::string& s);
std::string to_string(SphereMode mode);

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

} // namespace shapegeo::cli
