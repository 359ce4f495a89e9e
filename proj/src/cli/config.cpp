#include "cli/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace shapegeo::cli {

namespace {

void require_object(const Json& j, std::string_view where)
{
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where)
{
    require_object(j, where);
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError(std::string(where) + ": unknown key \"" + key + "\"");
    }
}

template <typename T>
void read(const Json& j, const char* key, T& out, std::string_view where)
{
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string(where) + "." + key + ": wrong type (" + it->type_name() + ")");
    }
}

Vec3 read_vec3(const Json& j, std::string_view where)
{
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(where) + ": expected an array of 3 numbers");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) throw ConfigError(std::string(where) + ": expected an array of 3 numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::vector<Bump> parse_bumps(const Json& j, std::string_view where)
{
    if (!j.is_array()) throw ConfigError(std::string(where) + ": expected an array of bumps");
    std::vector<Bump> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = std::string(where) + "[" + std::to_string(i) + "]";
        check_keys(j[i], {"direction", "amplitude", "width"}, w);
        Bump b;
        if (j[i].contains("direction")) b.direction = read_vec3(j[i]["direction"], w + ".direction");
        read(j[i], "amplitude", b.amplitude, w);
        read(j[i], "width", b.width, w);
        if (!(b.direction.norm() > 0)) throw ConfigError(w + ".direction: must be nonzero");
        if (!(b.width > 0)) throw ConfigError(w + ".width: must be positive");
        b.direction.normalize();
        out.push_back(b);
    }
    return out;
}

} // namespace

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

TriMesh MeshSource::load() const
{
    if (file) return load_mesh(*file);
    return make_icosphere(level, radius, center);
}

PhiSpec parse_phi(const Json& j)
{
    check_keys(j, {"A", "k", "B", "l", "include_mean", "include_gauss"}, "phi");
    PhiSpec s;
    read(j, "A", s.A, "phi");
    read(j, "k", s.k, "phi");
    read(j, "B", s.B, "phi");
    read(j, "l", s.l, "phi");
    read(j, "include_mean", s.include_mean, "phi");
    read(j, "include_gauss", s.include_gauss, "phi");
    return s;
}

SolverConfig parse_solver(const Json& j)
{
    check_keys(j, {"max_iterations", "gradient_tolerance", "memory", "lambda", "lambda_schedule", "line_search"},
               "solver");
    SolverConfig c;
    read(j, "max_iterations", c.max_iterations, "solver");
    read(j, "gradient_tolerance", c.gradient_tolerance, "solver");
    read(j, "memory", c.memory, "solver");
    read(j, "lambda", c.lambda, "solver");
    read(j, "lambda_schedule", c.lambda_schedule, "solver");
    if (j.contains("line_search")) {
        const Json& ls = j["line_search"];
        check_keys(ls, {"c1", "shrink", "max_backtracks"}, "solver.line_search");
        read(ls, "c1", c.line_search.c1, "solver.line_search");
        read(ls, "shrink", c.line_search.shrink, "solver.line_search");
        read(ls, "max_backtracks", c.line_search.max_backtracks, "solver.line_search");
    }
    return c;
}

MeshSource parse_mesh_source(const Json& j, const std::filesystem::path& base)
{
    check_keys(j, {"file", "icosphere"}, "mesh");
    if (j.contains("file") == j.contains("icosphere")) {
        throw ConfigError("mesh: give exactly one of \"file\" or \"icosphere\"");
    }
    MeshSource m;
    if (j.contains("file")) {
        std::string p;
        read(j, "file", p, "mesh");
        m.file = resolve(base, p);
        return m;
    }
    const Json& ico = j["icosphere"];
    check_keys(ico, {"level", "radius", "center"}, "mesh.icosphere");
    read(ico, "level", m.level, "mesh.icosphere");
    read(ico, "radius", m.radius, "mesh.icosphere");
    if (ico.contains("center")) m.center = read_vec3(ico["center"], "mesh.icosphere.center");
    return m;
}

GeodesicConfig parse_geodesic(const Json& j, const std::filesystem::path& base)
{
    check_keys(j, {"phi", "solver", "start", "end", "timesteps", "initialization"}, "config");
    GeodesicConfig c;
    if (j.contains("phi")) c.phi = parse_phi(j["phi"]);
    if (j.contains("solver")) c.solver = parse_solver(j["solver"]);
    if (j.contains("start")) c.start = parse_mesh_source(j["start"], base);
    if (j.contains("end")) c.end = parse_mesh_source(j["end"], base);
    read(j, "timesteps", c.timesteps, "config");
    if (j.contains("initialization")) {
        const Json& init = j["initialization"];
        check_keys(init, {"type", "amplitude", "seed", "frames"}, "initialization");
        std::string type = "linear";
        read(init, "type", type, "initialization");
        if (type == "perturbed") {
            Perturbation p;
            read(init, "amplitude", p.amplitude, "initialization");
            read(init, "seed", p.seed, "initialization");
            c.perturbation = p;
        } else if (type == "custom") {
            std::string dir;
            read(init, "frames", dir, "initialization");
            if (dir.empty()) throw ConfigError("initialization: custom requires \"frames\"");
            c.initial_frames = resolve(base, dir);
        } else if (type != "linear") {
            throw ConfigError("initialization.type: expected linear, perturbed or custom, got \"" + type + "\"");
        }
    }
    return c;
}

DeformConfig parse_deform(const Json& j)
{
    check_keys(j, {"phi", "solver", "level", "timesteps", "start_bumps", "end_bumps"}, "config");
    DeformConfig c;
    if (j.contains("phi")) c.phi = parse_phi(j["phi"]);
    if (j.contains("solver")) c.solver = parse_solver(j["solver"]);
    read(j, "level", c.level, "config");
    read(j, "timesteps", c.timesteps, "config");
    if (j.contains("start_bumps")) c.start_bumps = parse_bumps(j["start_bumps"], "start_bumps");
    if (j.contains("end_bumps")) c.end_bumps = parse_bumps(j["end_bumps"], "end_bumps");
    return c;
}

SphereOdeConfig parse_sphere_ode(const Json& j)
{
    check_keys(j, {"mode", "n", "B", "l", "r0", "r1", "r_t0", "t_end", "steps", "epsilons", "fig1_B"}, "config");
    SphereOdeConfig c;
    if (j.contains("mode")) {
        std::string m;
        read(j, "mode", m, "config");
        c.mode = sphere_mode_from_string(m);
    }
    read(j, "n", c.params.n, "config");
    read(j, "B", c.params.B, "config");
    read(j, "l", c.params.l, "config");
    read(j, "r0", c.r0, "config");
    read(j, "r1", c.r1, "config");
    read(j, "r_t0", c.r_t0, "config");
    read(j, "t_end", c.t_end, "config");
    read(j, "steps", c.steps, "config");
    read(j, "epsilons", c.epsilons, "config");
    read(j, "fig1_B", c.fig1_B, "config");
    return c;
}

CurvatureConfig parse_curvature(const Json& j, const std::filesystem::path& base)
{
    check_keys(j, {"mesh"}, "config");
    CurvatureConfig c;
    if (j.contains("mesh")) c.mesh = parse_mesh_source(j["mesh"], base);
    return c;
}

MomentaConfig parse_momenta(const Json& j, const std::filesystem::path& base)
{
    check_keys(j, {"phi", "frames", "lambda", "threshold"}, "config");
    MomentaConfig c;
    if (j.contains("phi")) c.phi = parse_phi(j["phi"]);
    if (j.contains("frames")) {
        std::string dir;
        read(j, "frames", dir, "config");
        c.frames = resolve(base, dir);
    }
    read(j, "lambda", c.lambda, "config");
    read(j, "threshold", c.threshold, "config");
    return c;
}

IcosphereConfig parse_icosphere(const Json& j)
{
    check_keys(j, {"level", "radius", "center"}, "config");
    IcosphereConfig c;
    read(j, "level", c.level, "config");
    read(j, "radius", c.radius, "config");
    if (j.contains("center")) c.center = read_vec3(j["center"], "config.center");
    return c;
}

SphereMode sphere_mode_from_string(const std::string& s)
{
    if (s == "bvp") return SphereMode::bvp;
    if (s == "integrate") return SphereMode::integrate;
    if (s == "shrink") return SphereMode::shrink;
    if (s == "optimal-radius") return SphereMode::optimal_radius;
    if (s == "fig1") return SphereMode::fig1;
    throw ConfigError("unknown sphere-ode mode \"" + s + "\" (bvp, integrate, shrink, optimal-radius, fig1)");
}

std::string to_string(SphereMode mode)
{
    switch (mode) {
    case SphereMode::bvp: return "bvp";
    case SphereMode::integrate: return "integrate";
    case SphereMode::shrink: return "shrink";
    case SphereMode::optimal_radius: return "optimal-radius";
    case SphereMode::fig1: return "fig1";
    }
    return "unknown";
}

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace shapegeo::cli
