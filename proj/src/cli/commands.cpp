#include "cli/commands.hpp"

#include "shapegeo/curvature.hpp"
#include "shapegeo/momenta.hpp"
#include "shapegeo/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#ifndef SHAPEGEO_VERSION
#define SHAPEGEO_VERSION "unknown"
#endif

namespace shapegeo::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
    const CommandOptions& options;
    fs::path base;  // directory relative config paths resolve against
    std::ostream& log;
    std::vector<std::string> outputs;

    fs::path output(const std::string& name)
    {
        outputs.push_back(name);
        return options.out / name;
    }
};

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

const char* extension(MeshFormat f) { return f == MeshFormat::OFF ? ".off" : ".obj"; }

std::string frame_name(int i, MeshFormat f)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04d", i);
    return std::string("frames/") + buf + extension(f);
}

void write_frames(Context& ctx, const MeshPath& path)
{
    for (int i = 0; i < path.num_frames(); ++i) {
        const fs::path p = ctx.output(frame_name(i, ctx.options.format));
        fs::create_directories(p.parent_path());
        save_mesh(path.mesh(i), p, ctx.options.format);
    }
}

MeshPath load_path(const fs::path& dir)
{
    const auto files = list_frames(dir);
    if (files.size() < 2) throw PreconditionError("need at least two frames in " + dir.string());
    std::vector<TriMesh> meshes;
    meshes.reserve(files.size());
    for (const auto& f : files) meshes.push_back(load_mesh(f));
    return MeshPath::from_meshes(meshes);
}

void write_history_csv(const SolveReport& report, std::ostream& out)
{
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "iteration,stage,lambda,energy,gradient_inf\n";
    for (std::size_t i = 0; i < report.history.size(); ++i) {
        const auto& h = report.history[i];
        out << i << ',' << h.stage << ',' << h.lambda << ',' << h.energy << ',' << h.gradient_inf << '\n';
    }
}

nlohmann::ordered_json conservation_json(const ConservationReport& r)
{
    nlohmann::ordered_json j;
    j["linear_drift"] = r.linear_drift;
    j["angular_drift"] = r.angular_drift;
    j["reparam_drift"] = r.reparam_drift;
    j["threshold"] = r.threshold;
    j["passed"] = r.passed();
    return j;
}

void write_penalized_csv(const std::vector<PenalizedMomentum>& samples, std::ostream& out)
{
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "t,Px,Py,Pz,Jx,Jy,Jz\n";
    for (const auto& s : samples) {
        out << s.t << ',' << s.linear[0] << ',' << s.linear[1] << ',' << s.linear[2] << ',' << s.angular[0] << ','
            << s.angular[1] << ',' << s.angular[2] << '\n';
    }
}

// Momenta of a path in both conventions plus their drift reports.
void write_momenta_outputs(Context& ctx, const PhiSpec& phi, const MeshPath& path, double lambda, double threshold)
{
    const auto samples = momenta_along_path(phi, path);
    const auto penalized = penalized_momenta_along_path(phi, path, lambda);
    {
        auto out = open_out(ctx.output("momenta.csv"));
        write_momenta_csv(samples, out);
    }
    {
        auto out = open_out(ctx.output("momenta_penalized.csv"));
        write_penalized_csv(penalized, out);
    }
    nlohmann::ordered_json j;
    j["lambda"] = lambda;
    j["momenta"] = conservation_json(conservation_report(samples, threshold));
    j["penalized_momenta"] = conservation_json(conservation_report(penalized, threshold));
    write_json(ctx.output("conservation.json"), j);
}

int finish_solve(Context& ctx, const PhiSpec& phi, const SolveResult& result, bool radius_profile)
{
    write_frames(ctx, result.path);
    {
        auto out = open_out(ctx.output("report.json"));
        write_solve_report_json(result.report, out);
    }
    {
        auto out = open_out(ctx.output("history.csv"));
        write_history_csv(result.report, out);
    }
    {
        auto out = open_out(ctx.output("energy.json"));
        write_energy_json(result.report.final_energy, out);
    }
    {
        auto out = open_out(ctx.output("energy.csv"));
        write_energy_csv(result.report.final_energy, out);
    }
    if (radius_profile) {
        auto out = open_out(ctx.output("radius_profile.csv"));
        write_radius_profile_csv(center_radius_profile(result.path), out);
    }
    if (result.path.num_intervals() >= 2) {
        write_momenta_outputs(ctx, phi, result.path, result.report.final_energy.lambda, 1e-2);
    }
    ctx.log << "status " << to_string(result.report.status) << " after " << result.report.iterations
            << " iterations, energy " << format_number(result.report.initial_energy.total) << " -> "
            << format_number(result.report.final_energy.total) << '\n';
    if (result.report.status != SolveStatus::converged) {
        ctx.log << result.report.message << '\n';
        return exit_solver;
    }
    return exit_ok;
}

int cmd_curvature(Context& ctx, const Json& j)
{
    const CurvatureConfig c = parse_curvature(j, ctx.base);
    const TriMesh mesh = c.mesh.load();
    const CurvatureField field = compute_curvature(mesh);
    {
        auto out = open_out(ctx.output("curvature.csv"));
        write_curvature_csv(field, out);
    }
    const auto H = field.mean_curvature.values();
    const auto K = field.gauss_curvature.values();
    const double total = total_angular_deflection(field);
    nlohmann::ordered_json s;
    s["vertices"] = mesh.num_vertices();
    s["faces"] = mesh.num_faces();
    s["euler_characteristic"] = mesh.euler_characteristic();
    s["gauss_bonnet_total"] = total;
    s["gauss_bonnet_expected"] = 2.0 * std::numbers::pi * mesh.euler_characteristic();
    s["mean_curvature_min"] = *std::min_element(H.begin(), H.end());
    s["mean_curvature_max"] = *std::max_element(H.begin(), H.end());
    s["gauss_curvature_min"] = *std::min_element(K.begin(), K.end());
    s["gauss_curvature_max"] = *std::max_element(K.begin(), K.end());
    write_json(ctx.output("summary.json"), s);
    ctx.log << "total angular deflection " << format_number(total) << " (2 pi chi = "
            << format_number(2.0 * std::numbers::pi * mesh.euler_characteristic()) << ")\n";
    return exit_ok;
}

int cmd_geodesic(Context& ctx, const Json& j)
{
    GeodesicConfig c = parse_geodesic(j, ctx.base);
    const TriMesh start = c.start.load();
    const TriMesh end = c.end.load();
    if (c.initial_frames) {
        c.solver.initialization = Initialization::custom;
        c.solver.initial_path = load_path(*c.initial_frames);
    } else if (c.perturbation) {
        c.solver.initialization = Initialization::custom;
        c.solver.initial_path = perturb_along_normals(MeshPath::linear(start, end, c.timesteps),
                                                      c.perturbation->amplitude, c.perturbation->seed);
    }
    const SolveResult result = solve_geodesic_bvp(c.phi, start, end, c.timesteps, c.solver);
    return finish_solve(ctx, c.phi, result, true);
}

int cmd_deform(Context& ctx, const Json& j)
{
    const DeformConfig c = parse_deform(j);
    const TriMesh sphere = make_icosphere(c.level);
    const TriMesh start = apply_bumps(sphere, c.start_bumps);
    const TriMesh end = apply_bumps(sphere, c.end_bumps);
    const SolveResult result = solve_geodesic_bvp(c.phi, start, end, c.timesteps, c.solver);
    bool monotone = true;
    for (std::size_t i = 1; i < result.report.history.size(); ++i) {
        const auto& prev = result.report.history[i - 1];
        const auto& cur = result.report.history[i];
        if (cur.stage == prev.stage && cur.energy > prev.energy) monotone = false;
    }
    ctx.log << "energy descent " << (monotone ? "monotone" : "NOT monotone") << '\n';
    return finish_solve(ctx, c.phi, result, false);
}

int cmd_momenta(Context& ctx, const Json& j)
{
    const MomentaConfig c = parse_momenta(j, ctx.base);
    if (!c.frames) throw ConfigError("momenta: a frames directory is required (--frames or \"frames\")");
    const MeshPath path = load_path(*c.frames);
    write_momenta_outputs(ctx, c.phi, path, c.lambda, c.threshold);
    const auto report = conservation_report(momenta_along_path(c.phi, path), c.threshold);
    ctx.log << "drift linear " << format_number(report.linear_drift) << ", angular "
            << format_number(report.angular_drift) << ", reparam " << format_number(report.reparam_drift) << '\n';
    return exit_ok;
}

int cmd_make_icosphere(Context& ctx, const Json& j)
{
    const IcosphereConfig c = parse_icosphere(j);
    const TriMesh mesh = make_icosphere(c.level, c.radius, c.center);
    const fs::path p = ctx.output(std::string("icosphere") + extension(ctx.options.format));
    fs::create_directories(ctx.options.out);
    save_mesh(mesh, p, ctx.options.format);
    ctx.log << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces\n";
    return exit_ok;
}

void write_bvp(Context& ctx, const SphereOdeParams& params, const SphereBvpSolution& sol, const std::string& stem)
{
    {
        auto out = open_out(ctx.output(stem + ".csv"));
        write_sphere_trajectory_csv(sol.trajectory, out);
    }
    nlohmann::ordered_json j;
    j["n"] = params.n;
    j["B"] = params.B;
    j["l"] = params.l;
    j["initial_velocity"] = sol.initial_velocity;
    j["residual"] = sol.residual;
    j["shooting_iterations"] = sol.shooting_iterations;
    write_json(ctx.output(stem + ".json"), j);
}

int cmd_sphere_ode(Context& ctx, const Json& j)
{
    const SphereOdeConfig c = parse_sphere_ode(j);
    switch (c.mode) {
    case SphereMode::bvp: {
        const auto sol = solve_sphere_bvp(c.params, c.r0, c.r1, c.t_end, c.steps);
        write_bvp(ctx, c.params, sol, "trajectory");
        ctx.log << "initial velocity " << format_number(sol.initial_velocity) << ", residual "
                << format_number(sol.residual) << '\n';
        return exit_ok;
    }
    case SphereMode::integrate: {
        if (c.steps < 1) throw PreconditionError("steps must be positive");
        const auto traj = integrate_sphere_geodesic(c.params, {c.r0, c.r_t0}, c.t_end, c.t_end / c.steps);
        auto out = open_out(ctx.output("trajectory.csv"));
        write_sphere_trajectory_csv(traj, out);
        ctx.log << "final radius " << format_number(traj.final_state().r)
                << (traj.status == SphereStatus::collapsed ? " (collapsed)" : "") << '\n';
        return exit_ok;
    }
    case SphereMode::shrink: {
        auto out = open_out(ctx.output("shrink.csv"));
        out << std::setprecision(std::numeric_limits<double>::max_digits10) << "epsilon,length\n";
        for (double eps : c.epsilons) {
            const double len = shrink_path_length(c.params, eps);
            out << eps << ',' << len << '\n';
            ctx.log << "L(" << format_number(eps) << ") = " << format_number(len) << '\n';
        }
        return exit_ok;
    }
    case SphereMode::optimal_radius: {
        const double r = optimal_translation_radius(c.params.B, c.params.l);
        nlohmann::ordered_json o;
        o["B"] = c.params.B;
        o["l"] = c.params.l;
        o["radius"] = r;
        o["residual"] = translation_residual(c.params.B, c.params.l, r);
        write_json(ctx.output("optimal_radius.json"), o);
        ctx.log << format_number(r) << '\n';
        return exit_ok;
    }
    case SphereMode::fig1: {
        const int n = static_cast<int>(c.fig1_B.size());
        std::vector<SphereBvpSolution> sols(n);
        parallel_for(n, [&](int i) {
            SphereOdeParams p = c.params;
            p.B = c.fig1_B[i];
            sols[i] = solve_sphere_bvp(p, c.r0, c.r1, c.t_end, c.steps);
        });
        for (int i = 0; i < n; ++i) {
            SphereOdeParams p = c.params;
            p.B = c.fig1_B[i];
            write_bvp(ctx, p, sols[i], "fig1_B" + format_number(p.B));
            ctx.log << "B = " << format_number(p.B) << ": r_t(0) = " << format_number(sols[i].initial_velocity)
                    << '\n';
        }
        return exit_ok;
    }
    }
    return exit_internal;
}

} // namespace

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const IoError*>(&e) ||
        dynamic_cast<const TopologyError*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e)) {
        return exit_input;
    }
    if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const GeometryError*>(&e)) {
        return exit_precondition;
    }
    if (dynamic_cast<const BracketingError*>(&e)) return exit_solver;
    return exit_internal;
}

std::string format_number(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, ec == std::errc() ? end : buf);
    if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::vector<fs::path> list_frames(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension();
        if (ext == ".off" || ext == ".obj") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

TriMesh apply_bumps(const TriMesh& mesh, const std::vector<Bump>& bumps)
{
    const CurvatureField field = compute_curvature(mesh);
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : mesh.vertices()) centroid += p;
    centroid /= mesh.num_vertices();

    std::vector<Vec3> x(mesh.vertices().begin(), mesh.vertices().end());
    for (int p = 0; p < mesh.num_vertices(); ++p) {
        const Vec3 dir = (mesh.vertex(p) - centroid).normalized();
        double offset = 0.0;
        for (const Bump& b : bumps) {
            const double theta = std::acos(std::clamp(dir.dot(b.direction), -1.0, 1.0));
            if (theta < b.width) offset += b.amplitude * 0.5 * (1.0 + std::cos(std::numbers::pi * theta / b.width));
        }
        x[p] += offset * field.unit_normal[p];
    }
    return mesh.with_vertices(std::move(x));
}

int run_command(const std::string& command, const CommandOptions& options, std::ostream& log, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    Json effective = Json::object();
    int code = exit_internal;
    Context ctx{options, {}, log, {}};
    try {
        if (options.config) {
            effective = read_json_file(*options.config);
            if (!effective.is_object()) throw ConfigError(options.config->string() + ": top level must be an object");
            ctx.base = options.config->parent_path();
        }
        for (const auto& [key, value] : options.overrides.items()) effective[key] = value;
        fs::create_directories(options.out);

        if (command == "curvature") code = cmd_curvature(ctx, effective);
        else if (command == "geodesic") code = cmd_geodesic(ctx, effective);
        else if (command == "sphere-ode") code = cmd_sphere_ode(ctx, effective);
        else if (command == "deform") code = cmd_deform(ctx, effective);
        else if (command == "momenta") code = cmd_momenta(ctx, effective);
        else if (command == "make-icosphere") code = cmd_make_icosphere(ctx, effective);
        else throw ConfigError("unknown command \"" + command + "\"");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        code = exit_code_for(e);
    }

    // The manifest is best effort: a missing output directory must not mask the real exit code.
    try {
        if (fs::is_directory(options.out)) {
            nlohmann::ordered_json m;
            m["command"] = command;
            m["version"] = SHAPEGEO_VERSION;
            m["config_hash"] = fnv1a_hex(effective.dump());
            m["config"] = nlohmann::ordered_json::parse(effective.dump());
            m["exit_code"] = code;
            m["threads"] = thread_count();
            m["wall_time_seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            m["outputs"] = ctx.outputs;
            write_json(options.out / "manifest.json", m);
        }
    } catch (const std::exception& e) {
        err << "warning: could not write manifest: " << e.what() << '\n';
    }
    return code;
}

} // namespace shapegeo::cli
