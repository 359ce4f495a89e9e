// shapegeo: command-line front end for the shape-space geodesic toolkit.

#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>

namespace {

using shapegeo::cli::Json;

struct Common {
    std::string config;
    std::string out = ".";
    std::string format = "off";
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--format", c.format, "mesh output format")
        ->check(CLI::IsMember({"off", "obj"}))
        ->capture_default_str();
}

std::string absolute(const std::string& p) { return std::filesystem::absolute(p).string(); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Geodesics in shape space under curvature-weighted metrics"};
    app.require_subcommand(1);

    std::map<std::string, Common> common;
    Json overrides = Json::object();

    auto* curvature = app.add_subcommand("curvature", "per-vertex discrete curvature of a mesh");
    add_common(curvature, common["curvature"]);
    curvature->add_option_function<std::string>(
        "--mesh", [&](const std::string& p) { overrides["mesh"] = {{"file", absolute(p)}}; }, "input OFF/OBJ mesh");

    auto* geodesic = app.add_subcommand("geodesic", "solve the geodesic boundary value problem between two meshes");
    add_common(geodesic, common["geodesic"]);
    geodesic->add_option_function<std::string>(
        "--start", [&](const std::string& p) { overrides["start"] = {{"file", absolute(p)}}; }, "start mesh");
    geodesic->add_option_function<std::string>(
        "--end", [&](const std::string& p) { overrides["end"] = {{"file", absolute(p)}}; }, "end mesh");
    geodesic->add_option_function<int>(
        "--timesteps", [&](int n) { overrides["timesteps"] = n; }, "number of time intervals");

    auto* sphere = app.add_subcommand("sphere-ode", "radial geodesics between concentric spheres");
    add_common(sphere, common["sphere-ode"]);
    sphere->add_option_function<std::string>(
        "--mode", [&](const std::string& m) { overrides["mode"] = m; }, "bvp | integrate | shrink | optimal-radius | fig1");
    sphere->add_option_function<double>("--B", [&](double v) { overrides["B"] = v; }, "Gauss curvature weight");
    sphere->add_option_function<double>("--l", [&](double v) { overrides["l"] = v; }, "Gauss curvature exponent");
    sphere->add_option_function<double>("--r0", [&](double v) { overrides["r0"] = v; }, "initial radius");
    sphere->add_option_function<double>("--r1", [&](double v) { overrides["r1"] = v; }, "final radius");

    auto* deform = app.add_subcommand("deform", "geodesic between procedurally bumped spheres");
    add_common(deform, common["deform"]);
    deform->add_option_function<int>("--level", [&](int v) { overrides["level"] = v; }, "icosphere level");
    deform->add_option_function<int>(
        "--timesteps", [&](int n) { overrides["timesteps"] = n; }, "number of time intervals");

    auto* momenta = app.add_subcommand("momenta", "momentum diagnostics along a stored path");
    add_common(momenta, common["momenta"]);
    momenta->add_option_function<std::string>(
        "--frames", [&](const std::string& p) { overrides["frames"] = absolute(p); }, "directory of frame meshes");
    momenta->add_option_function<double>("--lambda", [&](double v) { overrides["lambda"] = v; }, "penalty weight");

    auto* ico = app.add_subcommand("make-icosphere", "write a subdivided icosahedron");
    add_common(ico, common["make-icosphere"]);
    ico->add_option_function<int>("--level", [&](int v) { overrides["level"] = v; }, "subdivision level");
    ico->add_option_function<double>("--radius", [&](double v) { overrides["radius"] = v; }, "sphere radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : shapegeo::cli::exit_input;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const Common& c = common[name];
    shapegeo::cli::CommandOptions options;
    if (!c.config.empty()) options.config = c.config;
    options.out = c.out;
    options.format = c.format == "obj" ? shapegeo::MeshFormat::OBJ : shapegeo::MeshFormat::OFF;
    options.overrides = overrides;
    return shapegeo::cli::run_command(name, options, std::cout, std::cerr);
}
