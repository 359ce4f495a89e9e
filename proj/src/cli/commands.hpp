#pragma once

#include "cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shapegeo::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_input = 2,
    exit_precondition = 3,
    exit_solver = 4,
};

/// Options shared by all subcommands. Command-line overrides are merged into
/// the JSON config before parsing, so the manifest hash covers them.
struct CommandOptions {
    std::optional<std::filesystem::path> config;
    std::filesystem::path out = ".";
    MeshFormat format = MeshFormat::OFF;
    Json overrides = Json::object();
};

inline constexpr const char* kCommands[] = {"curvature", "geodesic", "sphere-ode", "deform", "momenta",
                                            "make-icosphere"};

/// Runs one subcommand and writes its outputs plus manifest.json into options.out.
/// Human-readable progress goes to `log`, diagnostics to `err`. Never throws.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& log, std::ostream& err);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Shortest round-trip decimal form of x, with ".0" appended to integral values.
std::string format_number(double x);

/// Mesh files (.off, .obj) of a directory in lexicographic order.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Adds the bumps along the vertex normals of `mesh`.
TriMesh apply_bumps(const TriMesh& mesh, const std::vector<Bump>& bumps);

} // namespace shapegeo::cli
