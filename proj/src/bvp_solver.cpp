#include "shapegeo/bvp_solver.hpp"

#include "shapegeo/curvature.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace shapegeo {

void SolverConfig::validate() const
{
    if (max_iterations < 0) throw PreconditionError("max_iterations must be nonnegative");
    if (!(gradient_tolerance > 0.0)) throw PreconditionError("gradient_tolerance must be positive");
    if (memory < 1) throw PreconditionError("quasi-Newton memory must be at least 1");
    if (!(line_search.c1 > 0.0 && line_search.c1 < 1.0)) throw PreconditionError("Armijo c1 must lie in (0, 1)");
    if (!(line_search.shrink > 0.0 && line_search.shrink < 1.0)) {
        throw PreconditionError("backtracking shrink factor must lie in (0, 1)");
    }
    for (double l : stages()) {
        if (!(l >= 0.0)) throw PreconditionError("penalty weights must be nonnegative");
    }
    if (initialization == Initialization::custom && !initial_path) {
        throw PreconditionError("custom initialization requires an initial path");
    }
}

std::vector<double> SolverConfig::stages() const
{
    return lambda_schedule.empty() ? std::vector<double>{lambda} : lambda_schedule;
}

std::string to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::line_search_failure: return "line_search_failure";
    case SolveStatus::degenerate_mesh: return "degenerate_mesh";
    }
    return "unknown";
}

namespace {

using Vector = Eigen::VectorXd;

double inf_norm(const Vector& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double mean_edge_length(const MeshPath& path)
{
    const auto x = path.frame(0);
    double sum = 0.0;
    for (const Edge& e : path.combinatorics().edges()) sum += (x[e.a] - x[e.b]).norm();
    return sum / static_cast<double>(path.combinatorics().num_edges());
}

struct Evaluation {
    EnergyBreakdown energy;
    Vector gradient;
};

Evaluation evaluate(const PhiSpec& spec, const MeshPath& path, double lambda)
{
    auto eg = total_energy_and_gradient(spec, path, lambda);
    Evaluation out{std::move(eg.energy), Vector(3 * static_cast<Eigen::Index>(eg.gradient.size()))};
    for (std::size_t i = 0; i < eg.gradient.size(); ++i) out.gradient.segment<3>(3 * i) = eg.gradient[i];
    return out;
}

/// Two-loop recursion: returns -H·g for the L-BFGS inverse Hessian approximation.
Vector lbfgs_direction(const Vector& g, const std::deque<Vector>& s, const std::deque<Vector>& y,
                       const std::deque<double>& rho)
{
    Vector q = g;
    std::vector<double> alpha(s.size());
    for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
        alpha[i] = rho[i] * s[i].dot(q);
        q -= alpha[i] * y[i];
    }
    if (!s.empty()) q *= s.back().dot(y.back()) / y.back().squaredNorm();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double beta = rho[i] * y[i].dot(q);
        q += (alpha[i] - beta) * s[i];
    }
    return -q;
}

} // namespace

SolveResult minimize_path_energy(const PhiSpec& spec, MeshPath initial, const SolverConfig& config)
{
    spec.validate();
    config.validate();
    const auto clock_start = std::chrono::steady_clock::now();

    SolveResult result{std::move(initial), {}};
    MeshPath& path = result.path;
    SolveReport& rep = result.report;
    rep.config = config;
    rep.config.initial_path.reset();

    auto finish = [&]() -> SolveResult {
        rep.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
        return std::move(result);
    };

    const auto stages = config.stages();
    const Eigen::Index n = static_cast<Eigen::Index>(path.num_free());
    Vector x(n);
    path.get_interior({x.data(), static_cast<std::size_t>(n)});
    const double step_scale = mean_edge_length(path);

    Evaluation current;
    try {
        current = evaluate(spec, path, stages.front());
    } catch (const GeometryError& e) {
        rep.status = SolveStatus::degenerate_mesh;
        rep.message = std::string("initial path: ") + e.what();
        return finish();
    }
    rep.initial_energy = current.energy;

    for (std::size_t stage = 0; stage < stages.size(); ++stage) {
        const double lambda = stages[stage];
        if (stage > 0) current = evaluate(spec, path, lambda);
        ++rep.evaluations;

        const double g0 = inf_norm(current.gradient);
        rep.gradient_threshold = config.gradient_tolerance * g0;
        rep.history.push_back({static_cast<int>(stage), lambda, current.energy.total, g0});

        std::deque<Vector> s_hist, y_hist;
        std::deque<double> rho_hist;
        bool stage_done = false;

        for (int it = 0; it < config.max_iterations; ++it) {
            const double g_inf = inf_norm(current.gradient);
            if (g_inf == 0.0 || g_inf < rep.gradient_threshold) {
                stage_done = true;
                break;
            }

            Vector d = lbfgs_direction(current.gradient, s_hist, y_hist, rho_hist);
            double slope = current.gradient.dot(d);
            if (!(slope < 0.0)) {
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                d = -current.gradient;
                slope = current.gradient.dot(d);
            }
            double alpha = 1.0;
            if (s_hist.empty()) alpha = std::min(1.0, 0.1 * step_scale / inf_norm(d));

            bool accepted = false;
            bool hit_degenerate = false;
            std::string degenerate_msg;
            Vector x_trial;
            Evaluation trial;
            for (int bt = 0; bt <= config.line_search.max_backtracks; ++bt, alpha *= config.line_search.shrink) {
                x_trial = x + alpha * d;
                path.set_interior({x_trial.data(), static_cast<std::size_t>(n)});
                try {
                    for (int i = 1; i + 1 < path.num_frames(); ++i) {
                        check_face_areas(path.combinatorics(), path.frame(i), path.area_floor(), i);
                    }
                    trial = evaluate(spec, path, lambda);
                    ++rep.evaluations;
                } catch (const GeometryError& e) {
                    hit_degenerate = true;
                    degenerate_msg = e.what();
                    continue;
                }
                if (std::isfinite(trial.energy.total) &&
                    trial.energy.total <= current.energy.total + config.line_search.c1 * alpha * slope) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                path.set_interior({x.data(), static_cast<std::size_t>(n)});
                rep.status = hit_degenerate ? SolveStatus::degenerate_mesh : SolveStatus::line_search_failure;
                rep.message = hit_degenerate
                                  ? "iteration " + std::to_string(rep.iterations) + ": " + degenerate_msg
                                  : "no sufficient decrease after " +
                                        std::to_string(config.line_search.max_backtracks) + " backtracks";
                rep.final_energy = current.energy;
                rep.final_gradient_inf = inf_norm(current.gradient);
                return finish();
            }

            Vector s = x_trial - x;
            Vector y = trial.gradient - current.gradient;
            const double sy = s.dot(y);
            if (sy > 1e-12 * std::sqrt(s.squaredNorm() * y.squaredNorm())) {
                s_hist.push_back(std::move(s));
                y_hist.push_back(std::move(y));
                rho_hist.push_back(1.0 / sy);
                if (static_cast<int>(s_hist.size()) > config.memory) {
                    s_hist.pop_front();
                    y_hist.pop_front();
                    rho_hist.pop_front();
                }
            }
            x = std::move(x_trial);
            current = std::move(trial);
            ++rep.iterations;
            rep.history.push_back({static_cast<int>(stage), lambda, current.energy.total, inf_norm(current.gradient)});
        }
        if (!stage_done) {
            const double g_inf = inf_norm(current.gradient);
            stage_done = g_inf == 0.0 || g_inf < rep.gradient_threshold;
        }
        if (!stage_done) {
            rep.status = SolveStatus::max_iter;
            rep.message = "gradient above tolerance after " + std::to_string(config.max_iterations) +
                          " iterations in stage " + std::to_string(stage);
            rep.final_energy = current.energy;
            rep.final_gradient_inf = inf_norm(current.gradient);
            return finish();
        }
    }

    rep.status = SolveStatus::converged;
    rep.final_energy = current.energy;
    rep.final_gradient_inf = inf_norm(current.gradient);
    return finish();
}

SolveResult solve_geodesic_bvp(const PhiSpec& spec, const TriMesh& start, const TriMesh& end, int timesteps,
                               const SolverConfig& config)
{
    if (timesteps < 2) throw PreconditionError("need at least two time steps");
    if (start.num_vertices() != end.num_vertices() ||
        !std::equal(start.faces().begin(), start.faces().end(), end.faces().begin(), end.faces().end())) {
        throw PreconditionError("start and end meshes do not share combinatorics");
    }
    if (config.initialization == Initialization::custom) {
        if (!config.initial_path) throw PreconditionError("custom initialization requires an initial path");
        const MeshPath& p = *config.initial_path;
        if (p.num_intervals() != timesteps || p.num_vertices() != start.num_vertices()) {
            throw PreconditionError("custom initial path does not match the requested discretization");
        }
        // boundary frames are taken from the inputs, bit for bit
        std::vector<std::vector<Vec3>> frames;
        frames.emplace_back(start.vertices().begin(), start.vertices().end());
        for (int i = 1; i < timesteps; ++i) frames.emplace_back(p.frame(i).begin(), p.frame(i).end());
        frames.emplace_back(end.vertices().begin(), end.vertices().end());
        return minimize_path_energy(spec, MeshPath(start.topology(), std::move(frames), start.area_floor()), config);
    }
    return minimize_path_energy(spec, MeshPath::linear(start, end, timesteps), config);
}

MeshPath perturb_along_normals(const MeshPath& path, double amplitude, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    MeshPath out = path;
    for (int i = 1; i + 1 < path.num_frames(); ++i) {
        const auto field = compute_curvature(path.mesh(i));
        const double envelope = std::sin(std::numbers::pi * i * path.dt());
        auto frame = out.interior_frame(i);
        for (int p = 0; p < path.num_vertices(); ++p) {
            frame[p] += amplitude * envelope * unit(rng) * field.unit_normal[p];
        }
    }
    for (int i = 1; i + 1 < out.num_frames(); ++i) {
        check_face_areas(out.combinatorics(), out.frame(i), out.area_floor(), i);
    }
    return out;
}

std::vector<RadiusSample> center_radius_profile(const MeshPath& path)
{
    std::vector<RadiusSample> out;
    out.reserve(path.num_frames());
    for (int i = 0; i < path.num_frames(); ++i) {
        const auto x = path.frame(i);
        CompensatedSum<Vec3> c;
        for (const Vec3& p : x) c += p;
        const Vec3 center = c.value() / static_cast<double>(x.size());
        CompensatedSum<double> sum, sum_sq;
        for (const Vec3& p : x) sum += (p - center).norm();
        const double mean = sum.value() / static_cast<double>(x.size());
        for (const Vec3& p : x) {
            const double d = (p - center).norm() - mean;
            sum_sq += d * d;
        }
        out.push_back({center, mean, std::sqrt(sum_sq.value() / static_cast<double>(x.size()))});
    }
    return out;
}

void write_radius_profile_csv(const std::vector<RadiusSample>& profile, std::ostream& out)
{
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "frame,t,cx,cy,cz,radius_mean,radius_stddev\n";
    const double n = static_cast<double>(profile.size() - 1);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& s = profile[i];
        out << i << ',' << static_cast<double>(i) / n << ',' << s.center[0] << ',' << s.center[1] << ','
            << s.center[2] << ',' << s.radius_mean << ',' << s.radius_stddev << '\n';
    }
}

void write_solve_report_json(const SolveReport& report, std::ostream& out)
{
    nlohmann::ordered_json j;
    j["status"] = to_string(report.status);
    j["message"] = report.message;
    j["iterations"] = report.iterations;
    j["evaluations"] = report.evaluations;
    auto energy = [](const EnergyBreakdown& e) {
        nlohmann::ordered_json o;
        o["horizontal"] = e.horizontal;
        o["penalty"] = e.penalty;
        o["lambda"] = e.lambda;
        o["total"] = e.total;
        return o;
    };
    j["initial_energy"] = energy(report.initial_energy);
    j["final_energy"] = energy(report.final_energy);
    j["gradient_threshold"] = report.gradient_threshold;
    j["final_gradient_inf"] = report.final_gradient_inf;
    nlohmann::ordered_json cfg;
    cfg["max_iterations"] = report.config.max_iterations;
    cfg["gradient_tolerance"] = report.config.gradient_tolerance;
    cfg["memory"] = report.config.memory;
    cfg["lambda_stages"] = report.config.stages();
    cfg["armijo_c1"] = report.config.line_search.c1;
    cfg["backtrack_shrink"] = report.config.line_search.shrink;
    cfg["initialization"] = report.config.initialization == Initialization::linear ? "linear" : "custom";
    j["config"] = cfg;
    std::vector<double> gnorm, energies;
    for (const auto& h : report.history) {
        gnorm.push_back(h.gradient_inf);
        energies.push_back(h.energy);
    }
    j["gradient_norm_history"] = gnorm;
    j["energy_history"] = energies;
    out << j.dump(2) << '\n';
}

} // namespace shapegeo
