#include "support.hpp"

#include "shapegeo/bvp_solver.hpp"
#include "shapegeo/sphere_geodesics.hpp"

#include <json.hpp>

#include <doctest.h>

#include <sstream>

using namespace shapegeo;

namespace {

SolveResult solve_spheres(const PhiSpec& spec, double r0, double r1, int level, int n, double lambda = 1.0)
{
    SolverConfig cfg;
    cfg.lambda = lambda;
    return solve_geodesic_bvp(spec, make_icosphere(level, r0), make_icosphere(level, r1), n, cfg);
}

double max_radius_error(const SolveResult& r, const std::function<double(double)>& reference)
{
    const auto profile = center_radius_profile(r.path);
    double err = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double t = static_cast<double>(i) / (profile.size() - 1);
        err = std::max(err, std::abs(profile[i].radius_mean - reference(t)) / reference(t));
    }
    return err;
}

} // namespace

TEST_CASE("identical endpoints converge immediately to the constant path")
{
    const TriMesh m = testing::jittered_sphere(1, 0.1, 3);
    const SolveResult r = solve_geodesic_bvp(PhiSpec{.B = 1}, m, m, 8, SolverConfig{});
    CHECK(r.report.status == SolveStatus::converged);
    CHECK(r.report.iterations == 0);
    CHECK(r.report.final_energy.total == 0.0);
    for (int i = 0; i < r.path.num_frames(); ++i) {
        for (int p = 0; p < m.num_vertices(); ++p) CHECK(r.path.frame(i)[p] == m.vertex(p));
    }
}

TEST_CASE("plain L2 metric: squared radius is linear in time")
{
    const SolveResult r = solve_spheres(PhiSpec{}, 1.0, 2.0, 2, 20);
    REQUIRE(r.report.status == SolveStatus::converged);
    CHECK(max_radius_error(r, [](double t) { return std::sqrt(1.0 + 3.0 * t); }) < 2e-2);
}

TEST_CASE("Gauss-weighted metric follows the first-integral radius")
{
    const PhiSpec spec{.B = 1, .l = 1};
    const testing::oracle::SphereFirstIntegral exact(1.0, 1.0, 1.0, 2.0);
    const SolveResult r = solve_spheres(spec, 1.0, 2.0, 2, 20);
    REQUIRE(r.report.status == SolveStatus::converged);
    CHECK(max_radius_error(r, [&](double t) { return exact.radius(t); }) < 1e-2);

    // Vertices stay on a common sphere around a fixed center.
    for (const RadiusSample& s : center_radius_profile(r.path)) {
        CHECK(s.radius_stddev < 1e-2 * s.radius_mean);
        CHECK(s.center.norm() < 1e-8);
    }
}

TEST_CASE("boundary frames are never modified")
{
    const TriMesh a = testing::jittered_sphere(1, 0.1, 5);
    const TriMesh b = testing::transformed(testing::jittered_sphere(1, 0.1, 6), Eigen::Matrix3d::Identity(),
                                           Vec3(0.2, 0, 0), 1.2);
    const SolveResult r = solve_geodesic_bvp(PhiSpec{.A = 1, .k = 1}, a, b, 6, SolverConfig{});
    for (int p = 0; p < a.num_vertices(); ++p) {
        CHECK(r.path.frame(0)[p] == a.vertex(p));
        CHECK(r.path.frame(6)[p] == b.vertex(p));
    }
}

TEST_CASE("energy history decreases monotonically within each penalty stage")
{
    SolverConfig cfg;
    cfg.lambda_schedule = {0.1, 1.0, 10.0};
    const SolveResult r =
        solve_geodesic_bvp(PhiSpec{.B = 1}, make_icosphere(1), make_icosphere(1, 1.5, Vec3(0.3, 0, 0)), 8, cfg);
    CHECK(r.report.status == SolveStatus::converged);
    REQUIRE(r.report.history.size() > 1);
    int stages_seen = 1;
    for (std::size_t i = 1; i < r.report.history.size(); ++i) {
        const auto& prev = r.report.history[i - 1];
        const auto& cur = r.report.history[i];
        if (cur.stage != prev.stage) {
            ++stages_seen;
            continue;
        }
        CHECK(cur.energy <= prev.energy);
    }
    CHECK(stages_seen == 3);
    CHECK(r.report.final_energy.lambda == 10.0);
    CHECK(r.report.final_gradient_inf <= r.report.gradient_threshold);
}

TEST_CASE("mismatched endpoints and invalid configurations are rejected")
{
    CHECK_THROWS_AS(solve_geodesic_bvp(PhiSpec{}, make_icosphere(1), make_icosphere(2), 5, SolverConfig{}),
                    PreconditionError);
    CHECK_THROWS_AS(solve_geodesic_bvp(PhiSpec{}, make_icosphere(1), make_icosphere(1, 2.0), 1, SolverConfig{}),
                    PreconditionError);
    CHECK_THROWS_AS(solve_geodesic_bvp(PhiSpec{.A = -1}, make_icosphere(1), make_icosphere(1, 2.0), 5, SolverConfig{}),
                    PreconditionError);

    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.gradient_tolerance = 0.0;
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = {};
    c.memory = 0;
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = {};
    c.line_search.c1 = 1.5;
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = {};
    c.line_search.shrink = 1.0;
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = {};
    c.lambda_schedule = {1.0, -2.0};
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = {};
    c.initialization = Initialization::custom;
    CHECK_THROWS_AS(c.validate(), PreconditionError);

    c = {};
    CHECK(c.stages() == std::vector<double>{1.0});
    c.lambda_schedule = {0.5, 2.0};
    CHECK(c.stages() == std::vector<double>{0.5, 2.0});
}

TEST_CASE("reversing the endpoints reverses the geodesic")
{
    const PhiSpec spec{.B = 1, .l = 1};
    const SolveResult f = solve_spheres(spec, 1.0, 2.0, 1, 12);
    const SolveResult b = solve_spheres(spec, 2.0, 1.0, 1, 12);
    const auto pf = center_radius_profile(f.path);
    const auto pb = center_radius_profile(b.path);
    for (std::size_t i = 0; i < pf.size(); ++i) {
        CHECK(pf[i].radius_mean == doctest::Approx(pb[pf.size() - 1 - i].radius_mean).epsilon(1e-2));
    }
    CHECK(f.report.final_energy.total == doctest::Approx(b.report.final_energy.total).epsilon(1e-2));
}

TEST_CASE("perturbation keeps the endpoints and changes interior frames")
{
    const MeshPath lin = MeshPath::linear(make_icosphere(1), make_icosphere(1, 2.0), 6);
    const MeshPath p = perturb_along_normals(lin, 0.05, 4);
    for (int q = 0; q < lin.num_vertices(); ++q) {
        CHECK(p.frame(0)[q] == lin.frame(0)[q]);
        CHECK(p.frame(6)[q] == lin.frame(6)[q]);
    }
    double moved = 0.0;
    for (int i = 1; i < 6; ++i) {
        for (int q = 0; q < lin.num_vertices(); ++q) {
            const double d = (p.frame(i)[q] - lin.frame(i)[q]).norm();
            CHECK(d <= 0.05 + 1e-15);
            moved = std::max(moved, d);
        }
    }
    CHECK(moved > 0.01);
    // Same seed, same path.
    const MeshPath again = perturb_along_normals(lin, 0.05, 4);
    for (int i = 0; i < 7; ++i) {
        for (int q = 0; q < lin.num_vertices(); ++q) CHECK(again.frame(i)[q] == p.frame(i)[q]);
    }
}

TEST_CASE("linear and perturbed initializations reach the same geodesic")
{
    const PhiSpec spec{.B = 1, .l = 1};
    const TriMesh a = make_icosphere(1), b = make_icosphere(1, 2.0);
    const int n = 12;
    const SolveResult lin = solve_geodesic_bvp(spec, a, b, n, SolverConfig{});

    SolverConfig cfg;
    cfg.initialization = Initialization::custom;
    cfg.initial_path = perturb_along_normals(MeshPath::linear(a, b, n), 0.05, 9);
    const SolveResult pert = solve_geodesic_bvp(spec, a, b, n, cfg);

    REQUIRE(lin.report.status == SolveStatus::converged);
    REQUIRE(pert.report.status == SolveStatus::converged);
    CHECK(pert.report.initial_energy.total > lin.report.initial_energy.total);
    CHECK(pert.report.final_energy.total == doctest::Approx(lin.report.final_energy.total).epsilon(1e-2));
    const auto pl = center_radius_profile(lin.path);
    const auto pp = center_radius_profile(pert.path);
    for (std::size_t i = 0; i < pl.size(); ++i) {
        CHECK(pp[i].radius_mean == doctest::Approx(pl[i].radius_mean).epsilon(1e-2));
    }
}

TEST_CASE("custom initial path must match the discretization")
{
    SolverConfig cfg;
    cfg.initialization = Initialization::custom;
    cfg.initial_path = MeshPath::linear(make_icosphere(1), make_icosphere(1, 2.0), 4);
    CHECK_THROWS_AS(solve_geodesic_bvp(PhiSpec{}, make_icosphere(1), make_icosphere(1, 2.0), 6, cfg),
                    PreconditionError);
}

TEST_CASE("iteration cap is reported as max_iter")
{
    SolverConfig cfg;
    cfg.max_iterations = 2;
    const SolveResult r = solve_spheres(PhiSpec{.B = 1}, 1.0, 2.0, 1, 8);
    const SolveResult capped =
        solve_geodesic_bvp(PhiSpec{.B = 1}, make_icosphere(1), make_icosphere(1, 2.0), 8, cfg);
    CHECK(capped.report.status == SolveStatus::max_iter);
    CHECK(capped.report.iterations == 2);
    CHECK(capped.report.final_energy.total > r.report.final_energy.total);
    CHECK(to_string(SolveStatus::max_iter) == "max_iter");
}

TEST_CASE("solve report JSON is deterministic")
{
    const auto run = [] {
        const SolveResult r = solve_spheres(PhiSpec{.B = 1}, 1.0, 1.5, 1, 6);
        std::ostringstream out;
        write_solve_report_json(r.report, out);
        return out.str();
    };
    const std::string a = run();
    CHECK(a == run());
    const auto j = nlohmann::json::parse(a);
    CHECK(j.at("status") == "converged");
    CHECK(!j.contains("wall_time_seconds"));
    CHECK(j.at("energy_history").size() == j.at("gradient_norm_history").size());
}

TEST_CASE("radius profile CSV")
{
    const MeshPath p = testing::sphere_path(1, 4, [](double t) { return 1 + t; });
    const auto prof = center_radius_profile(p);
    REQUIRE(prof.size() == 5);
    CHECK(prof[4].radius_mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(prof[4].radius_stddev < 1e-14);
    std::ostringstream out;
    write_radius_profile_csv(prof, out);
    CHECK(out.str().rfind("frame,t,cx,cy,cz,radius_mean,radius_stddev\n", 0) == 0);
}
