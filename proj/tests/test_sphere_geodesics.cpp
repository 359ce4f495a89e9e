#include "support.hpp"

#include "shapegeo/sphere_geodesics.hpp"

#include <doctest.h>

#include <sstream>

using namespace shapegeo;

namespace {

const double sqrt_pi = std::sqrt(std::numbers::pi);

// Radial Lagrangian f(r)·r_t²; its Euler-Lagrange equation is r_tt = -f'(r) r_t² / (2 f(r)).
double euler_lagrange(const std::function<double(double)>& f, double r, double rt)
{
    const double h = 1e-6 * r;
    const double df = (f(r + h) - f(r - h)) / (2 * h);
    return -df * rt * rt / (2 * f(r));
}

} // namespace

TEST_CASE("right-hand side closed-form values")
{
    CHECK(sphere_ode_rhs({3, 0.0, 1.0}, {1.0, 1.0}) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(sphere_ode_rhs({3, 5.0, 1.0}, {2.0, 0.0}) == 0.0);
    // Unit sphere, B = 1, l = 1 is the balanced radius: no radial acceleration.
    CHECK(std::abs(sphere_ode_rhs({3, 1.0, 1.0}, {1.0, 1.0})) < 1e-15);
}

TEST_CASE("right-hand side is the Euler-Lagrange equation of the radial Lagrangian")
{
    for (double B : {0.0, 0.1, 1.0, 10.0}) {
        for (double l : {0.5, 1.0, 1.5, 2.0}) {
            const auto f = [&](double r) { return r * r * (1.0 + B * std::pow(r, -4.0 * l)); };
            for (double r : {0.3, 0.8, 1.0, 1.7, 3.0}) {
                const double expected = euler_lagrange(f, r, 0.7);
                CHECK(sphere_ode_rhs({3, B, l}, {r, 0.7}) == doctest::Approx(expected).epsilon(1e-7));
            }
        }
    }
    for (double A : {0.0, 0.5, 2.0}) {
        for (int k : {1, 2}) {
            const auto f = [&](double r) { return r * r * (1.0 + A * std::pow(2.0 / r, 2 * k)); };
            for (double r : {0.5, 1.0, 2.5}) {
                CHECK(sphere_ode_rhs_mean(3, A, k, {r, -1.3}) ==
                      doctest::Approx(euler_lagrange(f, r, -1.3)).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("B = 0 integration matches r² linear in t")
{
    const SphereOdeParams p{3, 0.0, 1.0};
    const SphereState s0{1.0, 1.5};
    const SphereTrajectory tr = integrate_sphere_geodesic(p, s0, 1.0, 1.0 / 50);
    REQUIRE(tr.status == SphereStatus::ok);
    REQUIRE(tr.t.size() == 51);
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        const double exact = std::sqrt(1.0 + 2.0 * 1.5 * tr.t[i]);
        CHECK(std::abs(tr.states[i].r - exact) < 1e-6);
    }
}

TEST_CASE("RK4 error drops sixteenfold when the step is halved")
{
    const SphereOdeParams p{3, 0.0, 1.0};
    const double exact = std::sqrt(1.0 + 2.0 * 2.0);
    const auto err = [&](double dt) {
        return std::abs(integrate_sphere_geodesic(p, {1.0, 2.0}, 1.0, dt).final_state().r - exact);
    };
    const double ratio = err(1.0 / 20) / err(1.0 / 40);
    CHECK(ratio >= 14.0);
    CHECK(ratio <= 18.0);
}

TEST_CASE("kinetic energy is conserved along trajectories")
{
    for (double B : {0.1, 1.0, 10.0}) {
        const SphereTrajectory tr = integrate_sphere_geodesic({3, B, 1.0}, {1.0, 0.8}, 1.0, 1e-3);
        REQUIRE(tr.status == SphereStatus::ok);
        const double e0 = tr.energy.front();
        CHECK(e0 == doctest::Approx(sphere_kinetic_energy({3, B, 1.0}, {1.0, 0.8})));
        for (double e : tr.energy) CHECK(std::abs(e - e0) < 1e-8 * e0);
    }
}

TEST_CASE("last step lands on the end time")
{
    const SphereTrajectory tr = integrate_sphere_geodesic({3, 1.0, 1.0}, {1.0, 0.5}, 1.0, 0.3);
    REQUIRE(tr.t.size() == 5);
    CHECK(tr.t.back() == 1.0);
}

TEST_CASE("integration forward then backward returns to the start")
{
    const SphereOdeParams p{3, 1.0, 1.0};
    const SphereTrajectory fwd = integrate_sphere_geodesic(p, {1.0, 1.2}, 1.0, 1e-3);
    const SphereState end = fwd.final_state();
    const SphereTrajectory back = integrate_sphere_geodesic(p, {end.r, -end.r_t}, 1.0, 1e-3);
    CHECK(back.final_state().r == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(back.final_state().r_t == doctest::Approx(-1.2).epsilon(1e-10));
}

TEST_CASE("collapse toward the origin is reported")
{
    // B = 0: r² = 1 - 10 t hits zero at t = 0.1.
    const SphereTrajectory tr = integrate_sphere_geodesic({3, 0.0, 1.0}, {1.0, -5.0}, 1.0, 1e-3);
    CHECK(tr.status == SphereStatus::collapsed);
    CHECK(tr.t.back() < 0.1 + 1e-3);
}

TEST_CASE("shooting solves the boundary value problem")
{
    for (double B : {0.0, 0.1, 1.0, 10.0, 100.0}) {
        const SphereBvpSolution sol = solve_sphere_bvp({3, B, 1.0}, 1.0, 2.0);
        CHECK(std::abs(sol.residual) < 1e-8);
        CHECK(sol.trajectory.states.front().r == 1.0);
        CHECK(std::abs(sol.radius_at(1.0) - 2.0) < 1e-8);
        // Independent first-integral oracle.
        const testing::oracle::SphereFirstIntegral exact(B, 1.0, 1.0, 2.0);
        for (double t : {0.1, 0.25, 0.5, 0.75, 0.9}) CHECK(std::abs(sol.radius_at(t) - exact.radius(t)) < 1e-7);
    }
}

TEST_CASE("shrinking boundary value problems and half-integer exponents")
{
    const testing::oracle::SphereFirstIntegral exact(1.0, 0.5, 2.0, 0.5);
    const SphereBvpSolution sol = solve_sphere_bvp({3, 1.0, 0.5}, 2.0, 0.5);
    CHECK(std::abs(sol.residual) < 1e-8);
    CHECK(sol.initial_velocity < 0.0);
    for (double t : {0.2, 0.5, 0.8}) CHECK(std::abs(sol.radius_at(t) - exact.radius(t)) < 1e-7);
}

TEST_CASE("equal boundary radii give the constant solution")
{
    const SphereBvpSolution sol = solve_sphere_bvp({3, 1.0, 1.0}, 1.3, 1.3);
    CHECK(std::abs(sol.initial_velocity) < 1e-12);
    for (const SphereState& s : sol.trajectory.states) CHECK(s.r == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("swapping the boundary radii reverses the solution")
{
    const SphereOdeParams p{3, 1.0, 1.0};
    const SphereBvpSolution f = solve_sphere_bvp(p, 1.0, 2.0);
    const SphereBvpSolution b = solve_sphere_bvp(p, 2.0, 1.0);
    for (double t : {0.1, 0.3, 0.5, 0.7}) CHECK(f.radius_at(t) == doctest::Approx(b.radius_at(1.0 - t)).epsilon(1e-8));
}

TEST_CASE("bad inputs are rejected")
{
    CHECK_THROWS_AS(solve_sphere_bvp({3, 1.0, 1.0}, 0.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(solve_sphere_bvp({3, -1.0, 1.0}, 1.0, 2.0), PreconditionError);
    CHECK_THROWS_AS(solve_sphere_bvp({3, 1.0, 0.7}, 1.0, 2.0), PreconditionError);
    CHECK_THROWS_AS(integrate_sphere_geodesic({3, 1.0, 1.0}, {1.0, 0.0}, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(sphere_ode_rhs({3, 1.0, 1.0}, {-1.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(shrink_path_length({3, 1.0, 1.0}, 0.0), PreconditionError);
    CHECK_THROWS_AS(shrink_path_length({3, 1.0, 1.0}, 1.5), PreconditionError);
}

TEST_CASE("shrink path length")
{
    SUBCASE("B = 0 is the Euclidean value")
    {
        for (double eps : {1e-1, 1e-3, 1e-6}) {
            CHECK(shrink_path_length({3, 0.0, 1.0}, eps) == doctest::Approx(sqrt_pi * (1 - eps * eps)).epsilon(1e-10));
        }
    }
    SUBCASE("l = 1 diverges logarithmically")
    {
        for (double B : {1.0, 4.0}) {
            const double slope = shrink_path_length({3, B, 1.0}, 1e-6) - shrink_path_length({3, B, 1.0}, 1e-5);
            CHECK(slope == doctest::Approx(2 * sqrt_pi * std::sqrt(B) * std::log(10.0)).epsilon(2e-2));
        }
    }
    SUBCASE("l = 1/2 converges")
    {
        const double a = shrink_path_length({3, 1.0, 0.5}, 1e-5);
        const double b = shrink_path_length({3, 1.0, 0.5}, 1e-6);
        CHECK(std::abs(a - b) < 1e-3);
        CHECK(b > a);
    }
    SUBCASE("agrees with direct quadrature in r")
    {
        const double eps = 0.05;
        const int n = 200000;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = eps + (1 - eps) * (i + 0.5) / n;
            s += r * std::sqrt(1.0 + 2.0 / std::pow(r, 4.0));
        }
        CHECK(shrink_path_length({3, 2.0, 1.0}, eps) == doctest::Approx(2 * sqrt_pi * s * (1 - eps) / n).epsilon(1e-6));
    }
}

TEST_CASE("optimal translation radius")
{
    CHECK(optimal_translation_radius(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(optimal_translation_radius(16.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(translation_residual(1.0, 1.0, 1.0)) < 1e-12);
    CHECK(std::abs(translation_residual(16.0, 1.0, 2.0)) < 1e-12);

    const double r = optimal_translation_radius(20.0, 1.5);
    CHECK(std::abs(translation_residual(20.0, 1.5, r)) < 1e-12);
    CHECK(translation_residual(20.0, 1.5, 0.9 * r) * translation_residual(20.0, 1.5, 1.1 * r) < 0.0);

    CHECK_THROWS_AS(optimal_translation_radius(1.0, 0.5), PreconditionError);
    CHECK_THROWS_AS(optimal_translation_radius(0.0, 1.0), PreconditionError);
}

TEST_CASE("shape-space equation reduces to the radial ODE on spheres")
{
    SUBCASE("known values")
    {
        const auto r = sphere_reduction_consistency(PhiSpec{}, {1.0, 1.0});
        CHECK(r.from_shape_space == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(std::abs(r.difference) < 1e-15);
        const auto z = sphere_reduction_consistency(PhiSpec{.B = 1, .l = 1}, {1.0, 1.0});
        CHECK(std::abs(z.from_shape_space) < 1e-15);
    }
    SUBCASE("randomized")
    {
        std::mt19937_64 rng(123);
        std::uniform_real_distribution<double> B(0.0, 100.0), r(0.1, 10.0), a(-5.0, 5.0);
        std::uniform_int_distribution<int> l2(1, 6);
        for (int i = 0; i < 1000; ++i) {
            const PhiSpec spec{.B = B(rng), .l = 0.5 * l2(rng)};
            const SphereState s{r(rng), a(rng)};
            const auto rep = sphere_reduction_consistency(spec, s);
            CHECK(std::abs(rep.difference) <= 1e-12 * std::max(1.0, std::abs(rep.from_ode)));
        }
    }
    SUBCASE("mean-curvature weights are outside the reduction")
    {
        CHECK_THROWS_AS(sphere_reduction_consistency(PhiSpec{.A = 1}, {1.0, 1.0}), PreconditionError);
        PhiSpec off{.A = 1, .B = 2};
        off.include_mean = false;
        CHECK_NOTHROW(sphere_reduction_consistency(off, {1.0, 1.0}));
    }
}

TEST_CASE("trajectory CSV")
{
    const SphereTrajectory tr = integrate_sphere_geodesic({3, 1.0, 1.0}, {1.0, 0.5}, 1.0, 0.25);
    std::ostringstream out;
    write_sphere_trajectory_csv(tr, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,r,r_t,energy");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
}
