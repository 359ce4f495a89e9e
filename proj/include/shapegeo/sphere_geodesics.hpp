#pragma once

#include "shapegeo/metric.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace shapegeo {

// Reduction of the shape-space geodesic problem to concentric spheres, where
// the only degree of freedom is the radius r(t) and Phi = 1 + B·det(L)^(2l).

struct SphereState {
    double r = 1.0;    // radius
    double r_t = 0.0;  // radial velocity
};

struct SphereOdeParams {
    int n = 3;        // ambient dimension
    double B = 0.0;
    double l = 1.0;   // >= 1/2, half-integers allowed
};

/// Smallest radius tolerated during integration.
inline constexpr double kRadiusFloor = 1e-9;

/// r_tt = -r_t² (n-1)/2 · (1/r - 2lB / (r^((n-1)2l+1) + B r)).
double sphere_ode_rhs(const SphereOdeParams& params, const SphereState& state);

/// Same reduction for Phi = 1 + A·Tr(L)^(2k): from the Lagrangian r^(n-1)(1 + A((n-1)/r)^(2k))·r_t².
double sphere_ode_rhs_mean(int n, double A, int k, const SphereState& state);

/// Phi·Area·r_t², the conserved kinetic energy along a radial geodesic.
double sphere_kinetic_energy(const SphereOdeParams& params, const SphereState& state);

enum class SphereStatus { ok, collapsed };

struct SphereTrajectory {
    std::vector<double> t;
    std::vector<SphereState> states;
    std::vector<double> energy;
    SphereStatus status = SphereStatus::ok;

    const SphereState& final_state() const { return states.back(); }
};

/// Classical RK4 with fixed step; the last step is shortened to land on t_end.
SphereTrajectory integrate_sphere_geodesic(const SphereOdeParams& params, const SphereState& initial, double t_end,
                                           double dt);

struct SphereBvpSolution {
    double initial_velocity = 0.0;
    double residual = 0.0;  // r(t_end) - r1
    int shooting_iterations = 0;
    SphereTrajectory trajectory;

    /// Radius at time t, by cubic Hermite interpolation between samples.
    double radius_at(double t) const;
};

/// Shooting on r_t(0) (bisection after bracketing, secant polish); terminal residual < 1e-8.
SphereBvpSolution solve_sphere_bvp(const SphereOdeParams& params, double r0, double r1, double t_end = 1.0,
                                   int steps = 2000);

/// 2√π ∫_eps^1 r·sqrt(1 + B r^(-4l)) dr (n = 3), by adaptive Simpson in log r.
double shrink_path_length(const SphereOdeParams& params, double epsilon);

/// Radius for which pure translation is a geodesic: (B(2l-1))^(1/(4l)). Requires B > 0, l >= 1.
double optimal_translation_radius(double B, double l);

/// -Phi'(K)·(2/r)·(1/r²) + Phi(K)·(2/r) at K = 1/r²; vanishes at the optimal radius.
double translation_residual(double B, double l, double r);

struct ReductionReport {
    double from_shape_space = 0.0;  // a_t from the normal geodesic equation on spheres
    double from_ode = 0.0;          // sphere_ode_rhs
    double difference = 0.0;
};

/// Evaluates the normal part of the shape-space geodesic equation for Phi = Phi(det L)
/// on a sphere with constant normal speed a = r_t and compares it with sphere_ode_rhs.
/// Requires spec.A == 0 (or the mean term switched off).
ReductionReport sphere_reduction_consistency(const PhiSpec& spec, const SphereState& state);

/// t,r,r_t,energy
void write_sphere_trajectory_csv(const SphereTrajectory& trajectory, std::ostream& out);

} // namespace shapegeo
