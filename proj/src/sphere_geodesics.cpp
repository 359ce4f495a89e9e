#include "shapegeo/sphere_geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace shapegeo {

namespace {

void check_params(const SphereOdeParams& p)
{
    if (p.n < 2) throw PreconditionError("ambient dimension must be at least 2");
    if (!(p.B >= 0.0)) throw PreconditionError("B must be nonnegative");
    const double twice = 2.0 * p.l;
    if (!(p.l >= 0.5) || twice != std::round(twice)) throw PreconditionError("l must be a positive multiple of 1/2");
}

double unit_sphere_area(int n)
{
    // |S^(n-1)| = 2 pi^(n/2) / Gamma(n/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

bool collapsed(const SphereState& s)
{
    return !(s.r >= kRadiusFloor) || !std::isfinite(s.r_t);
}

} // namespace

double sphere_ode_rhs(const SphereOdeParams& params, const SphereState& state)
{
    if (!(state.r > 0.0)) throw PreconditionError("sphere radius must be positive");
    const double r = state.r;
    const double m = params.n - 1;
    const double weighted = 2.0 * params.l * params.B / (std::pow(r, m * 2.0 * params.l + 1.0) + params.B * r);
    return -state.r_t * state.r_t * m / 2.0 * (1.0 / r - weighted);
}

double sphere_ode_rhs_mean(int n, double A, int k, const SphereState& state)
{
    if (!(state.r > 0.0)) throw PreconditionError("sphere radius must be positive");
    const double r = state.r;
    const double m = n - 1;
    const double c = A * std::pow(m, 2 * k);  // Tr(L)^(2k) = c·r^(-2k) / A
    const double rate = m / (2.0 * r) - k * c / (std::pow(r, 2 * k + 1) + c * r);
    return -state.r_t * state.r_t * rate;
}

double sphere_kinetic_energy(const SphereOdeParams& params, const SphereState& state)
{
    const double m = params.n - 1;
    const double abs_det = std::pow(state.r, -m);
    const double phi = 1.0 + params.B * std::pow(abs_det, 2.0 * params.l);
    return phi * unit_sphere_area(params.n) * std::pow(state.r, m) * state.r_t * state.r_t;
}

SphereTrajectory integrate_sphere_geodesic(const SphereOdeParams& params, const SphereState& initial, double t_end,
                                           double dt)
{
    check_params(params);
    if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
    if (!(t_end >= 0.0)) throw PreconditionError("end time must be nonnegative");
    if (!(initial.r > 0.0)) throw PreconditionError("initial radius must be positive");

    const long steps = std::max(0L, static_cast<long>(std::ceil(t_end / dt - 1e-9)));
    SphereTrajectory traj;
    traj.t.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.energy.reserve(steps + 1);
    traj.t.push_back(0.0);
    traj.states.push_back(initial);
    traj.energy.push_back(sphere_kinetic_energy(params, initial));

    auto deriv = [&](const SphereState& s) { return SphereState{s.r_t, sphere_ode_rhs(params, s)}; };
    auto axpy = [](const SphereState& s, double h, const SphereState& d) {
        return SphereState{s.r + h * d.r, s.r_t + h * d.r_t};
    };

    SphereState s = initial;
    for (long i = 0; i < steps; ++i) {
        const double t0 = static_cast<double>(i) * dt;
        const double h = std::min(dt, t_end - t0);
        const SphereState k1 = deriv(s);
        const SphereState s2 = axpy(s, 0.5 * h, k1);
        if (collapsed(s2)) break;
        const SphereState k2 = deriv(s2);
        const SphereState s3 = axpy(s, 0.5 * h, k2);
        if (collapsed(s3)) break;
        const SphereState k3 = deriv(s3);
        const SphereState s4 = axpy(s, h, k3);
        if (collapsed(s4)) break;
        const SphereState k4 = deriv(s4);
        SphereState next{s.r + h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
                         s.r_t + h / 6.0 * (k1.r_t + 2.0 * k2.r_t + 2.0 * k3.r_t + k4.r_t)};
        if (collapsed(next)) break;
        s = next;
        traj.t.push_back(t0 + h);
        traj.states.push_back(s);
        traj.energy.push_back(sphere_kinetic_energy(params, s));
    }
    if (static_cast<long>(traj.states.size()) != steps + 1) traj.status = SphereStatus::collapsed;
    return traj;
}

double SphereBvpSolution::radius_at(double t) const
{
    const auto& ts = trajectory.t;
    if (ts.size() == 1) return trajectory.states[0].r;
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t i = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    i = std::min(i, ts.size() - 2);
    const double h = ts[i + 1] - ts[i];
    const double s = (t - ts[i]) / h;
    const auto& a = trajectory.states[i];
    const auto& b = trajectory.states[i + 1];
    const double h00 = 2 * s * s * s - 3 * s * s + 1;
    const double h10 = s * s * s - 2 * s * s + s;
    const double h01 = -2 * s * s * s + 3 * s * s;
    const double h11 = s * s * s - s * s;
    return h00 * a.r + h10 * h * a.r_t + h01 * b.r + h11 * h * b.r_t;
}

SphereBvpSolution solve_sphere_bvp(const SphereOdeParams& params, double r0, double r1, double t_end, int steps)
{
    check_params(params);
    if (!(r0 > 0.0) || !(r1 > 0.0)) throw PreconditionError("boundary radii must be positive");
    if (!(t_end > 0.0)) throw PreconditionError("end time must be positive");
    if (steps < 1) throw PreconditionError("need at least one integration step");
    const double dt = t_end / steps;

    SphereBvpSolution sol;
    auto shoot = [&](double v) {
        auto traj = integrate_sphere_geodesic(params, {r0, v}, t_end, dt);
        // a collapse means the radius fell below every positive target
        const double miss = traj.status == SphereStatus::collapsed ? -r1 : traj.final_state().r - r1;
        return std::pair{miss, std::move(traj)};
    };

    if (r0 == r1) {
        sol.trajectory = shoot(0.0).second;
        return sol;
    }

    // F(v) = r(t_end; v) - r1 is increasing in v
    double lo, hi;
    const double guess = (r1 - r0) / t_end;
    if (r1 > r0) {
        lo = 0.0;
        hi = guess;
        int tries = 0;
        while (shoot(hi).first <= 0.0) {
            if (++tries > 60) {
                std::ostringstream msg;
                msg << "cannot bracket r(t_end) = " << r1 << ": tried initial velocities in [0, " << hi << "]";
                throw BracketingError(msg.str());
            }
            lo = hi;
            hi *= 2.0;
        }
    } else {
        hi = 0.0;
        lo = guess;
        int tries = 0;
        while (shoot(lo).first >= 0.0) {
            if (++tries > 60) {
                std::ostringstream msg;
                msg << "cannot bracket r(t_end) = " << r1 << ": tried initial velocities in [" << lo << ", 0]";
                throw BracketingError(msg.str());
            }
            hi = lo;
            lo *= 2.0;
        }
    }
    double f_lo = shoot(lo).first;
    double f_hi = shoot(hi).first;
    if (!(f_lo < 0.0 && f_hi > 0.0)) {
        std::ostringstream msg;
        msg << "shooting function not monotone on [" << lo << ", " << hi << "]";
        throw BracketingError(msg.str());
    }

    int iters = 0;
    for (; iters < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
         ++iters) {
        const double m = 0.5 * (lo + hi);
        const double fm = shoot(m).first;
        if (fm == 0.0) {
            lo = hi = m;
            f_lo = f_hi = 0.0;
            break;
        }
        if (fm < 0.0) {
            lo = m;
            f_lo = fm;
        } else {
            hi = m;
            f_hi = fm;
        }
        if (std::abs(fm) < 1e-13) break;
    }
    // secant step inside the final bracket
    double v = f_hi == f_lo ? 0.5 * (lo + hi) : lo - f_lo * (hi - lo) / (f_hi - f_lo);
    if (!(v >= lo && v <= hi)) v = 0.5 * (lo + hi);
    auto [miss, traj] = shoot(v);
    for (double cand : {lo, hi}) {
        auto [m2, t2] = shoot(cand);
        if (std::abs(m2) < std::abs(miss)) {
            miss = m2;
            traj = std::move(t2);
            v = cand;
        }
    }
    if (!(std::abs(miss) < 1e-8)) {
        std::ostringstream msg;
        msg << "shooting stalled with residual " << miss << " in [" << lo << ", " << hi << "]";
        throw BracketingError(msg.str());
    }
    sol.initial_velocity = v;
    sol.residual = miss;
    sol.shooting_iterations = iters;
    sol.trajectory = std::move(traj);
    return sol;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m, double fm,
               double whole, double tol, int depth)
{
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, fa, b, fb, m, fm, whole, tol, 50);
}

} // namespace

double shrink_path_length(const SphereOdeParams& params, double epsilon)
{
    check_params(params);
    if (params.n != 3) throw PreconditionError("path length formula is for surfaces in R^3");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");

    // substitute r = e^s: integrand r·sqrt(1 + B r^-4l) dr = r²·sqrt(1 + B r^-4l) ds
    const double B = params.B;
    const double l = params.l;
    auto integrand = [B, l](double s) {
        const double r = std::exp(s);
        return r * r * std::sqrt(1.0 + B * std::exp(-4.0 * l * s));
    };
    const double a = std::log(epsilon);
    const int panels = 64;
    CompensatedSum<double> total;
    for (int i = 0; i < panels; ++i) {
        const double s0 = a + (0.0 - a) * i / panels;
        const double s1 = a + (0.0 - a) * (i + 1) / panels;
        const double crude = std::abs(s1 - s0) * std::max(integrand(s0), integrand(s1));
        total += adaptive_simpson(integrand, s0, s1, 1e-12 * std::max(crude, 1e-300));
    }
    return 2.0 * std::sqrt(std::numbers::pi) * total.value();
}

double optimal_translation_radius(double B, double l)
{
    if (!(B > 0.0)) throw PreconditionError("optimal translation radius needs B > 0");
    if (!(l >= 1.0)) throw PreconditionError("optimal translation radius needs l >= 1");
    return std::pow(B * (2.0 * l - 1.0), 1.0 / (4.0 * l));
}

double translation_residual(double B, double l, double r)
{
    if (!(r > 0.0)) throw PreconditionError("radius must be positive");
    const double K = 1.0 / (r * r);
    const double phi = 1.0 + B * std::pow(K, 2.0 * l);
    const double dphi = 2.0 * l * B * std::pow(K, 2.0 * l - 1.0);
    return -dphi * (2.0 / r) * (1.0 / (r * r)) + phi * (2.0 / r);
}

ReductionReport sphere_reduction_consistency(const PhiSpec& spec, const SphereState& state)
{
    spec.validate();
    if (spec.include_mean && spec.A != 0.0) {
        throw PreconditionError("reduction check covers Phi = Phi(det L) only (A must be 0)");
    }
    if (!(state.r > 0.0)) throw PreconditionError("sphere radius must be positive");

    // Sphere of radius r in R^3 with outward normal: L = -(1/r) Id.
    const double r = state.r;
    const double a = state.r_t;
    const double tr = -2.0 / r;
    const double det = 1.0 / (r * r);
    const double phi = spec(tr, det);
    const double dphi = spec.d_gauss(tr, det);

    // All coefficients are constant on the sphere and g is parallel, so the
    // adjoint-covariant term and the Hessian term of the normal equation vanish.
    const double adjoint_term = 0.0;   // (1/2) ∇*∇*(Phi'·g·C(L)·a²)
    const double hessian_term = 0.0;   // Phi'·g02(g·C(L), ∇²a)·a

    ReductionReport rep;
    rep.from_shape_space =
        (0.5 * phi * tr * a * a + adjoint_term - hessian_term - 0.5 * dphi * tr * det * a * a) / phi;
    const double B = spec.include_gauss ? spec.B : 0.0;
    rep.from_ode = sphere_ode_rhs({3, B, spec.l}, state);
    rep.difference = rep.from_shape_space - rep.from_ode;
    return rep;
}

void write_sphere_trajectory_csv(const SphereTrajectory& trajectory, std::ostream& out)
{
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "t,r,r_t,energy\n";
    for (std::size_t i = 0; i < trajectory.t.size(); ++i) {
        out << trajectory.t[i] << ',' << trajectory.states[i].r << ',' << trajectory.states[i].r_t << ','
            << trajectory.energy[i] << '\n';
    }
}

} // namespace shapegeo
