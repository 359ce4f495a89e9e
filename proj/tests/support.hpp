#pragma once

// Shared helpers for the test suites. The oracle namespace holds deliberately
// naive, independent reimplementations used as ground truth.

#include "shapegeo/mesh.hpp"
#include "shapegeo/path_energy.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#ifndef SHAPEGEO_TEST_DATA_DIR
#error "SHAPEGEO_TEST_DATA_DIR must be defined"
#endif

namespace testing {

using shapegeo::Face;
using shapegeo::TriMesh;
using shapegeo::Vec3;

inline std::filesystem::path data_path(const std::string& name)
{
    return std::filesystem::path(SHAPEGEO_TEST_DATA_DIR) / name;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

inline TriMesh transformed(const TriMesh& m, const Eigen::Matrix3d& R, const Vec3& shift = Vec3::Zero(),
                           double scale = 1.0)
{
    std::vector<Vec3> v;
    for (const Vec3& p : m.vertices()) v.push_back(scale * (R * p) + shift);
    return m.with_vertices(std::move(v));
}

/// Icosphere with every vertex moved radially by up to `amp` (relative), deterministic in `seed`.
inline TriMesh jittered_sphere(int level, double amp, unsigned seed)
{
    const TriMesh s = shapegeo::make_icosphere(level);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    std::vector<Vec3> v;
    for (const Vec3& p : s.vertices()) v.push_back(p * (1.0 + u(rng)));
    return s.with_vertices(std::move(v));
}

/// Relabels vertices by `perm` (new index of old vertex i is perm[i]) and rotates each face's corners.
inline TriMesh permuted(const TriMesh& m, const std::vector<int>& perm)
{
    std::vector<Vec3> v(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) v[perm[i]] = m.vertex(i);
    std::vector<Face> f;
    int shift = 0;
    for (const Face& t : m.faces()) {
        Face r{perm[t[0]], perm[t[1]], perm[t[2]]};
        std::rotate(r.begin(), r.begin() + (shift++ % 3), r.end());
        f.push_back(r);
    }
    std::reverse(f.begin(), f.end());
    return TriMesh(std::move(v), std::move(f));
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng)
{
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

namespace oracle {

inline double area(std::span<const Vec3> x, std::span<const Face> faces)
{
    double a = 0;
    for (const Face& f : faces) a += 0.5 * (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]).norm();
    return a;
}

inline double volume(std::span<const Vec3> x, std::span<const Face> faces)
{
    double v = 0;
    for (const Face& f : faces) v += x[f[0]].dot(x[f[1]].cross(x[f[2]])) / 6.0;
    return v;
}

/// Central-difference gradient of a function of all vertex positions, at vertex p.
inline Vec3 fd_gradient(const std::function<double(std::span<const Vec3>)>& fn, std::vector<Vec3> x, int p,
                        double h = 1e-6)
{
    Vec3 g;
    for (int c = 0; c < 3; ++c) {
        const double x0 = x[p][c];
        x[p][c] = x0 + h;
        const double fp = fn(x);
        x[p][c] = x0 - h;
        const double fm = fn(x);
        x[p][c] = x0;
        g[c] = (fp - fm) / (2 * h);
    }
    return g;
}

/// 2pi minus the interior angles at p, with angles from acos of normalized dot products.
inline double deflection(const TriMesh& m, int p)
{
    double s = 0;
    for (const Face& f : m.faces()) {
        for (int c = 0; c < 3; ++c) {
            if (f[c] != p) continue;
            const Vec3 a = (m.vertex(f[(c + 1) % 3]) - m.vertex(p)).normalized();
            const Vec3 b = (m.vertex(f[(c + 2) % 3]) - m.vertex(p)).normalized();
            s += std::acos(std::clamp(a.dot(b), -1.0, 1.0));
        }
    }
    return 2 * std::numbers::pi - s;
}

inline double star_area(const TriMesh& m, int p)
{
    double s = 0;
    for (const Face& f : m.faces()) {
        if (f[0] == p || f[1] == p || f[2] == p) {
            s += 0.5 * (m.vertex(f[1]) - m.vertex(f[0])).cross(m.vertex(f[2]) - m.vertex(f[0])).norm();
        }
    }
    return s;
}

/// Sphere BVP from the first integral Phi·Area·r_t² = const (n = 3):
/// r(t) solves S(r) = t·S(r1) with S(r) = ∫_{r0}^{r} ρ·sqrt(1 + B ρ^(-4l)) dρ.
class SphereFirstIntegral {
public:
    SphereFirstIntegral(double B, double l, double r0, double r1) : B_(B), l_(l), r0_(r0), r1_(r1)
    {
        total_ = S(r1);
    }

    double radius(double t) const
    {
        if (r0_ == r1_) return r0_;
        const double target = t * total_;
        double lo = std::min(r0_, r1_), hi = std::max(r0_, r1_);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (S(mid) < target ? lo : hi) = mid;  // S increases with r on both sides of r0
        }
        return 0.5 * (lo + hi);
    }

private:
    double integrand(double r) const { return r * std::sqrt(1.0 + B_ * std::pow(r, -4.0 * l_)); }

    // Composite Gauss-Legendre (5 points) on 400 panels; the integrand is smooth away from 0.
    double S(double r) const
    {
        static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                     0.9061798459386640};
        static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};
        const int panels = 400;
        const double h = (r - r0_) / panels;
        double s = 0;
        for (int k = 0; k < panels; ++k) {
            const double c = r0_ + (k + 0.5) * h;
            for (int g = 0; g < 5; ++g) s += wg[g] * integrand(c + 0.5 * h * xg[g]);
        }
        return 0.5 * h * s;
    }

    double B_, l_, r0_, r1_, total_;
};

} // namespace oracle

/// Concentric-sphere path x_i = r(t_i)·u on a unit icosphere.
inline shapegeo::MeshPath sphere_path(int level, int intervals, const std::function<double(double)>& radius)
{
    const TriMesh s = shapegeo::make_icosphere(level);
    std::vector<std::vector<Vec3>> frames(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
        const double r = radius(static_cast<double>(i) / intervals);
        for (const Vec3& p : s.vertices()) frames[i].push_back(r * p);
    }
    return shapegeo::MeshPath(s.topology(), std::move(frames));
}

} // namespace testing
