#pragma once

// Shared per-mesh geometry kernel used by the curvature module and the path
// energy. Not part of the public interface.

#include "shapegeo/mesh.hpp"

#include <array>
#include <numbers>
#include <span>
#include <vector>

namespace shapegeo::detail {

struct FaceGeometry {
    Vec3 area_vector;  // (1/2)(p1-p0)x(p2-p0)
    double area;
    Vec3 normal;
    std::array<double, 3> angle;  // interior angle at each corner
    std::array<double, 3> cot;
};

struct MeshGeometry {
    std::vector<FaceGeometry> faces;
    std::vector<double> star_area;
    std::vector<double> vertex_area;      // star_area / 3
    std::vector<double> deflection;       // 2pi - sum of corner angles
    std::vector<Vec3> vector_area;        // gradient of enclosed volume
    std::vector<Vec3> vector_mean;        // gradient of surface area (cotangent formula)
    std::vector<double> vector_area_norm;
    std::vector<double> vector_mean_norm;
    std::vector<double> mean_sign;        // sign(<vector_mean, vector_area>), +1 when zero
    std::vector<Vec3> normal;
    std::vector<double> mean;             // signed Tr(L)
    std::vector<double> gauss;            // det(L)
};

/// Interior angle at p0 of triangle (p0, p1, p2) and its cotangent.
inline void corner(const Vec3& p0, const Vec3& p1, const Vec3& p2, double& angle, double& cot)
{
    const Vec3 e1 = p1 - p0;
    const Vec3 e2 = p2 - p0;
    const double c = e1.dot(e2);
    const double s = e1.cross(e2).norm();
    angle = std::atan2(s, c);
    cot = c / s;
}

/// Fills `g` for positions `x`. Throws GeometryError when a vertex has zero vector area.
inline void evaluate_geometry(const Topology& topo, std::span<const Vec3> x, MeshGeometry& g, int timestep = -1)
{
    const int nv = topo.num_vertices();
    const int nf = topo.num_faces();
    g.faces.resize(nf);
    g.star_area.assign(nv, 0.0);
    g.deflection.assign(nv, 2.0 * std::numbers::pi);
    g.vector_area.assign(nv, Vec3::Zero());
    g.vector_mean.assign(nv, Vec3::Zero());

    for (int f = 0; f < nf; ++f) {
        const Face& t = topo.face(f);
        FaceGeometry& fg = g.faces[f];
        const Vec3& p0 = x[t[0]];
        const Vec3& p1 = x[t[1]];
        const Vec3& p2 = x[t[2]];
        fg.area_vector = 0.5 * (p1 - p0).cross(p2 - p0);
        fg.area = fg.area_vector.norm();
        fg.normal = fg.area_vector / fg.area;
        corner(p0, p1, p2, fg.angle[0], fg.cot[0]);
        corner(p1, p2, p0, fg.angle[1], fg.cot[1]);
        corner(p2, p0, p1, fg.angle[2], fg.cot[2]);
        for (int c = 0; c < 3; ++c) {
            const int v = t[c];
            g.star_area[v] += fg.area;
            g.deflection[v] -= fg.angle[c];
            g.vector_area[v] += fg.area_vector / 3.0;
            // edge opposite corner c joins the other two vertices
            const int a = t[(c + 1) % 3];
            const int b = t[(c + 2) % 3];
            const Vec3 d = 0.5 * fg.cot[c] * (x[a] - x[b]);
            g.vector_mean[a] += d;
            g.vector_mean[b] -= d;
        }
    }

    g.vertex_area.resize(nv);
    g.vector_area_norm.resize(nv);
    g.vector_mean_norm.resize(nv);
    g.mean_sign.resize(nv);
    g.normal.resize(nv);
    g.mean.resize(nv);
    g.gauss.resize(nv);
    for (int v = 0; v < nv; ++v) {
        g.vertex_area[v] = g.star_area[v] / 3.0;
        const double na = g.vector_area[v].norm();
        if (!(na > 1e-14 * g.star_area[v])) {
            throw GeometryError("vertex " + std::to_string(v) + " has zero vector area", timestep);
        }
        g.vector_area_norm[v] = na;
        g.vector_mean_norm[v] = g.vector_mean[v].norm();
        g.normal[v] = g.vector_area[v] / na;
        g.mean_sign[v] = g.vector_mean[v].dot(g.vector_area[v]) >= 0.0 ? 1.0 : -1.0;
        g.mean[v] = -g.mean_sign[v] * g.vector_mean_norm[v] / na;
        g.gauss[v] = g.deflection[v] / g.vertex_area[v];
    }
}

} // namespace shapegeo::detail
