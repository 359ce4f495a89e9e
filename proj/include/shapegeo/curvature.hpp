#pragma once

#include "shapegeo/mesh.hpp"

#include <iosfwd>

namespace shapegeo {

///
/// Per-vertex discrete geometry of a closed mesh.
///
/// Sign convention: outward-oriented spheres of radius r have
/// mean_curvature = -2/r and gauss_curvature = 1/r^2.
///
struct CurvatureField {
    ScalarField vertex_area;          // one third of the star area
    ScalarField star_area;            // sum of incident triangle areas
    ScalarField angular_deflection;   // 2pi - sum of interior angles
    ScalarField mean_curvature;       // signed Tr(L)
    ScalarField gauss_curvature;      // det(L) = deflection / vertex_area
    VectorField vector_area;          // gradient of enclosed volume
    VectorField vector_mean_curvature;  // gradient of surface area
    VectorField unit_normal;          // normalized vector area

    std::size_t size() const { return vertex_area.size(); }
};

CurvatureField compute_curvature(const TriMesh& mesh);

/// 2pi minus the sum of interior angles at `vertex`.
double angular_deflection(const TriMesh& mesh, int vertex);

/// Sum of angular deflections (compensated); equals 2pi·chi for closed meshes.
double total_angular_deflection(const CurvatureField& field);

struct AreaVariationReport {
    double finite_difference;  // d/de Area(x + e·a·nu) at e = 0, central difference
    double formula;            // -sum Tr(L)·a·vertex_area
    double relative_discrepancy;
};

/// Compares the first variation of total area under a normal displacement
/// a·nu with -∫ Tr(L)·a vol. Rejects h < 1e-8.
AreaVariationReport verify_volume_variation(const TriMesh& mesh, const ScalarField& normal_speed, double h);

struct GaussVariationReport {
    ScalarField finite_difference;  // per-vertex d/de det(L)
    ScalarField formula;            // Tr(L)·det(L)·a
    double max_relative_discrepancy;
};

/// Compares the variation of det(L) under a constant normal displacement with
/// Tr(L)·det(L)·a (the gradient and tangential terms vanish in that setting).
GaussVariationReport verify_gauss_variation(const TriMesh& mesh, const ScalarField& normal_speed, double h);

/// One row per vertex: index,area,H,K,nx,ny,nz
void write_curvature_csv(const CurvatureField& field, std::ostream& out);

} // namespace shapegeo
