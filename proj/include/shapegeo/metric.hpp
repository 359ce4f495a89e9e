#pragma once

#include "shapegeo/curvature.hpp"
#include "shapegeo/mesh.hpp"

namespace shapegeo {

///
/// Curvature weight Phi(H, K) = 1 + A·H^(2k) + B·|K|^(2l).
///
/// `l` may be a half-integer >= 1/2; the Gauss term always uses |K| so Phi >= 1.
/// Either term can be switched off without touching its coefficients.
///
struct PhiSpec {
    double A = 0.0;
    int k = 1;
    double B = 0.0;
    double l = 1.0;
    bool include_mean = true;
    bool include_gauss = true;

    /// Throws PreconditionError on negative weights, k < 1, or l not a positive multiple of 1/2.
    void validate() const;

    double operator()(double H, double K) const;
    double d_mean(double H, double K) const;   // dPhi/dH
    double d_gauss(double H, double K) const;  // dPhi/dK
};

ScalarField phi_eval(const PhiSpec& spec, const CurvatureField& field);

/// G^Phi inner product sum_p Phi(p)·<h(p), k(p)>·vertex_area(p).
double g_phi_inner(const PhiSpec& spec, const TriMesh& mesh, const VectorField& h, const VectorField& k);

/// Same, reusing a precomputed curvature field of `mesh`.
double g_phi_inner(const PhiSpec& spec, const CurvatureField& field, const VectorField& h, const VectorField& k);

struct NormalSplit {
    ScalarField normal;     // <h, nu>
    VectorField tangential;  // h - <h, nu>·nu
};

NormalSplit normal_decompose(const TriMesh& mesh, const CurvatureField& field, const VectorField& h);

} // namespace shapegeo
