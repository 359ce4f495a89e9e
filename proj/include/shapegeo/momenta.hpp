#pragma once

#include "shapegeo/path_energy.hpp"

#include <iosfwd>
#include <vector>

namespace shapegeo {

/// Momenta of one interval, evaluated on the midpoint mesh with the forward-difference velocity.
struct MomentumSample {
    double t = 0.0;
    Vec3 linear = Vec3::Zero();   // sum Phi·v·area
    Vec3 angular = Vec3::Zero();  // sum Phi·(x × v)·area
    double reparam_norm = 0.0;    // sqrt(sum Phi²·|v_tan|²·area)
    // Magnitudes the momenta are compared against.
    double linear_scale = 0.0;    // sum Phi·|v|·area
    double angular_scale = 0.0;   // sum Phi·|x|·|v|·area
    double reparam_scale = 0.0;   // sqrt(sum Phi²·|v|²·area)
};

std::vector<MomentumSample> momenta_along_path(const PhiSpec& spec, const MeshPath& path);

struct ConservationReport {
    double linear_drift = 0.0;
    double angular_drift = 0.0;
    double reparam_drift = 0.0;
    double threshold = 1e-2;
    bool linear_conserved = true;
    bool angular_conserved = true;
    bool reparam_conserved = true;

    bool passed() const { return linear_conserved && angular_conserved && reparam_conserved; }
};

/// Max deviation of each momentum from its time mean, divided by
/// max(largest momentum magnitude, scale of the first sample). Zero scale counts as no drift.
ConservationReport conservation_report(const std::vector<MomentumSample>& samples, double threshold = 1e-2);

/// Momenta of the penalized Lagrangian Phi·vn² + lambda·|v_tan|² that the solver actually minimizes:
/// linear = sum (Phi·vn·nu + lambda·v_tan)·area, angular = sum x × (same density).
/// Linear momentum is an exact first integral of the discrete Euler-Lagrange equations; the angular
/// one is conserved up to O(dt²). Both coincide with MomentumSample on horizontal paths.
struct PenalizedMomentum {
    double t = 0.0;
    Vec3 linear = Vec3::Zero();
    Vec3 angular = Vec3::Zero();
    double linear_scale = 0.0;
    double angular_scale = 0.0;
};

std::vector<PenalizedMomentum> penalized_momenta_along_path(const PhiSpec& spec, const MeshPath& path, double lambda);

/// Same normalization as conservation_report; reparam_drift is left at zero.
ConservationReport conservation_report(const std::vector<PenalizedMomentum>& samples, double threshold = 1e-2);

/// t,Lx,Ly,Lz,Ax,Ay,Az,reparam_norm
void write_momenta_csv(const std::vector<MomentumSample>& samples, std::ostream& out);

} // namespace shapegeo
