#pragma once

#include "nlac/field.hpp"
#include "nlac/params.hpp"
#include "nlac/profile.hpp"

namespace nlac {

// q = d_z Psi on a grid with the transverse axes first and the periodic
// propagation axis z last.
struct NpeProfile {
    Field q;
    double tau = 0.0;
};

// d_tau q = ((gamma+1)/4) d_z(q^2) + (nu/(2 rho0)) d2_z q - (c/2) lap_y d_z^{-1} q
Field npe_rhs(const NpeProfile& prof, const ModelParams& p, const PhysicsTerms& terms = {});

ProfileSolution solve_npe(const Field& q0, const ModelParams& p, double tau_end, double dtau,
                          const MarchOptions& options = {});

struct NpeCorrectors {
    Field P1;  // (rho0/c) q
    Field P2;  // (rho0/c^4) d_tau Psi - (rho0 (gamma+3)/(2c^2)) q^2 - (nu/c^2) d_z q
};

// d_tau Psi is d_z^{-1} of npe_rhs.
NpeCorrectors npe_correctors(const NpeProfile& prof, const ModelParams& p, const PhysicsTerms& terms = {});

struct NpeCoords {
    double tau = 0.0;
    double z = 0.0;
};

// z_N = -c tau_K, tau_N = eps tau_K + z_K / c.
NpeCoords kzk_to_npe_coords(double tau_K, double z_K, const ModelParams& p);
// Inverse map: returns (tau_K, z_K) in the fields of NpeCoords.
NpeCoords npe_to_kzk_coords(double tau_N, double z_N, const ModelParams& p);

}  // namespace nlac
