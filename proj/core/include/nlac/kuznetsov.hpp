#pragma once

#include <functional>
#include <vector>

#include "nlac/field.hpp"
#include "nlac/params.hpp"
#include "nlac/profile.hpp"

namespace nlac {

// Velocity potential and its time derivative on a fully periodic grid.
struct PotentialState {
    Field phi;
    Field phi_t;
    double t = 0.0;
};

// Optional forcing added to the right-hand side of the potential equation,
// used for manufactured solutions.
using PotentialSource = std::function<Field(double t)>;

// Acceleration phi_tt of
//   phi_tt = c^2 lap phi + eps d/dt(|grad phi|^2 + (gamma-1)/(2c^2) phi_t^2 + (nu/rho0) lap phi).
// The time derivative is expanded by the chain rule and the phi_tt term is
// solved pointwise with coefficient 1 - eps (gamma-1)/c^2 phi_t.
Field kuznetsov_rhs(const PotentialState& s, const ModelParams& p, const PhysicsTerms& terms = {},
                    const Field* source = nullptr);

// RK4 march of (phi, phi_t). Requires dt <= 0.5 min(dx) / c.
ProfileSolution solve_kuznetsov(const PotentialState& s0, const ModelParams& p, double t_end, double dt,
                                const MarchOptions& options = {}, const PotentialSource& source = {});

// ||phi_t||^2 + c^2 ||grad phi||^2 with the cell-volume quadrature.
double wave_energy(const PotentialState& s, const ModelParams& p);

struct DensityCorrectors {
    Field rho1;
    Field rho2;
};

// rho1 = (rho0/c^2) phi_t
// rho2 = -(rho0 (gamma-2)/(2c^4)) phi_t^2 - (rho0/(2c^2)) |grad phi|^2 - (nu/c^2) lap phi
DensityCorrectors density_correctors(const PotentialState& s, const ModelParams& p);

struct KuznetsovResiduals {
    Field mass;
    std::vector<Field> momentum;  // one per axis
};

// Order-eps and order-eps^2 brackets of the mass and momentum equations for
// the ansatz rho0 + eps rho1 + eps^2 rho2, u = -eps grad phi. `phi_tt` is the
// acceleration of the state, supplied by the caller (exact, or differenced
// along a trajectory).
KuznetsovResiduals kuznetsov_residuals(const PotentialState& s, const Field& phi_tt, const Field& rho1,
                                       const Field& rho2, const ModelParams& p);

}  // namespace nlac
