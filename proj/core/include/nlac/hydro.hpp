#pragma once

#include <cstddef>
#include <vector>

#include "nlac/field.hpp"
#include "nlac/params.hpp"

namespace nlac {

// Shrinking comparison region |x1 - center| <= K/eps - M t along the
// propagation axis (the last stored axis).
struct ConeSpec {
    double K = 1.0;
    double M = 1.0;
    double eps = 0.1;
    double center = 0.0;
};

// Throws Param("K") or Param("M") when K <= 0 or M < c.
void validate_cone(const ConeSpec& spec, const ModelParams& p);
Field cone_mask(const ConeSpec& spec, double t, const Grid& grid);

// p(rho) = p0 + c^2 (rho - rho0) + ((gamma-1) c^2/(2 rho0)) (rho - rho0)^2
double pressure_at(double rho, const ModelParams& p, double p0 = 0.0);
Field pressure(const Field& rho, const ModelParams& p, double p0 = 0.0);
// sqrt(dp/drho); throws NonPositiveDensity where dp/drho <= 0.
double sound_speed_at(double rho, const ModelParams& p);

struct FluxSet {
    Field mass;
    std::vector<Field> momentum;
};

// Flux along each stored axis d: (m_d, m_d m_j / rho + p delta_dj).
std::vector<FluxSet> euler_flux(const ConservedState& u, const ModelParams& p);

enum class HydroScheme {
    muscl,     // MUSCL-minmod reconstruction, Rusanov flux, SSP-RK2, centered viscous term
    spectral,  // Fourier derivatives with 2/3 filtering, RK4
};

struct HydroOptions {
    HydroScheme scheme = HydroScheme::muscl;
    bool viscous = true;   // include eps nu lap u (no effect when nu = 0)
    double p0 = 0.0;
    double cfl = 0.5;
    std::size_t cadence = 1;  // keep every cadence-th state in solve_hydro
};

// Largest dt accepted by step_hydro for this state.
double hydro_dt_limit(const ConservedState& u, const ModelParams& p, const HydroOptions& options = {});

ConservedState step_hydro(const ConservedState& u, const ModelParams& p, double dt, const HydroOptions& options = {});

// d/dt of the conserved variables with spectral derivatives:
// -div F(U) + eps nu [0; lap u] (viscous term optional).
ConservedState hydro_tendency(const ConservedState& u, const ModelParams& p, bool viscous, double p0 = 0.0);

double total_mass(const ConservedState& u);
std::vector<double> total_momentum(const ConservedState& u);
// Kinetic plus internal energy, internal density rho int_{rho0}^{rho} (p(s) - p0)/s^2 ds.
double total_energy(const ConservedState& u, const ModelParams& p);

struct LedgerRow {
    double t = 0.0;
    double mass = 0.0;
    std::vector<double> momentum;
    double energy = 0.0;
};

struct HydroTrajectory {
    std::vector<double> times;
    std::vector<ConservedState> states;
    std::vector<LedgerRow> ledger;  // one row per step, including t = 0
};

HydroTrajectory solve_hydro(const ConservedState& u0, const ModelParams& p, double t_end, double dt,
                            const HydroOptions& options = {});

}  // namespace nlac
