#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <vector>

#include "nlac/field.hpp"
#include "nlac/hyperdual.hpp"
#include "nlac/params.hpp"
#include "nlac/profile.hpp"

namespace nlac {

// Profiles live on a grid whose stored axes are the transverse axes followed
// by the periodic retarded-time axis as the last (contiguous) axis.
struct KzkProfile {
    Field I;
    double z = 0.0;
};

// Coefficients of dI/dz = a d_tau(I^2) + b d2_tau I + d d_tau^{-1} lap_y I.
struct KzkCoefficients {
    double a = 0.0;  // (gamma+1)/(4 rho0 c)
    double b = 0.0;  // nu/(2 c^3 rho0)
    double d = 0.0;  // c/2
};
KzkCoefficients kzk_coefficients(const ModelParams& p);

Field kzk_rhs(const KzkProfile& prof, const ModelParams& p, const PhysicsTerms& terms = {});

// Directional derivative of kzk_rhs at I along delta:
// 2a d_tau(I delta) + b d2_tau delta + d d_tau^{-1} lap_y delta.
Field kzk_rhs_derivative(const Field& I, const Field& delta, const ModelParams& p, const PhysicsTerms& terms = {});

// RK4 march in z on [0, z_end]. Aborts with NumericalFailure(NonFinite) and
// the last good z when the profile blows up or steepens past resolution.
ProfileSolution solve_kzk(const Field& I0, const ModelParams& p, double z_end, double dz,
                          const MarchOptions& options = {});

// Phi = (c^2/rho0) d_tau^{-1} I, zero mean in tau.
Field potential_from_density(const KzkProfile& prof, const ModelParams& p);

struct KzkCorrectors {
    Field v;                 // (c/rho0) I
    Field v1;                // longitudinal corrector of the density ansatz rho0 + eps I
    std::vector<Field> w;    // -grad_y Phi, one per transverse axis
    Field J;                 // -((gamma-1) rho0/(2c^4)) Phi_tau^2 - (nu/c^4) Phi_tautau
    Field v1_potential;      // -d_z Phi alone
};

// d_z Phi is (c^2/rho0) d_tau^{-1} of kzk_rhs, so no differencing across
// stored slices is needed. v1 adds the terms that close the longitudinal
// momentum balance at order eps^2 for the density ansatz rho0 + eps I:
//   v1 = -d_z Phi + ((gamma-1) c/(2 rho0^2)) I^2 + (nu/(c rho0^2)) d_tau I.
KzkCorrectors kzk_correctors(const KzkProfile& prof, const Field& Phi, const ModelParams& p,
                             const PhysicsTerms& terms = {});

struct ReconstructedState {
    Field rho_bar;
    std::vector<Field> u_bar;  // one per physical axis, in grid axis order
};

ConservedState to_conserved(const ReconstructedState& r);

// kzk:        rho = rho0 + eps I,            u1 = eps (v + eps v1)
// kuznetsov:  rho = rho0 + eps I + eps^2 J,  u1 = eps (v - eps d_z Phi)
// with transverse velocity eps^{3/2} w in both cases.
enum class Ansatz { kzk, kuznetsov };

// Samples the approximate state on physical grids. The physical grid has the
// transverse axes first (node j at y_j / sqrt(eps)) and the propagation
// axis x1 last. Arguments (t - x1/c, eps x1, sqrt(eps) x') are evaluated by
// trigonometric interpolation in tau and cubic Lagrange interpolation between
// stored z slices.
class Reconstructor {
public:
    Reconstructor(const ProfileSolution& sol, const ModelParams& p, Ansatz ansatz = Ansatz::kzk,
                  const PhysicsTerms& terms = {});

    ReconstructedState at(double t, const Grid& phys) const;

    // Conserved state on a grid whose x1 axis is periodic with period P. Within
    // `buffer` of either end the state is blended with its continuation one
    // period away, using a smooth partition of unity that is exactly 1 in the
    // interior; interior nodes are returned unchanged.
    ConservedState periodized(double t, const Grid& phys, double buffer) const;

    double z_min() const { return zs_.front(); }
    double z_max() const { return zs_.back(); }

private:
    struct Column {
        std::vector<double> rho, u1;
        std::vector<std::vector<double>> ut;
    };
    void check_grid(const Grid& phys) const;
    void column(double t, double x1, Column& out) const;

    ModelParams p_;
    Ansatz ansatz_;
    std::size_t n_tau_ = 0;
    double period_ = 0.0;
    std::size_t lines_ = 0;  // transverse points per slice
    std::vector<const Axis*> transverse_;
    Grid profile_grid_;
    std::vector<double> zs_;
    double dz_ = 0.0;
    // Per slice: interpolation coefficients of I, v1 (or -d_z Phi), J and w.
    std::vector<std::vector<std::complex<double>>> coef_I_, coef_v1_, coef_J_;
    std::vector<std::vector<std::vector<std::complex<double>>>> coef_w_;
};

ReconstructedState reconstruct_physical(const ProfileSolution& sol, const ModelParams& p, double t,
                                        const Grid& phys_grid, Ansatz ansatz = Ansatz::kzk);

// psi(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)}), 0 for x <= 0 and 1 for x >= 1.
double smooth_step(double x);

// ---------------------------------------------------------------------------
// Paraxial change of variables for the wave operator. For phi(x1, x2, t) =
// U(t - x1/c, eps x1, sqrt(eps) x2) the identity
//   (d_t^2 - c^2 lap) phi = eps (2c U_tau_z - c^2 U_yy) - eps^2 c^2 U_zz
// is checked on sample points; the left side is differentiated in physical
// variables and the right side in profile variables, both by hyper-dual
// arithmetic. U must accept HyperDual arguments (tau, z, y).

struct IdentitySamples {
    std::size_t n = 7;
    double tau_max = 1.0;
    double z_max = 1.0;
    double y_max = 1.0;
};

template <class U>
double paraxial_operator_identity_check(U&& profile, const ModelParams& p, const IdentitySamples& s = {}) {
    const double eps = p.eps, c = p.c, se = std::sqrt(p.eps);
    double worst = 0.0;
    auto lin = [&](std::size_t i, double hi) { return s.n > 1 ? hi * static_cast<double>(i) / static_cast<double>(s.n - 1) : 0.0; };
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = 0; j < s.n; ++j)
            for (std::size_t k = 0; k < s.n; ++k) {
                const double tau = lin(i, s.tau_max), z = lin(j, s.z_max), y = lin(k, s.y_max);
                const double x1 = z / eps, x2 = y / se, t = tau + x1 / c;

                auto phys = [&](HyperDual tt, HyperDual xx1, HyperDual xx2) {
                    return profile(tt - xx1 / HyperDual(c), HyperDual(eps) * xx1, HyperDual(se) * xx2);
                };
                const double phi_tt = phys({t, 1, 1, 0}, x1, x2).e12;
                const double phi_11 = phys(t, {x1, 1, 1, 0}, x2).e12;
                const double phi_22 = phys(t, x1, {x2, 1, 1, 0}).e12;
                const double lhs = phi_tt - c * c * (phi_11 + phi_22);

                const double u_tz = profile(HyperDual{tau, 1, 0, 0}, HyperDual{z, 0, 1, 0}, HyperDual(y)).e12;
                const double u_yy = profile(HyperDual(tau), HyperDual(z), HyperDual{y, 1, 1, 0}).e12;
                const double u_zz = profile(HyperDual(tau), HyperDual{z, 1, 1, 0}, HyperDual(y)).e12;
                const double rhs = eps * (2.0 * c * u_tz - c * c * u_yy) - eps * eps * c * c * u_zz;
                worst = std::max(worst, std::abs(lhs - rhs));
            }
    return worst;
}

}  // namespace nlac
