#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlac/field.hpp"
#include "nlac/hydro.hpp"
#include "nlac/kzk.hpp"
#include "nlac/params.hpp"

namespace nlac {

// ===========================================================================
// Fits and norms

struct ScalingReport {
    std::vector<double> eps_values;
    std::vector<double> error_norms;
    double fitted_slope = 0.0;
    double fitted_intercept = 0.0;
    double residual_of_fit = 0.0;  // rms of log-space residuals
    std::string digest;
};

// Least squares of log(norm) against log(eps). Requires at least 3 pairs,
// eps strictly decreasing and positive norms.
ScalingReport scaling_fit(std::span<const double> eps, std::span<const double> norms);

// Least-squares slope and intercept of y against x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Factor turning a physical L2 norm into the L2 norm in profile variables
// (z = eps x1, y = sqrt(eps) x'): sqrt(eps * eps^{m/2}) for m transverse axes.
double paraxial_norm_scale(double eps, std::size_t transverse_dims);

struct ConeDifference {
    double density = 0.0;
    double momentum = 0.0;
    double rss() const;  // root of sum of squares
    double sum() const;  // density + momentum
};

// Norms of rho_bar - rho and rho_bar u_bar - rho u over the cone at time t,
// each multiplied by `measure_scale`.
ConeDifference l2_diff_on_cone(const ConservedState& exact, const ConservedState& approx, const ConeSpec& spec,
                               double t, double measure_scale = 1.0);
ConeDifference l2_diff_on_cone(const ConservedState& exact, const ReconstructedState& approx, const ConeSpec& spec,
                               double t, double measure_scale = 1.0);

struct ResidualSeries {
    std::vector<double> times;
    std::vector<double> norms;
};

// Residual d_t U + div F(U) - eps nu [0; lap u] of a uniformly spaced series
// of approximate states. Fourth-order central differences in time when five
// or more snapshots are given, second order for three or four; spatial terms
// use the spectral hydro operator. Norms are masked (optional) and scaled.
ResidualSeries ansatz_residual_norm(std::span<const ConservedState> series, std::span<const double> times,
                                    const ModelParams& p, bool viscous, const Field* mask = nullptr,
                                    double measure_scale = 1.0);
ResidualSeries ansatz_residual_norm(std::span<const ReconstructedState> series, std::span<const double> times,
                                    const ModelParams& p, bool viscous, const Field* mask = nullptr,
                                    double measure_scale = 1.0);

// ===========================================================================
// Convergence studies

enum class ConvergenceStatus { ok, non_monotone, saturated };
std::string_view to_string(ConvergenceStatus s);

struct ConvergenceResult {
    std::string solver;
    std::string problem;
    std::vector<std::size_t> resolutions;
    std::vector<double> differences;  // between successive resolutions, or against the exact answer
    std::vector<double> orders;
    double observed_order = 0.0;      // order from the finest pair
    ConvergenceStatus status = ConvergenceStatus::ok;
};

// Built-in studies:
//   kuznetsov / manufactured   RK4 in dt (resolution = step count)
//   kzk / gaussian-beam        RK4 in dz (resolution = step count)
//   npe / gaussian-beam        RK4 in dtau (resolution = step count)
//   hydro-muscl / acoustic-pulse   grid self-convergence in L1 (resolution = cells)
//   spectral / band-limited    derivative error against the exact answer
// Resolutions must be increasing and in geometric progression.
ConvergenceResult convergence_study(std::string_view solver_id, std::string_view problem_id,
                                    std::span<const std::size_t> resolutions);

// Order of the NPE operator residual for a KZK solution: residual field of
// the NPE operator evaluated on the coordinate-transplanted KZK profile I,
// with z-derivatives of I taken from the KZK evolution law.
Field npe_transplant_residual(const Field& I, const ModelParams& p, const PhysicsTerms& terms = {});

// ===========================================================================
// Experiments

struct SweepConfig {
    ModelParams params;              // eps is overridden per run
    std::vector<double> eps_list{0.1, 0.05, 0.025};
    std::size_t n_tau = 32;          // also points per wavelength along x1
    std::size_t n_y = 64;
    double y_length = 16.0;
    double amplitude = 0.05;
    double beam_width = 1.0;
    double buffer = 1.0;             // periodization buffer along x1, physical length
    std::size_t min_n1 = 64;
    double kzk_dz_max = 2e-3;
    double cone_K = 0.075;
    double cone_M = 1.1;
    double theta = 0.03;             // comparison at t* = theta / eps
    double hydro_dt = 0.005;
    std::size_t sample_every = 2;    // hydro steps between difference samples
    HydroScheme scheme = HydroScheme::spectral;
    double horizon_T = 0.0;          // 0 selects 0.9 K / (M ln(1/eps_min))
    double residual_h = 2e-3;        // time step of the residual stencil
    double asymptotic_eps_limit = 0.25;
    std::size_t workers = 1;
    std::string digest;
};

struct SeriesSample {
    double t = 0.0;
    double density = 0.0;   // profile-measure norms
    double momentum = 0.0;
    double gated = 0.0;     // combination the experiment fits (rss or sum)
    double physical = 0.0;  // same combination in the physical measure
};

struct EpsRun {
    double eps = 0.0;
    std::size_t n1 = 0;
    double t_star = 0.0;
    double t_end = 0.0;
    double err_at_t_star = 0.0;
    double resid_norm = 0.0;
    std::vector<SeriesSample> series;
};

struct Theorem1Report {
    ScalingReport fit;
    std::vector<EpsRun> runs;
    bool zero_at_start = false;
    bool monotone_first_quarter = false;
    bool out_of_regime = false;
    std::vector<double> lower_growth_exponent;  // log-log slope of ||d||^2 in t over the first quarter
    std::vector<double> c1_estimate;            // min over the first quarter of ||d||^2 / (eps^{7/2} t)
};

struct Theorem2Report {
    ScalingReport fit;
    std::vector<EpsRun> runs;
    bool zero_at_start = false;
    bool out_of_regime = false;
    double horizon_T = 0.0;
    std::vector<double> early_exponent;  // per eps, over the first decade of sampled t
    double early_t_lo = 0.0;
    double early_t_hi = 0.0;
    double C2 = 0.0;
    double log_C0 = 0.0;
    std::size_t envelope_checked = 0;
    std::size_t envelope_violations = 0;
    double envelope_max_ratio = 0.0;  // max of measured / envelope beyond the calibration window
};

struct ResidualReport {
    ScalingReport fit;
    std::vector<std::size_t> n1;
    std::vector<double> physical_norms;
};

struct ConsistencyReport {
    ScalingReport fit;
    double z_sample = 0.0;
};

// Physical window for one eps: periodic x1 of period P = n1 h1 starting at
// x0 = buffer, transverse axis aligned with the profile y grid.
struct PhysicalWindow {
    Grid grid;
    std::size_t n1 = 0;
    double h1 = 0.0;
    double x0 = 0.0;
    double period = 0.0;
    double center = 0.0;
};
PhysicalWindow make_window(const SweepConfig& cfg, double eps);
Grid profile_grid(const SweepConfig& cfg);
// I0 = A sin(2 pi tau / L) exp(-(y/sigma)^2)
Field gaussian_beam_profile(const Grid& profile_grid, double amplitude, double beam_width, double period);
// KZK solution covering every z needed by the periodized window.
ProfileSolution solve_window_profile(const SweepConfig& cfg, const PhysicalWindow& w, const ModelParams& p);

ResidualReport residual_experiment(const SweepConfig& cfg, bool viscous);
Theorem1Report theorem1_experiment(const SweepConfig& cfg);
Theorem2Report theorem2_experiment(const SweepConfig& cfg);
ConsistencyReport npe_consistency_experiment(const SweepConfig& cfg, double z_sample);

// ===========================================================================
// Deterministic report files

void write_scaling_csv(const std::string& path, const ScalingReport& r, std::span<const double> t_star,
                       std::span<const double> err_l2, std::span<const double> resid_norm);
void write_series_csv(const std::string& path, const EpsRun& run);
void write_ledger_csv(const std::string& path, const HydroTrajectory& traj);
// gnuplot script plotting log(norm) against log(eps) from a scaling CSV.
void write_gnuplot_stub(const std::string& path, const std::string& csv_name, const std::string& title);
std::string format_double(double v);

}  // namespace nlac
