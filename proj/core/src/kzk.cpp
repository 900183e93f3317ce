#include "nlac/kzk.hpp"

#include <cmath>
#include <string>

#include "march.hpp"
#include "nlac/errors.hpp"
#include "nlac/spectral.hpp"
#include "paraxial_ops.hpp"

namespace nlac {

namespace {

detail::ParaxialOperator make_operator(const Grid& grid, const ModelParams& p, const PhysicsTerms& terms) {
    const KzkCoefficients k = kzk_coefficients(p);
    return detail::ParaxialOperator(grid, k.a, k.b, k.d, terms);
}

void require_zero_mean(const Field& f, const char* what) {
    const auto dims = f.grid().dims();
    spectral::require_zero_mean(f.values(), dims, dims.size() - 1, what);
}

}  // namespace

KzkCoefficients kzk_coefficients(const ModelParams& p) {
    return {(p.gamma + 1.0) / (4.0 * p.rho0 * p.c), p.nu / (2.0 * p.c * p.c * p.c * p.rho0), 0.5 * p.c};
}

Field kzk_rhs(const KzkProfile& prof, const ModelParams& p, const PhysicsTerms& terms) {
    validate_params(p);
    detail::require_profile_grid(prof.I.grid(), "KZK profile");
    require_zero_mean(prof.I, "KZK profile");
    const auto op = make_operator(prof.I.grid(), p, terms);
    return Field(prof.I.grid(), op.rhs(prof.I.values()));
}

Field kzk_rhs_derivative(const Field& I, const Field& delta, const ModelParams& p, const PhysicsTerms& terms) {
    validate_params(p);
    require_same_layout(I.grid(), delta.grid(), "KZK linearization");
    require_zero_mean(delta, "KZK perturbation");
    const auto op = make_operator(I.grid(), p, terms);
    return Field(I.grid(), op.rhs_derivative(I.values(), delta.values()));
}

ProfileSolution solve_kzk(const Field& I0, const ModelParams& p, double z_end, double dz, const MarchOptions& options) {
    validate_params(p);
    detail::require_profile_grid(I0.grid(), "KZK profile");
    require_zero_mean(I0, "initial KZK profile");
    const auto op = make_operator(I0.grid(), p, options.terms);
    return detail::march_paraxial(op, I0, z_end, dz, options, "z");
}

Field potential_from_density(const KzkProfile& prof, const ModelParams& p) {
    validate_params(p);
    detail::require_profile_grid(prof.I.grid(), "KZK profile");
    const auto ax = spectral::PeriodicAxisHandle::of(prof.I.grid(), prof.I.grid().stored(prof.I.grid().rank() - 1).name);
    return (p.c * p.c / p.rho0) * spectral::antiderivative_zero_mean(prof.I, ax);
}

KzkCorrectors kzk_correctors(const KzkProfile& prof, const Field& Phi, const ModelParams& p,
                             const PhysicsTerms& terms) {
    validate_params(p);
    const Grid& grid = prof.I.grid();
    require_same_layout(grid, Phi.grid(), "potential grid");
    require_zero_mean(prof.I, "KZK profile");
    const auto op = make_operator(grid, p, terms);
    const auto& ops = op.ops();
    const std::size_t tau = op.axis();
    const std::size_t n = grid.size();
    const double c = p.c, c2 = c * c, c4 = c2 * c2, r0 = p.rho0;

    const auto I = prof.I.values();
    const auto Iz = op.rhs(I);
    const auto Phi_z = ops.antideriv(Iz, tau);
    const auto I_tau = ops.deriv(I, tau, 1);
    const auto Phi_tau = ops.deriv(Phi.values(), tau, 1);
    const auto Phi_tautau = ops.deriv(Phi.values(), tau, 2);

    std::vector<double> v(n), v1(n), v1p(n), J(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = c / r0 * I[i];
        v1p[i] = -c2 / r0 * Phi_z[i];
        v1[i] = v1p[i] + (p.gamma - 1.0) * c / (2.0 * r0 * r0) * I[i] * I[i] + p.nu / (c * r0 * r0) * I_tau[i];
        J[i] = -(p.gamma - 1.0) * r0 / (2.0 * c4) * Phi_tau[i] * Phi_tau[i] - p.nu / c4 * Phi_tautau[i];
    }
    KzkCorrectors out{Field(grid, std::move(v)), Field(grid, std::move(v1)), {}, Field(grid, std::move(J)),
                      Field(grid, std::move(v1p))};
    for (std::size_t k : op.transverse()) {
        auto w = ops.deriv(Phi.values(), k, 1);
        for (double& x : w) x = -x;
        out.w.emplace_back(grid, std::move(w));
    }
    return out;
}

ConservedState to_conserved(const ReconstructedState& r) {
    ConservedState u{r.rho_bar, {}};
    for (const auto& vel : r.u_bar) u.momentum.push_back(hadamard(r.rho_bar, vel));
    return u;
}

double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

// ---------------------------------------------------------------------------

Reconstructor::Reconstructor(const ProfileSolution& sol, const ModelParams& p, Ansatz ansatz,
                             const PhysicsTerms& terms)
    : p_(validate_params(p)), ansatz_(ansatz) {
    if (sol.variable != "z") throw Error(ErrorKind::Param, "reconstruction needs a z-marched profile solution");
    if (sol.size() < 2) throw Error(ErrorKind::InsufficientSnapshots, "reconstruction needs at least 2 z slices");
    profile_grid_ = sol.profiles.front().grid();
    detail::require_profile_grid(profile_grid_, "KZK profile");
    const std::size_t rank = profile_grid_.rank();
    const Axis& tau_axis = profile_grid_.stored(rank - 1);
    n_tau_ = tau_axis.n;
    period_ = tau_axis.length();
    lines_ = profile_grid_.size() / n_tau_;
    for (std::size_t k = 0; k + 1 < rank; ++k) transverse_.push_back(&profile_grid_.stored(k));

    zs_ = sol.coords;
    dz_ = zs_[1] - zs_[0];
    for (std::size_t s = 1; s < zs_.size(); ++s)
        if (std::abs(zs_[s] - zs_[s - 1] - dz_) > 1e-9 * std::abs(dz_))
            throw Error(ErrorKind::GridMismatch, "stored z slices are not uniformly spaced");

    for (const Field& I : sol.profiles) {
        require_same_layout(profile_grid_, I.grid(), "profile slice");
        const KzkProfile prof{I, 0.0};
        const KzkCorrectors corr = kzk_correctors(prof, potential_from_density(prof, p_), p_, terms);
        coef_I_.push_back(spectral::interpolation_coefficients(I.values(), n_tau_));
        const Field& v1 = ansatz_ == Ansatz::kzk ? corr.v1 : corr.v1_potential;
        coef_v1_.push_back(spectral::interpolation_coefficients(v1.values(), n_tau_));
        if (ansatz_ == Ansatz::kuznetsov) coef_J_.push_back(spectral::interpolation_coefficients(corr.J.values(), n_tau_));
        std::vector<std::vector<std::complex<double>>> ws;
        for (const Field& w : corr.w) ws.push_back(spectral::interpolation_coefficients(w.values(), n_tau_));
        coef_w_.push_back(std::move(ws));
    }
}

void Reconstructor::check_grid(const Grid& phys) const {
    if (phys.rank() != profile_grid_.rank())
        throw Error(ErrorKind::GridMismatch, "physical grid rank differs from profile grid rank");
    const double se = std::sqrt(p_.eps);
    for (std::size_t k = 0; k < transverse_.size(); ++k) {
        const Axis& x = phys.stored(k);
        const Axis& y = *transverse_[k];
        const bool aligned = x.n == y.n && std::abs(x.spacing * se - y.spacing) <= 1e-9 * y.spacing &&
                             std::abs(x.origin * se - y.origin) <= 1e-9 * y.length();
        if (!aligned)
            throw Error(ErrorKind::GridMismatch, "transverse axis " + x.name + " is not aligned with profile axis " + y.name);
    }
}

void Reconstructor::column(double t, double x1, Column& out) const {
    const double eps = p_.eps;
    const double z = eps * x1;
    const double tol = 1e-9 * dz_;
    if (z < zs_.front() - tol || z > zs_.back() + tol)
        throw Error(ErrorKind::DomainExceeded,
                    "z=" + std::to_string(z) + " outside solved range [" + std::to_string(zs_.front()) + ", " +
                        std::to_string(zs_.back()) + "]");

    // Cubic Lagrange stencil in z; a node hit uses that slice alone.
    const double s = (z - zs_.front()) / dz_;
    const std::size_t ns = zs_.size();
    std::size_t first = 0, count = 0;
    double weights[4] = {0, 0, 0, 0};
    const double nearest = std::round(s);
    if (std::abs(s - nearest) <= 1e-9) {
        first = static_cast<std::size_t>(std::clamp(nearest, 0.0, static_cast<double>(ns - 1)));
        count = 1;
        weights[0] = 1.0;
    } else {
        count = std::min<std::size_t>(4, ns);
        const auto base = static_cast<long>(std::floor(s)) - static_cast<long>(count / 2 - 1);
        first = static_cast<std::size_t>(std::clamp<long>(base, 0, static_cast<long>(ns - count)));
        for (std::size_t j = 0; j < count; ++j) {
            double w = 1.0;
            for (std::size_t m = 0; m < count; ++m)
                if (m != j) w *= (s - static_cast<double>(first + m)) / static_cast<double>(static_cast<long>(j) - static_cast<long>(m));
            weights[j] = w;
        }
    }

    double tau = std::fmod(t - x1 / p_.c, period_);
    if (tau < 0.0) tau += period_;
    std::vector<std::complex<double>> phases(n_tau_ / 2 + 1);
    spectral::interpolation_phases(tau, period_, n_tau_, phases);
    const std::size_t h = n_tau_ / 2 + 1;

    auto eval = [&](const std::vector<std::vector<std::complex<double>>>& coef, std::size_t line) {
        double acc = 0.0;
        for (std::size_t j = 0; j < count; ++j)
            acc += weights[j] * spectral::evaluate_interpolant(
                                    std::span<const std::complex<double>>(coef[first + j]).subspan(line * h, h), phases);
        return acc;
    };

    const double c = p_.c, r0 = p_.rho0, e15 = eps * std::sqrt(eps);
    out.rho.resize(lines_);
    out.u1.resize(lines_);
    out.ut.assign(transverse_.size(), std::vector<double>(lines_));
    for (std::size_t l = 0; l < lines_; ++l) {
        const double I = eval(coef_I_, l);
        const double v1 = eval(coef_v1_, l);
        double rho = r0 + eps * I;
        if (ansatz_ == Ansatz::kuznetsov) rho += eps * eps * eval(coef_J_, l);
        out.rho[l] = rho;
        out.u1[l] = eps * (c / r0 * I + eps * v1);
        for (std::size_t k = 0; k < transverse_.size(); ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < count; ++j)
                acc += weights[j] * spectral::evaluate_interpolant(
                                        std::span<const std::complex<double>>(coef_w_[first + j][k]).subspan(l * h, h), phases);
            out.ut[k][l] = e15 * acc;
        }
    }
}

ReconstructedState Reconstructor::at(double t, const Grid& phys) const {
    check_grid(phys);
    const std::size_t rank = phys.rank();
    const Axis& x1 = phys.stored(rank - 1);
    const std::size_t n1 = x1.n;
    const std::size_t total = phys.size();
    std::vector<double> rho(total);
    std::vector<std::vector<double>> u(rank, std::vector<double>(total));
    Column col;
    for (std::size_t i = 0; i < n1; ++i) {
        column(t, x1.coord(i), col);
        for (std::size_t l = 0; l < lines_; ++l) {
            const std::size_t idx = l * n1 + i;
            if (!(col.rho[l] > 0.0))
                throw Error(ErrorKind::NonPositiveDensity, "reconstructed density " + std::to_string(col.rho[l]));
            rho[idx] = col.rho[l];
            u[rank - 1][idx] = col.u1[l];
            for (std::size_t k = 0; k + 1 < rank; ++k) u[k][idx] = col.ut[k][l];
        }
    }
    ReconstructedState r{Field(phys, std::move(rho)), {}};
    for (auto& comp : u) r.u_bar.emplace_back(phys, std::move(comp));
    return r;
}

ConservedState Reconstructor::periodized(double t, const Grid& phys, double buffer) const {
    check_grid(phys);
    const std::size_t rank = phys.rank();
    const Axis& x1 = phys.stored(rank - 1);
    if (!x1.periodic) throw Error(ErrorKind::GridMismatch, "periodized reconstruction needs a periodic x1 axis");
    const double P = x1.length();
    if (!(buffer > 0.0 && 2.0 * buffer < P)) throw Error(ErrorKind::Param, "buffer");
    const std::size_t n1 = x1.n;
    const std::size_t total = phys.size();
    std::vector<double> rho(total);
    std::vector<std::vector<double>> m(rank, std::vector<double>(total));

    Column a, b;
    for (std::size_t i = 0; i < n1; ++i) {
        const double x = x1.coord(i);
        const double from_left = x - x1.origin;
        const double from_right = x1.origin + P - x;
        column(t, x, a);
        double weight = 1.0;
        if (from_left < buffer) {
            weight = smooth_step((from_left + buffer) / (2.0 * buffer));
            column(t, x + P, b);
        } else if (from_right < buffer) {
            weight = smooth_step((from_right + buffer) / (2.0 * buffer));
            column(t, x - P, b);
        }
        for (std::size_t l = 0; l < lines_; ++l) {
            const std::size_t idx = l * n1 + i;
            double r = a.rho[l];
            double m1 = a.rho[l] * a.u1[l];
            if (weight < 1.0) {
                r = weight * r + (1.0 - weight) * b.rho[l];
                m1 = weight * m1 + (1.0 - weight) * b.rho[l] * b.u1[l];
            }
            if (!(r > 0.0)) throw Error(ErrorKind::NonPositiveDensity, "reconstructed density " + std::to_string(r));
            rho[idx] = r;
            m[rank - 1][idx] = m1;
            for (std::size_t k = 0; k + 1 < rank; ++k) {
                double mk = a.rho[l] * a.ut[k][l];
                if (weight < 1.0) mk = weight * mk + (1.0 - weight) * b.rho[l] * b.ut[k][l];
                m[k][idx] = mk;
            }
        }
    }
    ConservedState u{Field(phys, std::move(rho)), {}};
    for (auto& comp : m) u.momentum.emplace_back(phys, std::move(comp));
    return u;
}

ReconstructedState reconstruct_physical(const ProfileSolution& sol, const ModelParams& p, double t,
                                        const Grid& phys_grid, Ansatz ansatz) {
    return Reconstructor(sol, p, ansatz).at(t, phys_grid);
}

}  // namespace nlac
