#include "nlac/kuznetsov.hpp"

#include <cmath>
#include <string>

#include "gridops.hpp"
#include "march.hpp"
#include "nlac/errors.hpp"

namespace nlac {

namespace {

void require_periodic(const Grid& g) {
    for (std::size_t k = 0; k < g.rank(); ++k)
        if (!g.stored(k).periodic) throw Error(ErrorKind::GridMismatch, "potential grid must be fully periodic");
}

std::vector<double> acceleration(const detail::GridOps& ops, std::span<const double> phi,
                                 std::span<const double> phi_t, const ModelParams& p, const PhysicsTerms& terms,
                                 std::span<const double> source) {
    const auto axes = ops.all_axes();
    const std::size_t n = phi.size();
    std::vector<double> num = ops.laplacian(phi, axes);
    for (double& v : num) v *= p.c * p.c;

    if (p.nu > 0.0) {
        const auto lap_t = ops.laplacian(phi_t, axes);
        const double s = p.eps * p.nu / p.rho0;
        for (std::size_t i = 0; i < n; ++i) num[i] += s * lap_t[i];
    }
    if (terms.nonlinear) {
        const auto a = ops.dealias(phi, axes);
        const auto b = ops.dealias(phi_t, axes);
        std::vector<double> dot(n, 0.0);
        for (std::size_t k : axes) {
            const auto ga = ops.deriv(a, k, 1);
            const auto gb = ops.deriv(b, k, 1);
            for (std::size_t i = 0; i < n; ++i) dot[i] += ga[i] * gb[i];
        }
        const auto filtered = ops.dealias(dot, axes);
        for (std::size_t i = 0; i < n; ++i) num[i] += 2.0 * p.eps * filtered[i];
    }
    if (!source.empty())
        for (std::size_t i = 0; i < n; ++i) num[i] += source[i];

    if (terms.nonlinear) {
        const double s = p.eps * (p.gamma - 1.0) / (p.c * p.c);
        for (std::size_t i = 0; i < n; ++i) {
            const double coef = 1.0 - s * phi_t[i];
            if (!(coef > 0.1)) throw Error(ErrorKind::NonFinite, "acceleration coefficient " + std::to_string(coef));
            num[i] /= coef;
        }
    }
    if (!detail::all_finite(num)) throw Error(ErrorKind::NonFinite, "acceleration");
    return num;
}

}  // namespace

Field kuznetsov_rhs(const PotentialState& s, const ModelParams& p, const PhysicsTerms& terms, const Field* source) {
    validate_params(p);
    require_same_layout(s.phi.grid(), s.phi_t.grid(), "phi and phi_t");
    require_periodic(s.phi.grid());
    if (source) require_same_layout(s.phi.grid(), source->grid(), "source");
    const detail::GridOps ops(s.phi.grid());
    auto a = acceleration(ops, s.phi.values(), s.phi_t.values(), p, terms,
                          source ? source->values() : std::span<const double>{});
    return Field(s.phi.grid(), std::move(a));
}

ProfileSolution solve_kuznetsov(const PotentialState& s0, const ModelParams& p, double t_end, double dt,
                                const MarchOptions& options, const PotentialSource& source) {
    validate_params(p);
    const Grid& grid = s0.phi.grid();
    require_same_layout(grid, s0.phi_t.grid(), "phi and phi_t");
    require_periodic(grid);
    double min_dx = grid.stored(0).spacing;
    for (std::size_t k = 1; k < grid.rank(); ++k) min_dx = std::min(min_dx, grid.stored(k).spacing);
    if (dt > 0.5 * min_dx / p.c)
        throw Error(ErrorKind::CflViolation, "dt " + std::to_string(dt) + " exceeds 0.5 min(dx)/c");

    const std::size_t steps = detail::step_count(t_end - s0.t, dt, "dt");
    const double h = steps ? (t_end - s0.t) / static_cast<double>(steps) : 0.0;
    const std::size_t n = grid.size();
    const detail::GridOps ops(grid);

    std::vector<double> u(2 * n);
    std::copy(s0.phi.values().begin(), s0.phi.values().end(), u.begin());
    std::copy(s0.phi_t.values().begin(), s0.phi_t.values().end(), u.begin() + static_cast<std::ptrdiff_t>(n));
    const double initial = detail::max_abs(u);

    auto f = [&](double t, const std::vector<double>& state) {
        std::span<const double> phi(state.data(), n);
        std::span<const double> phi_t(state.data() + n, n);
        std::vector<double> src;
        if (source) {
            const Field sf = source(t);
            require_same_layout(grid, sf.grid(), "source");
            src.assign(sf.values().begin(), sf.values().end());
        }
        auto acc = acceleration(ops, phi, phi_t, p, options.terms, src);
        std::vector<double> out(2 * n);
        std::copy(phi_t.begin(), phi_t.end(), out.begin());
        std::copy(acc.begin(), acc.end(), out.begin() + static_cast<std::ptrdiff_t>(n));
        return out;
    };

    ProfileSolution sol;
    sol.variable = "t";
    sol.step = h;
    auto keep = [&](double t) {
        sol.coords.push_back(t);
        sol.profiles.emplace_back(grid, std::vector<double>(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(n)));
        sol.rates.emplace_back(grid, std::vector<double>(u.begin() + static_cast<std::ptrdiff_t>(n), u.end()));
    };
    keep(s0.t);

    double t = s0.t;
    for (std::size_t step = 1; step <= steps; ++step) {
        try {
            detail::rk4_step(u, t, h, f);
        } catch (const Error& e) {
            throw NumericalFailure(e.kind(), e.detail() + " at t=" + std::to_string(t + h), t);
        }
        const double peak = detail::max_abs(u);
        if (!detail::all_finite(u) || (initial > 0.0 && peak > options.blowup_growth * initial))
            throw NumericalFailure(ErrorKind::NonFinite, "potential blow-up at t=" + std::to_string(t + h), t);
        t = s0.t + static_cast<double>(step) * h;
        if (detail::keep_step(step, steps, options.cadence)) keep(t);
    }
    return sol;
}

double wave_energy(const PotentialState& s, const ModelParams& p) {
    const detail::GridOps ops(s.phi.grid());
    const double cell = s.phi.grid().cell_volume();
    double e = 0.0;
    for (double v : s.phi_t.values()) e += v * v;
    double g = 0.0;
    for (std::size_t k = 0; k < ops.rank(); ++k)
        for (double v : ops.deriv(s.phi.values(), k, 1)) g += v * v;
    return (e + p.c * p.c * g) * cell;
}

DensityCorrectors density_correctors(const PotentialState& s, const ModelParams& p) {
    validate_params(p);
    require_same_layout(s.phi.grid(), s.phi_t.grid(), "phi and phi_t");
    const detail::GridOps ops(s.phi.grid());
    const auto axes = ops.all_axes();
    const std::size_t n = s.phi.size();
    const auto lap = ops.laplacian(s.phi.values(), axes);
    std::vector<double> grad2(n, 0.0);
    for (std::size_t k : axes) {
        const auto g = ops.deriv(s.phi.values(), k, 1);
        for (std::size_t i = 0; i < n; ++i) grad2[i] += g[i] * g[i];
    }
    const double c2 = p.c * p.c;
    std::vector<double> rho1(n), rho2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pt = s.phi_t[i];
        rho1[i] = p.rho0 / c2 * pt;
        rho2[i] = -p.rho0 * (p.gamma - 2.0) / (2.0 * c2 * c2) * pt * pt - p.rho0 / (2.0 * c2) * grad2[i] -
                  p.nu / c2 * lap[i];
    }
    return {Field(s.phi.grid(), std::move(rho1)), Field(s.phi.grid(), std::move(rho2))};
}

KuznetsovResiduals kuznetsov_residuals(const PotentialState& s, const Field& phi_tt, const Field& rho1,
                                       const Field& rho2, const ModelParams& p) {
    validate_params(p);
    const Grid& grid = s.phi.grid();
    for (const Field* f : {&s.phi_t, &phi_tt, &rho1, &rho2}) require_same_layout(grid, f->grid(), "residual input");
    const detail::GridOps ops(grid);
    const auto axes = ops.all_axes();
    const std::size_t n = grid.size();
    const double c2 = p.c * p.c;
    const double e = p.eps;

    const auto lap = ops.laplacian(s.phi.values(), axes);
    const auto lap_t = ops.laplacian(s.phi_t.values(), axes);
    std::vector<double> grad2(n, 0.0), grad_dot(n, 0.0);
    for (std::size_t k : axes) {
        const auto g = ops.deriv(s.phi.values(), k, 1);
        const auto gt = ops.deriv(s.phi_t.values(), k, 1);
        for (std::size_t i = 0; i < n; ++i) {
            grad2[i] += g[i] * g[i];
            grad_dot[i] += g[i] * gt[i];
        }
    }

    std::vector<double> mass(n), first(n), second(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pt = s.phi_t[i];
        const double ptt = phi_tt[i];
        const double nonlinear = 2.0 * grad_dot[i] + (p.gamma - 1.0) / c2 * pt * ptt + p.nu / p.rho0 * lap_t[i];
        mass[i] = e * p.rho0 / c2 * (ptt - c2 * lap[i] - e * nonlinear);
        first[i] = c2 * (rho1[i] - p.rho0 / c2 * pt);
        second[i] = c2 * rho2[i] + p.rho0 * (p.gamma - 2.0) / (2.0 * c2) * pt * pt + 0.5 * p.rho0 * grad2[i] +
                    p.nu * lap[i];
    }

    KuznetsovResiduals r{Field(grid, std::move(mass)), {}};
    for (std::size_t k : axes) {
        const auto d1 = ops.deriv(first, k, 1);
        const auto d2 = ops.deriv(second, k, 1);
        std::vector<double> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = e * d1[i] + e * e * d2[i];
        r.momentum.emplace_back(grid, std::move(m));
    }
    return r;
}

}  // namespace nlac
