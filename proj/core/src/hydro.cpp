#include "nlac/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridops.hpp"
#include "march.hpp"
#include "nlac/errors.hpp"

namespace nlac {

using spectral::operator*;

namespace {

struct Layout {
    Grid grid;
    std::vector<std::size_t> dims;
    std::vector<double> dx;
    std::size_t N = 0;  // points per component
    std::size_t d = 0;  // spatial dimension

    explicit Layout(const Grid& g) : grid(g), dims(g.dims()), N(g.size()), d(g.rank()) {
        for (std::size_t k = 0; k < d; ++k) {
            if (!g.stored(k).periodic) throw Error(ErrorKind::GridMismatch, "hydro grid must be periodic");
            dx.push_back(g.stored(k).spacing);
        }
    }

    std::size_t stride(std::size_t axis) const {
        std::size_t s = 1;
        for (std::size_t k = axis + 1; k < d; ++k) s *= dims[k];
        return s;
    }

    template <class F>
    void for_each_line(std::size_t axis, F&& f) const {
        const std::size_t s = stride(axis), n = dims[axis];
        std::size_t outer = 1;
        for (std::size_t k = 0; k < axis; ++k) outer *= dims[k];
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < s; ++i) f(o * n * s + i, s, n);
    }
};

std::vector<double> pack(const ConservedState& u) {
    const std::size_t N = u.rho.size();
    std::vector<double> v((1 + u.momentum.size()) * N);
    std::copy(u.rho.values().begin(), u.rho.values().end(), v.begin());
    for (std::size_t j = 0; j < u.momentum.size(); ++j)
        std::copy(u.momentum[j].values().begin(), u.momentum[j].values().end(),
                  v.begin() + static_cast<std::ptrdiff_t>((1 + j) * N));
    return v;
}

ConservedState unpack(const std::vector<double>& v, const Layout& L) {
    auto component = [&](std::size_t c) {
        return Field(L.grid, std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(c * L.N),
                                                 v.begin() + static_cast<std::ptrdiff_t>((c + 1) * L.N)));
    };
    ConservedState u{component(0), {}};
    for (std::size_t j = 0; j < L.d; ++j) u.momentum.push_back(component(1 + j));
    return u;
}

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

void require_density(double rho) {
    if (!(rho > 0.0)) throw Error(ErrorKind::NonPositiveDensity, "density " + std::to_string(rho));
}

// Physical flux along `axis` and the largest signal speed for a state w.
double point_flux(const double* w, std::size_t d, std::size_t axis, const ModelParams& p, double p0, double* f) {
    const double rho = w[0];
    require_density(rho);
    const double ua = w[1 + axis] / rho;
    f[0] = w[1 + axis];
    for (std::size_t j = 0; j < d; ++j) f[1 + j] = w[1 + j] * ua;
    f[1 + axis] += pressure_at(rho, p, p0);
    return std::abs(ua) + sound_speed_at(rho, p);
}

std::vector<double> muscl_tendency(const std::vector<double>& U, const Layout& L, const ModelParams& p,
                                   const HydroOptions& o) {
    const std::size_t C = 1 + L.d;
    std::vector<double> out(U.size(), 0.0);
    for (std::size_t axis = 0; axis < L.d; ++axis) {
        const double inv_dx = 1.0 / L.dx[axis];
        L.for_each_line(axis, [&](std::size_t base, std::size_t s, std::size_t n) {
            std::vector<double> w(C * n), slope(C * n), flux(C * n);
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t i = 0; i < n; ++i) w[c * n + i] = U[c * L.N + base + i * s];
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t i = 0; i < n; ++i) {
                    const double left = w[c * n + i] - w[c * n + (i + n - 1) % n];
                    const double right = w[c * n + (i + 1) % n] - w[c * n + i];
                    slope[c * n + i] = minmod(left, right);
                }
            std::vector<double> wl(C), wr(C), fl(C), fr(C);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t ip = (i + 1) % n;
                for (std::size_t c = 0; c < C; ++c) {
                    wl[c] = w[c * n + i] + 0.5 * slope[c * n + i];
                    wr[c] = w[c * n + ip] - 0.5 * slope[c * n + ip];
                }
                const double sl = point_flux(wl.data(), L.d, axis, p, o.p0, fl.data());
                const double sr = point_flux(wr.data(), L.d, axis, p, o.p0, fr.data());
                const double alpha = std::max(sl, sr);
                for (std::size_t c = 0; c < C; ++c) flux[c * n + i] = 0.5 * (fl[c] + fr[c]) - 0.5 * alpha * (wr[c] - wl[c]);
            }
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t i = 0; i < n; ++i)
                    out[c * L.N + base + i * s] -= (flux[c * n + i] - flux[c * n + (i + n - 1) % n]) * inv_dx;
        });
    }
    if (o.viscous && p.nu > 0.0) {
        const double k = p.eps * p.nu;
        for (std::size_t j = 0; j < L.d; ++j) {
            std::vector<double> u(L.N);
            for (std::size_t i = 0; i < L.N; ++i) u[i] = U[(1 + j) * L.N + i] / U[i];
            for (std::size_t axis = 0; axis < L.d; ++axis) {
                const double inv = k / (L.dx[axis] * L.dx[axis]);
                L.for_each_line(axis, [&](std::size_t base, std::size_t s, std::size_t n) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const double um = u[base + ((i + n - 1) % n) * s];
                        const double u0 = u[base + i * s];
                        const double up = u[base + ((i + 1) % n) * s];
                        out[(1 + j) * L.N + base + i * s] += inv * (up - 2.0 * u0 + um);
                    }
                });
            }
        }
    }
    return out;
}

std::vector<double> spectral_tendency(const std::vector<double>& U, const Layout& L, const ModelParams& p,
                                      bool viscous, double p0) {
    const detail::GridOps ops(L.grid);
    std::vector<spectral::Symbol> d1, d2;
    for (std::size_t a = 0; a < L.d; ++a) {
        const auto mask = spectral::dealias_symbol(L.dims[a]);
        d1.push_back(spectral::derivative_symbol(L.dims[a], ops.length(a), 1) * mask);
        d2.push_back(spectral::derivative_symbol(L.dims[a], ops.length(a), 2) * mask);
    }
    const std::size_t N = L.N;
    std::span<const double> rho(U.data(), N);
    std::vector<std::vector<double>> u(L.d, std::vector<double>(N));
    std::vector<double> P(N);
    for (std::size_t i = 0; i < N; ++i) {
        require_density(rho[i]);
        P[i] = pressure_at(rho[i], p, p0);
        for (std::size_t j = 0; j < L.d; ++j) u[j][i] = U[(1 + j) * N + i] / rho[i];
    }
    std::vector<double> out(U.size(), 0.0);
    for (std::size_t a = 0; a < L.d; ++a) {
        std::span<const double> ma(U.data() + (1 + a) * N, N);
        const auto dm = ops.apply(ma, a, d1[a]);
        for (std::size_t i = 0; i < N; ++i) out[i] -= dm[i];
        for (std::size_t j = 0; j < L.d; ++j) {
            std::vector<double> f(N);
            for (std::size_t i = 0; i < N; ++i) f[i] = ma[i] * u[j][i] + (a == j ? P[i] : 0.0);
            const auto df = ops.apply(f, a, d1[a]);
            for (std::size_t i = 0; i < N; ++i) out[(1 + j) * N + i] -= df[i];
        }
    }
    if (viscous && p.nu > 0.0) {
        const double k = p.eps * p.nu;
        for (std::size_t j = 0; j < L.d; ++j)
            for (std::size_t a = 0; a < L.d; ++a) {
                const auto lap = ops.apply(u[j], a, d2[a]);
                for (std::size_t i = 0; i < N; ++i) out[(1 + j) * N + i] += k * lap[i];
            }
    }
    return out;
}

double max_signal_rate(const std::vector<double>& U, const Layout& L, const ModelParams& p) {
    double rate = 0.0;
    for (std::size_t a = 0; a < L.d; ++a) {
        double smax = 0.0;
        for (std::size_t i = 0; i < L.N; ++i) {
            const double rho = U[i];
            require_density(rho);
            smax = std::max(smax, std::abs(U[(1 + a) * L.N + i] / rho) + sound_speed_at(rho, p));
        }
        rate += smax / L.dx[a];
    }
    return rate;
}

double dt_limit(const std::vector<double>& U, const Layout& L, const ModelParams& p, const HydroOptions& o) {
    double limit = o.cfl / max_signal_rate(U, L, p);
    if (o.viscous && p.nu > 0.0) {
        double rho_min = U[0];
        for (std::size_t i = 0; i < L.N; ++i) rho_min = std::min(rho_min, U[i]);
        double sum = 0.0;
        for (double h : L.dx) sum += 1.0 / (h * h);
        limit = std::min(limit, o.cfl * rho_min / (2.0 * p.eps * p.nu * sum));
    }
    return limit;
}

std::vector<double> advance(const std::vector<double>& U, const Layout& L, const ModelParams& p, double dt,
                            const HydroOptions& o) {
    const double limit = dt_limit(U, L, p, o);
    if (dt > limit)
        throw Error(ErrorKind::CflViolation, "dt " + std::to_string(dt) + " exceeds limit " + std::to_string(limit));
    const std::size_t n = U.size();
    if (o.scheme == HydroScheme::muscl) {
        const auto k1 = muscl_tendency(U, L, p, o);
        std::vector<double> U1(n);
        for (std::size_t i = 0; i < n; ++i) U1[i] = U[i] + dt * k1[i];
        const auto k2 = muscl_tendency(U1, L, p, o);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * U[i] + 0.5 * (U1[i] + dt * k2[i]);
        return out;
    }
    std::vector<double> out = U;
    detail::rk4_step(out, 0.0, dt, [&](double, const std::vector<double>& s) {
        return spectral_tendency(s, L, p, o.viscous, o.p0);
    });
    return out;
}

}  // namespace

void validate_cone(const ConeSpec& spec, const ModelParams& p) {
    if (!(spec.K > 0.0)) throw Error(ErrorKind::Param, "K");
    if (!(spec.M >= p.c)) throw Error(ErrorKind::Param, "M");
    if (!(spec.eps > 0.0 && spec.eps < 1.0)) throw Error(ErrorKind::Param, "eps");
}

Field cone_mask(const ConeSpec& spec, double t, const Grid& grid) {
    if (!(spec.K > 0.0)) throw Error(ErrorKind::Param, "K");
    if (!(spec.M > 0.0)) throw Error(ErrorKind::Param, "M");
    const double half = spec.K / spec.eps - spec.M * t;
    if (t >= spec.K / (spec.eps * spec.M) || half <= 0.0)
        throw Error(ErrorKind::EmptyCone, "t=" + std::to_string(t) + " is past the cone apex");
    const std::size_t axis = grid.rank() - 1;
    return Field::sample(grid, [&](std::span<const double> x) {
        return std::abs(x[axis] - spec.center) <= half ? 1.0 : 0.0;
    });
}

double pressure_at(double rho, const ModelParams& p, double p0) {
    const double d = rho - p.rho0;
    return p0 + p.c * p.c * d + (p.gamma - 1.0) * p.c * p.c / (2.0 * p.rho0) * d * d;
}

Field pressure(const Field& rho, const ModelParams& p, double p0) {
    std::vector<double> out(rho.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        require_density(rho[i]);
        out[i] = pressure_at(rho[i], p, p0);
    }
    return Field(rho.grid(), std::move(out));
}

double sound_speed_at(double rho, const ModelParams& p) {
    const double dp = p.c * p.c * (1.0 + (p.gamma - 1.0) * (rho - p.rho0) / p.rho0);
    if (!(dp > 0.0)) throw Error(ErrorKind::NonPositiveDensity, "loss of hyperbolicity at density " + std::to_string(rho));
    return std::sqrt(dp);
}

std::vector<FluxSet> euler_flux(const ConservedState& u, const ModelParams& p) {
    validate_state(u);
    const Grid& g = u.rho.grid();
    const std::size_t d = g.rank(), N = g.size();
    std::vector<FluxSet> out;
    for (std::size_t a = 0; a < d; ++a) {
        std::vector<double> mass(u.momentum[a].values().begin(), u.momentum[a].values().end());
        FluxSet fs{Field(g, std::move(mass)), {}};
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> f(N);
            for (std::size_t i = 0; i < N; ++i) {
                f[i] = u.momentum[a][i] * u.momentum[j][i] / u.rho[i];
                if (a == j) f[i] += pressure_at(u.rho[i], p);
            }
            fs.momentum.emplace_back(g, std::move(f));
        }
        out.push_back(std::move(fs));
    }
    return out;
}

double hydro_dt_limit(const ConservedState& u, const ModelParams& p, const HydroOptions& options) {
    validate_state(u);
    const Layout L(u.rho.grid());
    return dt_limit(pack(u), L, p, options);
}

ConservedState step_hydro(const ConservedState& u, const ModelParams& p, double dt, const HydroOptions& options) {
    validate_params(p);
    validate_state(u);
    const Layout L(u.rho.grid());
    return unpack(advance(pack(u), L, p, dt, options), L);
}

ConservedState hydro_tendency(const ConservedState& u, const ModelParams& p, bool viscous, double p0) {
    validate_state(u);
    const Layout L(u.rho.grid());
    return unpack(spectral_tendency(pack(u), L, p, viscous, p0), L);
}

double total_mass(const ConservedState& u) {
    double s = 0.0;
    for (double v : u.rho.values()) s += v;
    return s * u.rho.grid().cell_volume();
}

std::vector<double> total_momentum(const ConservedState& u) {
    std::vector<double> out;
    for (const auto& m : u.momentum) {
        double s = 0.0;
        for (double v : m.values()) s += v;
        out.push_back(s * m.grid().cell_volume());
    }
    return out;
}

double total_energy(const ConservedState& u, const ModelParams& p) {
    const double r0 = p.rho0, c2 = p.c * p.c, a = (p.gamma - 1.0) * c2 / (2.0 * r0);
    double s = 0.0;
    for (std::size_t i = 0; i < u.rho.size(); ++i) {
        const double rho = u.rho[i];
        double m2 = 0.0;
        for (const auto& m : u.momentum) m2 += m[i] * m[i];
        const double lr = std::log(rho / r0);
        const double integral = c2 * (lr + r0 / rho - 1.0) + a * (rho - r0 - 2.0 * r0 * lr - r0 * r0 / rho + r0);
        s += 0.5 * m2 / rho + rho * integral;
    }
    return s * u.rho.grid().cell_volume();
}

HydroTrajectory solve_hydro(const ConservedState& u0, const ModelParams& p, double t_end, double dt,
                            const HydroOptions& options) {
    validate_params(p);
    validate_state(u0);
    const Layout L(u0.rho.grid());
    const std::size_t steps = detail::step_count(t_end, dt, "dt");
    const double h = steps ? t_end / static_cast<double>(steps) : 0.0;

    HydroTrajectory traj;
    ConservedState state = u0;
    std::vector<double> U = pack(u0);
    auto record = [&](double t, const ConservedState& s) {
        traj.ledger.push_back({t, total_mass(s), total_momentum(s), total_energy(s, p)});
    };
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    record(0.0, state);

    double t = 0.0;
    for (std::size_t step = 1; step <= steps; ++step) {
        try {
            U = advance(U, L, p, h, options);
            state = unpack(U, L);
        } catch (const Error& e) {
            throw NumericalFailure(e.kind(), e.detail() + " at t=" + std::to_string(t + h), t);
        }
        t = static_cast<double>(step) * h;
        record(t, state);
        if (detail::keep_step(step, steps, options.cadence)) {
            traj.times.push_back(t);
            traj.states.push_back(state);
        }
    }
    return traj;
}

}  // namespace nlac
