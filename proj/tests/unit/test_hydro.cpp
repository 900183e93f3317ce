#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlac/hydro.hpp"
#include "support.hpp"

using namespace nlac;
using namespace nlac::test;

namespace {

ModelParams params(double nu = 0.0, double eps = 0.1) {
    ModelParams p;
    p.rho0 = 1.0;
    p.c = 1.0;
    p.gamma = 1.4;
    p.nu = nu;
    p.eps = eps;
    return p;
}

Grid cells(std::size_t n, double L = 1.0) { return line(n, L, "x1", 0.5 * L / static_cast<double>(n)); }

template <class Rho, class Mom>
ConservedState state1d(const Grid& g, Rho rho, Mom mom) {
    return {Field::sample(g, [&](std::span<const double> x) { return rho(x[0]); }),
            {Field::sample(g, [&](std::span<const double> x) { return mom(x[0]); })}};
}

// Centroid of the density perturbation on [0, 1).
double centroid(const Field& rho, double rho0) {
    double w = 0.0, s = 0.0;
    const Axis& ax = rho.grid().stored(0);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        w += rho[i] - rho0;
        s += (rho[i] - rho0) * ax.coord(i);
    }
    return s / w;
}

}  // namespace

TEST_CASE("pressure law") {
    ModelParams p = params();
    const Grid g = cells(8);
    CHECK(max_diff(pressure(Field::constant(g, p.rho0), p, 2.5), Field::constant(g, 2.5)) == 0.0);
    const double h = 1e-6;
    const double dp = (pressure_at(p.rho0 + h, p) - pressure_at(p.rho0 - h, p)) / (2.0 * h);
    CHECK(std::abs(dp - p.c * p.c) <= 1e-6 * p.c * p.c);
    p.gamma = 3.0;
    CHECK(pressure_at(1.1, p, 0.7) == doctest::Approx(0.7 + 0.11).epsilon(1e-14));
    CHECK(sound_speed_at(p.rho0, p) == doctest::Approx(p.c));
    CHECK(kind_of([&] { pressure(Field::constant(g, -0.1), p); }) == ErrorKind::NonPositiveDensity);
}

TEST_CASE("flux of a resting fluid") {
    const ModelParams p = params();
    const Grid g({Axis::periodic_axis("x2", 8, 1.0), Axis::periodic_axis("x1", 8, 1.0)});
    std::mt19937_64 rng(61);
    const Field rho = Field::constant(g, 1.0) + random_trig(g, rng, 2, 0.1, false);
    const auto F = euler_flux({rho, {Field::zeros(g), Field::zeros(g)}}, p);
    const Field pr = pressure(rho, p);
    for (std::size_t d = 0; d < 2; ++d) {
        CHECK(max_abs(F[d].mass) == 0.0);
        for (std::size_t j = 0; j < 2; ++j) CHECK(max_diff(F[d].momentum[j], d == j ? pr : Field::zeros(g)) == 0.0);
    }
}

TEST_CASE("flux matches a scalar oracle on random states") {
    const ModelParams p = params();
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> ur(0.5, 1.5), um(-0.5, 0.5);
    const Grid g = cells(64);
    std::vector<double> r(64), m(64);
    for (std::size_t i = 0; i < 64; ++i) {
        r[i] = ur(rng);
        m[i] = um(rng);
    }
    const ConservedState u{Field(g, r), {Field(g, m)}};
    const auto F = euler_flux(u, p);
    for (std::size_t i = 0; i < 64; ++i) {
        const double d = r[i] - p.rho0;
        const double press = p.c * p.c * d + 0.5 * (p.gamma - 1.0) * p.c * p.c / p.rho0 * d * d;
        CHECK(F[0].mass[i] == m[i]);
        CHECK(std::abs(F[0].momentum[0][i] - (m[i] * m[i] / r[i] + press)) <= 1e-14 * std::max(1.0, std::abs(press)));
    }
}

TEST_CASE("uniform states are preserved") {
    const ModelParams p = params(0.05);
    const Grid g({Axis::periodic_axis("x2", 16, 2.0), Axis::periodic_axis("x1", 32, 1.0)});
    const ConservedState u{Field::constant(g, 1.2), {Field::constant(g, 0.3), Field::constant(g, -0.1)}};
    for (auto scheme : {HydroScheme::muscl, HydroScheme::spectral}) {
        const auto next = step_hydro(u, p, 0.005, {.scheme = scheme});
        CHECK(max_diff(next.rho, u.rho) < 1e-15);
        CHECK(max_diff(next.momentum[0], u.momentum[0]) < 1e-15);
        CHECK(max_diff(next.momentum[1], u.momentum[1]) < 1e-15);
    }
}

TEST_CASE("ambient data stays ambient") {
    const ModelParams p = params(0.01);
    const Grid g = cells(32);
    const ConservedState u{Field::constant(g, 1.0), {Field::zeros(g)}};
    const auto traj = solve_hydro(u, p, 1.0, 0.01, {.cadence = 10});
    for (const auto& s : traj.states) {
        CHECK(max_diff(s.rho, u.rho) == 0.0);
        CHECK(max_abs(s.momentum[0]) == 0.0);
    }
}

TEST_CASE("time step above the stability limit is rejected") {
    const ModelParams p = params();
    const Grid g = cells(32);
    const ConservedState u{Field::constant(g, 1.0), {Field::zeros(g)}};
    const double limit = hydro_dt_limit(u, p);
    CHECK(limit == doctest::Approx(0.5 / 32.0));
    CHECK(kind_of([&] { step_hydro(u, p, 1.01 * limit); }) == ErrorKind::CflViolation);
    CHECK(kind_of([&] { solve_hydro(u, p, 10.0 * 1.01 * limit, 1.01 * limit); }) == ErrorKind::CflViolation);
}

TEST_CASE("linear acoustic pulse travels at the sound speed") {
    ModelParams p = params();
    p.c = 1.3;
    const double A = 1e-6;
    const Grid g = cells(256);
    auto bump = [](double x) { return std::exp(-std::pow((x - 0.25) / 0.05, 2)); };
    const auto u0 = state1d(g, [&](double x) { return p.rho0 + A * bump(x); }, [&](double x) { return p.c * A * bump(x); });
    for (auto scheme : {HydroScheme::muscl, HydroScheme::spectral}) {
        const double t = 0.5 / p.c;
        const auto traj = solve_hydro(u0, p, t, 0.4 / 256.0 / p.c, {.scheme = scheme, .cadence = 1000000});
        const double speed = (centroid(traj.states.back().rho, p.rho0) - centroid(u0.rho, p.rho0)) / t;
        CHECK(std::abs(speed - p.c) <= 0.01 * p.c);
    }
    // After a full transit the pulse is back where it started.
    const auto full = solve_hydro(u0, p, 1.0 / p.c, 0.4 / 256.0 / p.c, {.scheme = HydroScheme::spectral, .cadence = 1000000});
    const double shift = centroid(full.states.back().rho, p.rho0) - centroid(u0.rho, p.rho0);
    CHECK(std::abs(shift) <= 0.01);
}

TEST_CASE("smooth compression agrees with a fine-grid reference before shocking") {
    const ModelParams p = params();
    const double A = 0.05;
    auto rho = [&](double x) { return p.rho0 + A * std::sin(kTwoPi * x); };
    auto mom = [&](double x) { return rho(x) * p.c * (rho(x) - p.rho0) / p.rho0; };
    const double t_end = 0.5;  // shock forms near t = 1 / ((gamma+1)/2 k A c) = 2.65
    const Grid gc = cells(512), gf = cells(2048);
    const auto coarse = solve_hydro(state1d(gc, rho, mom), p, t_end, 5e-4, {.cadence = 1000000});
    const auto fine = solve_hydro(state1d(gf, rho, mom), p, t_end, 1.25e-4, {.cadence = 1000000});
    std::vector<double> restricted(512);
    for (std::size_t i = 0; i < 512; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 4; ++j) s += fine.states.back().rho[4 * i + j];
        restricted[i] = 0.25 * s;
    }
    const Field ref(gc, restricted);
    const double err = field_l2_norm(coarse.states.back().rho - ref);
    const double scale = field_l2_norm(ref - Field::constant(gc, p.rho0));
    CHECK(err / scale < 1e-3);
}

TEST_CASE("mass and momentum are conserved over 10^4 steps") {
    const ModelParams p = params();
    const Grid g({Axis::periodic_axis("x2", 8, 1.0), Axis::periodic_axis("x1", 16, 1.0)});
    std::mt19937_64 rng(63);
    const ConservedState u0{Field::constant(g, 1.0) + random_trig(g, rng, 2, 0.05, false),
                            {Field::constant(g, 0.05) + random_trig(g, rng, 2, 0.02, false),
                             Field::constant(g, 0.1) + random_trig(g, rng, 2, 0.02, false)}};
    for (auto scheme : {HydroScheme::muscl, HydroScheme::spectral}) {
        const auto traj = solve_hydro(u0, p, 10000 * 0.004, 0.004, {.scheme = scheme, .cadence = 100000});
        REQUIRE(traj.ledger.size() == 10001);
        const auto& first = traj.ledger.front();
        double worst_mass = 0.0, worst_mom = 0.0;
        for (const auto& row : traj.ledger) {
            worst_mass = std::max(worst_mass, std::abs(row.mass - first.mass) / std::abs(first.mass));
            for (std::size_t k = 0; k < 2; ++k)
                worst_mom = std::max(worst_mom, std::abs(row.momentum[k] - first.momentum[k]) / std::abs(first.momentum[k]));
        }
        CHECK(worst_mass < 1e-12);
        CHECK(worst_mom < 1e-12);
    }
}

TEST_CASE("viscous energy is nonincreasing") {
    const ModelParams p = params(0.5, 0.1);
    const Grid g({Axis::periodic_axis("x2", 16, 1.0), Axis::periodic_axis("x1", 16, 1.0)});
    std::mt19937_64 rng(64);
    const ConservedState u0{Field::constant(g, 1.0) + random_trig(g, rng, 2, 0.02, false),
                            {random_trig(g, rng, 2, 0.02, false), random_trig(g, rng, 2, 0.02, false)}};
    for (auto scheme : {HydroScheme::muscl, HydroScheme::spectral}) {
        const auto traj = solve_hydro(u0, p, 1.0, 0.005, {.scheme = scheme, .cadence = 1000});
        for (std::size_t i = 1; i < traj.ledger.size(); ++i)
            CHECK(traj.ledger[i].energy <= traj.ledger[i - 1].energy * (1.0 + 1e-14));
        CHECK(traj.ledger.back().energy < traj.ledger.front().energy);
    }
}

TEST_CASE("gradient of amplitude-eps data stays of order eps up to t = 1/eps") {
    const double eps = 0.05;
    const ModelParams p = params(0.1, eps);
    const Grid g = cells(64);
    auto rho = [&](double x) { return 1.0 + eps * std::sin(kTwoPi * x); };
    auto mom = [&](double) { return 0.0; };
    const auto traj = solve_hydro(state1d(g, rho, mom), p, 1.0 / eps, 0.005, {.scheme = HydroScheme::spectral, .cadence = 50});
    double worst = 0.0;
    for (const auto& s : traj.states) {
        const Axis& ax = g.stored(0);
        for (std::size_t i = 0; i < s.rho.size(); ++i) {
            const std::size_t j = (i + 1) % s.rho.size();
            const double u_i = s.momentum[0][i] / s.rho[i], u_j = s.momentum[0][j] / s.rho[j];
            worst = std::max(worst, std::abs(u_j - u_i) / ax.spacing);
        }
    }
    CHECK(worst < 10.0 * kTwoPi * eps);
}

TEST_CASE("cone mask") {
    const ModelParams p = params();
    const Grid g = line(256, 40.0, "x1", -20.0);
    ConeSpec spec{1.0, 2.0, 0.1, 0.0};
    CHECK_NOTHROW(validate_cone(spec, p));
    const Field m = cone_mask(spec, 1.0, g);
    const Axis& ax = g.stored(0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(m[i] == (std::abs(ax.coord(i)) <= 8.0 ? 1.0 : 0.0));

    const Field m0 = cone_mask(spec, 0.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(m0[i] == (std::abs(ax.coord(i)) <= 10.0 ? 1.0 : 0.0));

    const double apex = spec.K / (spec.eps * spec.M);
    const Field narrow = cone_mask(spec, apex * (1.0 - 1e-9), g);
    double width = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) width += narrow[i] * ax.spacing;
    CHECK(width <= ax.spacing);
    CHECK(kind_of([&] { cone_mask(spec, apex, g); }) == ErrorKind::EmptyCone);

    spec.M = 0.5;
    CHECK(detail_of([&] { validate_cone(spec, p); }) == "M");
    spec = {0.0, 2.0, 0.1, 0.0};
    CHECK(detail_of([&] { validate_cone(spec, p); }) == "K");
}
