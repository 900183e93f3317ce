#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlac/validate.hpp"
#include "support.hpp"

using namespace nlac;
using namespace nlac::test;

namespace {

const std::vector<double> kEps{0.2, 0.1, 0.05, 0.025};

ModelParams params(double nu = 0.0, double eps = 0.1) {
    ModelParams p;
    p.nu = nu;
    p.eps = eps;
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Right-going linear acoustic wave of amplitude A on a periodic 1D box.
ConservedState linear_wave(const Grid& g, const ModelParams& p, double A, double t) {
    const double k = kTwoPi;
    const Field rho = Field::sample(g, [&](std::span<const double> x) { return p.rho0 + A * std::sin(k * (x[0] - p.c * t)); });
    const Field u = Field::sample(g, [&](std::span<const double> x) { return p.c / p.rho0 * A * std::sin(k * (x[0] - p.c * t)); });
    return {rho, {hadamard(rho, u)}};
}

}  // namespace

TEST_CASE("scaling fit recovers exact power laws") {
    for (double s : {2.5, 1.0, 0.0, 3.7}) {
        std::vector<double> n;
        for (double e : kEps) n.push_back(0.3 * std::pow(e, s));
        const auto r = scaling_fit(kEps, n);
        CHECK(std::abs(r.fitted_slope - s) < 1e-12);
        CHECK(std::abs(r.fitted_intercept - std::log(0.3)) < 1e-12);
        CHECK(r.residual_of_fit < 1e-12);
    }
}

TEST_CASE("scaling fit is unbiased under multiplicative noise") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double mean = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        std::vector<double> n;
        for (double e : kEps) n.push_back(std::pow(e, 2.5) * (1.0 + 0.05 * u(rng)));
        const double s = scaling_fit(kEps, n).fitted_slope;
        CHECK(std::abs(s - 2.5) < 0.1);
        mean += s / 100.0;
    }
    CHECK(std::abs(mean - 2.5) < 0.02);
}

TEST_CASE("degenerate fits are rejected") {
    const std::vector<double> two{0.1, 0.05}, n2{1.0, 0.5};
    CHECK(kind_of([&] { scaling_fit(two, n2); }) == ErrorKind::DegenerateFit);
    const std::vector<double> up{0.1, 0.2, 0.3}, n3{1.0, 2.0, 3.0};
    CHECK(kind_of([&] { scaling_fit(up, n3); }) == ErrorKind::DegenerateFit);
    const std::vector<double> down{0.3, 0.2, 0.1}, zero{1.0, 0.0, 1.0};
    CHECK(kind_of([&] { scaling_fit(down, zero); }) == ErrorKind::DegenerateFit);
    const std::vector<double> same{1.0, 1.0}, y{0.0, 1.0};
    CHECK(kind_of([&] { fit_line(same, y); }) == ErrorKind::DegenerateFit);
}

TEST_CASE("fit_line") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{1.0, 3.0, 5.0, 7.0};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.rms < 1e-14);
}

TEST_CASE("paraxial norm scale") {
    CHECK(paraxial_norm_scale(0.01, 0) == doctest::Approx(0.1));
    CHECK(paraxial_norm_scale(0.01, 1) == doctest::Approx(std::pow(0.01, 0.75)));
    CHECK(paraxial_norm_scale(0.01, 2) == doctest::Approx(0.01));
}

TEST_CASE("cone difference") {
    const ModelParams p = params();
    const Grid g = plane(8, 4.0, 64, 40.0, "x2", "x1");
    const ConeSpec spec{1.0, 1.0, 0.1, 0.0};
    std::mt19937_64 rng(72);
    const ConservedState a{Field::constant(g, 1.0) + random_trig(g, rng, 3, 0.1, false),
                           {random_trig(g, rng, 3, 0.1, false), random_trig(g, rng, 3, 0.1, false)}};
    const ConservedState b{Field::constant(g, 1.0) + random_trig(g, rng, 3, 0.1, false),
                           {random_trig(g, rng, 3, 0.1, false), random_trig(g, rng, 3, 0.1, false)}};

    const auto same = l2_diff_on_cone(a, a, spec, 0.5);
    CHECK(same.density == 0.0);
    CHECK(same.momentum == 0.0);

    const auto ab = l2_diff_on_cone(a, b, spec, 0.5), ba = l2_diff_on_cone(b, a, spec, 0.5);
    CHECK(ab.density == ba.density);
    CHECK(ab.momentum == ba.momentum);
    CHECK(ab.rss() > 0.0);
    CHECK(ab.sum() == doctest::Approx(ab.density + ab.momentum));
    CHECK(ab.rss() == doctest::Approx(std::hypot(ab.density, ab.momentum)));

    // A constant offset delta on the density gives delta sqrt(cone volume).
    const double delta = 0.01, t = 2.0;
    const ConservedState shifted{a.rho + Field::constant(g, delta), a.momentum};
    const Field mask = cone_mask(spec, t, g);
    double vol = 0.0;
    for (double m : mask.values()) vol += m * g.cell_volume();
    const auto d = l2_diff_on_cone(a, shifted, spec, t);
    CHECK(d.density == doctest::Approx(delta * std::sqrt(vol)).epsilon(1e-12));
    CHECK(d.momentum == 0.0);
    CHECK(l2_diff_on_cone(a, shifted, spec, t, 0.5).density == doctest::Approx(0.5 * d.density));

    // The reconstructed-state overload compares rho_bar u_bar with rho u.
    ReconstructedState r{a.rho, {}};
    for (const auto& m : a.momentum) {
        std::vector<double> u(m.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = m[i] / a.rho[i];
        r.u_bar.emplace_back(g, u);
    }
    const auto rd = l2_diff_on_cone(a, r, spec, t);
    CHECK(rd.density == 0.0);
    CHECK(rd.momentum < 1e-15);

    CHECK(kind_of([&] { l2_diff_on_cone(a, b, spec, 10.0); }) == ErrorKind::EmptyCone);
}

TEST_CASE("ambient states have zero residual") {
    const ModelParams p = params(0.1);
    const Grid g = line(32, 1.0, "x1");
    const ConservedState amb{Field::constant(g, p.rho0), {Field::zeros(g)}};
    const std::vector<ConservedState> series(5, amb);
    const std::vector<double> times{0.0, 0.1, 0.2, 0.3, 0.4};
    const auto r = ansatz_residual_norm(series, times, p, true);
    REQUIRE(r.norms.size() >= 1);
    for (double n : r.norms) CHECK(n == 0.0);
}

TEST_CASE("residual argument checks") {
    const ModelParams p = params();
    const Grid g = line(16, 1.0, "x1");
    const ConservedState amb{Field::constant(g, 1.0), {Field::zeros(g)}};
    const std::vector<ConservedState> two(2, amb), three(3, amb);
    const std::vector<double> t2{0.0, 0.1}, uneven{0.0, 0.1, 0.3};
    CHECK(kind_of([&] { ansatz_residual_norm(two, t2, p, false); }) == ErrorKind::InsufficientSnapshots);
    CHECK(kind_of([&] { ansatz_residual_norm(three, uneven, p, false); }) == ErrorKind::Param);
}

TEST_CASE("linear wave residual is quadratic in the amplitude") {
    // The linear wave solves the linearized system, so only the quadratic
    // terms of the full system remain: halving A quarters the residual.
    const ModelParams p = params();
    const Grid g = line(64, 1.0, "x1");
    const double h = 1e-3;
    std::vector<double> peaks;
    for (double A : {1e-3, 5e-4, 2.5e-4}) {
        std::vector<ConservedState> s;
        std::vector<double> t;
        for (int i = 0; i < 5; ++i) {
            t.push_back(0.2 + i * h);
            s.push_back(linear_wave(g, p, A, t.back()));
        }
        const auto r = ansatz_residual_norm(s, t, p, false);
        peaks.push_back(r.norms.front());
    }
    CHECK(peaks[0] / peaks[1] == doctest::Approx(4.0).epsilon(0.01));
    CHECK(peaks[1] / peaks[2] == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("residual of a computed hydro trajectory is at the time-discretization floor") {
    const ModelParams p = params(0.05);
    const Grid g = line(64, 1.0, "x1");
    const auto u0 = linear_wave(g, p, 0.05, 0.0);
    const double dt = 1e-3;
    const auto traj = solve_hydro(u0, p, 4 * dt, dt, {.scheme = HydroScheme::spectral});
    REQUIRE(traj.states.size() == 5);
    const auto r = ansatz_residual_norm(traj.states, traj.times, p, true);
    // Scale: the tendency itself, ~ k c A.
    const double scale = field_l2_norm(hydro_tendency(u0, p, true).rho);
    for (double n : r.norms) CHECK(n < 1e-8 * scale);
    // The same data with the viscous term omitted leaves an O(eps nu) residual.
    const auto wrong = ansatz_residual_norm(traj.states, traj.times, p, false);
    CHECK(wrong.norms.front() > 1e3 * r.norms.front());
}

TEST_CASE("convergence study statuses and argument checks") {
    const std::vector<std::size_t> spec_res{8, 16, 32};
    const auto s = convergence_study("spectral", "band-limited", spec_res);
    CHECK(s.status == ConvergenceStatus::saturated);
    CHECK(to_string(s.status) == "saturated");

    const std::vector<std::size_t> steps{20, 40, 80};
    const auto n = convergence_study("npe", "gaussian-beam", steps);
    CHECK(n.status == ConvergenceStatus::ok);
    CHECK(std::abs(n.observed_order - 4.0) <= 0.3);

    const std::vector<std::size_t> two{10, 20}, skew{10, 20, 50}, down{40, 20, 10};
    CHECK(kind_of([&] { convergence_study("kzk", "gaussian-beam", two); }) == ErrorKind::Param);
    CHECK(kind_of([&] { convergence_study("kzk", "gaussian-beam", skew); }) == ErrorKind::Param);
    CHECK(kind_of([&] { convergence_study("kzk", "gaussian-beam", down); }) == ErrorKind::Param);
    CHECK(kind_of([&] { convergence_study("kzk", "plane-wave", steps); }) == ErrorKind::Param);
    const std::vector<std::size_t> triple{16, 48, 144};
    CHECK(kind_of([&] { convergence_study("hydro-muscl", "acoustic-pulse", triple); }) == ErrorKind::Param);
}

TEST_CASE("NPE transplant residual of a quiescent profile vanishes") {
    const ModelParams p = params(0.01);
    const Grid g = plane(8, 4.0, 16, 1.0);
    CHECK(max_abs(npe_transplant_residual(Field::zeros(g), p)) == 0.0);
}

TEST_CASE("physical window") {
    SweepConfig cfg;
    for (double eps : {0.1, 0.05}) {
        const auto w = make_window(cfg, eps);
        CHECK((w.n1 & (w.n1 - 1)) == 0);
        CHECK(w.n1 >= cfg.min_n1);
        CHECK(w.period >= 2.0 * (cfg.cone_K / eps + cfg.buffer) - 1e-12);
        CHECK(w.h1 == doctest::Approx(cfg.params.c * cfg.params.period_L / static_cast<double>(cfg.n_tau)));
        CHECK(w.center == doctest::Approx(w.x0 + 0.5 * w.period));
        CHECK(w.grid.stored(0).spacing * std::sqrt(eps) == doctest::Approx(cfg.y_length / static_cast<double>(cfg.n_y)));
    }
}

TEST_CASE("sweep configuration checks") {
    SweepConfig cfg;
    cfg.eps_list = {0.1, 0.2};
    CHECK(detail_of([&] { residual_experiment(cfg, false); }) == "eps list not decreasing");
    cfg.eps_list = {};
    CHECK(kind_of([&] { theorem1_experiment(cfg); }) == ErrorKind::Validation);
    cfg.eps_list = {0.1, 0.05, 0.025};
    cfg.params.nu = 0.0;
    CHECK(kind_of([&] { theorem2_experiment(cfg); }) == ErrorKind::Param);
}

TEST_CASE("large eps is flagged as outside the asymptotic regime") {
    SweepConfig cfg;
    cfg.eps_list = {0.5, 0.4, 0.3};
    cfg.n_y = 32;
    cfg.min_n1 = 32;
    cfg.buffer = 0.5;  // keeps the needed z range short of the inviscid shock distance
    const auto rep = theorem1_experiment(cfg);
    CHECK(rep.out_of_regime);
    CHECK(rep.zero_at_start);
    cfg.eps_list = {0.2, 0.1, 0.05};
    cfg.asymptotic_eps_limit = 0.25;
    CHECK_FALSE(theorem1_experiment(cfg).out_of_regime);
}

TEST_CASE("report files are deterministic and round-trip doubles") {
    const auto dir = std::filesystem::temp_directory_path() / "nlac_validate_reports";
    std::filesystem::create_directories(dir);
    std::vector<double> n;
    for (double e : kEps) n.push_back(std::pow(e, 2.5) * (1.0 + 0.1 * e));
    const auto r = scaling_fit(kEps, n);
    const std::vector<double> ts{1.0, 2.0, 4.0, 8.0};
    const auto a = dir / "a.csv", b = dir / "b.csv";
    write_scaling_csv(a.string(), r, ts, n, n);
    write_scaling_csv(b.string(), r, ts, n, n);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(text.rfind("eps,t_star,err_l2,resid_norm,slope,intercept,fit_residual\n", 0) == 0);
    for (double v : {0.1, 1.0 / 3.0, 2.5e-17, -7.25}) CHECK(std::stod(format_double(v)) == v);
    const std::vector<double> short_col{1.0};
    CHECK(kind_of([&] { write_scaling_csv(a.string(), r, short_col, n, n); }) == ErrorKind::Param);
    CHECK(kind_of([&] { write_scaling_csv((dir / "missing" / "x.csv").string(), r, ts, n, n); }) == ErrorKind::Io);
    std::filesystem::remove_all(dir);
}
