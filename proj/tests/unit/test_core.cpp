#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nlac/params.hpp"
#include "nlac/snapshot.hpp"
#include "support.hpp"

using namespace nlac;
using namespace nlac::test;

TEST_CASE("validate_params accepts water-scale constants") {
    const ModelParams p{1000.0, 1500.0, 1.4, 0.001, 1e-5, 1.0};
    const ModelParams q = validate_params(p);
    CHECK(q.rho0 == p.rho0);
    CHECK(q.eps == p.eps);
}

TEST_CASE("validate_params names the violated bound") {
    ModelParams p;
    p.eps = 0.0;
    CHECK(detail_of([&] { validate_params(p); }) == "eps");
    CHECK(kind_of([&] { validate_params(p); }) == ErrorKind::Param);
    p = ModelParams{};
    p.gamma = 1.0;
    CHECK(detail_of([&] { validate_params(p); }) == "gamma");
    p = ModelParams{};
    p.nu = -1e-3;
    CHECK(detail_of([&] { validate_params(p); }) == "nu");
    p = ModelParams{};
    p.eps = 1.0;
    CHECK(detail_of([&] { validate_params(p); }) == "eps");
}

TEST_CASE("validate_params is idempotent") {
    const ModelParams p{2.0, 3.0, 1.2, 0.5, 0.3, 4.0};
    const ModelParams a = validate_params(p);
    const ModelParams b = validate_params(a);
    CHECK(a.rho0 == b.rho0);
    CHECK(a.c == b.c);
    CHECK(a.gamma == b.gamma);
    CHECK(a.nu == b.nu);
    CHECK(a.eps == b.eps);
    CHECK(a.period_L == b.period_L);
}

TEST_CASE("presets") {
    const ModelParams w = preset("water");
    CHECK(w.rho0 == 1000.0);
    CHECK(w.c == 1500.0);
    CHECK(w.eps == 1e-5);
    CHECK(preset("nondim").c == 1.0);
    CHECK(kind_of([] { preset("air"); }) == ErrorKind::Param);
}

TEST_CASE("grid invariants") {
    CHECK(kind_of([] { Grid({Axis::periodic_axis("x", 2, 1.0)}); }) == ErrorKind::GridMismatch);
    CHECK(kind_of([] { Grid({Axis::periodic_axis("x", 12, 1.0)}); }) == ErrorKind::GridMismatch);
    CHECK_NOTHROW(Grid({Axis::open_axis("x", 12, 0.1)}));
    CHECK(kind_of([] {
              Grid({Axis::evolution_axis("t", 8, 0.1), Axis::evolution_axis("z", 8, 0.1), Axis::periodic_axis("x", 8, 1.0)});
          }) == ErrorKind::GridMismatch);

    const Grid g({Axis::evolution_axis("z", 10, 0.1), Axis::periodic_axis("y", 8, 2.0), Axis::periodic_axis("tau", 16, 1.0)});
    CHECK(g.rank() == 2);
    CHECK(g.size() == 128);
    CHECK(g.dims() == std::vector<std::size_t>{8, 16});
    CHECK(g.index_of("tau") == 1);
    CHECK(g.evolution()->name == "z");
    CHECK(g.cell_volume() == doctest::Approx(0.25 / 16.0));
    CHECK(kind_of([&] { g.index_of("q"); }) == ErrorKind::GridMismatch);
}

TEST_CASE("field construction rejects bad values") {
    const Grid g = line(8);
    CHECK(kind_of([&] { Field(g, std::vector<double>(7, 0.0)); }) == ErrorKind::GridMismatch);
    std::vector<double> v(8, 0.0);
    v[3] = std::nan("");
    CHECK(kind_of([&] { Field(g, v); }) == ErrorKind::NonFinite);
    v[3] = INFINITY;
    CHECK(kind_of([&] { Field(g, v); }) == ErrorKind::NonFinite);
}

TEST_CASE("field_l2_norm examples") {
    const Grid unit = line(16);
    CHECK(field_l2_norm(Field::zeros(unit)) == 0.0);
    CHECK(field_l2_norm(Field::constant(unit, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    const Grid g = line(64);
    const Field s = Field::sample(g, [](std::span<const double> x) { return std::sin(kTwoPi * x[0]); });
    CHECK(std::abs(field_l2_norm(s) - 1.0 / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("field_l2_norm masks") {
    const Grid g = line(8);
    const Field f = Field::constant(g, 2.0);
    std::vector<double> m(8, 0.0);
    m[0] = m[1] = 1.0;
    const Field mask(g, m);
    CHECK(field_l2_norm(f, &mask) == doctest::Approx(std::sqrt(4.0 * 2.0 / 8.0)));
    m[2] = 0.5;
    const Field bad(g, m);
    CHECK(kind_of([&] { field_l2_norm(f, &bad); }) == ErrorKind::GridMismatch);
    const Field other = Field::constant(line(16), 1.0);
    CHECK(kind_of([&] { field_l2_norm(f, &other); }) == ErrorKind::GridMismatch);
}

TEST_CASE("field_l2_norm is absolutely homogeneous and satisfies the triangle inequality") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ua(-10.0, 10.0);
    const Grid g = plane(16, 2.0, 32, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Field f = random_trig(g, rng, 5, 1.0, false);
        const Field h = random_trig(g, rng, 5, 1.0, false);
        const double a = ua(rng);
        const double lhs = field_l2_norm(a * f), rhs = std::abs(a) * field_l2_norm(f);
        CHECK(std::abs(lhs - rhs) <= 1e-14 * std::max(1.0, rhs));
        CHECK(field_l2_norm(f + h) <= field_l2_norm(f) + field_l2_norm(h) + 1e-14);
    }
}

TEST_CASE("conserved state validation") {
    const Grid g = line(8);
    CHECK_NOTHROW(validate_state({Field::constant(g, 1.0), {Field::zeros(g)}}));
    CHECK(kind_of([&] { validate_state({Field::constant(g, 0.0), {Field::zeros(g)}}); }) == ErrorKind::NonPositiveDensity);
    CHECK(kind_of([&] { validate_state({Field::constant(g, 1.0), {}}); }) == ErrorKind::GridMismatch);
}

TEST_CASE("AC1 snapshot round trip") {
    std::mt19937_64 rng(7);
    const Grid g = plane(8, 4.0, 16, 1.0);
    const Field f = random_trig(g, rng, 3, 1.0, true);
    CHECK(snapshot_header(g) == "AC1 y,8,0.5,1;tau,16,0.0625,1");
    const auto path = std::filesystem::temp_directory_path() / "nlac_core_snapshot.ac1";
    save_snapshot(path, f);
    const Field back = load_snapshot(path);
    CHECK(back.grid().dims() == g.dims());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

    {
        std::ofstream out(path, std::ios::binary);
        out << "XYZ nothing\n";
    }
    CHECK(kind_of([&] { load_snapshot(path); }) == ErrorKind::Parse);
    {
        std::ofstream out(path, std::ios::binary);
        out << "AC1 x,8,0.125,1\n" << "short";
    }
    CHECK(kind_of([&] { load_snapshot(path); }) == ErrorKind::Parse);
    std::filesystem::remove(path);
    CHECK(kind_of([&] { load_snapshot(path); }) == ErrorKind::Io);
}

TEST_CASE("error messages carry the kind") {
    const Error e(ErrorKind::EmptyCone, "t=3");
    CHECK(std::string(e.what()) == "EmptyCone: t=3");
    const NumericalFailure f(ErrorKind::NonFinite, "blow-up", 0.25);
    CHECK(f.last_good() == 0.25);
    CHECK(f.kind() == ErrorKind::NonFinite);
}
