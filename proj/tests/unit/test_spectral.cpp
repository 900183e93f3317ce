#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlac/spectral.hpp"
#include "support.hpp"

using namespace nlac;
using namespace nlac::test;
namespace sp = nlac::spectral;

namespace {

Field harmonic(const Grid& g, double L, int m, bool use_cos) {
    return Field::sample(g, [&](std::span<const double> x) {
        const double a = kTwoPi * m * x.back() / L;
        return use_cos ? std::cos(a) : std::sin(a);
    });
}

}  // namespace

TEST_CASE("first and third derivatives of a resolved harmonic") {
    for (double L : {1.0, 2.5}) {
        const Grid g = line(64, L);
        const auto ax = sp::PeriodicAxisHandle::of(g, "x");
        const Field s = harmonic(g, L, 1, false);
        const double k = kTwoPi / L;
        const Field d1 = sp::d_dx(s, ax, 1);
        CHECK(max_diff(d1, k * harmonic(g, L, 1, true)) < 1e-12);
        const Field d3 = sp::d_dx(s, ax, 3);
        // Roundoff in the top modes is amplified by their k^3, so the bound is
        // taken relative to the amplitude k^3 of the exact result.
        CHECK(max_diff(d3, (-k * k * k) * harmonic(g, L, 1, true)) / (k * k * k) < 1e-10);
    }
}

TEST_CASE("derivatives annihilate constants") {
    const Grid g = plane(8, 3.0, 32, 1.0);
    const auto ax = sp::PeriodicAxisHandle::of(g, "tau");
    for (int order = 1; order <= 4; ++order) CHECK(max_abs(sp::d_dx(Field::constant(g, 3.7), ax, order)) < 1e-13);
}

TEST_CASE("derivative of a single harmonic has no truncation error") {
    const Grid g = line(128, 1.0);
    const auto ax = sp::PeriodicAxisHandle::of(g, "x");
    for (int m : {1, 5, 20, 42}) {
        const double k = kTwoPi * m;
        const Field d = sp::d_dx(harmonic(g, 1.0, m, true), ax, 1);
        CHECK(max_diff(d, (-k) * harmonic(g, 1.0, m, false)) / k < 1e-11);
    }
}

TEST_CASE("derivative output has zero mean") {
    std::mt19937_64 rng(11);
    const Grid g = plane(16, 2.0, 64, 1.0);
    const auto ax = sp::PeriodicAxisHandle::of(g, "tau");
    for (int i = 0; i < 20; ++i) {
        const Field f = random_trig(g, rng, 6, 1.0, false) + Field::constant(g, 0.3);
        const Field d = sp::d_dx(f, ax, 1);
        CHECK(sp::max_line_mean(d.values(), g.dims(), ax.axis_index) < 1e-13);
    }
}

TEST_CASE("antiderivative examples") {
    const double L = 2.0;
    const Grid g = line(64, L);
    const auto ax = sp::PeriodicAxisHandle::of(g, "x");
    const Field a = sp::antiderivative_zero_mean(harmonic(g, L, 1, true), ax);
    CHECK(max_diff(a, (L / kTwoPi) * harmonic(g, L, 1, false)) < 1e-13);
    CHECK(max_abs(sp::antiderivative_zero_mean(Field::zeros(g), ax)) == 0.0);
    CHECK(kind_of([&] { sp::antiderivative_zero_mean(Field::constant(g, 1.0), ax); }) == ErrorKind::NonzeroMean);
}

TEST_CASE("antiderivative after derivative removes only the mean") {
    std::mt19937_64 rng(12);
    const Grid g = plane(8, 4.0, 64, 1.0);
    const auto ax = sp::PeriodicAxisHandle::of(g, "tau");
    for (int i = 0; i < 20; ++i) {
        const Field zero_mean = random_trig(g, rng, 8, 1.0, true);
        const Field f = zero_mean + Field::constant(g, 0.7);
        const Field back = sp::antiderivative_zero_mean(sp::d_dx(f, ax, 1), ax);
        CHECK(max_diff(back, zero_mean) < 1e-11);
    }
}

TEST_CASE("dealiased square") {
    const Grid g = line(64, 1.0);
    const auto ax = sp::PeriodicAxisHandle::of(g, "x");
    CHECK(max_diff(sp::dealiased_square(Field::constant(g, 2.0), ax), Field::constant(g, 4.0)) < 1e-14);
    for (int k = 1; k <= 21; ++k) {
        const Field s = harmonic(g, 1.0, k, false);
        const Field expect = Field::sample(g, [&](std::span<const double> x) {
            return 0.5 * (1.0 - std::cos(2.0 * kTwoPi * k * x[0]));
        });
        const Field sq = sp::dealiased_square(s, ax);
        if (2 * k <= 21) {
            CHECK(max_diff(sq, expect) < 1e-12);
        } else {
            // The doubled harmonic lies above the kept band and is removed.
            CHECK(max_diff(sq, Field::constant(g, 0.5)) < 1e-12);
        }
    }
}

TEST_CASE("dealiasing is a projection that does not increase the norm") {
    std::mt19937_64 rng(13);
    const Grid g = plane(8, 2.0, 64, 1.0);
    const auto ax = sp::PeriodicAxisHandle::of(g, "tau");
    for (int i = 0; i < 20; ++i) {
        const Field f = random_trig(g, rng, 31, 1.0, false, 8);
        const Field once = sp::dealias(f, ax);
        CHECK(field_l2_norm(once) <= field_l2_norm(f) + 1e-14);
        CHECK(max_diff(sp::dealias(once, ax), once) < 1e-14);
    }
}

TEST_CASE("dealiased product is symmetric and matches the square") {
    std::mt19937_64 rng(14);
    const Grid g = plane(8, 2.0, 32, 1.0);
    const auto ax = sp::PeriodicAxisHandle::of(g, "tau");
    const Field f = random_trig(g, rng, 5, 1.0, false);
    const Field h = random_trig(g, rng, 5, 1.0, false);
    CHECK(max_diff(sp::dealiased_product(f, h, ax), sp::dealiased_product(h, f, ax)) < 1e-14);
    CHECK(max_diff(sp::dealiased_product(f, f, ax), sp::dealiased_square(f, ax)) < 1e-14);
}

TEST_CASE("Parseval: physical and modal energies agree") {
    std::mt19937_64 rng(15);
    const Grid g = plane(16, 3.0, 64, 2.0);
    const auto ax = sp::PeriodicAxisHandle::of(g, "tau");
    for (int i = 0; i < 20; ++i) {
        const Field f = random_trig(g, rng, 32, 1.0, false, 6);
        const double phys = field_l2_norm(f);
        const double modal = std::sqrt(sp::spectral_energy(f.values(), g.dims(), ax.axis_index, g.cell_volume()));
        CHECK(std::abs(phys - modal) <= 1e-12 * std::max(1.0, phys));
    }
}

TEST_CASE("derivative along the transverse axis") {
    const Grid g = plane(32, 4.0, 16, 1.0);
    const auto ay = sp::PeriodicAxisHandle::of(g, "y");
    const Field f = Field::sample(g, [](std::span<const double> x) { return std::sin(kTwoPi * x[0] / 4.0) * std::cos(kTwoPi * x[1]); });
    const Field expect = Field::sample(g, [](std::span<const double> x) {
        return (kTwoPi / 4.0) * std::cos(kTwoPi * x[0] / 4.0) * std::cos(kTwoPi * x[1]);
    });
    CHECK(max_diff(sp::d_dx(f, ay, 1), expect) < 1e-12);
}

TEST_CASE("axis handles require periodic axes") {
    const Grid open({Axis::open_axis("x", 8, 0.1)});
    CHECK(kind_of([&] { sp::PeriodicAxisHandle::of(open, "x"); }) == ErrorKind::GridMismatch);
    CHECK(kind_of([&] { sp::PeriodicAxisHandle::of(line(8), "tau"); }) == ErrorKind::GridMismatch);
}

TEST_CASE("tail fraction flags under-resolved fronts") {
    const Grid g = line(64);
    const auto ax = sp::PeriodicAxisHandle::of(g, "x");
    const Field smooth = harmonic(g, 1.0, 1, false);
    CHECK(sp::max_tail_fraction(smooth.values(), g.dims(), ax.axis_index) < 1e-20);
    const Field saw = Field::sample(g, [](std::span<const double> x) { return x[0] - 0.5; });
    CHECK(sp::max_tail_fraction(saw.values(), g.dims(), ax.axis_index) > 1e-2);
}
