#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "nlac/errors.hpp"
#include "nlac/field.hpp"

namespace nlac::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Grid line(std::size_t n, double length = 1.0, const char* name = "x", double origin = 0.0) {
    return Grid({Axis::periodic_axis(name, n, length, origin)});
}

inline Grid plane(std::size_t n0, double l0, std::size_t n1, double l1, const char* a0 = "y", const char* a1 = "tau") {
    return Grid({Axis::periodic_axis(a0, n0, l0, -0.5 * l0), Axis::periodic_axis(a1, n1, l1)});
}

// Sum of `terms` products of cosines with random low harmonics and phases.
// With zero_mean_last the last-axis harmonic is at least 1, so every line
// along that axis has zero mean.
inline Field random_trig(const Grid& g, std::mt19937_64& rng, int max_mode, double amp, bool zero_mean_last,
                         int terms = 4) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), phase(0.0, kTwoPi);
    const std::size_t rank = g.rank();
    struct Term {
        double a;
        std::vector<int> m;
        std::vector<double> ph;
    };
    std::vector<Term> ts;
    for (int t = 0; t < terms; ++t) {
        Term term{amp * u(rng), {}, {}};
        for (std::size_t k = 0; k < rank; ++k) {
            const int lo = (zero_mean_last && k + 1 == rank) ? 1 : 0;
            term.m.push_back(std::uniform_int_distribution<int>(lo, max_mode)(rng));
            term.ph.push_back(phase(rng));
        }
        ts.push_back(term);
    }
    return Field::sample(g, [&](std::span<const double> x) {
        double s = 0.0;
        for (const auto& term : ts) {
            double v = term.a;
            for (std::size_t k = 0; k < rank; ++k)
                v *= std::cos(kTwoPi * term.m[k] * (x[k] - g.stored(k).origin) / g.stored(k).length() + term.ph[k]);
            s += v;
        }
        return s;
    });
}

inline double max_diff(const Field& a, const Field& b) { return max_abs(a - b); }

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    throw std::runtime_error("expected an nlac::Error");
}

template <class F>
std::string detail_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.detail();
    }
    throw std::runtime_error("expected an nlac::Error");
}

}  // namespace nlac::test
