#pragma once

#include <cmath>

namespace nlac {

// Second-order forward-mode number a + b e1 + c e2 + d e1e2 with
// e1^2 = e2^2 = 0. Seeding x = x0 + e1 + e2 gives f'' in the e1e2 part;
// seeding two variables in e1 and e2 gives the mixed derivative.
struct HyperDual {
    double v = 0.0, e1 = 0.0, e2 = 0.0, e12 = 0.0;

    HyperDual() = default;
    HyperDual(double value) : v(value) {}
    HyperDual(double value, double d1, double d2, double d12) : v(value), e1(d1), e2(d2), e12(d12) {}
};

inline HyperDual operator+(HyperDual a, HyperDual b) { return {a.v + b.v, a.e1 + b.e1, a.e2 + b.e2, a.e12 + b.e12}; }
inline HyperDual operator-(HyperDual a, HyperDual b) { return {a.v - b.v, a.e1 - b.e1, a.e2 - b.e2, a.e12 - b.e12}; }
inline HyperDual operator-(HyperDual a) { return {-a.v, -a.e1, -a.e2, -a.e12}; }
inline HyperDual operator*(HyperDual a, HyperDual b) {
    return {a.v * b.v, a.v * b.e1 + a.e1 * b.v, a.v * b.e2 + a.e2 * b.v,
            a.v * b.e12 + a.e1 * b.e2 + a.e2 * b.e1 + a.e12 * b.v};
}
inline HyperDual operator/(HyperDual a, HyperDual b) {
    const double inv = 1.0 / b.v;
    const HyperDual r{inv, -b.e1 * inv * inv, -b.e2 * inv * inv,
                      (2.0 * b.e1 * b.e2 * inv - b.e12) * inv * inv};
    return a * r;
}

// Applies f with value f0 and derivatives f1, f2 at a.v.
inline HyperDual chain(HyperDual a, double f0, double f1, double f2) {
    return {f0, f1 * a.e1, f1 * a.e2, f1 * a.e12 + f2 * a.e1 * a.e2};
}

inline HyperDual sin(HyperDual a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline HyperDual cos(HyperDual a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline HyperDual exp(HyperDual a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}

}  // namespace nlac
