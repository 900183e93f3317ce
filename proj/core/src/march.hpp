#pragma once

// Shared explicit marching helpers for the profile solvers.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nlac/errors.hpp"
#include "nlac/profile.hpp"

namespace nlac::detail {

// One classical RK4 step of du/ds = f(s, u) on a flat state vector.
template <class F>
void rk4_step(std::vector<double>& u, double s, double h, F&& f) {
    const std::size_t n = u.size();
    std::vector<double> stage(n);
    const std::vector<double> k1 = f(s, u);
    for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * h * k1[i];
    const std::vector<double> k2 = f(s + 0.5 * h, stage);
    for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * h * k2[i];
    const std::vector<double> k3 = f(s + 0.5 * h, stage);
    for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + h * k3[i];
    const std::vector<double> k4 = f(s + h, stage);
    for (std::size_t i = 0; i < n; ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Number of uniform steps covering [0, span] with step at most h.
inline std::size_t step_count(double span, double h, const char* what) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::Param, what);
    if (!(span >= 0.0) || !std::isfinite(span)) throw Error(ErrorKind::Param, what);
    return static_cast<std::size_t>(std::ceil(span / h - 1e-9));
}

inline bool keep_step(std::size_t step, std::size_t steps, std::size_t cadence) {
    return step == steps || step % std::max<std::size_t>(cadence, 1) == 0;
}

}  // namespace nlac::detail
