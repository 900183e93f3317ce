#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "nlac/field.hpp"

namespace nlac::spectral {

// Per-mode multiplier for modes m = 0..n/2 of a real line of length n.
using Symbol = std::vector<std::complex<double>>;

// (i k)^order with k = 2 pi m / length. For odd orders the Nyquist mode is
// zeroed so that the result stays real.
Symbol derivative_symbol(std::size_t n, double length, int order);
// 1 / (i k) with modes 0 and Nyquist set to zero.
Symbol antiderivative_symbol(std::size_t n, double length);
// 1 on modes m <= n/3, 0 above.
Symbol dealias_symbol(std::size_t n);
Symbol operator*(const Symbol& a, const Symbol& b);
Symbol operator+(const Symbol& a, const Symbol& b);
Symbol scaled(const Symbol& a, std::complex<double> s);

// Applies sym along `axis` of a row-major array with extents `dims`.
// `in` and `out` may alias.
void apply_symbol(std::span<const double> in, std::span<double> out, std::span<const std::size_t> dims,
                  std::size_t axis, const Symbol& sym);

// Largest |mean| over all lines along `axis`.
double max_line_mean(std::span<const double> data, std::span<const std::size_t> dims, std::size_t axis);

// Fraction of the energy held by modes n/6 < m <= n/3, maximized over lines
// along `axis`. Grows by orders of magnitude when a front steepens past the
// resolution of the retained band. Lines holding less than kTailLineFloor of
// the most energetic line are measured against that floor.
inline constexpr double kTailLineFloor = 1e-4;
double max_tail_fraction(std::span<const double> data, std::span<const std::size_t> dims, std::size_t axis);

// Sum over all lines of the physical-space energy computed from mode
// amplitudes (Parseval), times `cell` volume.
double spectral_energy(std::span<const double> data, std::span<const std::size_t> dims, std::size_t axis,
                       double cell);

// Trigonometric interpolation along the last (contiguous) axis.
// Coefficients hold n/2 + 1 complex values per line, pre-weighted so that
// f(x) = Re sum_m C_m exp(i 2 pi m x / length).
std::vector<std::complex<double>> interpolation_coefficients(std::span<const double> data, std::size_t n);
void interpolation_phases(double x, double length, std::size_t n, std::span<std::complex<double>> out);
inline double evaluate_interpolant(std::span<const std::complex<double>> coeffs,
                                   std::span<const std::complex<double>> phases) {
    double acc = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m)
        acc += coeffs[m].real() * phases[m].real() - coeffs[m].imag() * phases[m].imag();
    return acc;
}

// ---------------------------------------------------------------------------
// Field-level operations

struct PeriodicAxisHandle {
    std::size_t axis_index = 0;  // stored axis index
    std::size_t n = 0;
    double length = 0.0;

    // Throws GridMismatch unless the named axis exists and is periodic.
    static PeriodicAxisHandle of(const Grid& grid, std::string_view axis_name);
};

Field d_dx(const Field& f, const PeriodicAxisHandle& ax, int order);
// Throws NonzeroMean when |mean of f along ax| >= 1e-10 * max|f| on any line.
Field antiderivative_zero_mean(const Field& f, const PeriodicAxisHandle& ax);
Field dealiased_square(const Field& f, const PeriodicAxisHandle& ax);
Field dealiased_product(const Field& f, const Field& g, const PeriodicAxisHandle& ax);
Field dealias(const Field& f, const PeriodicAxisHandle& ax);

// Zero-mean tolerance used by every antiderivative in the library.
inline constexpr double kZeroMeanTolerance = 1e-10;
void require_zero_mean(std::span<const double> data, std::span<const std::size_t> dims, std::size_t axis,
                       const char* what);

}  // namespace nlac::spectral
