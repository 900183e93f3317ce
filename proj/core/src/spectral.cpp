#include "nlac/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "nlac/errors.hpp"

namespace nlac::spectral {

namespace {

struct Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// The FFTW planner is not thread-safe; plan creation is serialized here and
// executions go through the new-array interface with per-call buffers.
const Plans& plans_for(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, Plans> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    double* real = fftw_alloc_real(n);
    fftw_complex* spec = fftw_alloc_complex(n / 2 + 1);
    const int ni = static_cast<int>(n);
    Plans p;
    p.forward = fftw_plan_dft_r2c_1d(ni, real, spec, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_1d(ni, spec, real, FFTW_ESTIMATE);
    fftw_free(real);
    fftw_free(spec);
    return cache.emplace(n, p).first->second;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

// Scratch for one line transform; allocated per call so concurrent callers
// never share buffers.
struct LineWork {
    explicit LineWork(std::size_t n)
        : n(n),
          plans(plans_for(n)),
          real(fftw_alloc_real(n)),
          spec(reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n / 2 + 1))) {}

    void forward() { fftw_execute_dft_r2c(plans.forward, real.get(), reinterpret_cast<fftw_complex*>(spec.get())); }
    void backward() { fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(spec.get()), real.get()); }

    std::size_t n;
    const Plans& plans;
    std::unique_ptr<double, FftwFree> real;
    std::unique_ptr<std::complex<double>, FftwFree> spec;
};

struct LineGeometry {
    std::size_t n = 0, stride = 1, outer = 1;

    LineGeometry(std::span<const std::size_t> dims, std::size_t axis) {
        if (axis >= dims.size()) throw Error(ErrorKind::GridMismatch, "axis index out of range");
        n = dims[axis];
        for (std::size_t k = axis + 1; k < dims.size(); ++k) stride *= dims[k];
        for (std::size_t k = 0; k < axis; ++k) outer *= dims[k];
    }

    template <class F>
    void for_each_line(F&& f) const {
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < stride; ++i) f(o * n * stride + i);
    }
};

}  // namespace

Symbol derivative_symbol(std::size_t n, double length, int order) {
    Symbol s(n / 2 + 1);
    for (std::size_t m = 0; m <= n / 2; ++m) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / length;
        std::complex<double> v = 1.0;
        for (int i = 0; i < order; ++i) v *= std::complex<double>(0.0, k);
        s[m] = v;
    }
    if (order % 2 != 0) s[n / 2] = 0.0;
    return s;
}

Symbol antiderivative_symbol(std::size_t n, double length) {
    Symbol s(n / 2 + 1, 0.0);
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / length;
        s[m] = 1.0 / std::complex<double>(0.0, k);
    }
    return s;
}

Symbol dealias_symbol(std::size_t n) {
    Symbol s(n / 2 + 1, 0.0);
    for (std::size_t m = 0; m <= n / 3; ++m) s[m] = 1.0;
    return s;
}

Symbol operator*(const Symbol& a, const Symbol& b) {
    Symbol s(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) s[m] = a[m] * b[m];
    return s;
}

Symbol operator+(const Symbol& a, const Symbol& b) {
    Symbol s(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) s[m] = a[m] + b[m];
    return s;
}

Symbol scaled(const Symbol& a, std::complex<double> f) {
    Symbol s(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) s[m] = f * a[m];
    return s;
}

void apply_symbol(std::span<const double> in, std::span<double> out, std::span<const std::size_t> dims,
                  std::size_t axis, const Symbol& sym) {
    const LineGeometry g(dims, axis);
    if (sym.size() != g.n / 2 + 1) throw Error(ErrorKind::GridMismatch, "symbol length does not match axis");
    LineWork w(g.n);
    const double inv_n = 1.0 / static_cast<double>(g.n);
    g.for_each_line([&](std::size_t base) {
        for (std::size_t j = 0; j < g.n; ++j) w.real.get()[j] = in[base + j * g.stride];
        w.forward();
        for (std::size_t m = 0; m <= g.n / 2; ++m) w.spec.get()[m] *= sym[m] * inv_n;
        w.backward();
        for (std::size_t j = 0; j < g.n; ++j) out[base + j * g.stride] = w.real.get()[j];
    });
}

double max_line_mean(std::span<const double> data, std::span<const std::size_t> dims, std::size_t axis) {
    const LineGeometry g(dims, axis);
    double worst = 0.0;
    g.for_each_line([&](std::size_t base) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) s += data[base + j * g.stride];
        worst = std::max(worst, std::abs(s / static_cast<double>(g.n)));
    });
    return worst;
}

double max_tail_fraction(std::span<const double> data, std::span<const std::size_t> dims, std::size_t axis) {
    const LineGeometry g(dims, axis);
    LineWork w(g.n);
    std::vector<std::pair<double, double>> lines;  // (tail, total)
    double peak = 0.0;
    g.for_each_line([&](std::size_t base) {
        for (std::size_t j = 0; j < g.n; ++j) w.real.get()[j] = data[base + j * g.stride];
        w.forward();
        double total = 0.0, tail = 0.0;
        for (std::size_t m = 1; m <= g.n / 3; ++m) {
            const double e = std::norm(w.spec.get()[m]);
            total += e;
            if (m > g.n / 6) tail += e;
        }
        lines.emplace_back(tail, total);
        peak = std::max(peak, total);
    });
    // Lines far below the peak energy would otherwise report roundoff noise.
    const double floor = kTailLineFloor * peak;
    double worst = 0.0;
    for (const auto& [tail, total] : lines) {
        const double denom = std::max(total, floor);
        if (denom > 0.0) worst = std::max(worst, tail / denom);
    }
    return worst;
}

double spectral_energy(std::span<const double> data, std::span<const std::size_t> dims, std::size_t axis,
                       double cell) {
    const LineGeometry g(dims, axis);
    LineWork w(g.n);
    double sum = 0.0;
    g.for_each_line([&](std::size_t base) {
        for (std::size_t j = 0; j < g.n; ++j) w.real.get()[j] = data[base + j * g.stride];
        w.forward();
        for (std::size_t m = 0; m <= g.n / 2; ++m) {
            const double weight = (m == 0 || 2 * m == g.n) ? 1.0 : 2.0;
            sum += weight * std::norm(w.spec.get()[m]);
        }
    });
    return sum / static_cast<double>(g.n) * cell;
}

std::vector<std::complex<double>> interpolation_coefficients(std::span<const double> data, std::size_t n) {
    if (data.size() % n != 0) throw Error(ErrorKind::GridMismatch, "data is not a whole number of lines");
    const std::size_t lines = data.size() / n;
    const std::size_t h = n / 2 + 1;
    std::vector<std::complex<double>> coeffs(lines * h);
    LineWork w(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t l = 0; l < lines; ++l) {
        for (std::size_t j = 0; j < n; ++j) w.real.get()[j] = data[l * n + j];
        w.forward();
        for (std::size_t m = 0; m < h; ++m) {
            const double weight = (m == 0 || 2 * m == n) ? inv_n : 2.0 * inv_n;
            coeffs[l * h + m] = weight * w.spec.get()[m];
        }
    }
    return coeffs;
}

void interpolation_phases(double x, double length, std::size_t n, std::span<std::complex<double>> out) {
    const double theta = 2.0 * std::numbers::pi * x / length;
    for (std::size_t m = 0; m <= n / 2; ++m) {
        const double a = theta * static_cast<double>(m);
        out[m] = {std::cos(a), std::sin(a)};
    }
}

// ---------------------------------------------------------------------------

PeriodicAxisHandle PeriodicAxisHandle::of(const Grid& grid, std::string_view axis_name) {
    const std::size_t k = grid.index_of(axis_name);
    const Axis& a = grid.stored(k);
    if (!a.periodic) throw Error(ErrorKind::GridMismatch, "axis " + a.name + " is not periodic");
    return PeriodicAxisHandle{k, a.n, a.length()};
}

namespace {

void check_handle(const Field& f, const PeriodicAxisHandle& ax) {
    const Grid& g = f.grid();
    if (ax.axis_index >= g.rank()) throw Error(ErrorKind::GridMismatch, "axis handle out of range");
    const Axis& a = g.stored(ax.axis_index);
    if (!a.periodic || a.n != ax.n || std::abs(a.length() - ax.length) > 1e-12 * ax.length)
        throw Error(ErrorKind::GridMismatch, "axis handle does not match field axis " + a.name);
}

Field apply(const Field& f, const PeriodicAxisHandle& ax, const Symbol& sym) {
    check_handle(f, ax);
    const auto dims = f.grid().dims();
    std::vector<double> out(f.size());
    apply_symbol(f.values(), out, dims, ax.axis_index, sym);
    return Field(f.grid(), std::move(out));
}

}  // namespace

void require_zero_mean(std::span<const double> data, std::span<const std::size_t> dims, std::size_t axis,
                       const char* what) {
    double peak = 0.0;
    for (double v : data) peak = std::max(peak, std::abs(v));
    const double mean = max_line_mean(data, dims, axis);
    if (mean > kZeroMeanTolerance * peak)
        throw Error(ErrorKind::NonzeroMean, std::string(what) + " has line mean " + std::to_string(mean));
}

Field d_dx(const Field& f, const PeriodicAxisHandle& ax, int order) {
    if (order <= 0) throw Error(ErrorKind::Param, "order");
    return apply(f, ax, derivative_symbol(ax.n, ax.length, order));
}

Field antiderivative_zero_mean(const Field& f, const PeriodicAxisHandle& ax) {
    check_handle(f, ax);
    const auto dims = f.grid().dims();
    require_zero_mean(f.values(), dims, ax.axis_index, "antiderivative input");
    return apply(f, ax, antiderivative_symbol(ax.n, ax.length));
}

Field dealias(const Field& f, const PeriodicAxisHandle& ax) { return apply(f, ax, dealias_symbol(ax.n)); }

Field dealiased_product(const Field& f, const Field& g, const PeriodicAxisHandle& ax) {
    require_same_layout(f.grid(), g.grid(), "dealiased product");
    const Field a = dealias(f, ax);
    const Field b = dealias(g, ax);
    return dealias(hadamard(a, b), ax);
}

Field dealiased_square(const Field& f, const PeriodicAxisHandle& ax) {
    const Field a = dealias(f, ax);
    return dealias(hadamard(a, a), ax);
}

}  // namespace nlac::spectral
