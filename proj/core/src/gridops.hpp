#pragma once

// Spectral calculus on raw row-major arrays of a fully or partly periodic grid.

#include <span>
#include <vector>

#include "nlac/grid.hpp"
#include "nlac/spectral.hpp"

namespace nlac::detail {

class GridOps {
public:
    explicit GridOps(const Grid& grid) : dims_(grid.dims()) {
        for (std::size_t k = 0; k < grid.rank(); ++k) {
            const Axis& a = grid.stored(k);
            periodic_.push_back(a.periodic);
            lengths_.push_back(a.length());
        }
    }

    std::size_t rank() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    bool periodic(std::size_t axis) const { return periodic_[axis]; }
    std::size_t n(std::size_t axis) const { return dims_[axis]; }
    double length(std::size_t axis) const { return lengths_[axis]; }

    std::vector<double> apply(std::span<const double> f, std::size_t axis, const spectral::Symbol& sym) const {
        std::vector<double> out(f.size());
        spectral::apply_symbol(f, out, dims_, axis, sym);
        return out;
    }

    std::vector<double> deriv(std::span<const double> f, std::size_t axis, int order) const {
        return apply(f, axis, spectral::derivative_symbol(dims_[axis], lengths_[axis], order));
    }

    std::vector<double> antideriv(std::span<const double> f, std::size_t axis) const {
        return apply(f, axis, spectral::antiderivative_symbol(dims_[axis], lengths_[axis]));
    }

    // Sum of second derivatives over the listed axes.
    std::vector<double> laplacian(std::span<const double> f, std::span<const std::size_t> axes) const {
        std::vector<double> out(f.size(), 0.0);
        for (std::size_t axis : axes) {
            const auto d2 = deriv(f, axis, 2);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += d2[i];
        }
        return out;
    }

    // 2/3-rule filter along every listed axis.
    std::vector<double> dealias(std::span<const double> f, std::span<const std::size_t> axes) const {
        std::vector<double> out(f.begin(), f.end());
        for (std::size_t axis : axes) spectral::apply_symbol(out, out, dims_, axis, spectral::dealias_symbol(dims_[axis]));
        return out;
    }

    std::vector<std::size_t> all_axes() const {
        std::vector<std::size_t> axes(dims_.size());
        for (std::size_t k = 0; k < axes.size(); ++k) axes[k] = k;
        return axes;
    }

private:
    std::vector<std::size_t> dims_;
    std::vector<bool> periodic_;
    std::vector<double> lengths_;
};

}  // namespace nlac::detail
