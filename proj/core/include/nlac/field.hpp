#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlac/grid.hpp"

namespace nlac {

// Real samples on the stored axes of a grid. Immutable once built; every
// constructor rejects non-finite values.
class Field {
public:
    Field() = default;
    Field(Grid grid, std::vector<double> values);

    static Field zeros(const Grid& grid);
    static Field constant(const Grid& grid, double value);

    // f receives the coordinates of a node, one per stored axis.
    template <class F>
    static Field sample(const Grid& grid, F&& f);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    std::vector<double> release() && { return std::move(values_); }

private:
    Grid grid_;
    std::vector<double> values_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field hadamard(const Field& a, const Field& b);

double max_abs(const Field& f);

// sqrt(sum mask * f^2 * cell_volume). The mask must share f's layout and hold
// only 0 or 1.
double field_l2_norm(const Field& f, const Field* mask = nullptr);

// (rho, rho u) on one grid.
struct ConservedState {
    Field rho;
    std::vector<Field> momentum;  // one per stored axis, in grid axis order
};

// Throws NonPositiveDensity or GridMismatch.
void validate_state(const ConservedState& u);

template <class F>
Field Field::sample(const Grid& grid, F&& f) {
    const auto dims = grid.dims();
    const std::size_t rank = dims.size();
    std::vector<double> values(grid.size());
    std::vector<std::size_t> idx(rank, 0);
    std::vector<double> x(rank);
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        for (std::size_t k = 0; k < rank; ++k) x[k] = grid.stored(k).coord(idx[k]);
        values[flat] = f(std::span<const double>(x));
        for (std::size_t k = rank; k-- > 0;) {
            if (++idx[k] < dims[k]) break;
            idx[k] = 0;
        }
    }
    return Field(grid, std::move(values));
}

}  // namespace nlac
