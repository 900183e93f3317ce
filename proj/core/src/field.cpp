#include "nlac/field.hpp"

#include <cmath>
#include <string>

#include "nlac/errors.hpp"

namespace nlac {

Field::Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw Error(ErrorKind::GridMismatch, "value count " + std::to_string(values_.size()) +
                                                 " does not match grid size " + std::to_string(grid_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "field value is not finite");
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<double>(grid.size(), 0.0)); }

Field Field::constant(const Grid& grid, double value) {
    return Field(grid, std::vector<double>(grid.size(), value));
}

namespace {

template <class Op>
Field combine(const Field& a, const Field& b, Op op, const char* context) {
    require_same_layout(a.grid(), b.grid(), context);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
    return Field(a.grid(), std::move(out));
}

}  // namespace

Field operator+(const Field& a, const Field& b) {
    return combine(a, b, [](double x, double y) { return x + y; }, "field sum");
}

Field operator-(const Field& a, const Field& b) {
    return combine(a, b, [](double x, double y) { return x - y; }, "field difference");
}

Field hadamard(const Field& a, const Field& b) {
    return combine(a, b, [](double x, double y) { return x * y; }, "field product");
}

Field operator*(double s, const Field& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a[i];
    return Field(a.grid(), std::move(out));
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double field_l2_norm(const Field& f, const Field* mask) {
    double sum = 0.0;
    if (mask) {
        require_same_layout(f.grid(), mask->grid(), "norm mask");
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double m = (*mask)[i];
            if (m != 0.0 && m != 1.0) throw Error(ErrorKind::GridMismatch, "mask values must be 0 or 1");
            sum += m * f[i] * f[i];
        }
    } else {
        for (double v : f.values()) sum += v * v;
    }
    return std::sqrt(sum * f.grid().cell_volume());
}

void validate_state(const ConservedState& u) {
    if (u.momentum.size() != u.rho.grid().rank())
        throw Error(ErrorKind::GridMismatch, "momentum component count differs from grid rank");
    for (const auto& m : u.momentum) require_same_layout(u.rho.grid(), m.grid(), "momentum grid");
    for (double r : u.rho.values())
        if (!(r > 0.0)) throw Error(ErrorKind::NonPositiveDensity, "density " + std::to_string(r));
}

}  // namespace nlac
