#include "nlac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "nlac/errors.hpp"

namespace nlac {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Axis Axis::periodic_axis(std::string name, std::size_t n, double length, double origin) {
    return Axis{std::move(name), n, length / static_cast<double>(n), true, false, origin};
}

Axis Axis::open_axis(std::string name, std::size_t n, double spacing, double origin) {
    return Axis{std::move(name), n, spacing, false, false, origin};
}

Axis Axis::evolution_axis(std::string name, std::size_t n, double spacing, double origin) {
    return Axis{std::move(name), n, spacing, false, true, origin};
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    std::size_t evolution_count = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const Axis& a = axes_[i];
        if (a.evolution) {
            ++evolution_count;
            continue;
        }
        if (a.n < 4) throw Error(ErrorKind::GridMismatch, "axis " + a.name + " has fewer than 4 points");
        if (!(std::isfinite(a.spacing) && a.spacing > 0.0))
            throw Error(ErrorKind::GridMismatch, "axis " + a.name + " has non-positive spacing");
        if (a.periodic && !is_power_of_two(a.n))
            throw Error(ErrorKind::GridMismatch, "periodic axis " + a.name + " size is not a power of two");
        stored_.push_back(i);
    }
    if (evolution_count > 1) throw Error(ErrorKind::GridMismatch, "more than one evolution axis");
}

std::vector<std::size_t> Grid::dims() const {
    std::vector<std::size_t> d;
    d.reserve(stored_.size());
    for (auto i : stored_) d.push_back(axes_[i].n);
    return d;
}

std::size_t Grid::size() const {
    if (stored_.empty()) return 0;
    std::size_t s = 1;
    for (auto i : stored_) s *= axes_[i].n;
    return s;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (auto i : stored_) v *= axes_[i].spacing;
    return v;
}

std::optional<std::size_t> Grid::find(std::string_view name) const {
    for (std::size_t k = 0; k < stored_.size(); ++k)
        if (axes_[stored_[k]].name == name) return k;
    return std::nullopt;
}

std::size_t Grid::index_of(std::string_view name) const {
    if (auto k = find(name)) return *k;
    throw Error(ErrorKind::GridMismatch, "no stored axis named " + std::string(name));
}

const Axis* Grid::evolution() const {
    for (const auto& a : axes_)
        if (a.evolution) return &a;
    return nullptr;
}

Grid Grid::shifted(std::size_t stored_axis, double delta) const {
    std::vector<Axis> axes = axes_;
    axes[stored_.at(stored_axis)].origin += delta;
    return Grid(std::move(axes));
}

Grid Grid::without_evolution() const {
    std::vector<Axis> axes;
    for (auto i : stored_) axes.push_back(axes_[i]);
    return Grid(std::move(axes));
}

bool Grid::operator==(const Grid& other) const {
    if (axes_.size() != other.axes_.size()) return false;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const Axis& a = axes_[i];
        const Axis& b = other.axes_[i];
        if (a.name != b.name || a.n != b.n || a.spacing != b.spacing || a.periodic != b.periodic ||
            a.evolution != b.evolution || a.origin != b.origin)
            return false;
    }
    return true;
}

namespace {

bool close(double a, double b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

bool same_layout(const Grid& a, const Grid& b, double rel_tol) {
    if (a.rank() != b.rank()) return false;
    for (std::size_t k = 0; k < a.rank(); ++k) {
        const Axis& x = a.stored(k);
        const Axis& y = b.stored(k);
        if (x.name != y.name || x.n != y.n || x.periodic != y.periodic) return false;
        if (!close(x.spacing, y.spacing, rel_tol)) return false;
        if (!close(x.origin, y.origin, rel_tol)) return false;
    }
    return true;
}

void require_same_layout(const Grid& a, const Grid& b, std::string_view context) {
    if (!same_layout(a, b)) throw Error(ErrorKind::GridMismatch, std::string(context));
}

}  // namespace nlac
