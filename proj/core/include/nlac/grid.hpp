#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlac {

struct Axis {
    std::string name;
    std::size_t n = 0;
    double spacing = 0.0;
    bool periodic = false;
    bool evolution = false;  // marching variable, not stored in Field values
    double origin = 0.0;     // coordinate of node 0

    static Axis periodic_axis(std::string name, std::size_t n, double length, double origin = 0.0);
    static Axis open_axis(std::string name, std::size_t n, double spacing, double origin = 0.0);
    static Axis evolution_axis(std::string name, std::size_t n, double spacing, double origin = 0.0);

    double length() const { return static_cast<double>(n) * spacing; }
    double coord(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
};

// Ordered list of axes. Field values are row-major over the stored
// (non-evolution) axes, last axis contiguous.
class Grid {
public:
    Grid() = default;
    explicit Grid(std::vector<Axis> axes);

    const std::vector<Axis>& axes() const { return axes_; }
    std::size_t rank() const { return stored_.size(); }
    const Axis& stored(std::size_t i) const { return axes_[stored_[i]]; }
    std::vector<std::size_t> dims() const;
    std::size_t size() const;
    double cell_volume() const;

    std::optional<std::size_t> find(std::string_view name) const;  // index among stored axes
    std::size_t index_of(std::string_view name) const;              // throws GridMismatch
    const Axis* evolution() const;

    // Same grid with one stored axis shifted by `delta` in its origin.
    Grid shifted(std::size_t stored_axis, double delta) const;
    // Same grid without its evolution axis.
    Grid without_evolution() const;

    bool operator==(const Grid& other) const;

private:
    std::vector<Axis> axes_;
    std::vector<std::size_t> stored_;
};

// Layout equality with a relative tolerance on spacing and origin.
bool same_layout(const Grid& a, const Grid& b, double rel_tol = 1e-12);
void require_same_layout(const Grid& a, const Grid& b, std::string_view context);

bool is_power_of_two(std::size_t n);

}  // namespace nlac
