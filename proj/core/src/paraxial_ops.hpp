#pragma once

// Raw-array form of the one-way evolution operators
//   du/ds = a d_x(u^2) + b d2_x u + d d_x^{-1} lap_y u
// where x is the periodic last axis and y the remaining axes. KZK marches in
// z with x = tau; NPE marches in tau with x = z.

#include <span>
#include <vector>

#include "gridops.hpp"
#include "nlac/field.hpp"
#include "nlac/profile.hpp"

namespace nlac::detail {

class ParaxialOperator {
public:
    ParaxialOperator(const Grid& grid, double a, double b, double d, const PhysicsTerms& terms);

    const GridOps& ops() const { return ops_; }
    std::size_t axis() const { return x_; }
    const std::vector<std::size_t>& transverse() const { return transverse_; }

    std::vector<double> rhs(std::span<const double> u) const;
    // Directional derivative of rhs at u along delta.
    std::vector<double> rhs_derivative(std::span<const double> u, std::span<const double> delta) const;
    // Dealiased product along x.
    std::vector<double> product(std::span<const double> f, std::span<const double> g) const;
    std::vector<double> apply(std::span<const double> f, const spectral::Symbol& sym) const {
        return ops_.apply(f, x_, sym);
    }

private:
    void add_linear(std::span<const double> f, std::vector<double>& out) const;

    GridOps ops_;
    std::size_t x_;
    std::vector<std::size_t> transverse_;
    double a_, b_, d_;
    PhysicsTerms terms_;
    spectral::Symbol mask_, nonlinear_, viscous_, inverse_;
    std::vector<spectral::Symbol> lap_y_;
};

// RK4 march of du/ds = op.rhs(u) on [0, s_end] with the blow-up checks of
// MarchOptions. `variable` names the evolution coordinate.
ProfileSolution march_paraxial(const ParaxialOperator& op, const Field& u0, double s_end, double ds,
                               const MarchOptions& options, const char* variable);

// Every stored axis must be periodic; the last one is the marching profile axis.
void require_profile_grid(const Grid& grid, const char* what);

}  // namespace nlac::detail
