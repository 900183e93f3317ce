#include "paraxial_ops.hpp"

#include <string>

#include "march.hpp"
#include "nlac/errors.hpp"

namespace nlac::detail {

using spectral::operator*;

void require_profile_grid(const Grid& grid, const char* what) {
    if (grid.rank() == 0) throw Error(ErrorKind::GridMismatch, std::string(what) + " grid is empty");
    for (std::size_t k = 0; k < grid.rank(); ++k)
        if (!grid.stored(k).periodic)
            throw Error(ErrorKind::GridMismatch, std::string(what) + " axis " + grid.stored(k).name + " is not periodic");
}

ParaxialOperator::ParaxialOperator(const Grid& grid, double a, double b, double d, const PhysicsTerms& terms)
    : ops_(grid), x_(grid.rank() - 1), a_(a), b_(b), d_(d), terms_(terms) {
    require_profile_grid(grid, "profile");
    for (std::size_t k = 0; k < x_; ++k) transverse_.push_back(k);
    const std::size_t n = ops_.n(x_);
    const double len = ops_.length(x_);
    mask_ = spectral::dealias_symbol(n);
    nonlinear_ = spectral::scaled(spectral::derivative_symbol(n, len, 1) * mask_, a_);
    viscous_ = spectral::scaled(spectral::derivative_symbol(n, len, 2), b_);
    inverse_ = spectral::scaled(spectral::antiderivative_symbol(n, len), d_);
    for (std::size_t k : transverse_)
        lap_y_.push_back(spectral::derivative_symbol(ops_.n(k), ops_.length(k), 2));
}

std::vector<double> ParaxialOperator::product(std::span<const double> f, std::span<const double> g) const {
    const auto ff = apply(f, mask_);
    const auto gg = apply(g, mask_);
    std::vector<double> out(ff.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ff[i] * gg[i];
    return out;  // filtered again by the nonlinear symbol
}

void ParaxialOperator::add_linear(std::span<const double> f, std::vector<double>& out) const {
    if (b_ != 0.0) {
        const auto v = apply(f, viscous_);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    }
    if (terms_.diffraction && !transverse_.empty() && d_ != 0.0) {
        std::vector<double> lap(f.size(), 0.0);
        for (std::size_t j = 0; j < transverse_.size(); ++j) {
            const auto d2 = ops_.apply(f, transverse_[j], lap_y_[j]);
            for (std::size_t i = 0; i < lap.size(); ++i) lap[i] += d2[i];
        }
        const auto v = apply(lap, inverse_);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    }
}

std::vector<double> ParaxialOperator::rhs(std::span<const double> u) const {
    std::vector<double> out(u.size(), 0.0);
    if (terms_.nonlinear && a_ != 0.0) out = apply(product(u, u), nonlinear_);
    add_linear(u, out);
    return out;
}

std::vector<double> ParaxialOperator::rhs_derivative(std::span<const double> u, std::span<const double> delta) const {
    std::vector<double> out(u.size(), 0.0);
    if (terms_.nonlinear && a_ != 0.0) {
        out = apply(product(u, delta), nonlinear_);
        for (double& v : out) v *= 2.0;
    }
    add_linear(delta, out);
    return out;
}

ProfileSolution march_paraxial(const ParaxialOperator& op, const Field& u0, double s_end, double ds,
                               const MarchOptions& options, const char* variable) {
    const Grid& grid = u0.grid();
    const auto dims = grid.dims();
    const std::size_t axis = op.axis();
    const std::size_t steps = step_count(s_end, ds, variable);
    const double h = steps ? s_end / static_cast<double>(steps) : 0.0;

    std::vector<double> u(u0.values().begin(), u0.values().end());
    const double initial = max_abs(u);
    // Data that starts near the resolution limit is judged against its own tail.
    const double tail_limit = std::max(options.resolution_tail, 10.0 * spectral::max_tail_fraction(u, dims, axis));
    auto f = [&](double, const std::vector<double>& state) { return op.rhs(state); };

    ProfileSolution sol;
    sol.variable = variable;
    sol.step = h;
    sol.coords.push_back(0.0);
    sol.profiles.push_back(u0);

    double last_good = 0.0;
    for (std::size_t step = 1; step <= steps; ++step) {
        detail::rk4_step(u, last_good, h, f);
        const double s = static_cast<double>(step) * h;
        const std::string where = std::string(" at ") + variable + "=" + std::to_string(s);
        if (!all_finite(u)) throw NumericalFailure(ErrorKind::NonFinite, "non-finite profile" + where, last_good);
        if (initial > 0.0 && max_abs(u) > options.blowup_growth * initial)
            throw NumericalFailure(ErrorKind::NonFinite, "amplitude blow-up" + where, last_good);
        if (options.resolution_tail > 0.0 &&
            spectral::max_tail_fraction(u, dims, axis) > tail_limit)
            throw NumericalFailure(ErrorKind::NonFinite, "profile steepened past resolution" + where, last_good);
        last_good = s;
        if (keep_step(step, steps, options.cadence)) {
            sol.coords.push_back(s);
            sol.profiles.emplace_back(grid, u);
        }
    }
    return sol;
}

}  // namespace nlac::detail
