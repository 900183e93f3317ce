#include "nlac/npe.hpp"

#include "nlac/spectral.hpp"
#include "paraxial_ops.hpp"

namespace nlac {

namespace {

detail::ParaxialOperator make_operator(const Grid& grid, const ModelParams& p, const PhysicsTerms& terms) {
    return detail::ParaxialOperator(grid, (p.gamma + 1.0) / 4.0, p.nu / (2.0 * p.rho0), -0.5 * p.c, terms);
}

void require_zero_mean(const Field& f, const char* what) {
    const auto dims = f.grid().dims();
    spectral::require_zero_mean(f.values(), dims, dims.size() - 1, what);
}

}  // namespace

Field npe_rhs(const NpeProfile& prof, const ModelParams& p, const PhysicsTerms& terms) {
    validate_params(p);
    detail::require_profile_grid(prof.q.grid(), "NPE profile");
    require_zero_mean(prof.q, "NPE profile");
    const auto op = make_operator(prof.q.grid(), p, terms);
    return Field(prof.q.grid(), op.rhs(prof.q.values()));
}

ProfileSolution solve_npe(const Field& q0, const ModelParams& p, double tau_end, double dtau,
                          const MarchOptions& options) {
    validate_params(p);
    detail::require_profile_grid(q0.grid(), "NPE profile");
    require_zero_mean(q0, "initial NPE profile");
    const auto op = make_operator(q0.grid(), p, options.terms);
    return detail::march_paraxial(op, q0, tau_end, dtau, options, "tau");
}

NpeCorrectors npe_correctors(const NpeProfile& prof, const ModelParams& p, const PhysicsTerms& terms) {
    validate_params(p);
    detail::require_profile_grid(prof.q.grid(), "NPE profile");
    require_zero_mean(prof.q, "NPE profile");
    const Grid& grid = prof.q.grid();
    const auto op = make_operator(grid, p, terms);
    const std::size_t z = op.axis();
    const auto q = prof.q.values();
    const auto psi_tau = op.ops().antideriv(op.rhs(q), z);
    const auto q_z = op.ops().deriv(q, z, 1);
    const double c = p.c, c2 = c * c, r0 = p.rho0;
    std::vector<double> P1(q.size()), P2(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        P1[i] = r0 / c * q[i];
        P2[i] = r0 / (c2 * c2) * psi_tau[i] - r0 * (p.gamma + 3.0) / (2.0 * c2) * q[i] * q[i] - p.nu / c2 * q_z[i];
    }
    return {Field(grid, std::move(P1)), Field(grid, std::move(P2))};
}

NpeCoords kzk_to_npe_coords(double tau_K, double z_K, const ModelParams& p) {
    return {p.eps * tau_K + z_K / p.c, -p.c * tau_K};
}

NpeCoords npe_to_kzk_coords(double tau_N, double z_N, const ModelParams& p) {
    const double tau_K = -z_N / p.c;
    return {tau_K, p.c * (tau_N - p.eps * tau_K)};
}

}  // namespace nlac
