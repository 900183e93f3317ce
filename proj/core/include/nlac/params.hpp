#pragma once

#include <string_view>

namespace nlac {

// Isentropic fluid parameters shared by every model.
struct ModelParams {
    double rho0 = 1.0;      // ambient density
    double c = 1.0;         // sound speed
    double gamma = 1.4;     // heat-capacity ratio
    double nu = 0.0;        // reduced viscosity
    double eps = 0.1;       // perturbation scale
    double period_L = 1.0;  // period of the retarded-time (or propagation) variable

    bool operator==(const ModelParams&) const = default;
};

// Returns p unchanged when 0 < rho0, 0 < c, 1 < gamma, 0 <= nu, 0 < eps < 1,
// 0 < period_L. Throws Error(Param) whose detail is the offending field name.
ModelParams validate_params(const ModelParams& p);

// Named parameter sets. "water" uses rho0 = 1000, c = 1500, gamma = 1.4 (a
// placeholder, not a fitted value), eps = 1e-5 and nu = 0; "nondim" uses
// rho0 = c = L = 1, gamma = 1.4, eps = 0.1, nu = 0.
ModelParams preset(std::string_view name);

}  // namespace nlac
