#include "nlac/params.hpp"

#include <cmath>
#include <string>

#include "nlac/errors.hpp"

namespace nlac {

ModelParams validate_params(const ModelParams& p) {
    auto require = [](bool ok, const char* field) {
        if (!ok) throw Error(ErrorKind::Param, field);
    };
    require(std::isfinite(p.rho0) && p.rho0 > 0.0, "rho0");
    require(std::isfinite(p.c) && p.c > 0.0, "c");
    require(std::isfinite(p.gamma) && p.gamma > 1.0, "gamma");
    require(std::isfinite(p.nu) && p.nu >= 0.0, "nu");
    require(std::isfinite(p.eps) && p.eps > 0.0 && p.eps < 1.0, "eps");
    require(std::isfinite(p.period_L) && p.period_L > 0.0, "period_L");
    return p;
}

ModelParams preset(std::string_view name) {
    if (name == "water") return ModelParams{1000.0, 1500.0, 1.4, 0.0, 1e-5, 1.0};
    if (name == "nondim") return ModelParams{1.0, 1.0, 1.4, 0.0, 0.1, 1.0};
    throw Error(ErrorKind::Param, "preset " + std::string(name));
}

}  // namespace nlac
