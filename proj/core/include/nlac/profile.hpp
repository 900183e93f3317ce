#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nlac/field.hpp"

namespace nlac {

// Switches for model studies; viscosity is controlled by ModelParams::nu.
struct PhysicsTerms {
    bool nonlinear = true;
    bool diffraction = true;
};

struct MarchOptions {
    std::size_t cadence = 1;  // keep every cadence-th step; the first and last states are always kept
    PhysicsTerms terms;
    double blowup_growth = 1e3;     // abort when max|state| exceeds this multiple of its initial value
    double resolution_tail = 1e-2;  // abort when the upper half of the retained band holds this energy fraction; 0 disables
};

// A model profile (I, q or phi) stored along its evolution variable.
struct ProfileSolution {
    std::string variable;  // "t", "z" or "tau"
    std::vector<double> coords;
    std::vector<Field> profiles;
    std::vector<Field> rates;  // d/dt of the profile for second-order models, else empty
    double step = 0.0;         // marching step actually used

    std::size_t size() const { return coords.size(); }
    const Field& back() const { return profiles.back(); }
};

}  // namespace nlac
