#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nlac/hydro.hpp"
#include "nlac/params.hpp"
#include "nlac/validate.hpp"

namespace nlac::cli {

enum class ModelKind { kuznetsov, kzk, npe, hydro };

struct GridSpec {
    std::size_t n_along = 32;        // periodic marching-profile axis (tau, z or x1)
    double length = 1.0;             // its period; 0 means period_L (c period_L for x1)
    std::size_t n_transverse = 64;   // 0 for a one-dimensional run
    double transverse_length = 16.0;
};

struct InitialSpec {
    std::string profile = "gaussian-beam";  // gaussian-beam | sine | snapshot
    double amplitude = 0.05;
    double width = 1.0;
    std::string snapshot;
};

struct MarchSpec {
    double end = 0.5;
    double step = 0.002;
    std::size_t cadence = 10;
    HydroScheme scheme = HydroScheme::muscl;
};

struct ConvergenceSpec {
    std::string solver = "kzk";
    std::string problem = "gaussian-beam";
    std::vector<std::size_t> resolutions{10, 20, 40};
};

struct SimulationConfig {
    ModelKind model = ModelKind::kzk;
    std::string preset = "nondim";
    ModelParams params;
    GridSpec grid;
    InitialSpec initial;
    MarchSpec march;
    std::string out_dir = "out";
    SweepConfig experiment;          // experiment.params mirrors params
    bool viscous = true;
    double z_sample = 0.2;           // profile depth of the KZK to NPE consistency check
    std::vector<double> reconstruct_times{0.0};
    ConvergenceSpec convergence;

    // key=value lines with every default filled, sorted by section and key.
    // The output directory is left out.
    std::string canonical() const;
};

// Strict loader: unknown sections or keys raise Parse naming the key,
// invalid values raise Validation naming the field. Values given in the file
// override the preset, which overrides built-in defaults.
SimulationConfig load_config(const std::string& path, const std::string& preset_override = "");
SimulationConfig parse_config(const std::string& text, const std::string& preset_override = "");

// Hex SHA-256 of the canonical form.
std::string config_digest(const SimulationConfig& cfg);

}  // namespace nlac::cli
