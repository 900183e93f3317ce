#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "nlac/errors.hpp"

namespace nlac::cli {

namespace {

struct Entry {
    const char* section;
    const char* key;
    std::function<void(SimulationConfig&, const std::string&)> set;
    std::function<std::string(const SimulationConfig&)> get;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw Error(ErrorKind::Parse, fmt::format("bad value '{}' for key '{}'", value, key));
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) bad_value(key, v);
        return x;
    } catch (const std::logic_error&) {
        bad_value(key, v);
    }
}

std::size_t to_size(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) bad_value(key, v);
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (const std::logic_error&) {
        bad_value(key, v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& fmt_one) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_one(v[i]);
    return out;
}

std::string fmt_size(std::size_t v) { return std::to_string(v); }
std::string fmt_bool(bool v) { return v ? "true" : "false"; }

// Entry for a double member reached through `ref`.
template <class Ref>
Entry real(const char* section, const char* key, Ref ref) {
    return {section, key,
            [ref, key](SimulationConfig& c, const std::string& v) { ref(c) = to_double(key, v); },
            [ref](const SimulationConfig& c) { return format_double(ref(const_cast<SimulationConfig&>(c))); }};
}

template <class Ref>
Entry count(const char* section, const char* key, Ref ref) {
    return {section, key,
            [ref, key](SimulationConfig& c, const std::string& v) { ref(c) = to_size(key, v); },
            [ref](const SimulationConfig& c) { return fmt_size(ref(const_cast<SimulationConfig&>(c))); }};
}

const char* model_name(ModelKind m) {
    switch (m) {
        case ModelKind::kuznetsov: return "kuznetsov";
        case ModelKind::kzk: return "kzk";
        case ModelKind::npe: return "npe";
        case ModelKind::hydro: return "hydro";
    }
    return "?";
}

const char* scheme_name(HydroScheme s) { return s == HydroScheme::muscl ? "muscl" : "spectral"; }

HydroScheme to_scheme(const std::string& key, const std::string& v) {
    if (v == "muscl") return HydroScheme::muscl;
    if (v == "spectral") return HydroScheme::spectral;
    bad_value(key, v);
}

const std::vector<Entry>& schema() {
    using C = SimulationConfig;
    static const std::vector<Entry> entries = {
        {"model", "kind",
         [](C& c, const std::string& v) {
             if (v == "kuznetsov") c.model = ModelKind::kuznetsov;
             else if (v == "kzk") c.model = ModelKind::kzk;
             else if (v == "npe") c.model = ModelKind::npe;
             else if (v == "hydro") c.model = ModelKind::hydro;
             else bad_value("kind", v);
         },
         [](const C& c) { return std::string(model_name(c.model)); }},
        {"model", "preset", [](C&, const std::string&) {}, [](const C& c) { return c.preset; }},
        real("model", "rho0", [](C& c) -> double& { return c.params.rho0; }),
        real("model", "c", [](C& c) -> double& { return c.params.c; }),
        real("model", "gamma", [](C& c) -> double& { return c.params.gamma; }),
        real("model", "nu", [](C& c) -> double& { return c.params.nu; }),
        real("model", "eps", [](C& c) -> double& { return c.params.eps; }),
        real("model", "period_L", [](C& c) -> double& { return c.params.period_L; }),

        count("grid", "n_along", [](C& c) -> std::size_t& { return c.grid.n_along; }),
        real("grid", "length", [](C& c) -> double& { return c.grid.length; }),
        count("grid", "n_transverse", [](C& c) -> std::size_t& { return c.grid.n_transverse; }),
        real("grid", "transverse_length", [](C& c) -> double& { return c.grid.transverse_length; }),

        {"initial", "profile",
         [](C& c, const std::string& v) {
             if (v != "gaussian-beam" && v != "sine" && v != "snapshot") bad_value("profile", v);
             c.initial.profile = v;
         },
         [](const C& c) { return c.initial.profile; }},
        real("initial", "amplitude", [](C& c) -> double& { return c.initial.amplitude; }),
        real("initial", "width", [](C& c) -> double& { return c.initial.width; }),
        {"initial", "snapshot", [](C& c, const std::string& v) { c.initial.snapshot = v; },
         [](const C& c) { return c.initial.snapshot; }},

        real("march", "end", [](C& c) -> double& { return c.march.end; }),
        real("march", "step", [](C& c) -> double& { return c.march.step; }),
        count("march", "cadence", [](C& c) -> std::size_t& { return c.march.cadence; }),
        {"march", "scheme", [](C& c, const std::string& v) { c.march.scheme = to_scheme("scheme", v); },
         [](const C& c) { return std::string(scheme_name(c.march.scheme)); }},

        {"output", "dir", [](C& c, const std::string& v) { c.out_dir = v; }, [](const C& c) { return c.out_dir; }},

        {"experiment", "eps",
         [](C& c, const std::string& v) {
             c.experiment.eps_list.clear();
             for (const auto& item : split_list(v)) c.experiment.eps_list.push_back(to_double("eps", item));
         },
         [](const C& c) { return join(c.experiment.eps_list, format_double); }},
        real("experiment", "theta", [](C& c) -> double& { return c.experiment.theta; }),
        real("experiment", "cone_K", [](C& c) -> double& { return c.experiment.cone_K; }),
        real("experiment", "cone_M", [](C& c) -> double& { return c.experiment.cone_M; }),
        {"experiment", "viscous", [](C& c, const std::string& v) { c.viscous = to_bool("viscous", v); },
         [](const C& c) { return fmt_bool(c.viscous); }},
        count("experiment", "n_tau", [](C& c) -> std::size_t& { return c.experiment.n_tau; }),
        count("experiment", "n_y", [](C& c) -> std::size_t& { return c.experiment.n_y; }),
        real("experiment", "y_length", [](C& c) -> double& { return c.experiment.y_length; }),
        real("experiment", "amplitude", [](C& c) -> double& { return c.experiment.amplitude; }),
        real("experiment", "beam_width", [](C& c) -> double& { return c.experiment.beam_width; }),
        real("experiment", "buffer", [](C& c) -> double& { return c.experiment.buffer; }),
        count("experiment", "min_n1", [](C& c) -> std::size_t& { return c.experiment.min_n1; }),
        real("experiment", "kzk_dz_max", [](C& c) -> double& { return c.experiment.kzk_dz_max; }),
        real("experiment", "hydro_dt", [](C& c) -> double& { return c.experiment.hydro_dt; }),
        count("experiment", "sample_every", [](C& c) -> std::size_t& { return c.experiment.sample_every; }),
        {"experiment", "scheme", [](C& c, const std::string& v) { c.experiment.scheme = to_scheme("scheme", v); },
         [](const C& c) { return std::string(scheme_name(c.experiment.scheme)); }},
        real("experiment", "horizon_T", [](C& c) -> double& { return c.experiment.horizon_T; }),
        real("experiment", "residual_h", [](C& c) -> double& { return c.experiment.residual_h; }),
        real("experiment", "asymptotic_eps_limit", [](C& c) -> double& { return c.experiment.asymptotic_eps_limit; }),
        real("experiment", "z_sample", [](C& c) -> double& { return c.z_sample; }),

        {"reconstruct", "times",
         [](C& c, const std::string& v) {
             c.reconstruct_times.clear();
             for (const auto& item : split_list(v)) c.reconstruct_times.push_back(to_double("times", item));
         },
         [](const C& c) { return join(c.reconstruct_times, format_double); }},

        {"convergence", "solver", [](C& c, const std::string& v) { c.convergence.solver = v; },
         [](const C& c) { return c.convergence.solver; }},
        {"convergence", "problem", [](C& c, const std::string& v) { c.convergence.problem = v; },
         [](const C& c) { return c.convergence.problem; }},
        {"convergence", "resolutions",
         [](C& c, const std::string& v) {
             c.convergence.resolutions.clear();
             for (const auto& item : split_list(v)) c.convergence.resolutions.push_back(to_size("resolutions", item));
         },
         [](const C& c) { return join(c.convergence.resolutions, fmt_size); }},
    };
    return entries;
}

const Entry* find_entry(const std::string& section, const std::string& key) {
    for (const auto& e : schema())
        if (section == e.section && key == e.key) return &e;
    return nullptr;
}

void validate(SimulationConfig& c) {
    try {
        validate_params(c.params);
    } catch (const Error& e) {
        throw Error(ErrorKind::Validation, e.detail());
    }
    auto require = [](bool ok, const char* field) {
        if (!ok) throw Error(ErrorKind::Validation, field);
    };
    const auto& eps = c.experiment.eps_list;
    for (std::size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1])) throw Error(ErrorKind::Validation, "eps list not decreasing");
    for (double e : eps) require(e > 0.0 && e < 1.0, "eps");
    require(c.grid.n_along >= 4 && is_power_of_two(c.grid.n_along), "n_along");
    require(c.grid.n_transverse == 0 || (c.grid.n_transverse >= 4 && is_power_of_two(c.grid.n_transverse)), "n_transverse");
    require(c.grid.length >= 0.0, "length");
    require(c.grid.transverse_length > 0.0, "transverse_length");
    require(c.initial.width > 0.0, "width");
    require(std::isfinite(c.initial.amplitude), "amplitude");
    require(c.initial.profile != "snapshot" || !c.initial.snapshot.empty(), "snapshot");
    require(c.march.end >= 0.0, "end");
    require(c.march.step > 0.0, "step");
    require(c.march.cadence >= 1, "cadence");
    require(c.experiment.theta > 0.0, "theta");
    require(c.experiment.cone_K > 0.0, "cone_K");
    require(c.experiment.cone_M >= c.params.c, "cone_M");
    require(c.experiment.n_tau >= 4 && is_power_of_two(c.experiment.n_tau), "n_tau");
    require(c.experiment.n_y >= 4 && is_power_of_two(c.experiment.n_y), "n_y");
    require(c.experiment.y_length > 0.0, "y_length");
    require(c.experiment.beam_width > 0.0, "beam_width");
    require(c.experiment.buffer > 0.0, "buffer");
    require(c.experiment.kzk_dz_max > 0.0, "kzk_dz_max");
    require(c.experiment.hydro_dt > 0.0, "hydro_dt");
    require(c.experiment.sample_every >= 1, "sample_every");
    require(c.experiment.horizon_T >= 0.0, "horizon_T");
    require(c.experiment.residual_h > 0.0, "residual_h");
    require(c.z_sample >= 0.0, "z_sample");
    c.experiment.params = c.params;
}

}  // namespace

std::string SimulationConfig::canonical() const {
    std::vector<std::string> lines;
    for (const auto& e : schema()) {
        if (std::string_view(e.section) == "output") continue;  // where results go is not part of the experiment
        lines.push_back(fmt::format("{}.{}={}", e.section, e.key, e.get(*this)));
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

SimulationConfig parse_config(const std::string& text, const std::string& preset_override) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::Parse, fmt::format("line {}: {}", e.line(), e.message()));
    }

    SimulationConfig cfg;
    std::string preset_name = "nondim";
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw Error(ErrorKind::Parse, fmt::format("key '{}' outside a section", section));
        for (const auto& [key, value] : body) {
            if (!find_entry(section, key))
                throw Error(ErrorKind::Parse, fmt::format("unknown key '{}' in section [{}]", key, section));
            if (section == "model" && key == "preset") preset_name = trim(value.data());
        }
    }
    if (!preset_override.empty()) preset_name = preset_override;
    try {
        cfg.params = preset(preset_name);
    } catch (const Error&) {
        throw Error(ErrorKind::Validation, "preset");
    }
    cfg.preset = preset_name;
    for (const auto& [section, body] : tree)
        for (const auto& [key, value] : body) find_entry(section, key)->set(cfg, trim(value.data()));
    // An unset cone speed follows the sound speed.
    if (!tree.get_child_optional("experiment.cone_M")) cfg.experiment.cone_M *= cfg.params.c;
    validate(cfg);
    return cfg;
}

SimulationConfig load_config(const std::string& path, const std::string& preset_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), preset_override);
}

std::string config_digest(const SimulationConfig& cfg) {
    const std::string text = cfg.canonical();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::Io, "sha256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

}  // namespace nlac::cli
