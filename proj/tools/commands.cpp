#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "config.hpp"
#include "nlac/errors.hpp"
#include "nlac/kuznetsov.hpp"
#include "nlac/kzk.hpp"
#include "nlac/npe.hpp"
#include "nlac/snapshot.hpp"
#include "nlac/spectral.hpp"
#include "nlac/validate.hpp"

namespace nlac::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestName = "run.json";
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void setup_logging() {
    static bool done = false;
    if (done) return;
    done = true;
    auto logger = spdlog::stderr_color_mt("nlac");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("AC_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

// Output directory bound to one config digest.
class RunDir {
public:
    RunDir(const fs::path& dir, std::string command, std::string digest, std::string canonical)
        : dir_(dir), command_(std::move(command)), digest_(std::move(digest)), canonical_(std::move(canonical)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create " + dir_.string() + ": " + ec.message());
        const fs::path manifest = dir_ / kManifestName;
        if (fs::exists(manifest)) {
            std::ifstream in(manifest);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception&) {
                throw Error(ErrorKind::Io, manifest.string() + " is not a run manifest");
            }
            const std::string existing = j.value("config_digest", "");
            if (existing != digest_)
                throw Error(ErrorKind::Io, fmt::format("{} holds a run with config digest {}; refusing to overwrite",
                                                       dir_.string(), existing));
        }
        write_manifest();
    }

    fs::path file(const std::string& name) {
        outputs_.push_back(name);
        return dir_ / name;
    }

    void finish() { write_manifest(); }

private:
    void write_manifest() const {
        nlohmann::ordered_json j;
        j["command"] = command_;
        j["config_digest"] = digest_;
        j["config"] = canonical_;
        j["outputs"] = outputs_;
        std::ofstream out(dir_ / kManifestName, std::ios::binary | std::ios::trunc);
        out << j.dump(2) << "\n";
        if (!out) throw Error(ErrorKind::Io, "cannot write run manifest in " + dir_.string());
    }

    fs::path dir_;
    std::string command_, digest_, canonical_;
    std::vector<std::string> outputs_;
};

std::ofstream open_csv(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + p.string());
    return out;
}

// Grid with an optional centred transverse axis followed by a periodic axis.
Grid make_grid(const SimulationConfig& c, const char* transverse, const char* along, double default_length) {
    const double len = c.grid.length > 0.0 ? c.grid.length : default_length;
    std::vector<Axis> axes;
    if (c.grid.n_transverse > 0)
        axes.push_back(Axis::periodic_axis(transverse, c.grid.n_transverse, c.grid.transverse_length,
                                           -0.5 * c.grid.transverse_length));
    axes.push_back(Axis::periodic_axis(along, c.grid.n_along, len));
    return Grid(std::move(axes));
}

// A sin(2 pi s / period) with an optional Gaussian envelope in the transverse coordinate.
Field initial_field(const SimulationConfig& c, const Grid& g) {
    if (c.initial.profile == "snapshot") {
        Field f = load_snapshot(c.initial.snapshot);
        if (f.grid().dims() != g.dims())
            throw Error(ErrorKind::GridMismatch, "snapshot " + c.initial.snapshot + " does not match the configured grid");
        return Field(g, std::vector<double>(f.values().begin(), f.values().end()));
    }
    const std::size_t last = g.rank() - 1;
    const double period = g.stored(last).length();
    const bool beam = c.initial.profile == "gaussian-beam";
    const double A = c.initial.amplitude, w = c.initial.width;
    return Field::sample(g, [&](std::span<const double> x) {
        double env = 1.0;
        if (beam)
            for (std::size_t k = 0; k < last; ++k) env *= std::exp(-x[k] * x[k] / (w * w));
        return A * std::sin(kTwoPi * x[last] / period) * env;
    });
}

std::size_t steps_for(double end, double step) { return static_cast<std::size_t>(std::ceil(end / step - 1e-9)); }

// Re-marches to the last good coordinate with the original step and saves it.
[[noreturn]] void fail_with_state(RunDir& run, const NumericalFailure& e, const char* coord,
                                  const std::function<Field(double, double)>& redo, double end, double step) {
    const std::size_t n = steps_for(end, step);
    const double h = n ? end / static_cast<double>(n) : step;
    const fs::path path = run.file("last_good.ac1");
    try {
        save_snapshot(path, redo(e.last_good(), h));
    } catch (const Error& inner) {
        spdlog::error("could not write last good state: {}", inner.what());
    }
    run.finish();
    throw NumericalFailure(e.kind(), fmt::format("{}; last good {}={}, state: {}", e.detail(), coord,
                                                      format_double(e.last_good()), path.string()), e.last_good());
}

std::string snap_name(const char* stem, std::size_t i) { return fmt::format("{}_{:05d}.ac1", stem, i); }

void cmd_solve_kzk(const SimulationConfig& c, RunDir& run) {
    const Grid g = make_grid(c, "y", "tau", c.params.period_L);
    const Field I0 = initial_field(c, g);
    MarchOptions o;
    o.cadence = c.march.cadence;
    ProfileSolution sol;
    try {
        sol = solve_kzk(I0, c.params, c.march.end, c.march.step, o);
    } catch (const NumericalFailure& e) {
        fail_with_state(run, e, "z", [&](double z, double h) {
            MarchOptions quiet = o;
            quiet.cadence = std::numeric_limits<std::size_t>::max();
            return solve_kzk(I0, c.params, z, h, quiet).back();
        }, c.march.end, c.march.step);
    }
    auto out = open_csv(run.file("manifest.csv"));
    out << "z,path,l2,mean_tau_residual\n";
    const auto dims = g.dims();
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const std::string name = snap_name("I", i);
        save_snapshot(run.file(name), sol.profiles[i]);
        out << fmt::format("{},{},{},{}\n", format_double(sol.coords[i]), name, format_double(field_l2_norm(sol.profiles[i])),
                           format_double(spectral::max_line_mean(sol.profiles[i].values(), dims, dims.size() - 1)));
    }
}

void cmd_solve_npe(const SimulationConfig& c, RunDir& run) {
    const Grid g = make_grid(c, "y", "z", c.params.c * c.params.period_L);
    const Field q0 = initial_field(c, g);
    MarchOptions o;
    o.cadence = c.march.cadence;
    ProfileSolution sol;
    try {
        sol = solve_npe(q0, c.params, c.march.end, c.march.step, o);
    } catch (const NumericalFailure& e) {
        fail_with_state(run, e, "tau", [&](double tau, double h) {
            MarchOptions quiet = o;
            quiet.cadence = std::numeric_limits<std::size_t>::max();
            return solve_npe(q0, c.params, tau, h, quiet).back();
        }, c.march.end, c.march.step);
    }
    auto out = open_csv(run.file("manifest.csv"));
    out << "tau,path,l2\n";
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const std::string name = snap_name("q", i);
        save_snapshot(run.file(name), sol.profiles[i]);
        out << fmt::format("{},{},{}\n", format_double(sol.coords[i]), name, format_double(field_l2_norm(sol.profiles[i])));
    }
}

void cmd_solve_kuznetsov(const SimulationConfig& c, RunDir& run) {
    const Grid g = make_grid(c, "x2", "x1", c.params.c * c.params.period_L);
    const PotentialState s0{initial_field(c, g), Field::zeros(g), 0.0};
    MarchOptions o;
    o.cadence = c.march.cadence;
    ProfileSolution sol;
    try {
        sol = solve_kuznetsov(s0, c.params, c.march.end, c.march.step, o);
    } catch (const NumericalFailure& e) {
        fail_with_state(run, e, "t", [&](double t, double h) {
            MarchOptions quiet = o;
            quiet.cadence = std::numeric_limits<std::size_t>::max();
            return solve_kuznetsov(s0, c.params, t, h, quiet).back();
        }, c.march.end, c.march.step);
    }
    auto out = open_csv(run.file("manifest.csv"));
    out << "t,path,energy\n";
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const std::string name = snap_name("phi", i);
        save_snapshot(run.file(name), sol.profiles[i]);
        const double e = wave_energy({sol.profiles[i], sol.rates[i], sol.coords[i]}, c.params);
        out << fmt::format("{},{},{}\n", format_double(sol.coords[i]), name, format_double(e));
    }
}

void cmd_solve_hydro(const SimulationConfig& c, RunDir& run) {
    const Grid g = make_grid(c, "x2", "x1", c.params.c * c.params.period_L);
    const ModelParams& p = c.params;
    const Field pert = initial_field(c, g);
    const Field rho = Field::constant(g, p.rho0) + pert;
    std::vector<Field> m;
    for (std::size_t k = 0; k + 1 < g.rank(); ++k) m.push_back(Field::zeros(g));
    // Right-going simple wave to first order: rho u1 = rho c (rho - rho0) / rho0.
    m.push_back((p.c / p.rho0) * hadamard(rho, pert));
    HydroOptions o;
    o.scheme = c.march.scheme;
    o.viscous = c.viscous;
    o.cadence = c.march.cadence;
    const ConservedState u0{rho, m};
    HydroTrajectory traj;
    try {
        traj = solve_hydro(u0, p, c.march.end, c.march.step, o);
    } catch (const NumericalFailure& e) {
        fail_with_state(run, e, "t", [&](double t, double h) {
            HydroOptions quiet = o;
            quiet.cadence = std::numeric_limits<std::size_t>::max();
            return solve_hydro(u0, p, t, h, quiet).states.back().rho;
        }, c.march.end, c.march.step);
    }
    write_ledger_csv(run.file("ledger.csv").string(), traj);
    auto out = open_csv(run.file("manifest.csv"));
    out << "t,component,path\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const std::string name = snap_name("rho", i);
        save_snapshot(run.file(name), traj.states[i].rho);
        out << fmt::format("{},rho,{}\n", format_double(traj.times[i]), name);
        for (std::size_t k = 0; k < traj.states[i].momentum.size(); ++k) {
            const std::string mname = snap_name(fmt::format("m{}", k + 1).c_str(), i);
            save_snapshot(run.file(mname), traj.states[i].momentum[k]);
            out << fmt::format("{},m{},{}\n", format_double(traj.times[i]), k + 1, mname);
        }
    }
}

void cmd_reconstruct(const SimulationConfig& c, RunDir& run) {
    const SweepConfig& x = c.experiment;
    const PhysicalWindow w = make_window(x, c.params.eps);
    const ProfileSolution sol = solve_window_profile(x, w, c.params);
    const Reconstructor rec(sol, c.params);
    auto out = open_csv(run.file("manifest.csv"));
    out << "t,component,path\n";
    for (std::size_t i = 0; i < c.reconstruct_times.size(); ++i) {
        const double t = c.reconstruct_times[i];
        const ConservedState s = rec.periodized(t, w.grid, x.buffer);
        const std::string name = snap_name("rho_bar", i);
        save_snapshot(run.file(name), s.rho);
        out << fmt::format("{},rho_bar,{}\n", format_double(t), name);
        for (std::size_t k = 0; k < s.momentum.size(); ++k) {
            const std::string mname = snap_name(fmt::format("m_bar{}", k + 1).c_str(), i);
            save_snapshot(run.file(mname), s.momentum[k]);
            out << fmt::format("{},m_bar{},{}\n", format_double(t), k + 1, mname);
        }
    }
}

std::vector<double> filled(std::size_t n, double v) { return std::vector<double>(n, v); }

void cmd_residual(const SimulationConfig& c, RunDir& run) {
    const ResidualReport r = residual_experiment(c.experiment, c.viscous);
    const std::size_t n = r.fit.eps_values.size();
    write_scaling_csv(run.file("residual.csv").string(), r.fit, filled(n, 0.0), filled(n, std::nan("")), r.fit.error_norms);
    write_gnuplot_stub(run.file("residual.gp").string(), "residual.csv", "ansatz residual");
    spdlog::info("residual slope {:.4f}", r.fit.fitted_slope);

    const ConsistencyReport q = npe_consistency_experiment(c.experiment, c.z_sample);
    write_scaling_csv(run.file("npe_consistency.csv").string(), q.fit, filled(n, 0.0), filled(n, std::nan("")),
                      q.fit.error_norms);
    spdlog::info("KZK to NPE residual slope {:.4f}", q.fit.fitted_slope);
    std::cout << fmt::format("residual slope {}\nnpe consistency slope {}\n", format_double(r.fit.fitted_slope),
                             format_double(q.fit.fitted_slope));
}

void write_runs(RunDir& run, const std::vector<EpsRun>& runs) {
    for (std::size_t i = 0; i < runs.size(); ++i)
        write_series_csv(run.file(fmt::format("series_{}.csv", i)).string(), runs[i]);
}

std::vector<double> pick(const std::vector<EpsRun>& runs, double EpsRun::*m) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.*m);
    return v;
}

void cmd_validate_t1(const SimulationConfig& c, RunDir& run) {
    const Theorem1Report r = theorem1_experiment(c.experiment);
    write_scaling_csv(run.file("scaling.csv").string(), r.fit, pick(r.runs, &EpsRun::t_star),
                      pick(r.runs, &EpsRun::err_at_t_star), pick(r.runs, &EpsRun::resid_norm));
    write_runs(run, r.runs);
    write_gnuplot_stub(run.file("scaling.gp").string(), "scaling.csv", "cone difference at t* (inviscid)");
    std::ofstream s(run.file("summary.txt"), std::ios::binary);
    s << "slope " << format_double(r.fit.fitted_slope) << "\n"
      << "zero_at_start " << r.zero_at_start << "\n"
      << "monotone_first_quarter " << r.monotone_first_quarter << "\n"
      << "out_of_regime " << r.out_of_regime << "\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i)
        s << "eps " << format_double(r.runs[i].eps) << " growth_exponent " << format_double(r.lower_growth_exponent[i])
          << " c1 " << format_double(r.c1_estimate[i]) << "\n";
    std::cout << fmt::format("t1 slope {}\n", format_double(r.fit.fitted_slope));
}

void cmd_validate_t2(const SimulationConfig& c, RunDir& run) {
    const Theorem2Report r = theorem2_experiment(c.experiment);
    write_scaling_csv(run.file("scaling.csv").string(), r.fit, pick(r.runs, &EpsRun::t_star),
                      pick(r.runs, &EpsRun::err_at_t_star), pick(r.runs, &EpsRun::resid_norm));
    write_runs(run, r.runs);
    write_gnuplot_stub(run.file("scaling.gp").string(), "scaling.csv", "cone difference at t* (viscous)");
    std::ofstream s(run.file("summary.txt"), std::ios::binary);
    s << "slope " << format_double(r.fit.fitted_slope) << "\n"
      << "zero_at_start " << r.zero_at_start << "\n"
      << "out_of_regime " << r.out_of_regime << "\n"
      << "horizon_T " << format_double(r.horizon_T) << "\n"
      << "early_window " << format_double(r.early_t_lo) << " " << format_double(r.early_t_hi) << "\n"
      << "C2 " << format_double(r.C2) << "\n"
      << "log_C0 " << format_double(r.log_C0) << "\n"
      << "envelope_checked " << r.envelope_checked << "\n"
      << "envelope_violations " << r.envelope_violations << "\n"
      << "envelope_max_ratio " << format_double(r.envelope_max_ratio) << "\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i)
        s << "eps " << format_double(r.runs[i].eps) << " early_exponent " << format_double(r.early_exponent[i]) << "\n";
    std::cout << fmt::format("t2 slope {}\n", format_double(r.fit.fitted_slope));
}

void cmd_convergence(const SimulationConfig& c, RunDir& run) {
    const ConvergenceResult r = convergence_study(c.convergence.solver, c.convergence.problem, c.convergence.resolutions);
    auto out = open_csv(run.file("convergence.csv"));
    out << "resolution,difference,order,status\n";
    for (std::size_t i = 0; i < r.differences.size(); ++i) {
        const std::string order = i == 0 ? "" : format_double(r.orders[i - 1]);
        out << fmt::format("{},{},{},{}\n", r.resolutions[i], format_double(r.differences[i]), order, to_string(r.status));
    }
    if (r.status == ConvergenceStatus::non_monotone)
        spdlog::warn("{}: {}/{} differences are not monotone", to_string(ErrorKind::NonMonotoneErrors), r.solver, r.problem);
    std::cout << fmt::format("{}/{} order {} ({})\n", r.solver, r.problem, format_double(r.observed_order), to_string(r.status));
}

using Handler = void (*)(const SimulationConfig&, RunDir&);

struct Subcommand {
    const char* name;
    const char* help;
    Handler run;
};

const Subcommand kSubcommands[] = {
    {"solve-kuznetsov", "march the potential equation", cmd_solve_kuznetsov},
    {"solve-kzk", "march the KZK profile in z", cmd_solve_kzk},
    {"solve-npe", "march the NPE profile in tau", cmd_solve_npe},
    {"solve-hydro", "march the isentropic Navier-Stokes system", cmd_solve_hydro},
    {"reconstruct", "sample the approximate physical state from a KZK solution", cmd_reconstruct},
    {"residual", "ansatz residual and KZK to NPE consistency sweeps", cmd_residual},
    {"validate-t1", "inviscid comparison sweep", cmd_validate_t1},
    {"validate-t2", "viscous comparison sweep", cmd_validate_t2},
    {"convergence", "observed order of a built-in convergence study", cmd_convergence},
};

}  // namespace

int run_command(int argc, const char* const* argv) {
    setup_logging();
    CLI::App app{"Nonlinear acoustics model hierarchy and validation driver", "nlac"};
    app.require_subcommand(1);
    std::string config_path, out_dir, preset_name;
    std::size_t workers = 1;
    std::vector<std::pair<CLI::App*, const Subcommand*>> subs;
    for (const auto& sc : kSubcommands) {
        CLI::App* sub = app.add_subcommand(sc.name, sc.help);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--workers", workers, "concurrent per-eps jobs")->check(CLI::PositiveNumber);
        sub->add_option("--preset", preset_name, "parameter preset")->check(CLI::IsMember({"water", "nondim"}));
        subs.emplace_back(sub, &sc);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    const Subcommand* chosen = nullptr;
    for (const auto& [sub, sc] : subs)
        if (sub->parsed()) chosen = sc;

    try {
        SimulationConfig cfg = load_config(config_path, preset_name);
        cfg.experiment.workers = workers;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        const std::string digest = config_digest(cfg);
        cfg.experiment.digest = digest;
        spdlog::info("{} config digest {}", chosen->name, digest);
        RunDir run(cfg.out_dir, chosen->name, digest, cfg.canonical());
        chosen->run(cfg, run);
        run.finish();
        return 0;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_command(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace nlac::cli
