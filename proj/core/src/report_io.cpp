#include <fstream>

#include <fmt/format.h>

#include "nlac/errors.hpp"
#include "nlac/validate.hpp"

namespace nlac {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_scaling_csv(const std::string& path, const ScalingReport& r, std::span<const double> t_star,
                       std::span<const double> err_l2, std::span<const double> resid_norm) {
    const std::size_t n = r.eps_values.size();
    if (t_star.size() != n || err_l2.size() != n || resid_norm.size() != n)
        throw Error(ErrorKind::Param, "scaling CSV columns differ in length");
    auto out = open_out(path);
    out << "eps,t_star,err_l2,resid_norm,slope,intercept,fit_residual\n";
    for (std::size_t i = 0; i < n; ++i)
        out << fmt::format("{},{},{},{},{},{},{}\n", format_double(r.eps_values[i]), format_double(t_star[i]),
                           format_double(err_l2[i]), format_double(resid_norm[i]), format_double(r.fitted_slope),
                           format_double(r.fitted_intercept), format_double(r.residual_of_fit));
    finish(out, path);
}

void write_series_csv(const std::string& path, const EpsRun& run) {
    auto out = open_out(path);
    out << "t,diff_density,diff_momentum,diff_combined,diff_physical\n";
    for (const auto& s : run.series)
        out << fmt::format("{},{},{},{},{}\n", format_double(s.t), format_double(s.density), format_double(s.momentum),
                           format_double(s.gated), format_double(s.physical));
    finish(out, path);
}

void write_ledger_csv(const std::string& path, const HydroTrajectory& traj) {
    auto out = open_out(path);
    const std::size_t dims = traj.ledger.empty() ? 0 : traj.ledger.front().momentum.size();
    out << "t,mass";
    for (std::size_t k = 0; k < dims; ++k) out << ",momentum_" << (k + 1);
    out << ",energy\n";
    for (const auto& row : traj.ledger) {
        out << format_double(row.t) << ',' << format_double(row.mass);
        for (double m : row.momentum) out << ',' << format_double(m);
        out << ',' << format_double(row.energy) << '\n';
    }
    finish(out, path);
}

void write_gnuplot_stub(const std::string& path, const std::string& csv_name, const std::string& title) {
    auto out = open_out(path);
    out << "set datafile separator ','\n"
        << "set logscale xy\n"
        << "set key top left\n"
        << "set xlabel 'eps'\n"
        << "set ylabel 'norm'\n"
        << fmt::format("set title '{}'\n", title)
        << fmt::format("plot '{}' using 1:3 skip 1 with linespoints title 'err_l2', \\\n", csv_name)
        << fmt::format("     '{}' using 1:4 skip 1 with linespoints title 'resid_norm'\n", csv_name);
    finish(out, path);
}

}  // namespace nlac
