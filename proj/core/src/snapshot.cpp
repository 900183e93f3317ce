#include "nlac/snapshot.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nlac/errors.hpp"

namespace nlac {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

}  // namespace

std::string snapshot_header(const Grid& grid) {
    std::string h = "AC1 ";
    for (std::size_t k = 0; k < grid.rank(); ++k) {
        const Axis& a = grid.stored(k);
        if (k) h += ';';
        h += fmt::format("{},{},{:.17g},{}", a.name, a.n, a.spacing, a.periodic ? 1 : 0);
    }
    return h;
}

void save_snapshot(const std::filesystem::path& path, const Field& f) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
    const std::string header = snapshot_header(f.grid()) + "\n";
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::vector<std::uint64_t> raw(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) raw[i] = to_little_endian(std::bit_cast<std::uint64_t>(f[i]));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Field load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    if (header.rfind("AC1 ", 0) != 0) throw Error(ErrorKind::Parse, "missing AC1 header in " + path.string());

    std::vector<Axis> axes;
    for (const auto& spec : split(header.substr(4), ';')) {
        const auto parts = split(spec, ',');
        if (parts.size() != 4) throw Error(ErrorKind::Parse, "bad axis spec '" + spec + "'");
        try {
            Axis a;
            a.name = parts[0];
            a.n = std::stoul(parts[1]);
            a.spacing = std::stod(parts[2]);
            if (parts[3] != "0" && parts[3] != "1") throw std::invalid_argument("flag");
            a.periodic = parts[3] == "1";
            axes.push_back(std::move(a));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Parse, "bad axis spec '" + spec + "'");
        }
    }
    Grid grid(std::move(axes));

    std::vector<std::uint64_t> raw(grid.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
    if (in.gcount() != static_cast<std::streamsize>(raw.size() * 8))
        throw Error(ErrorKind::Parse, "truncated snapshot " + path.string());
    std::vector<double> values(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) values[i] = std::bit_cast<double>(to_little_endian(raw[i]));
    return Field(std::move(grid), std::move(values));
}

}  // namespace nlac
