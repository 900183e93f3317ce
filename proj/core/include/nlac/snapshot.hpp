#pragma once

#include <filesystem>
#include <string>

#include "nlac/field.hpp"

namespace nlac {

// AC1 snapshot: a text header line
//   AC1 name,n,dx,periodic-flag;name,n,dx,periodic-flag;...
// followed by little-endian float64 values in row-major order. Only stored
// axes are written and axis origins are not part of the format.
std::string snapshot_header(const Grid& grid);
void save_snapshot(const std::filesystem::path& path, const Field& f);
Field load_snapshot(const std::filesystem::path& path);

}  // namespace nlac
