#pragma once

#include <string>
#include <vector>

#include "nanolab/geometry.hpp"

namespace nanolab {

// 17 significant digits, '.' separator, independent of the global locale.
std::string format_double(double x);
std::string csv_row(const std::vector<double>& values);

// PXYZ: first line "n L", then n lines "x y z".
std::string pxyz_text(const Nanotube& t);
// Fails with parse-error naming the offending line.
Nanotube parse_pxyz(const std::string& text);
Nanotube read_pxyz(const std::string& path);

std::string read_file(const std::string& path);
// Writes to a temporary file next to `path` and renames it into place.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace nanolab
