#pragma once

#include <vector>

namespace nanolab {

// Least-squares slope of log(y) against log(x). Needs at least two points with x, y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nanolab
