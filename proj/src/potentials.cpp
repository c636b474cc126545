#include "nanolab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "nanolab/error.hpp"

namespace nanolab {
namespace {

constexpr double kPi = std::numbers::pi;

// exp(-1/t) for t > 0, else 0, with its first two derivatives.
struct Bump {
  double f, df, d2f;
};

Bump bump(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  const double f = std::exp(-1.0 / t);
  const double t2 = t * t;
  return {f, f / t2, f * (1.0 - 2.0 * t) / (t2 * t2)};
}

// Smooth step psi and derivatives: 1 on (0, lo], 0 on [hi, inf). The bump is
// evaluated on the knot interval rescaled to [0, 1].
struct Step {
  double psi, dpsi, d2psi;
};

Step smooth_step(double r, double lo, double hi) {
  if (r <= lo) return {1.0, 0.0, 0.0};
  if (r >= hi) return {0.0, 0.0, 0.0};
  const double w = hi - lo;
  const double s = (r - lo) / w;
  const Bump g = bump(1.0 - s);
  const Bump h = bump(s);
  // psi = N / D with N = g(1 - s), D = N + h(s); derivatives in s, then rescaled.
  const double n = g.f, dn = -g.df, d2n = g.d2f;
  const double d = g.f + h.f, dd = -g.df + h.df, d2d = g.d2f + h.d2f;
  const double psi = n / d;
  const double num1 = dn * d - n * dd;
  const double dpsi = num1 / (d * d);
  const double d2psi = (d2n * d - n * d2d) / (d * d) - 2.0 * dd * num1 / (d * d * d);
  return {psi, dpsi / w, d2psi / (w * w)};
}

}  // namespace

PotentialSet make_potential(const std::string& name, double k2, double k3, double cutoff_lo,
                            double cutoff_hi) {
  if (!(cutoff_lo > 1.0 && cutoff_hi > cutoff_lo))
    throw Error(ErrorKind::InvalidParameter, "cutoff knots must satisfy 1 < cutoff_lo < cutoff_hi");
  PotentialSet p;
  p.name = name;
  p.cutoff = cutoff_hi;
  const double lo = cutoff_lo, hi = cutoff_hi;
  p.v2 = [=](double r) {
    if (r >= hi) return 0.0;
    const Step s = smooth_step(r, lo, hi);
    return (-1.0 + k2 * (r - 1.0) * (r - 1.0)) * s.psi;
  };
  p.dv2 = [=](double r) {
    if (r >= hi) return 0.0;
    const Step s = smooth_step(r, lo, hi);
    const double q = -1.0 + k2 * (r - 1.0) * (r - 1.0);
    const double dq = 2.0 * k2 * (r - 1.0);
    return dq * s.psi + q * s.dpsi;
  };
  p.d2v2 = [=](double r) {
    if (r >= hi) return 0.0;
    const Step s = smooth_step(r, lo, hi);
    const double q = -1.0 + k2 * (r - 1.0) * (r - 1.0);
    const double dq = 2.0 * k2 * (r - 1.0);
    const double d2q = 2.0 * k2;
    return d2q * s.psi + 2.0 * dq * s.dpsi + q * s.d2psi;
  };
  p.v3 = [=](double a) {
    const double c = std::cos(a) + 0.5;
    return k3 * c * c;
  };
  p.dv3 = [=](double a) { return -2.0 * k3 * (std::cos(a) + 0.5) * std::sin(a); };
  p.d2v3 = [=](double a) {
    const double c = std::cos(a), s = std::sin(a);
    return 2.0 * k3 * (s * s - c * c - 0.5 * c);
  };
  return p;
}

PotentialSet default_soft() { return make_potential("soft", 400.0, 400.0); }

PotentialSet default_stiff() { return make_potential("stiff", 400.0, 2.0 / 3.0); }

PotentialSet potential_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("potential JSON: ") + e.what());
  }
  try {
    return make_potential(j.value("name", std::string("custom")), j.at("k2").get<double>(),
                          j.at("k3").get<double>(), j.value("cutoff_lo", 1.05),
                          j.value("cutoff_hi", 1.1));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("potential JSON: ") + e.what());
  }
}

PotentialSet load_potential(const std::string& name_or_path) {
  if (name_or_path == "soft") return default_soft();
  if (name_or_path == "stiff") return default_stiff();
  std::ifstream in(name_or_path);
  if (!in)
    throw Error(ErrorKind::InvalidParameter,
                "unknown potential preset or unreadable file: " + name_or_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return potential_from_json_text(ss.str());
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::vector<double> grid(double a, double b, int steps) {
  std::vector<double> g(steps + 1);
  for (int i = 0; i <= steps; ++i) g[i] = a + (b - a) * i / steps;
  return g;
}

// Worst mismatch between an analytic derivative and central differences,
// relative to the largest magnitude of the derivative on the grid.
double fd_mismatch(const PotentialSet::Fn& f, const PotentialSet::Fn& df,
                   const std::vector<double>& xs, double h) {
  double worst = 0.0, scale = 1.0;
  for (double x : xs) {
    const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
    const double an = df(x);
    worst = std::max(worst, std::abs(fd - an));
    scale = std::max(scale, std::abs(an));
  }
  return worst / scale;
}

}  // namespace

ValidationReport validate(const PotentialSet& p) {
  ValidationReport rep;
  const double two_thirds_pi = 2.0 * kPi / 3.0;
  const double four_thirds_pi = 4.0 * kPi / 3.0;

  // Sample grid for v2 stops short of the cutoff knot so FD stencils stay on one side.
  const auto r_grid = grid(0.5, p.cutoff + 0.3, 1600);
  const auto a_grid = grid(0.0, 2.0 * kPi, 3600);

  {
    ValidationCheck c{"v2 minimum value -1 only at 1", false, 0.0, ""};
    double worst = std::abs(p.v2(1.0) + 1.0);
    bool other_min = false;
    for (double r : r_grid) {
      const double v = p.v2(r);
      worst = std::max(worst, -1.0 - v);
      if (std::abs(r - 1.0) > 1e-3 && v <= -1.0 + 1e-12) other_min = true;
    }
    c.worst_residual = worst;
    c.passed = worst <= 1e-12 && !other_min;
    if (other_min) c.note = "v2 reaches -1 away from r = 1";
    rep.checks.push_back(c);
  }
  {
    ValidationCheck c{"v2 second derivative at 1 positive", false, 0.0, ""};
    const double d2 = p.d2v2(1.0);
    c.worst_residual = std::max(0.0, -d2);
    c.passed = d2 > 0.0;
    rep.checks.push_back(c);
  }
  {
    ValidationCheck c{"v2 vanishes beyond cutoff", false, 0.0, ""};
    double worst = 0.0;
    for (double r : grid(p.cutoff, p.cutoff + 1.0, 1000))
      worst = std::max({worst, std::abs(p.v2(r)), std::abs(p.dv2(r)), std::abs(p.d2v2(r))});
    c.worst_residual = worst;
    c.passed = worst == 0.0;
    rep.checks.push_back(c);
  }
  {
    ValidationCheck c{"v3 nonnegative", false, 0.0, ""};
    double worst = 0.0;
    for (double a : a_grid) worst = std::max(worst, -p.v3(a));
    c.worst_residual = worst;
    c.passed = worst <= 0.0;
    rep.checks.push_back(c);
  }
  double v3_scale = 1.0;
  for (double a : a_grid) v3_scale = std::max(v3_scale, std::abs(p.v3(a)));
  {
    ValidationCheck c{"v3 symmetric around pi", false, 0.0, ""};
    double worst = 0.0;
    for (double a : a_grid) worst = std::max(worst, std::abs(p.v3(a) - p.v3(2.0 * kPi - a)));
    c.worst_residual = worst;
    c.passed = worst <= 1e-12 * v3_scale;
    rep.checks.push_back(c);
  }
  {
    ValidationCheck c{"v3 zeros only at 2pi/3 and 4pi/3", false, 0.0, ""};
    const double tol = 1e-12 * v3_scale;
    c.worst_residual = std::max(std::abs(p.v3(two_thirds_pi)), std::abs(p.v3(four_thirds_pi)));
    // Local minima of the sampled v3 that reach zero away from the two admissible points.
    for (std::size_t i = 1; i + 1 < a_grid.size(); ++i) {
      const double a = a_grid[i];
      if (std::abs(a - two_thirds_pi) < 1e-2 || std::abs(a - four_thirds_pi) < 1e-2) continue;
      const double v = p.v3(a);
      if (v <= p.v3(a_grid[i - 1]) && v <= p.v3(a_grid[i + 1]) && v <= 1e-10 * v3_scale)
        rep.extra_v3_zeros.push_back(a);
    }
    c.passed = c.worst_residual <= tol && rep.extra_v3_zeros.empty();
    if (!rep.extra_v3_zeros.empty())
      c.note = std::to_string(rep.extra_v3_zeros.size()) + " additional zero(s) of v3";
    rep.checks.push_back(c);
  }
  {
    ValidationCheck c{"v3 second derivative at 2pi/3 positive", false, 0.0, ""};
    const double d2 = p.d2v3(two_thirds_pi);
    c.worst_residual = std::max(0.0, -d2);
    c.passed = d2 > 0.0;
    rep.checks.push_back(c);
  }
  {
    ValidationCheck c{"derivatives match finite differences", false, 0.0, ""};
    const double h = 1e-6;
    std::vector<double> rs;
    for (double r : r_grid)
      if (std::abs(r - p.cutoff) > 2.0 * h) rs.push_back(r);
    c.worst_residual = std::max({fd_mismatch(p.v2, p.dv2, rs, h), fd_mismatch(p.dv2, p.d2v2, rs, h),
                                 fd_mismatch(p.v3, p.dv3, a_grid, h),
                                 fd_mismatch(p.dv3, p.d2v3, a_grid, h)});
    c.passed = c.worst_residual <= 1e-6;
    rep.checks.push_back(c);
  }
  {
    ValidationCheck c{"stationary at the minima", false, 0.0, ""};
    c.worst_residual = std::max(std::abs(p.dv2(1.0)), std::abs(p.dv3(two_thirds_pi)));
    c.passed = c.worst_residual <= 1e-10;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace nanolab
