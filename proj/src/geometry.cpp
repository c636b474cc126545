#include "nanolab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nanolab/error.hpp"

namespace nanolab {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt_bound(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (got " << value << ")";
  return os.str();
}
}  // namespace

double gamma_ell(int ell) {
  if (ell <= 3) throw Error(ErrorKind::InvalidParameter, "ell must be > 3");
  return kPi * (1.0 - 1.0 / ell);
}

double beta(double alpha, double gamma) {
  const double s = std::sin(alpha) * std::sin(0.5 * gamma);
  if (s > 1.0 || s < -1.0) throw Error(ErrorKind::DomainError, "arcsin argument outside [-1, 1]");
  return 2.0 * std::asin(s);
}

ZigzagGeometry solve_family(int ell, double mu, double lambda1, double lambda2) {
  const double gamma = gamma_ell(ell);
  if (!(lambda1 > 0.9 && lambda1 < 1.1))
    throw Error(ErrorKind::InvalidParameter, fmt_bound("lambda1 must lie in (0.9, 1.1)", lambda1));
  if (!(lambda2 > 0.9 && lambda2 < 1.1))
    throw Error(ErrorKind::InvalidParameter, fmt_bound("lambda2 must lie in (0.9, 1.1)", lambda2));
  if (!(mu > 2.6 && mu < 3.1))
    throw Error(ErrorKind::InvalidParameter, fmt_bound("mu must lie in (2.6, 3.1)", mu));
  ZigzagGeometry g;
  g.ell = ell;
  g.mu = mu;
  g.lambda1 = lambda1;
  g.lambda2 = lambda2;
  g.gamma = gamma;
  g.sigma = 0.5 * mu - lambda1;
  if (!(g.sigma > 0.2))
    throw Error(ErrorKind::InvalidParameter, fmt_bound("sigma = mu/2 - lambda1 must exceed 0.2", g.sigma));
  if (!(g.sigma < lambda2))
    throw Error(ErrorKind::InvalidParameter, fmt_bound("sigma must be smaller than lambda2", g.sigma));
  g.rho = std::sqrt(lambda2 * lambda2 - g.sigma * g.sigma) / (2.0 * std::sin(kPi / (2.0 * ell)));
  const double rho_min = 0.55 / std::sin(gamma);
  if (!(g.rho > rho_min))
    throw Error(ErrorKind::InvalidParameter, fmt_bound("rho must exceed 0.55/sin(gamma_ell)", g.rho));
  // cos(alpha) = -sigma/lambda2 picks the branch alpha in (pi/2, pi).
  g.alpha = std::acos(-g.sigma / lambda2);
  g.beta = beta(g.alpha, gamma);
  return g;
}

int flat_index(const AtomId& id, int ell) {
  return ((id.j * ell + (id.i - 1)) * 2 + id.k) * 2 + id.l;
}

AtomId atom_id(int index, int ell) {
  AtomId id;
  id.l = index % 2;
  index /= 2;
  id.k = index % 2;
  index /= 2;
  id.i = index % ell + 1;
  id.j = index / ell;
  return id;
}

AtomId wrap_id(AtomId id, int ell, int m) {
  id.i = ((id.i - 1) % ell + ell) % ell + 1;
  id.j = (id.j % m + m) % m;
  return id;
}

Vec3 family_position(const ZigzagGeometry& g, const AtomId& id) {
  const double x = id.k * (g.lambda1 + g.sigma) + id.j * (2.0 * g.sigma + 2.0 * g.lambda1) +
                   id.l * (2.0 * g.sigma + g.lambda1);
  const double phi = kPi * (2.0 * id.i + id.k) / g.ell;
  return {x, g.rho * std::cos(phi), g.rho * std::sin(phi)};
}

double wrap_coordinate(double x, double period) {
  double w = std::fmod(x, period);
  if (w < 0.0) w += period;
  if (w >= period) w -= period;
  return w;
}

Nanotube build_nanotube(const ZigzagGeometry& g, int m) {
  if (m < 1) throw Error(ErrorKind::InvalidParameter, "m must be >= 1");
  Nanotube t;
  t.ell = g.ell;
  t.m = m;
  t.period = m * g.mu;
  const int n = 4 * m * g.ell;
  t.positions.resize(n);
  for (int idx = 0; idx < n; ++idx) {
    Vec3 p = family_position(g, atom_id(idx, g.ell));
    p.x() = wrap_coordinate(p.x(), t.period);
    t.positions[idx] = p;
  }
  return t;
}

std::array<ExpectedNeighbor, 3> expected_neighbors(const AtomId& a, int ell, int m) {
  auto at = [&](int di, int dj, int k, int l) {
    return wrap_id(AtomId{a.i + di, a.j + dj, k, l}, ell, m);
  };
  if (a.k == 0 && a.l == 0)
    return {{{at(0, -1, 0, 1), 1}, {at(0, -1, 1, 1), 2}, {at(-1, -1, 1, 1), 2}}};
  if (a.k == 0 && a.l == 1)
    return {{{at(0, 1, 0, 0), 1}, {at(0, 0, 1, 0), 2}, {at(-1, 0, 1, 0), 2}}};
  if (a.k == 1 && a.l == 0)
    return {{{at(0, -1, 1, 1), 1}, {at(0, 0, 0, 1), 2}, {at(1, 0, 0, 1), 2}}};
  return {{{at(0, 1, 1, 0), 1}, {at(0, 1, 0, 0), 2}, {at(1, 1, 0, 0), 2}}};
}

}  // namespace nanolab
