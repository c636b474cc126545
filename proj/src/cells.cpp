#include "nanolab/cells.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nanolab/error.hpp"

namespace nanolab {

namespace {

Vec3 nearest_image(const Vec3& from, Vec3 to, double period) {
  const auto pd = periodic_distance(to, from, period);
  to.x() += pd.shift * period;
  return to;
}

double folded_angle(Vec3 n1, Vec3 n2) {
  const double a = n1.norm(), b = n2.norm();
  if (a < 1e-300 || b < 1e-300) throw Error(ErrorKind::DegenerateGeometry, "plane angle: collinear points");
  const double c = std::clamp(n1.dot(n2) / (a * b), -1.0, 1.0);
  const double t = std::acos(c);
  return std::max(std::numbers::pi - t, t);
}

}  // namespace

int center_index(const CenterId& c, int ell) { return ((c.j * ell) + (c.i - 1)) * 2 + c.k; }

CenterId center_id(int index, int ell) {
  CenterId c;
  c.k = index % 2;
  index /= 2;
  c.i = index % ell + 1;
  c.j = index / ell;
  return c;
}

Centers centers(const Nanotube& t) {
  if (!t.labeled()) throw Error(ErrorKind::InvalidCell, "centers need a labeled nanotube");
  const int ell = t.ell, m = t.m, nc = 2 * m * ell;
  Centers out;
  out.centers.resize(nc);
  out.duals.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto id = center_id(c, ell);
    const Vec3& lower = t.positions[flat_index({id.i, id.j, id.k, 0}, ell)];
    const Vec3 upper = nearest_image(lower, t.positions[flat_index({id.i, id.j, id.k, 1}, ell)], t.period);
    const Vec3 next = nearest_image(
        upper, t.positions[flat_index(wrap_id({id.i, id.j + 1, id.k, 0}, ell, m), ell)], t.period);
    out.centers[c] = 0.5 * (lower + upper);
    out.duals[c] = 0.5 * (upper + next);
  }
  return out;
}

std::array<AtomId, 8> cell_atom_ids(const CenterId& c, int ell, int m) {
  const int i = c.i, j = c.j;
  std::array<AtomId, 8> ids;
  ids[0] = {i, j, c.k, 0};
  ids[1] = {i, j, c.k, 1};
  if (c.k == 0) {
    ids[2] = {i, j - 1, 1, 1};
    ids[3] = {i, j, 1, 0};
    ids[4] = {i - 1, j, 1, 0};
    ids[5] = {i - 1, j - 1, 1, 1};
  } else {
    ids[2] = {i + 1, j, 0, 1};
    ids[3] = {i + 1, j + 1, 0, 0};
    ids[4] = {i, j + 1, 0, 0};
    ids[5] = {i, j, 0, 1};
  }
  ids[6] = {i, j - 1, c.k, 1};
  ids[7] = {i, j + 1, c.k, 0};
  for (auto& id : ids) id = wrap_id(id, ell, m);
  return ids;
}

CellView extract_cell(const Nanotube& t, const BondGraph& g, const CenterId& c) {
  if (!t.labeled()) throw Error(ErrorKind::InvalidCell, "cell extraction needs a labeled nanotube");
  CellView v;
  v.center = c;
  const auto ids = cell_atom_ids(c, t.ell, t.m);
  for (int a = 0; a < 8; ++a) v.atoms[a] = flat_index(ids[a], t.ell);
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::InvalidCell, "cell (" + std::to_string(c.i) + ", " + std::to_string(c.j) + ", " +
                                            std::to_string(c.k) + "): " + what);
  };
  for (int a = 0; a < 6; ++a)
    if (g.degree(v.atoms[a]) != 3) fail("hexagon atom without exactly three bonds");
  // Walk x1 -> {x3, x6, x7}, x3 -> x4 -> x2 -> x8, x6 -> x5, each step along a graph bond.
  static constexpr std::array<std::array<int, 2>, 7> walk = {
      {{0, 2}, {0, 5}, {0, 6}, {2, 3}, {3, 1}, {1, 7}, {5, 4}}};
  v.x[0] = t.positions[v.atoms[0]];
  for (const auto& [from, to] : walk) {
    const int bi = g.find(v.atoms[from], v.atoms[to]);
    if (bi < 0) fail("missing bond");
    v.x[to] = v.x[from] + bond_vector(t.positions, t.period, g.bonds[bi], v.atoms[from]);
  }
  for (const auto& [a, b] : kCellBondPairs) {
    const int bi = g.find(v.atoms[a], v.atoms[b]);
    if (bi < 0) fail("missing bond");
    const Vec3 d = bond_vector(t.positions, t.period, g.bonds[bi], v.atoms[a]);
    if ((v.x[b] - v.x[a] - d).norm() > 1e-9 * std::max(1.0, t.period)) fail("bonds do not close around the hexagon");
  }
  v.bonds = cell_bonds(v.x);
  v.angles = cell_angles(v.x);
  return v;
}

std::vector<CellView> extract_cells(const Nanotube& t, const BondGraph& g) {
  std::vector<CellView> out;
  const int nc = 2 * t.m * t.ell;
  out.reserve(nc);
  for (int c = 0; c < nc; ++c) out.push_back(extract_cell(t, g, center_id(c, t.ell)));
  return out;
}

CellBonds cell_bonds(const CellPoints& x) {
  CellBonds b;
  for (int q = 0; q < 8; ++q) b[q] = (x[kCellBondPairs[q][0]] - x[kCellBondPairs[q][1]]).norm();
  return b;
}

CellAngles cell_angles(const CellPoints& x) {
  CellAngles a;
  for (int q = 0; q < 10; ++q) {
    const auto& tr = kCellAngleTriples[q];
    a[q] = bond_angle(x[tr[0]], x[tr[1]], x[tr[2]]);
  }
  return a;
}

double cell_energy_from_values(const CellAngles& a, const CellBonds& b, const PotentialSet& p) {
  double e = 0.0;
  for (int q = 0; q < 10; ++q) e += kAngleWeights[q] * p.v3(a[q]);
  for (int q = 0; q < 8; ++q) e += kBondWeights[q] * p.v2(b[q]);
  return e;
}

double cell_energy(const CellPoints& x, const PotentialSet& p) {
  return cell_energy_from_values(cell_angles(x), cell_bonds(x), p);
}

double cell_energy(const CellView& c, const PotentialSet& p) {
  return cell_energy_from_values(c.angles, c.bonds, p);
}

double plane_angle_theta(const Vec3& x, const Vec3& axial, const Vec3& a, const Vec3& b) {
  const Vec3 s = axial - x;
  return folded_angle(s.cross(a - x), s.cross(b - x));
}

double angle_between_planes(const Vec3& p, const Vec3& q, const Vec3& r, const Vec3& s,
                            const Vec3& t) {
  return folded_angle((q - p).cross(r - p), (s - p).cross(t - p));
}

PlaneAngles cell_plane_angles(const CellPoints& x) {
  PlaneAngles pa;
  pa.left = angle_between_planes(x[0], x[2], x[3], x[5], x[4]);
  pa.right = angle_between_planes(x[1], x[2], x[3], x[4], x[5]);
  pa.dual_left = plane_angle_theta(x[1], x[7], x[3], x[4]);
  pa.dual_right = plane_angle_theta(x[0], x[6], x[2], x[5]);
  return pa;
}

double dual_center_distance(const CellPoints& x) {
  return (0.5 * (x[1] + x[7]) - 0.5 * (x[0] + x[6])).norm();
}

CellPoints to_local_frame(const CellPoints& x) {
  const Vec3 d0 = 0.5 * (x[0] + x[6]), d1 = 0.5 * (x[1] + x[7]);
  Vec3 e1 = d1 - d0;
  const double len = e1.norm();
  if (len < 1e-12) throw Error(ErrorKind::InvalidCell, "local frame: coincident dual centers");
  e1 /= len;
  Vec3 e2 = x[3] - x[4];
  e2 -= e2.dot(e1) * e1;
  const double w = e2.norm();
  if (w < 1e-12) throw Error(ErrorKind::InvalidCell, "local frame: x4 - x5 parallel to the axis");
  e2 /= w;
  const Vec3 e3 = e1.cross(e2);
  const Vec3 mid = 0.5 * (x[0] + x[1]);
  const Vec3 origin = d0 + (mid - d0).dot(e1) * e1;
  CellPoints y;
  for (int a = 0; a < 8; ++a) {
    const Vec3 r = x[a] - origin;
    y[a] = Vec3(r.dot(e1), r.dot(e2), r.dot(e3));
  }
  return y;
}

CellPoints reflect_s1(const CellPoints& x) {
  static constexpr std::array<int, 8> perm = {0, 1, 5, 4, 3, 2, 6, 7};
  CellPoints y;
  for (int a = 0; a < 8; ++a) {
    y[a] = x[perm[a]];
    y[a].y() = -y[a].y();
  }
  return y;
}

CellPoints reflect_s2(const CellPoints& x) {
  static constexpr std::array<int, 8> perm = {1, 0, 3, 2, 5, 4, 7, 6};
  CellPoints y;
  for (int a = 0; a < 8; ++a) {
    y[a] = x[perm[a]];
    y[a].x() = -y[a].x();
  }
  return y;
}

Symmetrization symmetrize(const CellPoints& local, const CellPoints& reference) {
  auto average = [&](const CellPoints& x, CellPoints (*reflect)(const CellPoints&)) {
    CellPoints d;
    for (int a = 0; a < 8; ++a) d[a] = x[a] - reference[a];
    const CellPoints r = reflect(d);
    CellPoints out;
    for (int a = 0; a < 8; ++a) out[a] = reference[a] + 0.5 * (d[a] + r[a]);
    return out;
  };
  Symmetrization s;
  s.half = average(local, reflect_s1);
  s.full = average(s.half, reflect_s2);
  for (int a = 0; a < 8; ++a)
    s.delta += (local[a] - s.half[a]).squaredNorm() + (s.half[a] - s.full[a]).squaredNorm();
  return s;
}

double symmetry_defect(const CellPoints& x, const CellPoints& reference) {
  return symmetrize(to_local_frame(x), reference).delta;
}

double symmetry_defect(const CellPoints& x) {
  CellPoints zero;
  zero.fill(Vec3::Zero());
  return symmetry_defect(x, zero);
}

}  // namespace nanolab
