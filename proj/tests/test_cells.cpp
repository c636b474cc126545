#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nanolab/cells.hpp"
#include "nanolab/error.hpp"
#include "nanolab/reduced.hpp"

using namespace nanolab;

namespace {
constexpr double kPi = std::numbers::pi;

Nanotube family_tube(int ell, int m, double mu, double l1, double l2) {
  return build_nanotube(solve_family(ell, mu, l1, l2), m);
}

Nanotube perturbed(const Nanotube& t, double eta, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Nanotube out = t;
  for (auto& x : out.positions) {
    Vec3 d;
    do d = Vec3(u(rng), u(rng), u(rng));
    while (d.norm() > 1.0);
    x += eta * d;
  }
  return out;
}

double sum_cells(const Nanotube& t, const PotentialSet& p) {
  double s = 0.0;
  for (const auto& c : extract_cells(t, bond_graph(t))) s += cell_energy(c, p);
  return s;
}

CellPoints random_cell(std::mt19937_64& rng) {
  const auto t = family_tube(12, 3, 2.98, 1.0, 1.0);
  CellPoints x = extract_cell(t, bond_graph(t), {3, 1, 0}).x;
  std::normal_distribution<double> n(0.0, 0.02);
  for (auto& a : x) a += Vec3(n(rng), n(rng), n(rng));
  return x;
}
}  // namespace

TEST(Cells, CenterCountAndIndexRoundTrip) {
  const auto t = family_tube(8, 3, 2.95, 1.0, 1.02);
  const auto c = centers(t);
  EXPECT_EQ(c.centers.size(), 48u);
  EXPECT_EQ(c.duals.size(), 48u);
  for (int q = 0; q < 48; ++q) EXPECT_EQ(center_index(center_id(q, 8), 8), q);
}

TEST(Cells, CentersAndDualsShareCrossSections) {
  const int ell = 10, m = 3;
  const auto t = family_tube(ell, m, 2.97, 1.01, 0.99);
  const auto c = centers(t);
  for (int j = 1; j < m; ++j) {
    const double ref = c.centers[center_index({1, j, 0}, ell)].x();
    for (int i = 1; i <= ell; ++i) {
      EXPECT_NEAR(c.centers[center_index({i, j, 0}, ell)].x(), ref, 1e-12);
      EXPECT_NEAR(c.duals[center_index({i, j - 1, 1}, ell)].x(), ref, 1e-12);
    }
  }
}

TEST(Cells, MidpointOfCoincidentPair) {
  Nanotube t = family_tube(6, 2, 2.95, 1.0, 1.0);
  const int lo = flat_index({2, 1, 0, 0}, 6), hi = flat_index({2, 1, 0, 1}, 6);
  t.positions[hi] = t.positions[lo];
  EXPECT_NEAR((centers(t).centers[center_index({2, 1, 0}, 6)] - t.positions[lo]).norm(), 0.0, 1e-15);
}

TEST(Cells, FamilyCellBondsAndAngles) {
  const auto g = solve_family(12, 2.97, 1.01, 0.995);
  const auto t = build_nanotube(g, 3);
  for (const auto& c : extract_cells(t, bond_graph(t))) {
    const double expect_b[8] = {g.lambda1, g.lambda1, g.lambda2, g.lambda2, g.lambda2, g.lambda2, g.lambda1, g.lambda1};
    for (int q = 0; q < 8; ++q) EXPECT_NEAR(c.bonds[q], expect_b[q], 1e-10);
    EXPECT_NEAR(c.angles[0], g.beta, 1e-10);
    EXPECT_NEAR(c.angles[1], g.beta, 1e-10);
    for (int q = 2; q < 10; ++q) EXPECT_NEAR(c.angles[q], g.alpha, 1e-10);
    EXPECT_NEAR(c.bonds[6], 2.0 * (0.5 * (c.x[0] + c.x[6]) - c.x[0]).norm(), 1e-12);
  }
}

TEST(Cells, DecompositionOnFamily) {
  for (const auto& p : {default_soft(), default_stiff()}) {
    const auto t = family_tube(12, 4, 2.99, 1.0, 1.0);
    EXPECT_NEAR(sum_cells(t, p), total_energy(t, p), 1e-9 * t.size());
  }
}

TEST(Cells, DecompositionOnPerturbedTubes) {
  const auto p = default_soft();
  const auto base = family_tube(12, 4, 2.99, 1.0, 1.0);
  for (unsigned s = 0; s < 10; ++s) {
    const auto t = perturbed(base, 1e-3, s);
    EXPECT_NEAR(sum_cells(t, p), total_energy(t, p), 1e-9 * t.size());
  }
}

TEST(Cells, FamilyCellMatchesSymmetricEnergy) {
  const auto p = default_soft();
  const int ell = 16;
  const auto g = solve_family(ell, 2.99, 1.003, 0.998);
  const auto t = build_nanotube(g, 2);
  const double ge = gamma_ell(ell);
  const ReducedPoint pt{g.mu, ge, ge, g.lambda2, g.alpha, g.alpha};
  for (const auto& c : extract_cells(t, bond_graph(t))) EXPECT_NEAR(cell_energy(c, p), sym_energy(pt, p), 1e-10);
}

TEST(Cells, ZeroPotentialsGiveZero) {
  PotentialSet z = default_soft();
  z.v2 = z.v3 = [](double) { return 0.0; };
  const auto t = family_tube(8, 2, 2.98, 1.0, 1.0);
  EXPECT_EQ(sum_cells(t, z), 0.0);
}

TEST(Cells, PerturbationIsLocal) {
  const auto p = default_soft();
  const auto t = family_tube(8, 3, 2.98, 1.0, 1.0);
  const auto g = bond_graph(t);
  const auto before = extract_cells(t, g);
  Nanotube moved = t;
  const int atom = flat_index({4, 1, 1, 0}, 8);
  moved.positions[atom] += Vec3(3e-4, -2e-4, 5e-4);
  const auto after = extract_cells(moved, g);
  for (size_t q = 0; q < before.size(); ++q) {
    bool contains = false;
    for (int a : before[q].atoms) contains |= a == atom;
    const double diff = std::abs(cell_energy(after[q], p) - cell_energy(before[q], p));
    if (contains)
      EXPECT_GT(diff, 0.0);
    else
      EXPECT_EQ(diff, 0.0);
  }
}

TEST(Cells, MissingBondIsInvalid) {
  const auto t = family_tube(8, 2, 2.98, 1.0, 1.0);
  auto g = bond_graph(t);
  std::vector<Bond> bonds(g.bonds.begin() + 1, g.bonds.end());
  const auto cut = graph_from_bonds(t.size(), bonds);
  int invalid = 0;
  for (int q = 0; q < 32; ++q) {
    try {
      extract_cell(t, cut, center_id(q, 8));
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidCell);
      ++invalid;
    }
  }
  EXPECT_GT(invalid, 0);
}

TEST(Cells, ThetaFlatAndInvariant) {
  const Vec3 x(0, 0, 0), ax(1, 0, 0), a(-0.5, 0.8, 0), b(-0.5, -0.8, 0);
  EXPECT_NEAR(plane_angle_theta(x, ax, a, b), kPi, 1e-12);
  const Vec3 b2(-0.5, -0.8, 0.3);
  const double th = plane_angle_theta(x, ax, a, b2);
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Vec3 s(4, -1, 2);
  EXPECT_NEAR(plane_angle_theta(r * x + s, r * ax + s, r * a + s, r * b2 + s), th, 1e-12);
}

TEST(Cells, CollinearThetaIsDegenerate) {
  EXPECT_THROW(plane_angle_theta(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0)), Error);
}

TEST(Cells, FamilyPlaneAnglesAndSum) {
  const int ell = 12, m = 3;
  const auto t = family_tube(ell, m, 2.97, 1.0, 1.01);
  const double ge = gamma_ell(ell);
  double sum = 0.0;
  for (const auto& c : extract_cells(t, bond_graph(t))) {
    const auto pa = cell_plane_angles(c.x);
    EXPECT_NEAR(pa.left, ge, 1e-10);
    EXPECT_NEAR(pa.right, ge, 1e-10);
    EXPECT_NEAR(pa.dual_left, ge, 1e-10);
    EXPECT_NEAR(pa.dual_right, ge, 1e-10);
    EXPECT_NEAR(pa.mean(), 0.25 * (pa.left + pa.right + pa.dual_left + pa.dual_right), 1e-15);
    sum += pa.left + pa.right + pa.dual_left + pa.dual_right;
  }
  EXPECT_NEAR(sum, 4.0 * m * (2 * ell - 2) * kPi, 1e-8);
}

TEST(Cells, FamilyCellsHaveNoSymmetryDefect) {
  const auto t = family_tube(12, 2, 2.99, 1.02, 0.99);
  const auto cells = extract_cells(t, bond_graph(t));
  const CellPoints ref = to_local_frame(cells[0].x);
  for (const auto& c : cells) {
    const auto local = to_local_frame(c.x);
    EXPECT_LT(symmetrize(local, ref).delta, 1e-20);
    for (int a = 0; a < 8; ++a) EXPECT_NEAR((local[a] - ref[a]).norm(), 0.0, 1e-10);
    EXPECT_GT(local[2].z(), 0.0);  // hexagon wings bend towards the interior
  }
}

TEST(Cells, ReflectionsPreserveCellEnergy) {
  std::mt19937_64 rng(7);
  const auto p = default_soft();
  for (int s = 0; s < 20; ++s) {
    const auto x = to_local_frame(random_cell(rng));
    EXPECT_NEAR(cell_energy(reflect_s1(x), p), cell_energy(x, p), 1e-10);
    EXPECT_NEAR(cell_energy(reflect_s2(x), p), cell_energy(x, p), 1e-10);
  }
}

TEST(Cells, SymmetrizedCellIsSymmetric) {
  std::mt19937_64 rng(11);
  const auto t = family_tube(12, 3, 2.98, 1.0, 1.0);
  const CellPoints ref = to_local_frame(extract_cell(t, bond_graph(t), {1, 1, 0}).x);
  for (int s = 0; s < 20; ++s) {
    const auto x = to_local_frame(random_cell(rng));
    const auto sym = symmetrize(x, ref);
    EXPECT_GT(sym.delta, 0.0);
    EXPECT_NEAR(symmetrize(sym.full, ref).delta, 0.0, 1e-24);
    const auto b = cell_bonds(sym.full);
    const auto a = cell_angles(sym.full);
    EXPECT_NEAR(b[0], b[1], 1e-10);
    EXPECT_NEAR(b[6], b[7], 1e-10);
    for (int q = 3; q < 6; ++q) EXPECT_NEAR(b[q], b[2], 1e-10);
    EXPECT_NEAR(a[0], a[1], 1e-10);
    for (int q = 3; q < 6; ++q) EXPECT_NEAR(a[q], a[2], 1e-10);
    for (int q = 7; q < 10; ++q) EXPECT_NEAR(a[q], a[6], 1e-10);
    EXPECT_NEAR(dual_center_distance(sym.full), dual_center_distance(x), 1e-12);
  }
}

TEST(Cells, DefectIndependentOfSymmetricReference) {
  std::mt19937_64 rng(3);
  const auto x = to_local_frame(random_cell(rng));
  const auto t1 = family_tube(12, 3, 2.98, 1.0, 1.0);
  const auto t2 = family_tube(20, 3, 3.05, 1.05, 0.95);
  const double d1 = symmetrize(x, to_local_frame(extract_cell(t1, bond_graph(t1), {1, 1, 0}).x)).delta;
  const double d2 = symmetrize(x, to_local_frame(extract_cell(t2, bond_graph(t2), {1, 1, 0}).x)).delta;
  EXPECT_NEAR(d1, d2, 1e-14);
}
