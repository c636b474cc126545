#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "nanolab/cellspec.hpp"
#include "nanolab/reduced.hpp"

using namespace nanolab;

namespace {
constexpr double kPi = std::numbers::pi;

// Second, independent transcription of the good and bad vectors; "r3" stands for sqrt(3).
const char* kGoodText[13] = {
    "-1,0,0 | 1,0,0 | -1/2,r3/2,0 | 1/2,r3/2,0 | 1/2,-r3/2,0 | -1/2,-r3/2,0 | 0,0,0 | 0,0,0",
    "0,0,0 | 0,0,0 | 1/2,r3/2,0 | -1/2,r3/2,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
    "0,0,0 | 1,0,0 | 0,0,0 | 1,0,0 | 1,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
    "0,0,0 | 1/2,-r3/2,0 | 1/2,r3/2,0 | -1/2,r3/2,0 | 1,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
    "0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | -1,0,0 | 0,0,0",
    "0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | -1,0,0 | 1,0,0",
    "r3,0,0 | 0,0,0 | 0,1,0 | 0,0,0 | 0,0,0 | 0,-1,0 | 0,0,0 | 0,0,0",
    "0,0,0 | 0,0,0 | r3/2,-1/2,0 | r3/2,1/2,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
    "r3/2,1/2,0 | -r3/2,1/2,0 | 0,1,0 | 0,1,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
    "0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,1,0 | 0,0,0",
    "0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,1,0 | 0,1,0",
    "1,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
    "0,1,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
};
const char* kBadText[5] = {
    "0,0,1 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
    "0,0,1 | 0,0,0 | 0,0,1 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0",
    "0,0,1 | 0,0,0 | 0,0,0 | 0,0,1 | 0,0,1 | 0,0,0 | 0,0,0 | 0,0,0",
    "0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,1 | 0,0,0",
    "0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,0 | 0,0,1 | 0,0,1",
};

double parse_entry(std::string s) {
  double sign = 1.0;
  if (!s.empty() && s[0] == '-') {
    sign = -1.0;
    s = s.substr(1);
  }
  double den = 1.0;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    den = std::stod(s.substr(slash + 1));
    s = s.substr(0, slash);
  }
  const double num = s == "r3" ? std::sqrt(3.0) : std::stod(s);
  return sign * num / den;
}

CellVector parse_vector(const std::string& text) {
  std::string cleaned;
  for (char ch : text) cleaned += (ch == '|' || ch == ',') ? ' ' : ch;
  std::istringstream in(cleaned);
  CellVector v;
  std::string tok;
  int n = 0;
  while (in >> tok) v(n++) = parse_entry(tok);
  EXPECT_EQ(n, 24);
  return v;
}

int sparsity_mask(const CellVector& v) {
  int m = 0;
  for (int i = 0; i < 24; ++i)
    if (v(i) != 0.0) m |= 1 << i;
  return m;
}
}  // namespace

TEST(CellSpec, BasisTranscription) {
  const auto& b = cell_basis();
  ASSERT_EQ(b.good.size(), 13u);
  ASSERT_EQ(b.bad.size(), 5u);
  for (int q = 0; q < 13; ++q) {
    const CellVector ref = parse_vector(kGoodText[q]);
    EXPECT_EQ(sparsity_mask(b.good[q]), sparsity_mask(ref)) << "u" << q + 1;
    EXPECT_NEAR((b.good[q] - ref).norm(), 0.0, 1e-15) << "u" << q + 1;
  }
  for (int q = 0; q < 5; ++q) {
    const CellVector ref = parse_vector(kBadText[q]);
    EXPECT_EQ(sparsity_mask(b.bad[q]), sparsity_mask(ref));
    EXPECT_EQ((b.bad[q] - ref).norm(), 0.0);
  }
}

TEST(CellSpec, BasisRankAndOrthogonality) {
  const auto& b = cell_basis();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b.all());
  EXPECT_EQ(lu.rank(), 24);
  for (const auto& u : b.good)
    for (const auto& w : b.bad) EXPECT_EQ(u.dot(w), 0.0);
}

TEST(CellSpec, RotationsOfPlanarCell) {
  const auto& b = cell_basis();
  const auto x0 = planar_reference();
  // In-plane rotation moves x1 = (-1, 0, 0) along +e2; out-of-plane ones only lift points.
  EXPECT_NEAR((b.degen[3].segment<3>(0) - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
  for (int a = 0; a < 8; ++a) {
    EXPECT_EQ(b.degen[4](3 * a + 2), -x0[a].x());
    EXPECT_EQ(b.degen[5](3 * a + 2), -x0[a].y());
  }
}

TEST(CellSpec, PlanarReferenceValues) {
  const TValue t = t_map(planar_reference());
  for (int q = 0; q < 10; ++q) EXPECT_NEAR(t(q), 2.0 * kPi / 3.0, 1e-14);
  for (int q = 10; q < 18; ++q) EXPECT_NEAR(t(q), 1.0, 1e-15);
  const auto s = angle_sums(t);
  EXPECT_NEAR(s(0), 4.0 * kPi, 1e-13);
  EXPECT_NEAR(s(1), 2.0 * kPi, 1e-13);
  EXPECT_NEAR(s(2), 2.0 * kPi, 1e-13);
}

TEST(CellSpec, KinkHasUnitBonds) {
  for (int ell : {16, 32, 64}) {
    const TValue t = t_map(kink_configuration(ell, default_soft()));
    for (int q = 10; q < 18; ++q) EXPECT_NEAR(t(q), 1.0, 1e-14);
  }
}

TEST(CellSpec, KinkMatchesUnstretchedFamilyCell) {
  const auto p = default_soft();
  const int ell = 16;
  const auto ref = reference_angles(ell, p);
  const auto t = build_nanotube(solve_family(ell, ref.mu_us, 1.0, 1.0), 2);
  const auto local = to_local_frame(extract_cell(t, bond_graph(t), {2, 1, 1}).x);
  const auto kink = kink_configuration(ell, ref.alpha_us);
  for (int a = 0; a < 8; ++a) EXPECT_NEAR((local[a] - kink[a]).norm(), 0.0, 1e-10) << a;
  EXPECT_EQ(symmetrize(kink, kink).delta, 0.0);
}

TEST(CellSpec, KinkDistanceDecaysLikeInverseEll) {
  const auto p = default_soft();
  double worst = 0.0;
  for (int ell : {16, 32, 64, 128}) {
    const double d = (flatten(planar_reference()) - flatten(kink_configuration(ell, p))).norm();
    worst = std::max(worst, d * ell);
  }
  EXPECT_LT(worst, 10.0);
}

TEST(CellSpec, CellEnergyEqualsTildeEOfT) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.05);
  const auto p = default_soft();
  for (int s = 0; s < 50; ++s) {
    CellPoints x = kink_configuration(24, p);
    for (auto& a : x) a += Vec3(n(rng), n(rng), n(rng));
    const TValue t = t_map(x);
    CellAngles ang;
    CellBonds bon;
    for (int q = 0; q < 10; ++q) ang[q] = t(q);
    for (int q = 0; q < 8; ++q) bon[q] = t(10 + q);
    EXPECT_NEAR(cell_energy(x, p), cell_energy_from_values(ang, bon, p), 1e-12);
  }
}

TEST(CellSpec, CellGradientMatchesFiniteDifferences) {
  const auto p = default_soft();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 0.02);
  CellPoints x = kink_configuration(16, p);
  for (auto& a : x) a += Vec3(n(rng), n(rng), n(rng));
  const CellVector g = cell_energy_gradient(x, p);
  const CellVector x0 = flatten(x);
  const double h = 1e-6;
  for (int c = 0; c < 24; ++c) {
    CellVector xp = x0, xm = x0;
    xp(c) += h;
    xm(c) -= h;
    const double fd = (cell_energy(unflatten(xp), p) - cell_energy(unflatten(xm), p)) / (2 * h);
    EXPECT_NEAR(g(c), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(CellSpec, AngleSumCapsOnRandomCells) {
  const auto rep = angle_sum_caps(10000, 0.05, 1);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_LE(rep.worst_excess, 1e-12);
}

TEST(CellSpec, JacobianKernelDimensions) {
  const auto rep = t_jacobian_kernel(planar_reference());
  EXPECT_EQ(rep.kernel_dim, 11);
  EXPECT_EQ(rep.angle_kernel_dim, 17);
  EXPECT_LT(rep.kernel_angle, 1e-4);
  EXPECT_GT(rep.min_good_image, 1e-6);
  EXPECT_TRUE(rep.passed);
}

TEST(CellSpec, PrincipalAngleBasics) {
  Eigen::MatrixXd a(3, 1), b(3, 1);
  a << 1, 0, 0;
  b << 1, 1, 0;
  EXPECT_NEAR(max_principal_angle(a, b), kPi / 4.0, 1e-12);
  EXPECT_NEAR(max_principal_angle(a, 3.0 * a), 0.0, 1e-12);
}

TEST(CellSpec, ConstrainedRayleighClosedForm) {
  // H = diag(-1, 2); constraint |v_1| <= r |v|: optimum at v_1^2 = r^2.
  Eigen::MatrixXd h(2, 2), w(2, 1);
  h << -1, 0, 0, 2;
  w << 1, 0;
  for (double r : {0.3, 0.6, 0.9}) {
    const auto res = constrained_min_rayleigh(h, w, r);
    EXPECT_NEAR(res.value, -r * r + 2.0 * (1.0 - r * r), 1e-9) << r;
  }
  // Unconstrained minimizer already feasible.
  h << 3, 0, 0, -1;
  EXPECT_NEAR(constrained_min_rayleigh(h, w, 0.5).value, -1.0, 1e-12);
}

TEST(CellSpec, ConstrainedRayleighBelowSampledFeasibleValues) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(4, 4), w(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = n(rng);
  const Eigen::MatrixXd h = a + a.transpose();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) w(i, j) = n(rng);
  const double r = 0.7;
  const auto res = constrained_min_rayleigh(h, w, r);
  const Eigen::MatrixXd q = orthonormal_columns(w);
  double best = 1e300;
  for (int s = 0; s < 200000; ++s) {
    Eigen::Vector4d v(n(rng), n(rng), n(rng), n(rng));
    v.normalize();
    if ((q.transpose() * v).norm() > r) continue;
    const double val = v.dot(h * v);
    EXPECT_GE(val, res.value - 1e-9);
    best = std::min(best, val);
  }
  EXPECT_LT(best - res.value, 0.05);
}

TEST(CellSpec, TildeEDerivativeSigns) {
  for (const auto& p : {default_soft(), default_stiff()}) {
    const auto s = tilde_e_scaling({16, 32, 64}, p);
    for (const auto& r : s.reports) {
      EXPECT_LT(r.max_bond_gradient, 1e-10);
      EXPECT_LT(r.max_angle_gradient, 0.0);
      EXPECT_GT(r.hessian_diagonal.minCoeff(), 0.0);
    }
    EXPECT_NEAR(s.slope_min, -2.0, 0.2);
    EXPECT_NEAR(s.slope_max, -2.0, 0.2);
  }
}

TEST(CellSpec, OutOfPlaneMoveLowersJunctionAngles) {
  const CellPoints x0 = planar_reference();
  for (double t : {1e-2, 5e-3, 2e-3}) {
    CellPoints x = x0;
    x[0].z() += t;
    const TValue v = t_map(x);
    const double expected = std::acos(-0.5 + 1.5 * t * t);
    EXPECT_NEAR(v(0), expected, 5.0 * t * t * t);
    EXPECT_LT(angle_sums(v)(1), 2.0 * kPi);
  }
}

TEST(CellSpec, AngleSumHessianAnnihilatesRigidMotions) {
  const Eigen::MatrixXd q = angle_sum_hessian(planar_reference());
  for (const auto& d : cell_basis().degen) EXPECT_LT((q * d).norm(), 1e-6);
}

TEST(CellSpec, ConvexityAtKink) {
  for (const auto& p : {default_soft(), default_stiff()}) {
    const auto s = cell_convexity_scaling({16, 32, 64}, p, 0.9);
    for (const auto& r : s.reports) {
      EXPECT_GT(r.good_min, 0.0);
      EXPECT_GT(r.away_min, 0.0);
      EXPECT_LT(r.kink_concavity, 0.0);
      EXPECT_LT(r.max_single_sum_eigenvalue, 1e-6);
    }
    EXPECT_NEAR(s.away_slope, -2.0, 0.3);
    EXPECT_TRUE(s.passed);
  }
}

TEST(CellSpec, EnergyInvariantUnderReflectionsNearKink) {
  const auto p = default_soft();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.03);
  for (int s = 0; s < 10; ++s) {
    CellPoints x = kink_configuration(20, p);
    for (auto& a : x) a += Vec3(n(rng), n(rng), n(rng));
    EXPECT_NEAR(cell_energy(reflect_s1(x), p), cell_energy(x, p), 1e-10);
    EXPECT_NEAR(cell_energy(reflect_s2(x), p), cell_energy(x, p), 1e-10);
  }
}
