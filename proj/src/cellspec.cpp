#include "nanolab/cellspec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nanolab/error.hpp"
#include "nanolab/fit.hpp"
#include "nanolab/reduced.hpp"

namespace nanolab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kS3 = std::sqrt(3.0);

CellVector from_blocks(std::initializer_list<std::array<double, 3>> blocks) {
  CellVector v = CellVector::Zero();
  int a = 0;
  for (const auto& b : blocks) {
    v.segment<3>(3 * a) = Vec3(b[0], b[1], b[2]);
    ++a;
  }
  return v;
}

CellBasis make_basis() {
  CellBasis B;
  const std::array<double, 3> o = {0, 0, 0};
  for (int d = 0; d < 3; ++d) {
    CellVector v = CellVector::Zero();
    for (int a = 0; a < 8; ++a) v(3 * a + d) = 1.0;
    B.degen.push_back(v);
  }
  const CellPoints x0 = planar_reference();
  Eigen::Matrix3d r1, r2, r3;
  r1 << 0, 1, 0, -1, 0, 0, 0, 0, 0;
  r2 << 0, 0, 1, 0, 0, 0, -1, 0, 0;
  r3 << 0, 0, 0, 0, 0, 1, 0, -1, 0;
  for (const Eigen::Matrix3d* r : {&r1, &r2, &r3}) {
    CellVector v;
    for (int a = 0; a < 8; ++a) v.segment<3>(3 * a) = (*r) * x0[a];
    B.degen.push_back(v);
  }

  const double h = 0.5, q = kS3 / 2.0;
  B.good = {
      from_blocks({{-1, 0, 0}, {1, 0, 0}, {-h, q, 0}, {h, q, 0}, {h, -q, 0}, {-h, -q, 0}, o, o}),
      from_blocks({o, o, {h, q, 0}, {-h, q, 0}, o, o, o, o}),
      from_blocks({o, {1, 0, 0}, o, {1, 0, 0}, {1, 0, 0}, o, o, o}),
      from_blocks({o, {h, -q, 0}, {h, q, 0}, {-h, q, 0}, {1, 0, 0}, o, o, o}),
      from_blocks({o, o, o, o, o, o, {-1, 0, 0}, o}),
      from_blocks({o, o, o, o, o, o, {-1, 0, 0}, {1, 0, 0}}),
      from_blocks({{kS3, 0, 0}, o, {0, 1, 0}, o, o, {0, -1, 0}, o, o}),
      from_blocks({o, o, {q, -h, 0}, {q, h, 0}, o, o, o, o}),
      from_blocks({{q, h, 0}, {-q, h, 0}, {0, 1, 0}, {0, 1, 0}, o, o, o, o}),
      from_blocks({o, o, o, o, o, o, {0, 1, 0}, o}),
      from_blocks({o, o, o, o, o, o, {0, 1, 0}, {0, 1, 0}}),
      from_blocks({{1, 0, 0}, o, o, o, o, o, o, o}),
      from_blocks({{0, 1, 0}, o, o, o, o, o, o, o}),
  };
  const std::array<double, 3> z = {0, 0, 1};
  B.bad = {
      from_blocks({z, o, o, o, o, o, o, o}),
      from_blocks({z, o, z, o, o, o, o, o}),
      from_blocks({z, o, o, z, z, o, o, o}),
      from_blocks({o, o, o, o, o, o, z, o}),
      from_blocks({o, o, o, o, o, o, z, z}),
  };
  return B;
}

Eigen::MatrixXd columns(const std::vector<CellVector>& vs) {
  Eigen::MatrixXd m(24, vs.size());
  for (size_t c = 0; c < vs.size(); ++c) m.col(c) = vs[c];
  return m;
}

// Weights of the ten angles in a1 + a2 + a3 (which = 0) or in a single a_j.
std::array<double, 10> angle_sum_weights(int which) {
  std::array<double, 10> w{};
  if (which == 0 || which == 1)
    for (int i = 0; i < 6; ++i) w[i] += 1.0;
  if (which == 0 || which == 2)
    for (int i : {0, 6, 7}) w[i] += 1.0;
  if (which == 0 || which == 3)
    for (int i : {1, 8, 9}) w[i] += 1.0;
  return w;
}

CellVector weighted_angle_gradient(const CellPoints& x, const std::array<double, 10>& w) {
  CellVector g = CellVector::Zero();
  for (int q = 0; q < 10; ++q) {
    if (w[q] == 0.0) continue;
    const auto& t = kCellAngleTriples[q];
    Vec3 ga, gv, gb;
    bond_angle_gradient(x[t[0]], x[t[1]], x[t[2]], ga, gv, gb);
    g.segment<3>(3 * t[0]) += w[q] * ga;
    g.segment<3>(3 * t[1]) += w[q] * gv;
    g.segment<3>(3 * t[2]) += w[q] * gb;
  }
  return g;
}

template <class Grad>
Eigen::Matrix<double, 24, 24> hessian_of(const CellPoints& x, Grad grad, double h) {
  const CellVector x0 = flatten(x);
  auto central = [&](double s) {
    Eigen::Matrix<double, 24, 24> m;
    for (int c = 0; c < 24; ++c) {
      CellVector xp = x0, xm = x0;
      xp(c) += s;
      xm(c) -= s;
      m.col(c) = (grad(unflatten(xp)) - grad(unflatten(xm))) / (2.0 * s);
    }
    return m;
  };
  const Eigen::Matrix<double, 24, 24> rich = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  return 0.5 * (rich + rich.transpose());
}

}  // namespace

CellVector flatten(const CellPoints& x) {
  CellVector v;
  for (int a = 0; a < 8; ++a) v.segment<3>(3 * a) = x[a];
  return v;
}

CellPoints unflatten(const CellVector& v) {
  CellPoints x;
  for (int a = 0; a < 8; ++a) x[a] = v.segment<3>(3 * a);
  return x;
}

CellPoints planar_reference() {
  const double q = kS3 / 2.0;
  return {Vec3(-1, 0, 0), Vec3(1, 0, 0), Vec3(-0.5, q, 0), Vec3(0.5, q, 0),
          Vec3(0.5, -q, 0), Vec3(-0.5, -q, 0), Vec3(-2, 0, 0), Vec3(2, 0, 0)};
}

CellPoints kink_configuration(int ell, double alpha_us) {
  const double g = gamma_ell(ell);
  const double sigma = -std::cos(alpha_us), s = std::sin(alpha_us);
  const double y = s * std::sin(0.5 * g), z = s * std::cos(0.5 * g);
  return {Vec3(-0.5 - sigma, 0, 0), Vec3(0.5 + sigma, 0, 0), Vec3(-0.5, y, z), Vec3(0.5, y, z),
          Vec3(0.5, -y, z), Vec3(-0.5, -y, z), Vec3(-1.5 - sigma, 0, 0), Vec3(1.5 + sigma, 0, 0)};
}

CellPoints kink_configuration(int ell, const PotentialSet& p) {
  return kink_configuration(ell, reference_angles(ell, p).alpha_us);
}

Eigen::MatrixXd CellBasis::degen_matrix() const { return columns(degen); }

Eigen::MatrixXd CellBasis::degen_and_bad_matrix() const {
  auto all_vs = degen;
  all_vs.insert(all_vs.end(), bad.begin(), bad.end());
  return columns(all_vs);
}

Eigen::MatrixXd CellBasis::all() const {
  auto all_vs = degen;
  all_vs.insert(all_vs.end(), good.begin(), good.end());
  all_vs.insert(all_vs.end(), bad.begin(), bad.end());
  return columns(all_vs);
}

const CellBasis& cell_basis() {
  static const CellBasis basis = make_basis();
  return basis;
}

TValue t_map(const CellPoints& x) {
  TValue t;
  const auto a = cell_angles(x);
  const auto b = cell_bonds(x);
  for (int q = 0; q < 10; ++q) t(q) = a[q];
  for (int q = 0; q < 8; ++q) t(10 + q) = b[q];
  return t;
}

Eigen::Vector3d angle_sums(const TValue& t) {
  return {t.head<6>().sum(), t(0) + t(6) + t(7), t(1) + t(8) + t(9)};
}

Eigen::Matrix<double, 18, 24> t_jacobian(const CellPoints& x, double h) {
  const CellVector x0 = flatten(x);
  Eigen::Matrix<double, 18, 24> j;
  for (int c = 0; c < 24; ++c) {
    CellVector xp = x0, xm = x0;
    xp(c) += h;
    xm(c) -= h;
    j.col(c) = (t_map(unflatten(xp)) - t_map(unflatten(xm))) / (2.0 * h);
  }
  return j;
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12 * std::max(1.0, s(0))) ++rank;
  return svd.matrixU().leftCols(rank);
}

double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd qa = orthonormal_columns(a), qb = orthonormal_columns(b);
  if (qa.cols() != qb.cols()) return kPi / 2.0;
  const Eigen::MatrixXd resid = qa - qb * (qb.transpose() * qa);
  const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(resid).singularValues()(0);
  return std::asin(std::min(1.0, s));
}

KernelReport t_jacobian_kernel(const CellPoints& x, double threshold) {
  KernelReport rep;
  const Eigen::Matrix<double, 18, 24> j = t_jacobian(x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  rep.singular_values = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < rep.singular_values.size(); ++i)
    if (rep.singular_values(i) > threshold * rep.singular_values(0)) ++rank;
  rep.kernel_dim = 24 - rank;
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(rep.kernel_dim);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd_a(j.topRows<10>());
  rep.angle_singular_values = svd_a.singularValues();
  int rank_a = 0;
  for (int i = 0; i < rep.angle_singular_values.size(); ++i)
    if (rep.angle_singular_values(i) > threshold * rep.angle_singular_values(0)) ++rank_a;
  rep.angle_kernel_dim = 24 - rank_a;

  rep.kernel_angle = max_principal_angle(kernel, cell_basis().degen_and_bad_matrix());
  rep.min_good_image = std::numeric_limits<double>::infinity();
  for (const auto& u : cell_basis().good) rep.min_good_image = std::min(rep.min_good_image, (j * u).norm());
  rep.passed = rep.kernel_dim == 11 && rep.angle_kernel_dim == 17 && rep.kernel_angle < 1e-4 &&
               rep.min_good_image > 1e-6;
  return rep;
}

AngleCapReport angle_sum_caps(int samples, double radius, unsigned long long seed) {
  AngleCapReport rep;
  rep.samples = samples;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const CellPoints x0 = planar_reference();
  const Eigen::Vector3d caps(4.0 * kPi, 2.0 * kPi, 2.0 * kPi);
  for (int s = 0; s < samples; ++s) {
    CellPoints x = x0;
    for (auto& a : x) {
      Vec3 d;
      do d = Vec3(u(rng), u(rng), u(rng));
      while (d.norm() > 1.0);
      a += radius * d;
    }
    const Eigen::Vector3d excess = angle_sums(t_map(x)) - caps;
    rep.worst_excess = std::max(rep.worst_excess, excess.maxCoeff());
    // Planar configurations sit exactly on the cap, so allow rounding.
    if (excess.maxCoeff() > 1e-12) ++rep.violations;
  }
  return rep;
}

TildeEReport tilde_e_derivatives(int ell, const PotentialSet& p) {
  TildeEReport rep;
  rep.ell = ell;
  rep.point = t_map(kink_configuration(ell, p));
  for (int q = 0; q < 10; ++q) {
    rep.gradient(q) = kAngleWeights[q] * p.dv3(rep.point(q));
    rep.hessian_diagonal(q) = kAngleWeights[q] * p.d2v3(rep.point(q));
  }
  for (int q = 0; q < 8; ++q) {
    rep.gradient(10 + q) = kBondWeights[q] * p.dv2(rep.point(10 + q));
    rep.hessian_diagonal(10 + q) = kBondWeights[q] * p.d2v2(rep.point(10 + q));
  }
  rep.max_bond_gradient = rep.gradient.tail<8>().cwiseAbs().maxCoeff();
  rep.min_angle_gradient = rep.gradient.head<10>().minCoeff();
  rep.max_angle_gradient = rep.gradient.head<10>().maxCoeff();
  rep.passed = rep.max_bond_gradient < 1e-10 && rep.max_angle_gradient < 0.0 && rep.hessian_diagonal.minCoeff() > 0.0;
  return rep;
}

TildeEScaling tilde_e_scaling(const std::vector<int>& ells, const PotentialSet& p) {
  TildeEScaling out;
  std::vector<double> xs, lo, hi;
  out.passed = true;
  for (int ell : ells) {
    out.reports.push_back(tilde_e_derivatives(ell, p));
    const auto& r = out.reports.back();
    out.passed = out.passed && r.passed;
    xs.push_back(ell);
    lo.push_back(std::max(-r.max_angle_gradient, 1e-300));
    hi.push_back(std::max(-r.min_angle_gradient, 1e-300));
  }
  out.slope_min = loglog_slope(xs, lo);
  out.slope_max = loglog_slope(xs, hi);
  out.passed = out.passed && std::abs(out.slope_min + 2.0) <= 0.2 && std::abs(out.slope_max + 2.0) <= 0.2;
  return out;
}

CellVector cell_energy_gradient(const CellPoints& x, const PotentialSet& p) {
  CellVector g = CellVector::Zero();
  for (int q = 0; q < 8; ++q) {
    const auto& pr = kCellBondPairs[q];
    const double b = (x[pr[0]] - x[pr[1]]).norm();
    Vec3 ga, gb;
    bond_length_gradient(x[pr[0]], x[pr[1]], ga, gb);
    const double f = kBondWeights[q] * p.dv2(b);
    g.segment<3>(3 * pr[0]) += f * ga;
    g.segment<3>(3 * pr[1]) += f * gb;
  }
  const auto ang = cell_angles(x);
  std::array<double, 10> w;
  for (int q = 0; q < 10; ++q) w[q] = kAngleWeights[q] * p.dv3(ang[q]);
  return g + weighted_angle_gradient(x, w);
}

Eigen::Matrix<double, 24, 24> cell_energy_hessian(const CellPoints& x, const PotentialSet& p, double h) {
  return hessian_of(x, [&](const CellPoints& y) { return cell_energy_gradient(y, p); }, h);
}

Eigen::Matrix<double, 24, 24> angle_sum_hessian(const CellPoints& x, int which, double h) {
  const auto w = angle_sum_weights(which);
  return hessian_of(x, [&](const CellPoints& y) { return weighted_angle_gradient(y, w); }, h);
}

ConstrainedMin constrained_min_rayleigh(const Eigen::MatrixXd& h, const Eigen::MatrixXd& w, double r) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidParameter, "r must lie in (0, 1)");
  const int n = static_cast<int>(h.rows());
  const Eigen::MatrixXd q = orthonormal_columns(w);
  const Eigen::MatrixXd shift = q * q.transpose() - r * r * Eigen::MatrixXd::Identity(n, n);
  auto dual = [&](double tau) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h + tau * shift);
    return es.eigenvalues()(0);
  };
  // The dual is concave in tau; bracket its maximum, then golden-section search.
  double lo = 0.0, hi = 1.0;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (dual(1e-9 * scale) <= dual(0.0)) {
    hi = 0.0;
  } else {
    while (dual(2.0 * hi) > dual(hi) && hi < 1e12 * scale) hi *= 2.0;
    hi *= 2.0;
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = dual(c), fd = dual(d);
  for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, b); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = dual(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = dual(d);
    }
  }
  ConstrainedMin out;
  out.tau = 0.5 * (a + b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h + out.tau * shift);
  out.value = es.eigenvalues()(0);
  out.argmin = es.eigenvectors().col(0);
  return out;
}

ConvexityReport cell_hessian_convexity(int ell, const PotentialSet& p, double r) {
  ConvexityReport rep;
  rep.ell = ell;
  rep.r = r;
  const auto& basis = cell_basis();
  const Eigen::MatrixXd h = cell_energy_hessian(kink_configuration(ell, p), p);
  rep.good_min = constrained_min_rayleigh(h, basis.degen_and_bad_matrix(), r).value;
  rep.away_min = constrained_min_rayleigh(h, basis.degen_matrix(), r).value;

  const CellPoints x0 = planar_reference();
  const Eigen::MatrixXd q = angle_sum_hessian(x0, 0);
  const Eigen::MatrixXd qd = orthonormal_columns(basis.degen_matrix());
  Eigen::MatrixXd bad(24, basis.bad.size());
  for (size_t c = 0; c < basis.bad.size(); ++c) bad.col(c) = basis.bad[c] - qd * (qd.transpose() * basis.bad[c]);
  const Eigen::MatrixXd qb = orthonormal_columns(bad);
  rep.kink_concavity =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(qb.transpose() * q * qb).eigenvalues().maxCoeff();
  rep.max_single_sum_eigenvalue = -std::numeric_limits<double>::infinity();
  for (int j = 1; j <= 3; ++j)
    rep.max_single_sum_eigenvalue =
        std::max(rep.max_single_sum_eigenvalue,
                 Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(angle_sum_hessian(x0, j)).eigenvalues().maxCoeff());
  rep.passed = rep.good_min > 0.0 && rep.away_min > 0.0 && rep.kink_concavity < 0.0 &&
               rep.max_single_sum_eigenvalue < 1e-6;
  return rep;
}

ConvexityScaling cell_convexity_scaling(const std::vector<int>& ells, const PotentialSet& p, double r) {
  ConvexityScaling out;
  out.passed = true;
  std::vector<double> xs, ys;
  for (int ell : ells) {
    out.reports.push_back(cell_hessian_convexity(ell, p, r));
    const auto& rep = out.reports.back();
    out.passed = out.passed && rep.passed;
    xs.push_back(ell);
    ys.push_back(std::max(rep.away_min, 1e-300));
  }
  out.away_slope = loglog_slope(xs, ys);
  out.passed = out.passed && std::abs(out.away_slope + 2.0) <= 0.3;
  return out;
}

}  // namespace nanolab
