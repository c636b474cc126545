#include "nanolab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nanolab/cellspec.hpp"
#include "nanolab/error.hpp"
#include "nanolab/parallel.hpp"

namespace nanolab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Vec3 draw_displacement(double eta, PerturbationMode mode, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  switch (mode) {
    case PerturbationMode::UniformBall: {
      Vec3 d;
      do d = Vec3(u(rng), u(rng), u(rng));
      while (d.squaredNorm() > 1.0);
      return eta * d;
    }
    case PerturbationMode::GaussianClipped: {
      std::normal_distribution<double> n(0.0, 0.5 * eta);
      Vec3 d;
      do d = Vec3(n(rng), n(rng), n(rng));
      while (d.norm() > eta);
      return d;
    }
    case PerturbationMode::PerDirection:
      return eta / std::sqrt(3.0) * Vec3(u(rng), u(rng), u(rng));
  }
  return Vec3::Zero();
}

const CellPoints kZeroCell = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                              Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

}  // namespace

PerturbationMode parse_perturbation_mode(const std::string& s) {
  if (s == "uniform-ball") return PerturbationMode::UniformBall;
  if (s == "gaussian-clipped") return PerturbationMode::GaussianClipped;
  if (s == "per-direction") return PerturbationMode::PerDirection;
  throw Error(ErrorKind::InvalidParameter, "unknown perturbation mode '" + s + "'");
}

std::string perturbation_mode_name(PerturbationMode m) {
  switch (m) {
    case PerturbationMode::UniformBall: return "uniform-ball";
    case PerturbationMode::GaussianClipped: return "gaussian-clipped";
    case PerturbationMode::PerDirection: return "per-direction";
  }
  return "";
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed), b = splitmix64(a ^ splitmix64(index + 0x632BE59BD9B4E019ull));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

Perturbation sample_perturbation(const Nanotube& base, const BondGraph& graph, double eta,
                                 PerturbationMode mode, std::mt19937_64& rng) {
  if (eta < 0.0) throw Error(ErrorKind::InvalidParameter, "eta must be nonnegative");
  Perturbation out;
  if (eta == 0.0) {
    out.tube = base;
    return out;
  }
  int consecutive = 0;
  while (true) {
    Nanotube t = base;
    for (auto& x : t.positions) x += draw_displacement(eta, mode, rng);
    if (bond_graph(t).same_bonds(graph)) {
      out.tube = std::move(t);
      return out;
    }
    ++out.rejections;
    if (++consecutive >= 1000)
      throw Error(ErrorKind::EtaTooLarge, "1000 consecutive perturbations changed the bond graph");
  }
}

Nanotube optimal_tube(double mu, int ell, int m, const PotentialSet& p) {
  return build_nanotube(minimize_family(mu, ell, p).geometry, m);
}

double total_symmetry_defect(const Nanotube& t, const BondGraph& g) {
  double s = 0.0;
  for (const auto& c : extract_cells(t, g)) s += symmetry_defect(c.x, kZeroCell);
  return s;
}

StabilityReport stability_trial(double mu, int ell, int m, const PerturbationSpec& spec,
                                const PotentialSet& p) {
  StabilityReport rep;
  rep.mu = mu;
  rep.ell = ell;
  rep.m = m;
  rep.spec = spec;
  if (spec.count < 0) throw Error(ErrorKind::InvalidParameter, "count must be nonnegative");
  const Nanotube base = optimal_tube(mu, ell, m, p);
  const BondGraph graph = bond_graph(base);
  rep.base_energy = energy_on_graph(base.positions, base.period, graph, p).total();

  struct Outcome {
    bool skipped = false;
    int rejections = 0;
    double gap = 0.0;
    double ratio = 0.0;
    Nanotube tube;
  };
  std::vector<Outcome> outcomes(spec.count);
  parallel_for(spec.count, [&](int k) {
    auto rng = trial_rng(spec.seed, static_cast<std::uint64_t>(k));
    auto s = sample_perturbation(base, graph, spec.eta, spec.mode, rng);
    Outcome& o = outcomes[k];
    o.rejections = s.rejections;
    bool moved = false;
    for (int i = 0; i < base.size() && !moved; ++i) moved = s.tube.positions[i] != base.positions[i];
    if (!moved) {
      o.skipped = true;
      return;
    }
    o.gap = energy_on_graph(s.tube.positions, s.tube.period, graph, p).total() - rep.base_energy;
    const double defect = total_symmetry_defect(s.tube, graph);
    o.ratio = defect > 0.0 ? o.gap / defect : std::numeric_limits<double>::infinity();
    if (!(o.gap > 0.0)) o.tube = std::move(s.tube);
  });

  std::vector<double> ratios;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < spec.count; ++k) {
    auto& o = outcomes[k];
    rep.rejections += o.rejections;
    if (o.skipped) {
      ++rep.skipped;
      continue;
    }
    ++rep.trials;
    rep.min_gap = std::min(rep.min_gap, o.gap);
    ratios.push_back(o.ratio);
    if (!(o.gap > 0.0)) rep.failures.push_back({k, o.gap, std::move(o.tube)});
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    rep.min_ratio = ratios.front();
    rep.max_ratio = ratios.back();
    const size_t mid = ratios.size() / 2;
    rep.median_ratio = ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  } else {
    rep.min_gap = 0.0;
  }
  return rep;
}

Eigen::MatrixXd total_hessian(const Nanotube& t, const PotentialSet& p, double h) {
  const BondGraph graph = bond_graph(t);
  const int n = t.size();
  auto grad = [&](const std::vector<Vec3>& x) {
    const auto g = gradient_on_graph(x, t.period, graph, p);
    Eigen::VectorXd v(3 * n);
    for (int i = 0; i < n; ++i) v.segment<3>(3 * i) = g[i];
    return v;
  };
  const Eigen::VectorXd g0 = grad(t.positions);
  if (g0.norm() > 1e-7 * std::sqrt(static_cast<double>(n)))
    throw Error(ErrorKind::NotStationary, "gradient norm " + std::to_string(g0.norm()) + " too large for a Hessian analysis");
  Eigen::MatrixXd hess(3 * n, 3 * n);
  parallel_for(3 * n, [&](int c) {
    std::vector<Vec3> xp = t.positions, xm = t.positions;
    xp[c / 3](c % 3) += h;
    xm[c / 3](c % 3) -= h;
    hess.col(c) = (grad(xp) - grad(xm)) / (2.0 * h);
  });
  return 0.5 * (hess + hess.transpose());
}

Eigen::VectorXd hessian_spectrum(const Nanotube& t, const PotentialSet& p) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(total_hessian(t, p), Eigen::EigenvaluesOnly).eigenvalues();
}

Eigen::MatrixXd isometry_directions(const Nanotube& t) {
  const int n = t.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3 * n, 4);
  double yc = 0.0, zc = 0.0;
  for (const auto& x : t.positions) {
    yc += x.y();
    zc += x.z();
  }
  yc /= n;
  zc /= n;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) d(3 * i + a, a) = 1.0;
    d(3 * i + 1, 3) = -(t.positions[i].z() - zc);
    d(3 * i + 2, 3) = t.positions[i].y() - yc;
  }
  return d;
}

NullSpaceReport null_space_report(const Nanotube& t, const PotentialSet& p) {
  NullSpaceReport rep;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(total_hessian(t, p));
  rep.eigenvalues = es.eigenvalues();
  const double lmax = rep.eigenvalues.cwiseAbs().maxCoeff();
  const double tol = 1e-6 * lmax;
  std::vector<int> null_idx;
  rep.smallest_positive = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rep.eigenvalues.size(); ++i) {
    const double v = rep.eigenvalues(i);
    if (std::abs(v) < tol)
      null_idx.push_back(i);
    else if (v < 0.0)
      ++rep.negative;
    else
      rep.smallest_positive = std::min(rep.smallest_positive, v);
  }
  rep.near_null = static_cast<int>(null_idx.size());
  Eigen::MatrixXd vecs(rep.eigenvalues.size(), null_idx.size());
  for (size_t c = 0; c < null_idx.size(); ++c) vecs.col(c) = es.eigenvectors().col(null_idx[c]);
  rep.alignment_angle = null_idx.empty() ? std::numbers::pi / 2 : max_principal_angle(vecs, isometry_directions(t));
  rep.passed = rep.near_null == 4 && rep.negative == 0 && rep.alignment_angle < 1e-3;
  return rep;
}

CellCertificate per_cell_certificate(const Nanotube& t, const PotentialSet& p) {
  CellCertificate cert;
  const auto cells = extract_cells(t, bond_graph(t));
  cert.cells = static_cast<int>(cells.size());
  std::vector<double> margins(cells.size()), defects(cells.size());
  parallel_for(cert.cells, [&](int q) {
    const auto& c = cells[q];
    const double theta = cell_plane_angles(c.x).mean();
    const double mu = dual_center_distance(c.x);
    margins[q] = cell_energy(c, p) - reduced_energy(mu, theta, theta, p).value;
    defects[q] = symmetry_defect(c.x, kZeroCell);
  });
  cert.min_margin = std::numeric_limits<double>::infinity();
  cert.constant = std::numeric_limits<double>::infinity();
  const double ell2 = static_cast<double>(t.ell) * t.ell;
  for (int q = 0; q < cert.cells; ++q) {
    cert.min_margin = std::min(cert.min_margin, margins[q]);
    cert.total_defect += defects[q];
    if (defects[q] > 1e-14) {
      ++cert.constant_cells;
      cert.constant = std::min(cert.constant, margins[q] * ell2 / defects[q]);
    }
  }
  if (cert.constant_cells == 0) cert.constant = 0.0;
  return cert;
}

}  // namespace nanolab
