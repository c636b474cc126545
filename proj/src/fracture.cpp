#include "nanolab/fracture.hpp"

#include <cmath>

#include "nanolab/error.hpp"
#include "nanolab/fit.hpp"
#include "nanolab/parallel.hpp"

namespace nanolab {

namespace {

// E_min(mu) - E_min(mu_us) for the whole tube.
double family_rise(double mu, double e_us, int ell, int m, const PotentialSet& p) {
  return 2.0 * m * ell * (minimize_family(mu, ell, p).energy_per_cell - e_us);
}

template <class F>
double bisect(F f, double lo, double hi, double tol) {
  // f(lo) <= 0 < f(hi) is assumed; returns the upper end of the final bracket.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

CleavedTube build_cleaved(int ell, int m, double mu, const PotentialSet& p) {
  if (m < 2 || m % 2) throw Error(ErrorKind::InvalidParameter, "m must be even and at least 2");
  const auto ref = reference_angles(ell, p);
  if (mu < ref.mu_us) throw Error(ErrorKind::InvalidParameter, "mu must not be below mu_us");
  const auto g = solve_family(ell, ref.mu_us, 1.0, 1.0);
  CleavedTube c;
  c.reference = build_nanotube(g, m);
  c.reference_graph = bond_graph(c.reference);
  const int n = c.reference.size();
  const double shift = m * (mu - ref.mu_us);

  std::vector<Vec3> unwrapped(n);
  for (int q = 0; q < n; ++q) unwrapped[q] = family_position(g, atom_id(q, ell));
  auto upper = [&](int q) { return atom_id(q, ell).j >= m / 2; };

  c.tube = c.reference;
  c.tube.period = m * mu;
  for (int q = 0; q < n; ++q) {
    Vec3 x = unwrapped[q];
    if (upper(q)) x.x() += shift;
    x.x() = wrap_coordinate(x.x(), c.tube.period);
    c.tube.positions[q] = x;
  }

  // A bond joins the halves across the cleft when it links j < m/2 to j >= m/2 without crossing the
  // periodic seam, i.e. with zero shift on the unwrapped positions.
  std::vector<Bond> kept;
  for (const auto& b : c.reference_graph.bonds) {
    const bool across = upper(b.a) != upper(b.b);
    const bool seam = periodic_distance(unwrapped[b.a], unwrapped[b.b], c.reference.period).shift != 0;
    if (across && !seam) {
      ++c.removed_bonds;
      continue;
    }
    Bond nb = b;
    nb.shift = periodic_distance(c.tube.positions[b.a], c.tube.positions[b.b], c.tube.period).shift;
    kept.push_back(nb);
  }
  c.cleaved_graph = graph_from_bonds(n, kept);
  c.cleaved = bond_graph(c.tube).same_bonds(c.cleaved_graph);
  return c;
}

double cleaved_energy(const CleavedTube& c, const PotentialSet& p) {
  return energy_on_graph(c.tube.positions, c.tube.period, c.cleaved_graph, p).total();
}

CleavedEnergy cleaved_energy_difference(const CleavedTube& c, const PotentialSet& p) {
  const auto h = energy_on_graph(c.tube.positions, c.tube.period, c.cleaved_graph, p);
  const auto f = energy_on_graph(c.reference.positions, c.reference.period, c.reference_graph, p);
  return {h.total() - f.total(), h.pair - f.pair, h.angle - f.angle};
}

FractureThreshold fracture_threshold(int ell, int m, const PotentialSet& p, double tol, double step,
                                     double mu_hi) {
  FractureThreshold r;
  r.ell = ell;
  r.m = m;
  const auto ref = reference_angles(ell, p);
  r.mu_us = ref.mu_us;
  const double e_us = minimize_family(ref.mu_us, ell, p).energy_per_cell;
  const double e_ref = total_energy(build_cleaved(ell, m, ref.mu_us, p).reference, p);
  // Positive while the intact stretched tube is still preferred.
  auto gap = [&](double mu) {
    const auto c = build_cleaved(ell, m, mu, p);
    return cleaved_energy(c, p) - e_ref - family_rise(mu, e_us, ell, m, p);
  };
  // Negated so that bisect sees the sign change from <= 0 to > 0.
  auto crossed = [&](double mu) { return -gap(mu); };

  double lo = ref.mu_us, hi = -1.0;
  for (double mu = ref.mu_us + step; mu <= mu_hi; mu += step) {
    if (crossed(mu) > 0.0) {
      hi = mu;
      break;
    }
    lo = mu;
  }
  if (hi < 0.0) throw Error(ErrorKind::WindowTooSmall, "no fracture crossing below mu = " + std::to_string(mu_hi));
  r.mu_frac = bisect(crossed, lo, hi, tol);
  r.scaled_offset = (r.mu_frac - r.mu_us) * std::sqrt(static_cast<double>(m));
  const auto c = build_cleaved(ell, m, r.mu_frac, p);
  r.cleaved = c.cleaved;
  r.cleft_energy = cleaved_energy(c, p) - e_ref;

  auto root_of = [&](double target) {
    double a = ref.mu_us, b = ref.mu_us + step;
    while (family_rise(b, e_us, ell, m, p) <= target) {
      a = b;
      b += step;
      if (b > 3.1 - 1e-9) throw Error(ErrorKind::WindowTooSmall, "family energy rise stays below the target");
    }
    return bisect([&](double mu) { return family_rise(mu, e_us, ell, m, p) - target; }, a, b, 1e-10);
  };
  r.bond_count_root = root_of(4.0 * ell);
  r.energy_root = root_of(r.cleft_energy);
  return r;
}

FractureScaling fracture_scaling(int ell, const std::vector<int>& ms, const PotentialSet& p) {
  FractureScaling s;
  s.rows.resize(ms.size());
  parallel_for(static_cast<int>(ms.size()), [&](int q) { s.rows[q] = fracture_threshold(ell, ms[q], p); });
  std::vector<double> xs, ys;
  for (const auto& r : s.rows) {
    xs.push_back(r.m);
    ys.push_back(r.mu_frac - r.mu_us);
  }
  s.exponent = loglog_slope(xs, ys);
  return s;
}

}  // namespace nanolab
