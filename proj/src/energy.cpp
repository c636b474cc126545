#include "nanolab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "nanolab/error.hpp"

namespace nanolab {

PeriodicDistance periodic_distance(const Vec3& x, const Vec3& y, double period) {
  const Vec3 d = x - y;
  PeriodicDistance best{d.norm(), 0};
  for (int t : {-1, 1}) {
    const double dist = (d + Vec3(t * period, 0.0, 0.0)).norm();
    if (dist < best.distance) best = {dist, t};
  }
  return best;
}

int BondGraph::max_degree() const {
  int d = 0;
  for (const auto& a : adjacency) d = std::max(d, static_cast<int>(a.size()));
  return d;
}

std::vector<Angle> BondGraph::angles() const {
  std::vector<Angle> out;
  for (int v = 0; v < n; ++v) {
    const auto& adj = adjacency[v];
    for (std::size_t p = 0; p < adj.size(); ++p)
      for (std::size_t q = p + 1; q < adj.size(); ++q) out.push_back({adj[p].first, v, adj[q].first});
  }
  return out;
}

long BondGraph::n_angles() const {
  long c = 0;
  for (const auto& a : adjacency) c += static_cast<long>(a.size() * (a.size() - 1) / 2);
  return c;
}

int BondGraph::find(int a, int b) const {
  for (const auto& [nb, bi] : adjacency[a])
    if (nb == b) return bi;
  return -1;
}

BondGraph graph_from_bonds(int n, std::vector<Bond> bonds) {
  std::sort(bonds.begin(), bonds.end(),
            [](const Bond& u, const Bond& v) { return std::tie(u.a, u.b) < std::tie(v.a, v.b); });
  BondGraph g;
  g.n = n;
  g.bonds = std::move(bonds);
  g.adjacency.assign(n, {});
  for (int i = 0; i < static_cast<int>(g.bonds.size()); ++i) {
    g.adjacency[g.bonds[i].a].push_back({g.bonds[i].b, i});
    g.adjacency[g.bonds[i].b].push_back({g.bonds[i].a, i});
  }
  for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
  return g;
}

Vec3 bond_vector(const std::vector<Vec3>& x, double period, const Bond& bond, int from) {
  // x_a - x_b + t L e1 is the shortest difference; its negative points from a to b.
  Vec3 d = x[bond.a] - x[bond.b];
  d.x() += bond.shift * period;
  return from == bond.a ? Vec3(-d) : d;
}

BondGraph bond_graph_bruteforce(const Nanotube& t, double cutoff) {
  std::vector<Bond> bonds;
  const int n = t.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const auto pd = periodic_distance(t.positions[a], t.positions[b], t.period);
      if (pd.distance < cutoff) bonds.push_back({a, b, pd.shift});
    }
  return graph_from_bonds(n, std::move(bonds));
}

BondGraph bond_graph(const Nanotube& t, double cutoff) {
  const int n = t.size();
  if (n == 0) return graph_from_bonds(0, {});
  double ymin = t.positions[0].y(), ymax = ymin, zmin = t.positions[0].z(), zmax = zmin;
  for (const auto& p : t.positions) {
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
    zmin = std::min(zmin, p.z());
    zmax = std::max(zmax, p.z());
  }
  const int nx = std::max(1, static_cast<int>(std::floor(t.period / cutoff)));
  const double wx = t.period / nx;
  const int ny = std::max(1, static_cast<int>(std::floor((ymax - ymin) / cutoff)) + 1);
  const int nz = std::max(1, static_cast<int>(std::floor((zmax - zmin) / cutoff)) + 1);
  auto cell_of = [&](const Vec3& p) {
    int ix = static_cast<int>(std::floor(wrap_coordinate(p.x(), t.period) / wx));
    ix = std::clamp(ix, 0, nx - 1);
    const int iy = std::clamp(static_cast<int>(std::floor((p.y() - ymin) / cutoff)), 0, ny - 1);
    const int iz = std::clamp(static_cast<int>(std::floor((p.z() - zmin) / cutoff)), 0, nz - 1);
    return std::array<int, 3>{ix, iy, iz};
  };
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(nx) * ny * nz);
  auto cell_index = [&](int ix, int iy, int iz) { return (static_cast<std::size_t>(ix) * ny + iy) * nz + iz; };
  std::vector<std::array<int, 3>> where(n);
  for (int a = 0; a < n; ++a) {
    where[a] = cell_of(t.positions[a]);
    cells[cell_index(where[a][0], where[a][1], where[a][2])].push_back(a);
  }
  std::vector<Bond> bonds;
  for (int a = 0; a < n; ++a) {
    std::set<int> xs;
    for (int dx = -1; dx <= 1; ++dx) xs.insert(((where[a][0] + dx) % nx + nx) % nx);
    for (int ix : xs)
      for (int iy = std::max(0, where[a][1] - 1); iy <= std::min(ny - 1, where[a][1] + 1); ++iy)
        for (int iz = std::max(0, where[a][2] - 1); iz <= std::min(nz - 1, where[a][2] + 1); ++iz)
          for (int b : cells[cell_index(ix, iy, iz)]) {
            if (b <= a) continue;
            const auto pd = periodic_distance(t.positions[a], t.positions[b], t.period);
            if (pd.distance < cutoff) bonds.push_back({a, b, pd.shift});
          }
  }
  return graph_from_bonds(n, std::move(bonds));
}

double bond_angle(const Vec3& xi, const Vec3& xj, const Vec3& xk) {
  const Vec3 u = xi - xj, w = xk - xj;
  const double nu = u.norm(), nw = w.norm();
  if (nu == 0.0 || nw == 0.0) throw Error(ErrorKind::DegenerateGeometry, "zero-length bond in angle");
  const double c = std::clamp(u.dot(w) / (nu * nw), -1.0, 1.0);
  return std::acos(c);
}

void bond_length_gradient(const Vec3& xa, const Vec3& xb, Vec3& ga, Vec3& gb) {
  const Vec3 d = xa - xb;
  const double r = d.norm();
  if (r == 0.0) throw Error(ErrorKind::DegenerateGeometry, "zero-length bond");
  ga = d / r;
  gb = -ga;
}

void bond_angle_gradient(const Vec3& xi, const Vec3& xj, const Vec3& xk, Vec3& gi, Vec3& gj,
                         Vec3& gk) {
  const Vec3 u = xi - xj, w = xk - xj;
  const double nu = u.norm(), nw = w.norm();
  if (nu == 0.0 || nw == 0.0) throw Error(ErrorKind::DegenerateGeometry, "zero-length bond in angle");
  const double c = std::clamp(u.dot(w) / (nu * nw), -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  if (s < 1e-12) {
    gi.setZero();
    gj.setZero();
    gk.setZero();
    return;
  }
  const double dtheta_dc = -1.0 / s;
  gi = dtheta_dc * (w / (nu * nw) - c * u / (nu * nu));
  gk = dtheta_dc * (u / (nu * nw) - c * w / (nw * nw));
  gj = -(gi + gk);
}

EnergyBreakdown energy_on_graph(const std::vector<Vec3>& x, double period, const BondGraph& g,
                                const PotentialSet& p) {
  EnergyBreakdown e;
  for (const auto& b : g.bonds) {
    const double r = bond_vector(x, period, b, b.a).norm();
    if (r == 0.0) throw Error(ErrorKind::DegenerateGeometry, "zero-length bond");
    e.pair += p.v2(r);
  }
  for (int v = 0; v < g.n; ++v) {
    const auto& adj = g.adjacency[v];
    for (std::size_t s = 0; s < adj.size(); ++s) {
      const Vec3 u = bond_vector(x, period, g.bonds[adj[s].second], v);
      for (std::size_t q = s + 1; q < adj.size(); ++q) {
        const Vec3 w = bond_vector(x, period, g.bonds[adj[q].second], v);
        e.angle += p.v3(bond_angle(u, Vec3::Zero(), w));
      }
    }
  }
  return e;
}

std::vector<Vec3> gradient_on_graph(const std::vector<Vec3>& x, double period,
                                    const BondGraph& g, const PotentialSet& p) {
  std::vector<Vec3> grad(x.size(), Vec3::Zero());
  Vec3 ga, gb, gc;
  for (const auto& b : g.bonds) {
    const Vec3 d = bond_vector(x, period, b, b.a);  // points from a to b
    bond_length_gradient(Vec3::Zero(), d, ga, gb);
    const double dv = p.dv2(d.norm());
    grad[b.a] += dv * ga;
    grad[b.b] += dv * gb;
  }
  for (int v = 0; v < g.n; ++v) {
    const auto& adj = g.adjacency[v];
    for (std::size_t s = 0; s < adj.size(); ++s) {
      const Vec3 u = bond_vector(x, period, g.bonds[adj[s].second], v);
      for (std::size_t q = s + 1; q < adj.size(); ++q) {
        const Vec3 w = bond_vector(x, period, g.bonds[adj[q].second], v);
        const double dv = p.dv3(bond_angle(u, Vec3::Zero(), w));
        bond_angle_gradient(u, Vec3::Zero(), w, ga, gb, gc);
        grad[adj[s].first] += dv * ga;
        grad[v] += dv * gb;
        grad[adj[q].first] += dv * gc;
      }
    }
  }
  return grad;
}

double total_energy(const Nanotube& t, const PotentialSet& p) {
  return energy_on_graph(t.positions, t.period, bond_graph(t, p.cutoff), p).total();
}

std::vector<Vec3> gradient(const Nanotube& t, const PotentialSet& p) {
  return gradient_on_graph(t.positions, t.period, bond_graph(t, p.cutoff), p);
}

double family_energy(const ZigzagGeometry& g, int m, const PotentialSet& p) {
  const double n = 4.0 * m * g.ell;
  return 0.5 * n * (p.v2(g.lambda1) + 2.0 * p.v2(g.lambda2)) +
         n * (2.0 * p.v3(g.alpha) + p.v3(g.beta));
}

}  // namespace nanolab
