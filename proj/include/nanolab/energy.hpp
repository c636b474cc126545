#pragma once

#include <vector>

#include "nanolab/geometry.hpp"
#include "nanolab/potentials.hpp"

namespace nanolab {

struct PeriodicDistance {
  double distance = 0.0;
  int shift = 0;  // t in {-1, 0, +1} minimizing |x - y + t L e1|
};

PeriodicDistance periodic_distance(const Vec3& x, const Vec3& y, double period);

struct Bond {
  int a = 0;
  int b = 0;      // a < b
  int shift = 0;  // periodic_distance(x_a, x_b).shift
  bool operator==(const Bond&) const = default;
};

struct Angle {
  int a = 0;
  int vertex = 0;
  int b = 0;  // a < b
};

struct BondGraph {
  int n = 0;
  std::vector<Bond> bonds;  // sorted by (a, b)
  // adjacency[v] holds (neighbor, bond index), sorted by neighbor.
  std::vector<std::vector<std::pair<int, int>>> adjacency;

  int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
  int max_degree() const;
  std::vector<Angle> angles() const;
  long n_angles() const;
  // Bond index joining a and b, or -1.
  int find(int a, int b) const;
  bool same_bonds(const BondGraph& other) const { return bonds == other.bonds; }
};

BondGraph graph_from_bonds(int n, std::vector<Bond> bonds);

// Vector from x_from to the periodic image of x_to selected by the bond shift.
Vec3 bond_vector(const std::vector<Vec3>& x, double period, const Bond& bond, int from);

BondGraph bond_graph(const Nanotube& t, double cutoff = 1.1);
BondGraph bond_graph_bruteforce(const Nanotube& t, double cutoff = 1.1);

// Angle at xj between xi - xj and xk - xj (points already unwrapped).
double bond_angle(const Vec3& xi, const Vec3& xj, const Vec3& xk);

struct EnergyBreakdown {
  double pair = 0.0;
  double angle = 0.0;
  double total() const { return pair + angle; }
};

EnergyBreakdown energy_on_graph(const std::vector<Vec3>& x, double period, const BondGraph& g,
                                const PotentialSet& p);
std::vector<Vec3> gradient_on_graph(const std::vector<Vec3>& x, double period,
                                    const BondGraph& g, const PotentialSet& p);

double total_energy(const Nanotube& t, const PotentialSet& p);
std::vector<Vec3> gradient(const Nanotube& t, const PotentialSet& p);

// (n/2)(v2(lambda1) + 2 v2(lambda2)) + n (2 v3(alpha) + v3(beta)), n = 4 m ell.
double family_energy(const ZigzagGeometry& g, int m, const PotentialSet& p);

// Gradients of a bond length and a bond angle with respect to the points involved.
void bond_length_gradient(const Vec3& xa, const Vec3& xb, Vec3& ga, Vec3& gb);
void bond_angle_gradient(const Vec3& xi, const Vec3& xj, const Vec3& xk, Vec3& gi, Vec3& gj,
                         Vec3& gk);

}  // namespace nanolab
