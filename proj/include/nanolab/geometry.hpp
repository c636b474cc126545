#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace nanolab {

using Vec3 = Eigen::Vector3d;

// Interior angle of the regular 2*ell-gon, pi (1 - 1/ell). Requires ell > 3.
double gamma_ell(int ell);

// Angle between the two hexagon bonds meeting across the kink of a tube section:
// 2 asin(sin(alpha) sin(gamma/2)).
double beta(double alpha, double gamma);

struct ZigzagGeometry {
  int ell = 0;
  double mu = 0.0;
  double lambda1 = 0.0;  // bond parallel to the axis
  double lambda2 = 0.0;  // the two other bonds
  double sigma = 0.0;    // axial offset across a lambda2 bond
  double rho = 0.0;      // tube radius
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

ZigzagGeometry solve_family(int ell, double mu, double lambda1, double lambda2);

struct AtomId {
  int i = 1;  // 1..ell, position around the circumference
  int j = 0;  // 0..m-1, period index along the axis
  int k = 0;  // 0 or 1, sub-lattice
  int l = 0;  // 0 or 1, lower or upper atom of the pair

  bool operator==(const AtomId&) const = default;
};

int flat_index(const AtomId& id, int ell);
AtomId atom_id(int index, int ell);

// Wraps i into 1..ell and j into 0..m-1.
AtomId wrap_id(AtomId id, int ell, int m);

struct Nanotube {
  std::vector<Vec3> positions;
  double period = 0.0;
  int ell = 0;  // 0 when the label structure is unknown
  int m = 0;

  int size() const { return static_cast<int>(positions.size()); }
  bool labeled() const { return ell > 0 && m > 0 && size() == 4 * m * ell; }
};

// Unwrapped position of a labeled atom (first coordinate may exceed the period).
Vec3 family_position(const ZigzagGeometry& g, const AtomId& id);

Nanotube build_nanotube(const ZigzagGeometry& g, int m);

struct ExpectedNeighbor {
  AtomId id;
  int bond_type = 0;  // 1: lambda1 (axial), 2: lambda2
};

// Axial neighbor first, then the two lambda2 neighbors.
std::array<ExpectedNeighbor, 3> expected_neighbors(const AtomId& id, int ell, int m);

double wrap_coordinate(double x, double period);

}  // namespace nanolab
