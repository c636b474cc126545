#pragma once

#include <array>
#include <vector>

#include "nanolab/energy.hpp"

namespace nanolab {

// Eight atoms of a basic cell: the hexagon x1..x6 plus the axial neighbors x7 (of x1) and x8 (of x2).
// x1 and x2 are the lower and upper atom of the center's pair, x3 follows x1, x3..x6 run around
// the hexagon.
using CellPoints = std::array<Vec3, 8>;
using CellBonds = std::array<double, 8>;
using CellAngles = std::array<double, 10>;

inline constexpr std::array<double, 8> kBondWeights = {0.25, 0.25, 0.5, 0.5, 0.5, 0.5, 0.25, 0.25};
inline constexpr std::array<double, 10> kAngleWeights = {1.0, 1.0, 0.5, 0.5, 0.5,
                                                         0.5, 0.5, 0.5, 0.5, 0.5};
// Atom pairs of b1..b8 and (end, vertex, end) triples of phi1..phi10, zero based.
inline constexpr std::array<std::array<int, 2>, 8> kCellBondPairs = {
    {{4, 5}, {2, 3}, {0, 2}, {3, 1}, {1, 4}, {5, 0}, {0, 6}, {1, 7}}};
inline constexpr std::array<std::array<int, 3>, 10> kCellAngleTriples = {
    {{2, 0, 5}, {3, 1, 4}, {0, 2, 3}, {2, 3, 1}, {1, 4, 5}, {4, 5, 0}, {6, 0, 2}, {6, 0, 5}, {7, 1, 3}, {7, 1, 4}}};

struct CenterId {
  int i = 1;
  int j = 0;
  int k = 0;
};
int center_index(const CenterId& c, int ell);
CenterId center_id(int index, int ell);

struct Centers {
  std::vector<Vec3> centers;  // z_{i,j,k}, indexed by center_index
  std::vector<Vec3> duals;    // midpoint of x^{j,1}_{i,k} and x^{j+1,0}_{i,k}
};
Centers centers(const Nanotube& t);

// Labeled atoms of the cell around z_{i,j,k} in the order x1..x8 (wrapped labels).
std::array<AtomId, 8> cell_atom_ids(const CenterId& c, int ell, int m);

struct CellView {
  CenterId center;
  std::array<int, 8> atoms{};  // flat indices
  CellPoints x;                // unwrapped around x1
  CellBonds bonds{};
  CellAngles angles{};
};

// Fails with invalid-cell if any of the eight cell bonds is missing from the graph or an atom of
// the hexagon does not have exactly three bonds.
CellView extract_cell(const Nanotube& t, const BondGraph& g, const CenterId& c);
std::vector<CellView> extract_cells(const Nanotube& t, const BondGraph& g);

CellBonds cell_bonds(const CellPoints& x);
CellAngles cell_angles(const CellPoints& x);
double cell_energy(const CellPoints& x, const PotentialSet& p);
double cell_energy(const CellView& c, const PotentialSet& p);
// Weighted energy from the 18 values (angles then bonds).
double cell_energy_from_values(const CellAngles& a, const CellBonds& b, const PotentialSet& p);

// Angle between the planes {axial, x, a} and {axial, x, b}; the axial neighbor lies on the common line.
double plane_angle_theta(const Vec3& x, const Vec3& axial, const Vec3& a, const Vec3& b);
// Angle between the planes {p, q, r} and {p, s, t}, folded to [pi/2, pi].
double angle_between_planes(const Vec3& p, const Vec3& q, const Vec3& r, const Vec3& s,
                            const Vec3& t);

struct PlaneAngles {
  double left = 0.0;        // hexagon, planes {x1 x3 x4} and {x1 x6 x5}
  double right = 0.0;       // hexagon, planes {x3 x4 x2} and {x2 x5 x6}
  double dual_left = 0.0;   // junction at x2
  double dual_right = 0.0;  // junction at x1
  double mean() const { return 0.25 * (left + right + dual_left + dual_right); }
};
PlaneAngles cell_plane_angles(const CellPoints& x);

// Distance between the two dual centers of the cell, |(x2 + x8)/2 - (x1 + x7)/2|.
double dual_center_distance(const CellPoints& x);

// Rigid motion taking the cell to the local frame: dual centers on the first axis, x4 - x5 along
// the second axis, third axis towards the tube interior. Fails with invalid-cell when degenerate.
CellPoints to_local_frame(const CellPoints& x);

CellPoints reflect_s1(const CellPoints& x);  // mirrors the second coordinate
CellPoints reflect_s2(const CellPoints& x);  // mirrors the first coordinate

struct Symmetrization {
  CellPoints half;  // after the first reflection average
  CellPoints full;  // after both
  double delta = 0.0;
};
// Expects the cell in the local frame; the reference must itself be symmetric.
Symmetrization symmetrize(const CellPoints& local, const CellPoints& reference);
double symmetry_defect(const CellPoints& x, const CellPoints& reference);
// Same value for every symmetric reference; uses the zero cell.
double symmetry_defect(const CellPoints& x);

}  // namespace nanolab
