#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nanolab/cells.hpp"

namespace nanolab {

using CellVector = Eigen::Matrix<double, 24, 1>;
using TValue = Eigen::Matrix<double, 18, 1>;  // ten angles, then eight bond lengths

CellVector flatten(const CellPoints& x);
CellPoints unflatten(const CellVector& v);

// Flat honeycomb cell with unit bonds, x1 = (-1, 0, 0), x2 = (1, 0, 0).
CellPoints planar_reference();
// Cell of the unstretched optimal tube: two half-hexagons folded along the first axis by gamma_ell.
CellPoints kink_configuration(int ell, double alpha_us);
CellPoints kink_configuration(int ell, const PotentialSet& p);

struct CellBasis {
  std::vector<CellVector> degen;  // three translations, then three infinitesimal rotations of the planar cell
  std::vector<CellVector> good;   // u1..u13
  std::vector<CellVector> bad;    // out-of-plane moves
  Eigen::MatrixXd degen_matrix() const;
  Eigen::MatrixXd degen_and_bad_matrix() const;
  Eigen::MatrixXd all() const;  // 24 x 24, degen | good | bad
};
const CellBasis& cell_basis();

TValue t_map(const CellPoints& x);
// Hexagon angle sum and the two junction sums, at most (4 pi, 2 pi, 2 pi).
Eigen::Vector3d angle_sums(const TValue& t);
Eigen::Matrix<double, 18, 24> t_jacobian(const CellPoints& x, double h = 1e-6);

// Largest principal angle between the column spans of a and b (radians); pi/2 if dimensions differ.
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& a);

struct KernelReport {
  Eigen::VectorXd singular_values;         // of DT, descending
  Eigen::VectorXd angle_singular_values;   // of the angle rows only
  int kernel_dim = 0;
  int angle_kernel_dim = 0;
  double kernel_angle = 0.0;  // principal angle between the kernel and span(degen, bad)
  double min_good_image = 0.0;  // min |DT u| over the good vectors
  bool passed = false;
};
KernelReport t_jacobian_kernel(const CellPoints& x, double threshold = 1e-8);

struct AngleCapReport {
  int samples = 0;
  int violations = 0;
  double worst_excess = 0.0;  // largest angle_sums - cap seen (<= 0 when all hold)
};
AngleCapReport angle_sum_caps(int samples, double radius, unsigned long long seed);

struct TildeEReport {
  int ell = 0;
  TValue point;            // T(x_kink)
  TValue gradient;         // D tilde E at the point
  TValue hessian_diagonal;  // D^2 tilde E is diagonal
  double max_bond_gradient = 0.0;
  double min_angle_gradient = 0.0;  // most negative
  double max_angle_gradient = 0.0;  // closest to zero
  bool passed = false;
};
TildeEReport tilde_e_derivatives(int ell, const PotentialSet& p);

struct TildeEScaling {
  std::vector<TildeEReport> reports;
  double slope_min = 0.0;  // log-log slope of the smallest |angle entry|
  double slope_max = 0.0;  // and of the largest
  bool passed = false;
};
TildeEScaling tilde_e_scaling(const std::vector<int>& ells, const PotentialSet& p);

CellVector cell_energy_gradient(const CellPoints& x, const PotentialSet& p);
// Central differences of the analytic gradient with one Richardson step, symmetrized.
Eigen::Matrix<double, 24, 24> cell_energy_hessian(const CellPoints& x, const PotentialSet& p,
                                                  double h = 1e-4);
// Hessian of sum_j a_j . T^a, or of a single a_j (which = 1, 2, 3) when which > 0.
Eigen::Matrix<double, 24, 24> angle_sum_hessian(const CellPoints& x, int which = 0, double h = 1e-4);

// min v^T H v / |v|^2 over v with |P v| <= r |v|, P the orthogonal projector onto span(w).
// Solved through the dual max_{tau >= 0} lambda_min(H + tau (P - r^2 I)).
struct ConstrainedMin {
  double value = 0.0;
  double tau = 0.0;
  Eigen::VectorXd argmin;
};
ConstrainedMin constrained_min_rayleigh(const Eigen::MatrixXd& h, const Eigen::MatrixXd& w, double r);

struct ConvexityReport {
  int ell = 0;
  double r = 0.0;
  double good_min = 0.0;      // away from span(degen, bad)
  double away_min = 0.0;      // away from span(degen) only
  double kink_concavity = 0.0;  // largest eigenvalue of the angle-sum Hessian on the bad part
  double max_single_sum_eigenvalue = 0.0;  // over a1, a2, a3 separately, on all of R^24
  bool passed = false;
};
ConvexityReport cell_hessian_convexity(int ell, const PotentialSet& p, double r);

struct ConvexityScaling {
  std::vector<ConvexityReport> reports;
  double away_slope = 0.0;
  bool passed = false;
};
ConvexityScaling cell_convexity_scaling(const std::vector<int>& ells, const PotentialSet& p, double r);

}  // namespace nanolab
