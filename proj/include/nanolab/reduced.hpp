#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nanolab/geometry.hpp"
#include "nanolab/potentials.hpp"

namespace nanolab {

struct BetaDerivatives {
  double value = 0.0;
  double da = 0.0, dg = 0.0;
  double daa = 0.0, dgg = 0.0, dag = 0.0;
};

BetaDerivatives beta_derivatives(double alpha, double gamma);

// Box of the symmetric-energy minimization.
struct ReducedBox {
  static constexpr double lambda_lo = 0.9;
  static constexpr double lambda_hi = 1.1;
  static double alpha_lo();  // acos(-0.4)
  static double alpha_hi();  // acos(-0.6)
};

struct ReducedPoint {
  double mu = 3.0;
  double gamma1 = 0.0, gamma2 = 0.0;
  double lambda = 1.0;
  double alpha1 = 0.0, alpha2 = 0.0;

  double lambda4() const;  // distance x2 - x1 along the axis, lambda1 - 2 lambda2 cos(alpha1)
};

double sym_energy(const ReducedPoint& pt, const PotentialSet& p);

struct SymDerivatives {
  double value = 0.0;
  Eigen::Vector3d grad;    // in (lambda, alpha1, alpha2)
  Eigen::Matrix3d hess;
  Eigen::Vector3d outer;   // partials in (mu, gamma1, gamma2) at fixed inner variables
};

SymDerivatives sym_energy_derivatives(const ReducedPoint& pt, const PotentialSet& p);

struct ReducedResult {
  double value = 0.0;
  double lambda = 1.0, alpha1 = 0.0, alpha2 = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;  // first-order optimality residual (max norm)
  bool boundary_warning = false;
};

ReducedResult reduced_energy(double mu, double gamma1, double gamma2, const PotentialSet& p);

// Envelope derivatives of E_red in (mu, gamma1, gamma2).
Eigen::Vector3d reduced_gradient(double mu, double gamma1, double gamma2, const PotentialSet& p);
// Central differences (step h, one Richardson level) of the envelope gradient, symmetrized.
Eigen::Matrix3d reduced_hessian(double mu, double gamma1, double gamma2, const PotentialSet& p,
                                double h = 1e-4);

struct ReferenceAngles {
  double alpha_ru = 0.0;
  double alpha_ch = 0.0;
  double alpha_us = 0.0;
  double mu_us = 0.0;
};

ReferenceAngles reference_angles(int ell, const PotentialSet& p);

struct FamilyMinimum {
  double mu = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0, alpha = 0.0;
  double rho = 0.0;
  double energy_per_cell = 0.0;  // E_red(mu, gamma_ell, gamma_ell)
  ReducedResult inner;
  ZigzagGeometry geometry;

  double energy(int m) const { return 2.0 * m * geometry.ell * energy_per_cell; }
};

FamilyMinimum minimize_family(double mu, int ell, const PotentialSet& p);

struct ReducedHessianReport {
  int ell = 0;
  double mu_us = 0.0;
  Eigen::Matrix3d hessian;
  Eigen::Vector3d eigenvalues;
  bool positive_definite = false;
  double d2_mu = 0.0;
  double d2_mu_predicted = 0.0;  // 2 v2''(1) / K
  double relative_error = 0.0;
  Eigen::Vector3d gradient;      // gamma entries expected negative
  double splitting_constant = 0.0;  // min over samples of (E(g1,g2) - E(gbar,gbar)) l^2 / (g1-g2)^2
};

ReducedHessianReport verify_reduced_hessian(int ell, const PotentialSet& p);

struct MinimizerRow {
  double mu = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0, alpha = 0.0, rho = 0.0;
  double energy_per_cell = 0.0;
  Eigen::Vector3d hessian_eigenvalues;
};

struct MinimizerPropertiesReport {
  int ell = 0;
  ReferenceAngles ref;
  std::vector<MinimizerRow> rows;
  bool energy_convex = false;
  bool minimum_at_mu_us = false;
  bool lambdas_increasing = false;
  // mu-interval around mu_us on which alpha_ch < alpha < alpha_ru (clipped to the sampled window)
  double alpha_window_lo = 0.0;
  double alpha_window_hi = 0.0;
  bool alpha_in_range = false;
  bool increasing_above_mu_us = false;
  double radius_slope = 0.0;       // centered difference of rho at mu_us
  int expected_radius_sign = 0;    // sign(6 v3''(2pi/3) - v2''(1))
  double d2_energy_per_atom = 0.0; // E_min''(mu_us) / n
};

std::vector<double> mu_grid(double lo, double hi, int steps);

MinimizerRow minimizer_row(double mu, int ell, const PotentialSet& p, bool with_hessian);

MinimizerPropertiesReport minimizer_properties(int ell, const PotentialSet& p,
                                               double half_window = 0.02, int steps = 40);

}  // namespace nanolab
