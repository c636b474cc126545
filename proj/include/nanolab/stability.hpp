#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nanolab/cells.hpp"
#include "nanolab/reduced.hpp"

namespace nanolab {

enum class PerturbationMode {
  UniformBall,      // each atom uniform in the ball of radius eta
  GaussianClipped,  // normal with deviation eta/2 per component, redrawn outside the ball
  PerDirection,     // independent uniform components in [-eta/sqrt(3), eta/sqrt(3)]
};
PerturbationMode parse_perturbation_mode(const std::string& s);
std::string perturbation_mode_name(PerturbationMode m);

struct PerturbationSpec {
  double eta = 1e-3;
  std::uint64_t seed = 0;
  int count = 1000;
  PerturbationMode mode = PerturbationMode::UniformBall;
};

// Independent stream for trial `index` of a run seeded with `seed`.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index);

struct Perturbation {
  Nanotube tube;
  int rejections = 0;
};
// Displaces every atom by at most eta while keeping the period and the bond graph `graph`.
// Fails with eta-too-large after 1000 consecutive rejected draws.
Perturbation sample_perturbation(const Nanotube& base, const BondGraph& graph, double eta,
                                 PerturbationMode mode, std::mt19937_64& rng);

// Minimizing family member at period mu, repeated m times.
Nanotube optimal_tube(double mu, int ell, int m, const PotentialSet& p);

struct Counterexample {
  int trial = 0;
  double gap = 0.0;
  Nanotube tube;
};

struct StabilityReport {
  double mu = 0.0;
  int ell = 0;
  int m = 0;
  PerturbationSpec spec;
  double base_energy = 0.0;
  int trials = 0;
  int skipped = 0;  // zero displacement, not a nontrivial perturbation
  long rejections = 0;
  double min_gap = 0.0;
  double min_ratio = 0.0;  // gap / sum of cell symmetry defects
  double median_ratio = 0.0;
  double max_ratio = 0.0;
  std::vector<Counterexample> failures;
  bool passed() const { return failures.empty(); }
};
StabilityReport stability_trial(double mu, int ell, int m, const PerturbationSpec& spec,
                                const PotentialSet& p);

// Symmetric finite-difference Hessian of the total energy at fixed period (central differences of
// the analytic gradient). Fails with not-stationary when the gradient norm exceeds 1e-7 sqrt(n).
Eigen::MatrixXd total_hessian(const Nanotube& t, const PotentialSet& p, double h = 1e-5);
Eigen::VectorXd hessian_spectrum(const Nanotube& t, const PotentialSet& p);

// Translations along the three axes and the rotation about the tube axis, as columns.
Eigen::MatrixXd isometry_directions(const Nanotube& t);

struct NullSpaceReport {
  Eigen::VectorXd eigenvalues;
  int near_null = 0;  // |lambda| < 1e-6 lambda_max
  int negative = 0;   // below the null threshold
  double smallest_positive = 0.0;
  double alignment_angle = 0.0;  // principal angle between null vectors and isometries
  bool passed = false;
};
NullSpaceReport null_space_report(const Nanotube& t, const PotentialSet& p);

struct CellCertificate {
  int cells = 0;
  double min_margin = 0.0;  // min over cells of E_cell - E_red(dual distance, mean plane angle)
  double constant = 0.0;    // min of margin / (Delta / ell^2) over cells with Delta > 1e-14
  int constant_cells = 0;
  double total_defect = 0.0;
};
CellCertificate per_cell_certificate(const Nanotube& t, const PotentialSet& p);

// Symmetry defect of every cell of t, summed.
double total_symmetry_defect(const Nanotube& t, const BondGraph& g);

}  // namespace nanolab
