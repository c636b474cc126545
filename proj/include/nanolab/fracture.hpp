#pragma once

#include <vector>

#include "nanolab/energy.hpp"
#include "nanolab/reduced.hpp"

namespace nanolab {

// Unstretched tube (unit bonds at mu_us) whose upper half j >= m/2 is shifted by m (mu - mu_us)
// along the axis, with the period raised to m mu.
struct CleavedTube {
  Nanotube tube;
  Nanotube reference;      // the unstretched tube at the same (ell, m)
  BondGraph reference_graph;
  BondGraph cleaved_graph;  // reference bonds minus those joining the two halves
  int removed_bonds = 0;
  bool cleaved = false;     // the geometric bond graph equals cleaved_graph; false means not cleaved yet
};
CleavedTube build_cleaved(int ell, int m, double mu, const PotentialSet& p);

// Energy on the cleaved bond graph, whether or not the gap already exceeds the cutoff.
double cleaved_energy(const CleavedTube& c, const PotentialSet& p);

struct CleavedEnergy {
  double total_difference = 0.0;  // E(cleaved) - E(unstretched)
  double pair_difference = 0.0;   // bond part only
  double angle_difference = 0.0;  // lost angle terms at the cleft (negative)
};
CleavedEnergy cleaved_energy_difference(const CleavedTube& c, const PotentialSet& p);

struct FractureThreshold {
  int ell = 0;
  int m = 0;
  double mu_us = 0.0;
  double mu_frac = 0.0;        // smallest mu with E(cleaved) < E_min(mu)
  double scaled_offset = 0.0;  // (mu_frac - mu_us) sqrt(m)
  double bond_count_root = 0.0;  // root of 4 ell = E_min(mu) - E_min(mu_us)
  double energy_root = 0.0;      // root of E(cleaved) - E(unstretched) = E_min(mu) - E_min(mu_us)
  double cleft_energy = 0.0;     // E(cleaved) - E(unstretched) at mu_frac
  bool cleaved = false;
};
// Scans mu upwards from mu_us in steps of `step` up to mu_hi, then bisects to `tol`.
// Fails with window-too-small when no crossing is found.
FractureThreshold fracture_threshold(int ell, int m, const PotentialSet& p, double tol = 1e-6,
                                     double step = 2e-3, double mu_hi = 3.095);

struct FractureScaling {
  std::vector<FractureThreshold> rows;
  double exponent = 0.0;  // log-log slope of mu_frac - mu_us against m
};
FractureScaling fracture_scaling(int ell, const std::vector<int>& ms, const PotentialSet& p);

}  // namespace nanolab
