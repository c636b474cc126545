#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nanolab {

// Two-body potential v2 on bond lengths and three-body potential v3 on bond
// angles, each with analytic first and second derivatives.
struct PotentialSet {
  using Fn = std::function<double(double)>;

  std::string name;
  double cutoff = 1.1;
  Fn v2, dv2, d2v2;
  Fn v3, dv3, d2v3;
};

// v2(r) = (-1 + k2 (r-1)^2) psi(r), psi a smooth step from 1 on (0, lo] to 0 on
// [hi, inf); v3(a) = k3 (cos a + 1/2)^2.
PotentialSet make_potential(const std::string& name, double k2, double k3,
                            double cutoff_lo = 1.05, double cutoff_hi = 1.1);

PotentialSet default_soft();
PotentialSet default_stiff();

// "soft", "stiff", or a path to a JSON document {name, k2, k3, cutoff_lo, cutoff_hi}.
PotentialSet load_potential(const std::string& name_or_path);
PotentialSet potential_from_json_text(const std::string& text);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double worst_residual = 0.0;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::vector<double> extra_v3_zeros;

  bool all_passed() const;
  const ValidationCheck* find(const std::string& name) const;
};

ValidationReport validate(const PotentialSet& p);

}  // namespace nanolab
