#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nanolab/error.hpp"
#include "nanolab/potentials.hpp"

using namespace nanolab;
using std::numbers::pi;

TEST(Potentials, SoftPresetAnchors) {
  const auto p = default_soft();
  EXPECT_EQ(p.v2(1.0), -1.0);
  EXPECT_NEAR(p.v3(2 * pi / 3), 0.0, 1e-24);
  EXPECT_NEAR(p.v3(4 * pi / 3), 0.0, 1e-24);
  // -1 + 400 (r-1)^2 differentiated twice, cutoff identically 1 near r = 1.
  EXPECT_DOUBLE_EQ(p.d2v2(1.0), 800.0);
  EXPECT_NEAR(p.d2v3(2 * pi / 3), 600.0, 1e-10);
}

TEST(Potentials, StiffPresetAnchors) {
  const auto p = default_stiff();
  EXPECT_NEAR(p.d2v3(2 * pi / 3), 1.0, 1e-13);
  EXPECT_NEAR(p.v3(pi), 1.0 / 6.0, 1e-15);
  EXPECT_EQ(p.v2(1.2), 0.0);
  EXPECT_DOUBLE_EQ(p.d2v2(1.0), 800.0);
}

TEST(Potentials, CutoffIsBitExact) {
  for (const auto& p : {default_soft(), default_stiff()})
    for (double r = 1.1; r < 3.0; r += 1e-3) {
      EXPECT_EQ(p.v2(r), 0.0);
      EXPECT_EQ(p.dv2(r), 0.0);
      EXPECT_EQ(p.d2v2(r), 0.0);
    }
}

TEST(Potentials, SmoothStepRegion) {
  const auto p = default_soft();
  // The base polynomial is nonnegative on [1.05, 1.1], so v2 stays nonnegative there.
  for (double r = 1.05; r < 1.1; r += 1e-4) {
    EXPECT_GE(p.v2(r), 0.0);
    EXPECT_LE(p.v2(r), 400.0 * (r - 1) * (r - 1) - 1.0 + 1e-12);
  }
  EXPECT_EQ(p.v2(1.05), 400.0 * (1.05 - 1.0) * (1.05 - 1.0) - 1.0);
}

TEST(Potentials, DerivativesAgainstFiniteDifferences) {
  const auto p = default_soft();
  const double h = 1e-6;
  for (double r = 0.6; r < 1.2; r += 0.0137) {
    const double fd1 = (p.v2(r + h) - p.v2(r - h)) / (2 * h);
    const double fd2 = (p.dv2(r + h) - p.dv2(r - h)) / (2 * h);
    EXPECT_NEAR(fd1, p.dv2(r), 1e-6 * std::max(1.0, std::abs(fd1))) << r;
    EXPECT_NEAR(fd2, p.d2v2(r), 1e-6 * std::max(1.0, std::abs(fd2))) << r;
  }
  for (double a = 0.0; a < 2 * pi; a += 0.0731) {
    const double fd1 = (p.v3(a + h) - p.v3(a - h)) / (2 * h);
    const double fd2 = (p.dv3(a + h) - p.dv3(a - h)) / (2 * h);
    EXPECT_NEAR(fd1, p.dv3(a), 1e-6 * std::max(1.0, std::abs(fd1)));
    EXPECT_NEAR(fd2, p.d2v3(a), 1e-6 * std::max(1.0, std::abs(fd2)));
  }
}

TEST(Potentials, PresetsValidate) {
  for (const auto& p : {default_soft(), default_stiff()}) {
    const auto rep = validate(p);
    for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << p.name << ": " << c.name << " " << c.worst_residual;
    EXPECT_TRUE(rep.all_passed());
    EXPECT_TRUE(rep.extra_v3_zeros.empty());
  }
}

TEST(Potentials, ValidatorRejectsShallowMinimum) {
  auto p = default_soft();
  const auto base = p.v2;
  p.v2 = [base](double r) { return 0.5 * base(r); };
  const auto rep = validate(p);
  EXPECT_FALSE(rep.find("v2 minimum value -1 only at 1")->passed);
  EXPECT_FALSE(rep.all_passed());
}

TEST(Potentials, ValidatorRejectsAsymmetricAngleTerm) {
  auto p = default_soft();
  const auto base = p.v3;
  p.v3 = [base](double a) { return base(a) * (1.0 + 0.1 * std::sin(a) * std::sin(a) * (a < pi ? 1 : 0)); };
  const auto rep = validate(p);
  EXPECT_FALSE(rep.find("v3 symmetric around pi")->passed);
}

TEST(Potentials, ValidatorFlagsExtraZeros) {
  auto p = default_soft();
  p.v3 = [](double a) {
    const double c = std::cos(a);
    return 400.0 * (c + 0.5) * (c + 0.5) * (1.0 + c) * (1.0 + c);
  };
  const auto rep = validate(p);
  EXPECT_FALSE(rep.find("v3 zeros only at 2pi/3 and 4pi/3")->passed);
  ASSERT_FALSE(rep.extra_v3_zeros.empty());
  EXPECT_NEAR(rep.extra_v3_zeros.front(), pi, 1e-2);
}

TEST(Potentials, JsonDocument) {
  const auto p = potential_from_json_text(
      R"({"name": "mine", "k2": 400, "k3": 0.6666666666666666, "cutoff_lo": 1.05, "cutoff_hi": 1.1})");
  EXPECT_EQ(p.name, "mine");
  EXPECT_NEAR(p.d2v3(2 * pi / 3), 1.0, 1e-12);
  EXPECT_EQ(p.v2(1.1), 0.0);
  EXPECT_THROW(potential_from_json_text("{\"k2\": 1}"), Error);
  EXPECT_EQ(load_potential("stiff").name, "stiff");
  EXPECT_THROW(load_potential("/nonexistent/pots.json"), Error);
}
