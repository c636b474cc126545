#include "nanolab/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "nanolab/error.hpp"

namespace nanolab {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}
}

double ReducedBox::alpha_lo() { return std::acos(-0.4); }
double ReducedBox::alpha_hi() { return std::acos(-0.6); }

BetaDerivatives beta_derivatives(double alpha, double gamma) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double sg = std::sin(0.5 * gamma), cg = std::cos(0.5 * gamma);
  const double s = sa * sg;
  if (!(s < 1.0 && s > -1.0)) throw Error(ErrorKind::DomainError, "arcsin argument outside (-1, 1)");
  const double q = 1.0 - s * s;
  const double b_s = 2.0 / std::sqrt(q);
  const double b_ss = 2.0 * s / (q * std::sqrt(q));
  const double s_a = ca * sg, s_g = 0.5 * sa * cg;
  const double s_aa = -s, s_gg = -0.25 * s, s_ag = 0.5 * ca * cg;
  BetaDerivatives d;
  d.value = 2.0 * std::asin(s);
  d.da = b_s * s_a;
  d.dg = b_s * s_g;
  d.daa = b_ss * s_a * s_a + b_s * s_aa;
  d.dgg = b_ss * s_g * s_g + b_s * s_gg;
  d.dag = b_ss * s_a * s_g + b_s * s_ag;
  return d;
}

double ReducedPoint::lambda4() const {
  const double lambda1 = 0.5 * mu + lambda * std::cos(alpha1);
  return lambda1 - 2.0 * lambda * std::cos(alpha1);
}

double sym_energy(const ReducedPoint& pt, const PotentialSet& p) {
  return sym_energy_derivatives(pt, p).value;
}

SymDerivatives sym_energy_derivatives(const ReducedPoint& pt, const PotentialSet& p) {
  SymDerivatives d;
  d.grad.setZero();
  d.hess.setZero();
  d.outer.setZero();
  const double lam = pt.lambda;
  d.value = 2.0 * p.v2(lam);
  d.grad(0) = 2.0 * p.dv2(lam);
  d.hess(0, 0) = 2.0 * p.d2v2(lam);
  const double alphas[2] = {pt.alpha1, pt.alpha2};
  const double gammas[2] = {pt.gamma1, pt.gamma2};
  for (int j = 0; j < 2; ++j) {
    const double a = alphas[j];
    const double ca = std::cos(a), sa = std::sin(a);
    const double b = 0.5 * pt.mu + lam * ca;
    const double v = p.v2(b), dv = p.dv2(b), d2v = p.d2v2(b);
    const auto bd = beta_derivatives(a, gammas[j]);
    const int k = j + 1;
    d.value += 0.5 * v + 2.0 * p.v3(a) + p.v3(bd.value);
    d.grad(0) += 0.5 * dv * ca;
    d.grad(k) += -0.5 * dv * lam * sa + 2.0 * p.dv3(a) + p.dv3(bd.value) * bd.da;
    d.hess(0, 0) += 0.5 * d2v * ca * ca;
    d.hess(0, k) += 0.5 * (-d2v * lam * sa * ca - dv * sa);
    d.hess(k, k) += 0.5 * (d2v * lam * lam * sa * sa - dv * lam * ca) + 2.0 * p.d2v3(a) +
                    p.d2v3(bd.value) * bd.da * bd.da + p.dv3(bd.value) * bd.daa;
    d.outer(0) += 0.25 * dv;
    d.outer(k) = p.dv3(bd.value) * bd.dg;
  }
  d.hess(1, 0) = d.hess(0, 1);
  d.hess(2, 0) = d.hess(0, 2);
  return d;
}

ReducedResult reduced_energy(double mu, double gamma1, double gamma2, const PotentialSet& p) {
  const Eigen::Vector3d lo(ReducedBox::lambda_lo, ReducedBox::alpha_lo(), ReducedBox::alpha_lo());
  const Eigen::Vector3d hi(ReducedBox::lambda_hi, ReducedBox::alpha_hi(), ReducedBox::alpha_hi());
  const double margin = 1e-12;
  auto project = [&](Eigen::Vector3d x) {
    for (int i = 0; i < 3; ++i) x(i) = std::clamp(x(i), lo(i) + margin, hi(i) - margin);
    return x;
  };
  auto eval = [&](const Eigen::Vector3d& x) {
    ReducedPoint pt{mu, gamma1, gamma2, x(0), x(1), x(2)};
    return sym_energy_derivatives(pt, p);
  };

  Eigen::Vector3d x(1.0, 2.0 * kPi / 3.0, 2.0 * kPi / 3.0);
  SymDerivatives d = eval(x);
  ReducedResult r;
  const double tol = 1e-12;
  int it = 0;
  for (; it < 200; ++it) {
    if (d.grad.lpNorm<Eigen::Infinity>() < tol) break;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(d.hess);
    Eigen::Vector3d ev = es.eigenvalues();
    const double floor = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (int i = 0; i < 3; ++i) ev(i) = std::max(ev(i), floor);
    const Eigen::Vector3d step =
        -es.eigenvectors() * (es.eigenvectors().transpose() * d.grad).cwiseQuotient(ev);
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-20) {
      const Eigen::Vector3d xn = project(x + t * step);
      const SymDerivatives dn = eval(xn);
      // Accept any non-increasing step; near the optimum energy differences drown in roundoff,
      // so a smaller gradient also counts as progress.
      if (dn.value < d.value + 1e-4 * t * d.grad.dot(step) ||
          (dn.value <= d.value + 1e-12 * std::max(1.0, std::abs(d.value)) &&
           dn.grad.lpNorm<Eigen::Infinity>() < d.grad.lpNorm<Eigen::Infinity>())) {
        x = xn;
        d = dn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  r.iterations = it;
  r.value = d.value;
  r.lambda = x(0);
  r.alpha1 = x(1);
  r.alpha2 = x(2);
  r.grad_norm = d.grad.lpNorm<Eigen::Infinity>();
  for (int i = 0; i < 3; ++i)
    if (x(i) - lo(i) < 1e-8 || hi(i) - x(i) < 1e-8) r.boundary_warning = true;
  // Stalling or cycling below the roundoff floor of the gradient still counts as converged.
  const double stall_tol = 1e-10;
  if (r.grad_norm >= stall_tol && !r.boundary_warning)
    throw Error(ErrorKind::OptimizationFailure,
                "reduced energy: Newton stopped after " + std::to_string(it) + " iterations with gradient " +
                    fmt_g(r.grad_norm) + " at mu = " + std::to_string(mu));
  return r;
}

Eigen::Vector3d reduced_gradient(double mu, double gamma1, double gamma2, const PotentialSet& p) {
  const auto r = reduced_energy(mu, gamma1, gamma2, p);
  ReducedPoint pt{mu, gamma1, gamma2, r.lambda, r.alpha1, r.alpha2};
  return sym_energy_derivatives(pt, p).outer;
}

Eigen::Matrix3d reduced_hessian(double mu, double gamma1, double gamma2, const PotentialSet& p,
                                double h) {
  const Eigen::Vector3d x0(mu, gamma1, gamma2);
  auto grad = [&](const Eigen::Vector3d& x) { return reduced_gradient(x(0), x(1), x(2), p); };
  auto central = [&](double step) {
    Eigen::Matrix3d m;
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(c) = step;
      m.col(c) = (grad(x0 + e) - grad(x0 - e)) / (2.0 * step);
    }
    return m;
  };
  const Eigen::Matrix3d rich = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  return 0.5 * (rich + rich.transpose());
}

ReferenceAngles reference_angles(int ell, const PotentialSet& p) {
  const double g = gamma_ell(ell);
  ReferenceAngles ref;
  ref.alpha_ru = 2.0 * kPi / 3.0;
  const double lo = ReducedBox::alpha_lo(), hi = ReducedBox::alpha_hi();

  auto f = [&](double a) { return beta(a, g) - a; };
  double a = lo, b = hi, fa = f(a), fb = f(b);
  if (fa * fb > 0.0) throw Error(ErrorKind::DomainError, "beta(alpha, gamma) - alpha has no sign change");
  while (b - a > 1e-13) {
    const double c = 0.5 * (a + b), fc = f(c);
    if (fc == 0.0) {
      a = b = c;
      break;
    }
    if ((fc > 0.0) == (fa > 0.0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  ref.alpha_ch = 0.5 * (a + b);

  auto angle_energy = [&](double x) { return 2.0 * p.v3(x) + p.v3(beta(x, g)); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double u = lo, w = hi;
  double x1 = w - inv_phi * (w - u), x2 = u + inv_phi * (w - u);
  double f1 = angle_energy(x1), f2 = angle_energy(x2);
  while (w - u > 1e-9) {
    if (f1 < f2) {
      w = x2;
      x2 = x1;
      f2 = f1;
      x1 = w - inv_phi * (w - u);
      f1 = angle_energy(x1);
    } else {
      u = x1;
      x1 = x2;
      f1 = f2;
      x2 = u + inv_phi * (w - u);
      f2 = angle_energy(x2);
    }
  }
  double x = 0.5 * (u + w);
  for (int it = 0; it < 50; ++it) {
    const auto bd = beta_derivatives(x, g);
    const double d1 = 2.0 * p.dv3(x) + p.dv3(bd.value) * bd.da;
    const double d2 = 2.0 * p.d2v3(x) + p.d2v3(bd.value) * bd.da * bd.da + p.dv3(bd.value) * bd.daa;
    if (!(d2 > 0.0)) break;
    const double dx = -d1 / d2;
    x += dx;
    if (std::abs(dx) < 1e-16) break;
  }
  ref.alpha_us = x;
  ref.mu_us = 2.0 - 2.0 * std::cos(x);
  return ref;
}

FamilyMinimum minimize_family(double mu, int ell, const PotentialSet& p) {
  const double g = gamma_ell(ell);
  FamilyMinimum fm;
  fm.mu = mu;
  fm.inner = reduced_energy(mu, g, g, p);
  fm.energy_per_cell = fm.inner.value;
  fm.lambda2 = fm.inner.lambda;
  fm.lambda1 = 0.5 * mu + fm.inner.lambda * std::cos(fm.inner.alpha1);
  fm.geometry = solve_family(ell, mu, fm.lambda1, fm.lambda2);
  fm.alpha = fm.geometry.alpha;
  fm.rho = fm.geometry.rho;
  return fm;
}

ReducedHessianReport verify_reduced_hessian(int ell, const PotentialSet& p) {
  ReducedHessianReport rep;
  rep.ell = ell;
  const auto ref = reference_angles(ell, p);
  const double g = gamma_ell(ell);
  rep.mu_us = ref.mu_us;
  rep.hessian = reduced_hessian(ref.mu_us, g, g, p);
  rep.eigenvalues = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(rep.hessian).eigenvalues();
  rep.positive_definite = rep.eigenvalues.minCoeff() > 0.0;
  rep.d2_mu = rep.hessian(0, 0);
  const double K = 9.0 + p.d2v2(1.0) / (2.0 * p.d2v3(2.0 * kPi / 3.0));
  rep.d2_mu_predicted = 2.0 * p.d2v2(1.0) / K;
  rep.relative_error = std::abs(rep.d2_mu - rep.d2_mu_predicted) / rep.d2_mu_predicted;
  rep.gradient = reduced_gradient(ref.mu_us, g, g, p);
  double cmin = std::numeric_limits<double>::infinity();
  const double base_gap = std::min(0.5 * (kPi - g), 0.02);
  for (double delta : {0.25 * base_gap, 0.5 * base_gap, base_gap}) {
    const double g1 = g - delta, g2 = g + delta;
    const double split = reduced_energy(ref.mu_us, g1, g2, p).value - reduced_energy(ref.mu_us, g, g, p).value;
    cmin = std::min(cmin, split * ell * ell / ((g1 - g2) * (g1 - g2)));
  }
  rep.splitting_constant = cmin;
  return rep;
}

std::vector<double> mu_grid(double lo, double hi, int steps) {
  if (steps < 1) throw Error(ErrorKind::InvalidParameter, "mu grid needs at least one step");
  std::vector<double> g(steps + 1);
  for (int i = 0; i <= steps; ++i) g[i] = lo + (hi - lo) * i / steps;
  return g;
}

MinimizerRow minimizer_row(double mu, int ell, const PotentialSet& p, bool with_hessian) {
  const auto fm = minimize_family(mu, ell, p);
  MinimizerRow row;
  row.mu = mu;
  row.lambda1 = fm.lambda1;
  row.lambda2 = fm.lambda2;
  row.alpha = fm.alpha;
  row.rho = fm.rho;
  row.energy_per_cell = fm.energy_per_cell;
  row.hessian_eigenvalues.setZero();
  if (with_hessian) {
    const double g = gamma_ell(ell);
    row.hessian_eigenvalues =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(reduced_hessian(mu, g, g, p)).eigenvalues();
  }
  return row;
}

MinimizerPropertiesReport minimizer_properties(int ell, const PotentialSet& p, double half_window,
                                               int steps) {
  MinimizerPropertiesReport rep;
  rep.ell = ell;
  rep.ref = reference_angles(ell, p);
  const double mus = rep.ref.mu_us;
  if (steps % 2) ++steps;  // keep mu_us on the grid
  for (double mu : mu_grid(mus - half_window, mus + half_window, steps))
    rep.rows.push_back(minimizer_row(mu, ell, p, false));
  const auto& rows = rep.rows;
  const int n = static_cast<int>(rows.size());
  rep.energy_convex = true;
  for (int i = 1; i + 1 < n; ++i)
    if (rows[i - 1].energy_per_cell + rows[i + 1].energy_per_cell - 2.0 * rows[i].energy_per_cell <= 0.0)
      rep.energy_convex = false;
  int argmin = 0;
  for (int i = 1; i < n; ++i)
    if (rows[i].energy_per_cell < rows[argmin].energy_per_cell) argmin = i;
  rep.minimum_at_mu_us = argmin == n / 2;
  rep.lambdas_increasing = true;
  rep.increasing_above_mu_us = true;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && (rows[i].lambda1 <= rows[i - 1].lambda1 || rows[i].lambda2 <= rows[i - 1].lambda2))
      rep.lambdas_increasing = false;
    if (i > n / 2 && rows[i].energy_per_cell <= rows[i - 1].energy_per_cell) rep.increasing_above_mu_us = false;
  }
  // The angle window is usually much narrower than the sampled one, so locate its ends directly.
  const double g = gamma_ell(ell);
  auto alpha_at = [&](double mu) { return reduced_energy(mu, g, g, p).alpha1; };
  auto edge = [&](double inside, double outside, auto ok) {
    if (ok(alpha_at(outside))) return outside;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (inside + outside);
      (ok(alpha_at(mid)) ? inside : outside) = mid;
    }
    return inside;
  };
  auto ok = [&](double a) { return a > rep.ref.alpha_ch && a < rep.ref.alpha_ru; };
  rep.alpha_in_range = ok(alpha_at(mus));
  if (rep.alpha_in_range) {
    rep.alpha_window_lo = edge(mus, rows.front().mu, ok);
    rep.alpha_window_hi = edge(mus, rows.back().mu, ok);
    rep.alpha_in_range = rep.alpha_window_lo < mus && mus < rep.alpha_window_hi;
  }
  const double dmu = rows[n / 2 + 1].mu - rows[n / 2 - 1].mu;
  rep.radius_slope = (rows[n / 2 + 1].rho - rows[n / 2 - 1].rho) / dmu;
  const double diff = 6.0 * p.d2v3(2.0 * kPi / 3.0) - p.d2v2(1.0);
  rep.expected_radius_sign = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
  const double h = rows[n / 2 + 1].mu - rows[n / 2].mu;
  const double d2 = (rows[n / 2 + 1].energy_per_cell + rows[n / 2 - 1].energy_per_cell -
                     2.0 * rows[n / 2].energy_per_cell) / (h * h);
  rep.d2_energy_per_atom = 0.5 * d2;  // E_min = 2 m l E_red and n = 4 m l
  return rep;
}

}  // namespace nanolab
