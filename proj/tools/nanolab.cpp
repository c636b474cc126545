#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nanolab/acceptance.hpp"
#include "nanolab/cells.hpp"
#include "nanolab/cellspec.hpp"
#include "nanolab/error.hpp"
#include "nanolab/fracture.hpp"
#include "nanolab/io.hpp"
#include "nanolab/parallel.hpp"
#include "nanolab/stability.hpp"

using namespace nanolab;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
  } else {
    atomic_write(path, content);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  for (std::string f; std::getline(in, f, ',');) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(f, &used));
      if (used != f.size()) throw std::invalid_argument(f);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidParameter, "not an integer list: " + s);
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidParameter, "empty integer list");
  return out;
}

struct Grid {
  double lo = 0.0, hi = 0.0;
  int steps = 0;
};

Grid parse_grid(const std::string& s) {
  Grid g;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.steps) || c1 != ':' || c2 != ':' || !in.eof() || g.steps < 1)
    throw Error(ErrorKind::InvalidParameter, "mu grid must be lo:hi:steps, got " + s);
  return g;
}

json stability_json(const StabilityReport& r) {
  json fails = json::array();
  for (const auto& f : r.failures) fails.push_back({{"trial", f.trial}, {"gap", f.gap}});
  return {{"mu", r.mu},
          {"ell", r.ell},
          {"m", r.m},
          {"eta", r.spec.eta},
          {"seed", r.spec.seed},
          {"count", r.spec.count},
          {"mode", perturbation_mode_name(r.spec.mode)},
          {"base_energy", r.base_energy},
          {"trials", r.trials},
          {"skipped", r.skipped},
          {"rejections", r.rejections},
          {"min_gap", r.min_gap},
          {"min_ratio", r.min_ratio},
          {"median_ratio", r.median_ratio},
          {"max_ratio", r.max_ratio},
          {"failures", fails},
          {"passed", r.passed()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic zigzag carbon nanotubes: configurations, energies and stability checks"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores; NANOLAB_THREADS overrides)");

  std::string pots = "soft", in_path, out_path, json_path;
  int ell = 12, m = 4;
  double mu = 3.0, lambda1 = 1.0, lambda2 = 1.0;

  auto* gen = app.add_subcommand("generate", "write a family configuration as PXYZ");
  gen->add_option("--ell", ell)->required();
  gen->add_option("--m", m)->required();
  gen->add_option("--mu", mu)->required();
  gen->add_option("--lambda1", lambda1)->required();
  gen->add_option("--lambda2", lambda2)->required();
  gen->add_option("-o,--out", out_path);

  auto* energy = app.add_subcommand("energy", "total energy of a PXYZ configuration");
  energy->add_option("--in", in_path)->required();
  energy->add_option("--pots,--config", pots, "preset name (soft, stiff) or potential JSON file");
  energy->add_option("-o,--out", out_path);

  auto* cells = app.add_subcommand("cells", "per-cell bonds, angles, plane angles and symmetry defect as CSV");
  cells->add_option("--in", in_path)->required();
  cells->add_option("--ell", ell, "atoms per ring / 2; the file must hold 4 m ell atoms in generator order")->required();
  cells->add_option("-o,--out", out_path);

  std::string grid = "2.95:3.05:20";
  auto* reduced = app.add_subcommand("reduced", "minimizing family members on a mu grid as CSV");
  reduced->add_option("--ell", ell);
  reduced->add_option("--pots", pots);
  reduced->add_option("--mu-grid", grid, "lo:hi:steps");
  reduced->add_option("-o,--out", out_path);

  double mu_offset = 0.0;
  PerturbationSpec spec;
  std::string mode = "uniform-ball", dump_prefix;
  auto* stability = app.add_subcommand("stability", "Monte Carlo perturbations of the optimal tube");
  stability->add_option("--ell", ell);
  stability->add_option("--m", m);
  stability->add_option("--mu-offset", mu_offset, "offset from the unstretched period");
  stability->add_option("--eta", spec.eta);
  stability->add_option("--count", spec.count);
  stability->add_option("--seed", spec.seed);
  stability->add_option("--mode", mode, "uniform-ball, gaussian-clipped or per-direction");
  stability->add_option("--pots", pots);
  stability->add_option("--dump", dump_prefix, "write counterexamples to PREFIX<trial>.pxyz");
  stability->add_option("-o,--out", out_path);

  std::string m_list = "4,8,16,32,64";
  auto* fracture = app.add_subcommand("fracture", "fracture thresholds over m as CSV, fit as JSON");
  fracture->add_option("--ell", ell);
  fracture->add_option("--m-list", m_list);
  fracture->add_option("--pots", pots);
  fracture->add_option("-o,--out", out_path, "CSV (default stdout)");
  fracture->add_option("--json", json_path, "JSON with the fitted exponent (default stderr)");

  std::string ell_list = "16,32,64";
  double r = 0.9;
  auto* verify_cell = app.add_subcommand("verify-cell", "kernel, convexity and scaling checks of the cell energy");
  verify_cell->add_option("--ell", ell_list);
  verify_cell->add_option("--pots", pots);
  verify_cell->add_option("--r", r, "cone parameter in (0, 1)");
  verify_cell->add_option("-o,--out", out_path);

  AcceptanceOptions acc;
  auto* verify_all = app.add_subcommand("verify-all", "run the acceptance suite");
  verify_all->add_flag("--quick", acc.quick, "reduced trial counts");
  verify_all->add_option("--seed", acc.seed);
  verify_all->add_option("-o,--out", out_path, "JSON report (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << app.help();
    return kExitUsage;
  }

  if (const char* env = std::getenv("NANOLAB_THREADS")) {
    try {
      threads = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error: NANOLAB_THREADS must be an integer\n";
      return kExitUsage;
    }
  }
  set_thread_count(threads);

  try {
    if (*gen) {
      const auto t = build_nanotube(solve_family(ell, mu, lambda1, lambda2), m);
      emit(out_path, pxyz_text(t));
      return 0;
    }
    if (*energy) {
      const auto p = load_potential(pots);
      const auto t = read_pxyz(in_path);
      const auto g = bond_graph(t, p.cutoff);
      const auto e = energy_on_graph(t.positions, t.period, g, p);
      json j = {{"schema_version", 1},  {"pots", p.name},          {"n_atoms", t.size()},
                {"energy", e.total()},  {"pair_energy", e.pair},   {"angle_energy", e.angle},
                {"n_bonds", g.bonds.size()}, {"n_angles", g.n_angles()}, {"max_degree", g.max_degree()}};
      emit(out_path, dump(j));
      return 0;
    }
    if (*cells) {
      auto t = read_pxyz(in_path);
      if (ell < 2 || t.size() % (4 * ell))
        throw Error(ErrorKind::InvalidParameter, "atom count is not a multiple of 4 ell");
      t.ell = ell;
      t.m = t.size() / (4 * ell);
      std::string csv = "i,j,k";
      for (int b = 1; b <= 8; ++b) csv += ",b" + std::to_string(b);
      for (int a = 1; a <= 10; ++a) csv += ",phi" + std::to_string(a);
      csv += ",theta_l,theta_r,theta_l_dual,theta_r_dual,delta\n";
      for (const auto& c : extract_cells(t, bond_graph(t))) {
        const auto pa = cell_plane_angles(c.x);
        csv += std::to_string(c.center.i) + ',' + std::to_string(c.center.j) + ',' + std::to_string(c.center.k) + ',';
        std::vector<double> row(c.bonds.begin(), c.bonds.end());
        row.insert(row.end(), c.angles.begin(), c.angles.end());
        row.insert(row.end(), {pa.left, pa.right, pa.dual_left, pa.dual_right, symmetry_defect(c.x)});
        csv += csv_row(row);
      }
      emit(out_path, csv);
      return 0;
    }
    if (*reduced) {
      const auto p = load_potential(pots);
      const auto g = parse_grid(grid);
      const auto mus = mu_grid(g.lo, g.hi, g.steps);
      std::vector<MinimizerRow> rows(mus.size());
      parallel_for(static_cast<int>(mus.size()), [&](int q) { rows[q] = minimizer_row(mus[q], ell, p, true); });
      std::string csv = "mu,lambda1,lambda2,alpha,rho,E_min,hess_ev1,hess_ev2,hess_ev3\n";
      for (const auto& row : rows)
        csv += csv_row({row.mu, row.lambda1, row.lambda2, row.alpha, row.rho, row.energy_per_cell,
                        row.hessian_eigenvalues(0), row.hessian_eigenvalues(1), row.hessian_eigenvalues(2)});
      emit(out_path, csv);
      return 0;
    }
    if (*stability) {
      const auto p = load_potential(pots);
      spec.mode = parse_perturbation_mode(mode);
      const double mu_us = reference_angles(ell, p).mu_us;
      const auto rep = stability_trial(mu_us + mu_offset, ell, m, spec, p);
      json j = {{"schema_version", 1}, {"pots", p.name}, {"mu_us", mu_us}, {"report", stability_json(rep)}};
      emit(out_path, dump(j));
      if (!dump_prefix.empty())
        for (const auto& f : rep.failures) atomic_write(dump_prefix + std::to_string(f.trial) + ".pxyz", pxyz_text(f.tube));
      return rep.passed() ? 0 : kExitVerification;
    }
    if (*fracture) {
      const auto p = load_potential(pots);
      const auto ms = parse_int_list(m_list);
      const auto s = fracture_scaling(ell, ms, p);
      std::string csv = "m,mu_frac,scaled_offset\n";
      json rows = json::array();
      for (const auto& t : s.rows) {
        csv += std::to_string(t.m) + ',' + csv_row({t.mu_frac, t.scaled_offset});
        rows.push_back({{"m", t.m},
                        {"mu_frac", t.mu_frac},
                        {"bond_count_root", t.bond_count_root},
                        {"energy_root", t.energy_root},
                        {"cleft_energy", t.cleft_energy},
                        {"cleaved", t.cleaved}});
        if (!t.cleaved)
          std::cerr << "warning: not-cleaved: at m = " << t.m
                    << " the gap still leaves cleft bonds within the cutoff; energy uses the cleaved bond graph\n";
      }
      emit(out_path, csv);
      json j = {{"schema_version", 1}, {"pots", p.name}, {"ell", ell}, {"mu_us", s.rows.front().mu_us},
                {"exponent", s.exponent}, {"rows", rows}};
      if (json_path.empty())
        std::cerr << dump(j);
      else
        atomic_write(json_path, dump(j));
      return 0;
    }
    if (*verify_cell) {
      const auto p = load_potential(pots);
      const auto ells = parse_int_list(ell_list);
      const auto k = t_jacobian_kernel(planar_reference());
      const auto conv = cell_convexity_scaling(ells, p, r);
      const auto tilde = tilde_e_scaling(ells, p);
      json rows = json::array();
      for (const auto& c : conv.reports)
        rows.push_back({{"ell", c.ell},
                        {"good_min", c.good_min},
                        {"away_min", c.away_min},
                        {"kink_concavity", c.kink_concavity},
                        {"max_single_sum_eigenvalue", c.max_single_sum_eigenvalue},
                        {"passed", c.passed}});
      const bool ok = k.passed && conv.passed && tilde.passed;
      json j = {{"schema_version", 1},
                {"pots", p.name},
                {"r", r},
                {"kernel",
                 {{"dim", k.kernel_dim}, {"angle_dim", k.angle_kernel_dim}, {"principal_angle", k.kernel_angle},
                  {"min_good_image", k.min_good_image}, {"passed", k.passed}}},
                {"convexity", {{"rows", rows}, {"away_exponent", conv.away_slope}, {"passed", conv.passed}}},
                {"tilde_e", {{"slope_min", tilde.slope_min}, {"slope_max", tilde.slope_max}, {"passed", tilde.passed}}},
                {"passed", ok}};
      emit(out_path, dump(j));
      return ok ? 0 : kExitVerification;
    }
    if (*verify_all) {
      const auto results = run_acceptance(acc);
      for (const auto& res : results) std::cerr << criterion_line(res) << "\n";
      emit(out_path, acceptance_report(results, acc));
      return acceptance_ok(results) ? 0 : kExitVerification;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::VerificationFailure) return kExitVerification;
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
