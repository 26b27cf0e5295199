// Quantitative acceptance gates. Each criterion prints one [PASS]/[FAIL]
// line; exit status is nonzero if any requested criterion fails. Criteria 1
// and 3 run full desk-scale sweeps and take tens of minutes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "microlam/experiment.hpp"
#include "microlam/homogenize.hpp"
#include "microlam/io.hpp"
#include "microlam/moment_opt.hpp"
#include "microlam/reconstruct.hpp"
#include "microlam/topopt.hpp"
#include "microlam/unitcell.hpp"

using namespace microlam;

namespace {

std::filesystem::path g_out = "acceptance_out";

void report(int crit, bool ok, const std::string& what) {
  std::printf("[%s] %d: %s\n", ok ? "PASS" : "FAIL", crit, what.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pat, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pat, a, b, c);
  return buf;
}

double urand(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

LoadSet random_loadset(std::mt19937& rng) {
  std::vector<StressCase> cases;
  const int n = 1 + static_cast<int>(rng() % 4);
  for (int k = 0; k < n; ++k)
    cases.push_back({urand(rng, -1, 1), urand(rng, -1, 1), urand(rng, -1, 1),
                     urand(rng, 0.2, 1.0)});
  return LoadSet(cases);
}

MomentVector random_interior_moments(std::mt19937& rng, double margin) {
  for (;;) {
    const double m1 = urand(rng, -1, 1), m2 = urand(rng, -1, 1);
    if (m1 * m1 + m2 * m2 >= 1.0 - 2 * margin) continue;
    const double m3 = urand(rng, -1 + margin, 1 - margin);
    const double disc = 4 * m1 * m1 * m2 * m2 -
                        (2 * m1 * m1 * (1 - m3) + 2 * m2 * m2 * (1 + m3) +
                         m3 * m3 - 1);
    if (disc <= margin * margin) continue;
    const double half = std::sqrt(disc) * (1 - margin);
    return {m1, m2, m3, 2 * m1 * m2 + urand(rng, -half, half)};
  }
}

Rank3Laminate random_laminate(std::mt19937& rng, int rank) {
  Rank3Laminate lam;
  lam.rank = rank;
  double tot = 0;
  for (int n = 0; n < rank; ++n) tot += lam.p[n] = urand(rng, 0.1, 1.0);
  for (int n = 0; n < rank; ++n) lam.p[n] /= tot;
  const double pi = 3.14159265358979323846;
  for (;;) {
    for (int n = 0; n < rank; ++n) lam.theta[n] = urand(rng, -pi / 2, pi / 2);
    bool ok = true;
    for (int a = 0; a < rank; ++a)
      for (int b = a + 1; b < rank; ++b) {
        double d = std::fabs(lam.theta[a] - lam.theta[b]);
        d = std::min(d, pi - d);
        if (d < 0.15) ok = false;
      }
    if (ok) return lam;
  }
}

// Bound, reconstruction and single-scale evaluation for one sweep point,
// without any optimization (the serial first stage of run_sweep).
struct MappedPoint {
  double bound;
  double mapped;
};

MappedPoint evaluate_mapped(const LoadSet& loads, double f,
                            const MaterialPair& mat, int mesh) {
  const MomentSolution sol = optimize_moments(loads, f, mat);
  const Rank3Laminate lam = reconstruct_laminate(sol.m);
  ParallelogramCell cell = build_cell(lam);
  width_bisection(cell, lam, f);
  const Eigen::VectorXd rho = rasterize_cell(cell, mesh, mesh, 3);
  Homogenizer hom(mesh, mesh, cell.basis(), mat);
  hom.homogenize(rho);
  return {sol.energy, hom.complementary_energy(loads)};
}

// --- criteria ---------------------------------------------------------

bool criterion1() {
  ExperimentConfig cfg;
  cfg.example = 1;
  cfg.mesh_x = cfg.mesh_y = 100;
  cfg.sg = {"mapped"};
  cfg.max_iterations = 300;
  cfg.out = (g_out / "c1").string();
  const SweepResult res = run_sweep(cfg);

  double worst = 0;
  bool ok = !res.any_failed && res.rows.size() == 11;
  for (const auto& r : res.rows) {
    if (!r.bound || !r.mapped_sg) {
      ok = false;
      continue;
    }
    worst = std::max(worst, *r.mapped_sg / *r.bound);
  }
  ok = ok && worst <= 1.12;
  report(1, ok,
         fmt("optimized mapped designs vs bound, worst ratio %.4f "
             "(limit 1.12, 11 sweep points)", worst));
  return ok;
}

bool criterion2() {
  double lo = 1e300, hi = 0;
  bool ok = true;
  for (int example : {1, 2, 3}) {
    ExperimentConfig cfg;
    cfg.example = example;
    apply_example_defaults(cfg);
    for (double chi : cfg.chi) {
      const MappedPoint p =
          evaluate_mapped(build_loadset_examples123(chi), cfg.f,
                          cfg.material, 100);
      const double ratio = p.mapped / p.bound;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ok = ok && ratio >= 1.0 - 1e-3 && ratio <= 1.25;
    }
  }
  report(2, ok,
         fmt("un-optimized mapped fields vs bound in [%.4f, %.4f] "
             "(required within [1.0, 1.25])", lo, hi));
  return ok;
}

bool criterion3() {
  ExperimentConfig cfg;
  cfg.example = 3;
  cfg.mesh_x = cfg.mesh_y = 100;
  cfg.sg = {"mapped", "random", "homog"};
  cfg.max_iterations = 300;
  cfg.out = (g_out / "c3").string();
  const SweepResult res = run_sweep(cfg);

  int wins = 0, rows = 0;
  for (const auto& r : res.rows) {
    if (!r.mapped_sg || !r.random_sg || !r.homog_sg) continue;
    ++rows;
    const double other = std::min(*r.random_sg, *r.homog_sg);
    if (*r.mapped_sg <= other * (1 + 1e-9)) ++wins;
  }
  const bool ok = !res.any_failed && rows == 11 && wins >= 9;
  report(3, ok,
         fmt("mapped start beats or ties the others on %.0f of %.0f points "
             "(need 9 of 11)", wins, rows));
  return ok;
}

bool criterion4() {
  std::mt19937 rng(20240);
  const MaterialPair mat;
  const double f = 0.5;
  bool ok = true;
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const LoadSet loads = random_loadset(rng);
    const MomentSolution sol = optimize_moments(loads, f, mat);
    const OracleResult oracle = grid_search_oracle(loads, f, mat, 0.005);
    // the lattice minimum can only sit above the true optimum
    if (sol.energy > oracle.energy * (1 + 1e-9)) ok = false;
    const double gap = oracle.energy / sol.energy - 1.0;
    worst = std::max(worst, gap);
    if (gap > 0.005) ok = false;
  }
  report(4, ok,
         fmt("moment optimizer vs lattice oracle: worst gap %.3e "
             "(limit 5e-3), optimizer never above the lattice", worst));
  return ok;
}

bool criterion5() {
  std::mt19937 rng(555);
  double worst_m = 0, worst_w = 0;
  for (int k = 0; k < 1000; ++k) {
    const MomentVector m = random_interior_moments(rng, 0.01);
    const Rank3Laminate lam = reconstruct_laminate(m);
    worst_m = std::max(
        worst_m,
        (laminate_moments(lam).vec() - m.vec()).cwiseAbs().maxCoeff());
    for (double f : {0.2, 0.5, 0.7}) {
      const auto mu = layer_widths(lam, f);
      double voidfrac = 1;
      for (double w : mu) voidfrac *= 1 - w;
      worst_w = std::max(worst_w, std::fabs(voidfrac - (1 - f)));
    }
  }
  const bool ok = worst_m <= 1e-6 && worst_w <= 1e-10;
  report(5, ok,
         fmt("reconstruction round-trip: worst moment error %.2e "
             "(limit 1e-6), worst width identity error %.2e (limit 1e-10)",
             worst_m, worst_w));
  return ok;
}

bool criterion6() {
  const MaterialPair mat;
  const int n = 200;
  Homogenizer hom(n, n, Eigen::Matrix2d::Identity(), mat);

  const Eigen::Matrix3d solid = hom.homogenize(Eigen::VectorXd::Ones(n * n));
  const Eigen::Matrix3d base = isotropic_stiffness_voigt(mat.e_plus, mat.nu);
  const double base_err = (solid - base).norm() / base.norm();

  Eigen::VectorXd stripes(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) stripes[j * n + i] = (j < n / 2) ? 1.0 : 0.0;
  const Eigen::Matrix3d c_fe = hom.homogenize(stripes);
  const Eigen::Matrix3d c_an =
      xi_to_voigt_form(effective_compliance({1, 0, 1, 0}, 0.5, mat))
          .inverse();
  const double along = std::fabs(c_fe(0, 0) / c_an(0, 0) - 1.0);
  const double across = std::fabs(c_fe(1, 1) / c_an(1, 1) - 1.0);

  const bool ok = base_err <= 1e-8 && along <= 0.02 && across <= 0.05;
  report(6, ok,
         fmt("homogenization oracles: base error %.2e (limit 1e-8), stripe "
             "errors along %.2e / across %.2e (limits 0.02 / 0.05)",
             base_err, along, across));
  return ok;
}

bool criterion7() {
  std::mt19937 rng(777);
  const MaterialPair mat;
  const int n = 20;
  const double beta = 8.0;
  Homogenizer hom(n, n, Eigen::Matrix2d::Identity(), mat);
  const PeriodicFilter filter(n, n, Eigen::Matrix2d::Identity(), 0.08);
  const LoadSet loads({{1, 0, 0, 0.4}, {0, 1, 0, 0.3}, {0, 0, 1, 0.3}});

  Eigen::VectorXd x(n * n);
  for (int e = 0; e < n * n; ++e) x[e] = urand(rng, 0.1, 0.9);

  auto project = [&](const Eigen::VectorXd& xb) {
    Eigen::VectorXd r(xb.size());
    for (Eigen::Index e = 0; e < xb.size(); ++e)
      r[e] = heaviside_project(xb[e], beta);
    return r;
  };
  auto objective = [&](const Eigen::VectorXd& xr) {
    hom.homogenize(project(filter.apply(xr)));
    return hom.complementary_energy(loads);
  };

  const Eigen::VectorXd xbar = filter.apply(x);
  hom.homogenize(project(xbar));
  Eigen::VectorXd inner = hom.energy_gradient(loads);
  for (Eigen::Index e = 0; e < inner.size(); ++e)
    inner[e] *= heaviside_derivative(xbar[e], beta);
  const Eigen::VectorXd grad = filter.apply_transpose(inner);
  const double scale = grad.cwiseAbs().maxCoeff();

  const double h = 1e-6;
  double worst = 0;
  for (int k = 0; k < 40; ++k) {
    const int e = static_cast<int>(rng() % (n * n));
    Eigen::VectorXd xp = x, xm = x;
    xp[e] += h;
    xm[e] -= h;
    const double fd = (objective(xp) - objective(xm)) / (2 * h);
    worst = std::max(worst, std::fabs(fd - grad[e]) / scale);
  }
  const bool ok = worst <= 1e-4;
  report(7, ok,
         fmt("filtered+projected adjoint gradient vs central differences: "
             "max relative error %.2e (limit 1e-4)", worst));
  return ok;
}

bool criterion8() {
  std::mt19937 rng(888);
  double worst_area = 0;
  for (int k = 0; k < 50; ++k) {
    const Rank3Laminate lam = random_laminate(rng, 1 + k % 3);
    ParallelogramCell cell = build_cell(lam);
    const double f = urand(rng, 0.15, 0.85);
    width_bisection(cell, lam, f);
    worst_area = std::max(worst_area, std::fabs(stripe_union_area(cell) - f));
  }

  // volume fidelity of converged optimizations, one per starting guess
  const MaterialPair mat;
  const int n = 40;
  const double f = 0.5, radius = 0.05;
  const LoadSet loads = build_loadset_examples123(0.5);
  const MomentSolution sol = optimize_moments(loads, f, mat);
  const Rank3Laminate lam = reconstruct_laminate(sol.m);
  ParallelogramCell cell = build_cell(lam);
  width_bisection(cell, lam, f);

  TopOptConfig cfg;
  cfg.volume_fraction = f;
  cfg.radius = radius;
  cfg.max_iterations = 150;

  double worst_vol = 0;
  for (int guess = 0; guess < 3; ++guess) {
    const Eigen::Matrix2d basis =
        guess == 0 ? cell.basis() : Eigen::Matrix2d::Identity().eval();
    Homogenizer hom(n, n, basis, mat);
    const PeriodicFilter filter(n, n, basis, radius);
    Eigen::VectorXd start;
    if (guess == 0) {
      start = rasterize_cell(cell, n, n, 3);
    } else if (guess == 1) {
      std::mt19937 seed_rng(999);
      start = random_start(n, n, f, seed_rng, filter);
    } else {
      start = homogeneous_start(n, n, basis, f, radius);
    }
    const TopOptResult res = optimize_cell(hom, filter, loads, start, cfg);
    worst_vol = std::max(worst_vol, res.volume - f);
  }

  const bool ok = worst_area <= 1e-4 && worst_vol <= 1e-3;
  report(8, ok,
         fmt("width bisection worst volume error %.2e (limit 1e-4); "
             "converged designs exceed f by at most %.2e (limit 1e-3)",
             worst_area, worst_vol));
  return ok;
}

bool criterion9() {
  ExperimentConfig cfg;
  cfg.example = 2;
  cfg.chi = {0.0, 0.3, 0.7, 1.0};
  cfg.mesh_x = cfg.mesh_y = 50;
  cfg.sg = {"mapped", "random", "homog"};
  cfg.max_iterations = 150;
  cfg.seed = 11;
  cfg.out = (g_out / "c9").string();
  const SweepResult res = run_sweep(cfg);

  double worst = 1e300;
  bool ok = !res.any_failed;
  for (const auto& r : res.rows) {
    if (!r.bound) {
      ok = false;
      continue;
    }
    for (const auto& v :
         {r.mapped_rank3, r.mapped_sg, r.random_sg, r.homog_sg})
      if (v) worst = std::min(worst, *v / *r.bound);
  }
  ok = ok && worst >= 1.0 - 1e-3;
  report(9, ok,
         fmt("bound dominance: smallest evaluation/bound ratio %.6f "
             "(must be >= 0.999)", worst));
  return ok;
}

bool criterion10() {
  ExperimentConfig cfg;
  cfg.example = 4;
  cfg.chi = {15.0, 30.0};
  cfg.mesh_x = cfg.mesh_y = 32;
  cfg.sg = {"mapped", "random", "homog"};
  cfg.max_iterations = 60;
  cfg.seed = 7;

  cfg.out = (g_out / "c10a").string();
  cfg.workers = 1;
  run_sweep(cfg);
  cfg.out = (g_out / "c10b").string();
  cfg.workers = 2;
  run_sweep(cfg);

  auto parse_csv = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ','))
        row.push_back(cell.empty() ? -1.0 : std::stod(cell));
      rows.push_back(row);
    }
    return rows;
  };
  const auto a = parse_csv(g_out / "c10a" / "example4" / "results.csv");
  const auto b = parse_csv(g_out / "c10b" / "example4" / "results.csv");

  bool ok = !a.empty() && a.size() == b.size();
  double worst = 0;
  for (std::size_t i = 0; ok && i < a.size(); ++i) {
    ok = a[i].size() == b[i].size();
    for (std::size_t j = 0; ok && j < a[i].size(); ++j) {
      const double d = std::fabs(a[i][j] - b[i][j]) /
                       std::max({1.0, std::fabs(a[i][j]), std::fabs(b[i][j])});
      worst = std::max(worst, d);
      ok = d <= 1e-10;
    }
  }
  report(10, ok,
         fmt("fixed-seed reruns across worker counts agree to %.2e "
             "(limit 1e-10)", worst));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance gates"};
  int criterion = 0;
  std::string out = "acceptance_out";
  app.add_option("--criterion", criterion, "criterion number, 0 runs all")
      ->check(CLI::Range(0, 10));
  app.add_option("--out", out, "scratch directory for sweep artifacts");
  CLI11_PARSE(app, argc, argv);

  g_out = out;
  std::filesystem::create_directories(g_out);

  bool (*gates[])() = {criterion1, criterion2, criterion3, criterion4,
                       criterion5, criterion6, criterion7, criterion8,
                       criterion9, criterion10};
  bool all_ok = true;
  for (int k = 1; k <= 10; ++k) {
    if (criterion != 0 && criterion != k) continue;
    all_ok = gates[k - 1]() && all_ok;
  }
  return all_ok ? 0 : 1;
}
