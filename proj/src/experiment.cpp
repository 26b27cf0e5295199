#include "microlam/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "microlam/io.hpp"
#include "microlam/reconstruct.hpp"
#include "microlam/unitcell.hpp"

namespace microlam {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> default_chi(int example) {
  std::vector<double> chi;
  if (example == 4) {
    for (int k = 0; k <= 12; ++k) chi.push_back(5.0 * k);
  } else {
    for (int k = 0; k <= 10; ++k) chi.push_back(0.1 * k);
  }
  return chi;
}

std::string chi_dir_name(double chi) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "chi_%g", chi);
  return buf;
}

// splitmix64; decorrelates per-run seeds from the user seed
std::uint64_t mix_seed(std::uint64_t s) {
  s += 0x9e3779b97f4a7c15ull;
  s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ull;
  s = (s ^ (s >> 27)) * 0x94d049bb133111ebull;
  return s ^ (s >> 31);
}

struct ChiContext {
  LoadSet loads;
  MomentSolution bound;
  Rank3Laminate laminate;
  double gamma = 0.0;
  ParallelogramCell cell;
  Eigen::VectorXd mapped_field;
  bool ok = false;
  std::string error;
};

}  // namespace

void apply_example_defaults(ExperimentConfig& cfg) {
  if (cfg.example < 0 || cfg.example > 4)
    throw ConfigError("example must be 1..4 or custom");
  if (cfg.example == 0 && cfg.custom_loads.empty())
    throw ConfigError("custom example requires a loads list");

  if (cfg.f < 0.0) {
    switch (cfg.example) {
      case 3: cfg.f = 0.2; break;
      case 4: cfg.f = 0.25; break;
      default: cfg.f = 0.5; break;
    }
  }
  if (cfg.radius < 0.0) cfg.radius = (cfg.example == 2) ? 0.075 : 0.025;
  if (cfg.chi.empty() && !cfg.chi_given)
    cfg.chi = (cfg.example == 0) ? std::vector<double>{0.0}
                                 : default_chi(cfg.example);

  std::sort(cfg.chi.begin(), cfg.chi.end());
  cfg.chi.erase(std::unique(cfg.chi.begin(), cfg.chi.end()), cfg.chi.end());
  for (double c : cfg.chi) {
    if (cfg.example == 4 && (c < 0.0 || c > 60.0))
      throw ConfigError("chi out of range [0, 60] degrees");
    if (cfg.example >= 1 && cfg.example <= 3 && (c < 0.0 || c > 1.0))
      throw ConfigError("chi out of range [0, 1]");
  }
  if (cfg.f <= 0.0 || cfg.f >= 1.0) throw ConfigError("f must be in (0, 1)");
  if (cfg.radius <= 0.0) throw ConfigError("length scale must be positive");
  if (cfg.mesh_x < 4 || cfg.mesh_y < 4) throw ConfigError("mesh too coarse");
  if (cfg.supersample < 1) throw ConfigError("supersample must be >= 1");
  if (cfg.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (cfg.sg.empty()) throw ConfigError("at least one starting guess");
  for (const auto& s : cfg.sg)
    if (s != "mapped" && s != "random" && s != "homog")
      throw ConfigError("unknown starting guess: " + s);
}

ExperimentConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("example")) {
      if (j["example"].is_string()) {
        const std::string s = j["example"];
        if (s == "custom")
          cfg.example = 0;
        else
          cfg.example = std::stoi(s);
      } else {
        cfg.example = j["example"];
      }
    }
    if (j.contains("chi")) {
      if (j["chi"].is_array())
        cfg.chi = j["chi"].get<std::vector<double>>();
      else
        cfg.chi = {j["chi"].get<double>()};
      cfg.chi_given = true;
    }
    if (j.contains("f")) cfg.f = j["f"];
    if (j.contains("radius")) cfg.radius = j["radius"];
    if (j.contains("lengthscale")) cfg.radius = 0.5 * j["lengthscale"].get<double>();
    if (j.contains("mesh")) {
      if (j["mesh"].is_array()) {
        cfg.mesh_x = j["mesh"][0];
        cfg.mesh_y = j["mesh"][1];
      } else {
        cfg.mesh_x = cfg.mesh_y = j["mesh"];
      }
    }
    if (j.contains("supersample")) cfg.supersample = j["supersample"];
    if (j.contains("sg")) cfg.sg = j["sg"].get<std::vector<std::string>>();
    if (j.contains("seed")) cfg.seed = j["seed"];
    if (j.contains("out")) cfg.out = j["out"];
    if (j.contains("workers")) cfg.workers = j["workers"];
    if (j.contains("max_iterations")) cfg.max_iterations = j["max_iterations"];
    if (j.contains("invert_pgm")) cfg.invert_pgm = j["invert_pgm"];
    if (j.contains("material")) {
      const auto& m = j["material"];
      if (m.contains("e_plus")) cfg.material.e_plus = m["e_plus"];
      if (m.contains("e_minus")) cfg.material.e_minus = m["e_minus"];
      if (m.contains("nu")) cfg.material.nu = m["nu"];
    }
    if (j.contains("loads")) {
      for (const auto& l : j["loads"]) {
        StressCase s;
        s.s11 = l.value("s11", 0.0);
        s.s22 = l.value("s22", 0.0);
        s.s12 = l.value("s12", 0.0);
        s.weight = l.value("weight", 1.0);
        cfg.custom_loads.push_back(s);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

LoadSet build_loadset_examples123(double chi) {
  if (chi < 0.0 || chi > 1.0) throw ConfigError("chi out of range [0, 1]");
  std::vector<StressCase> cases;
  cases.push_back({-1.0, 1.0, 0.0, 0.5 * chi});
  cases.push_back({0.0, 0.0, 1.0, 0.5 * chi});
  cases.push_back({1.0, 0.0, 0.0, 0.5 * (1.0 - chi)});
  cases.push_back({0.0, 1.0, 0.0, 0.5 * (1.0 - chi)});
  return LoadSet(cases);
}

LoadSet build_loadset_example4(double chi_degrees) {
  if (chi_degrees < 0.0 || chi_degrees > 60.0)
    throw ConfigError("chi out of range [0, 60] degrees");
  std::vector<StressCase> cases;
  for (int k = 0; k < 3; ++k) {
    const double phi = k * chi_degrees * pi / 180.0;
    const double c = std::cos(phi), s = std::sin(phi);
    cases.push_back({c * c, s * s, s * c, 1.0 / 3.0});
  }
  return LoadSet(cases);
}

LoadSet example_loads(const ExperimentConfig& cfg, double chi) {
  if (cfg.example == 0) return LoadSet(cfg.custom_loads);
  if (cfg.example == 4) return build_loadset_example4(chi);
  return build_loadset_examples123(chi);
}

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "chi,bound,mapped_rank3,mapped_sg,random_sg,homog_sg,"
         "mapped_rank3_norm,mapped_sg_norm,random_sg_norm,homog_sg_norm\n";
  auto cell = [&](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  auto norm = [&](const SweepRow& r, const std::optional<double>& v) {
    return (v && r.bound && *r.bound > 0.0)
               ? format_double(*v / *r.bound)
               : std::string();
  };
  for (const auto& r : rows) {
    out << format_double(r.chi) << ',' << cell(r.bound) << ','
        << cell(r.mapped_rank3) << ',' << cell(r.mapped_sg) << ','
        << cell(r.random_sg) << ',' << cell(r.homog_sg) << ','
        << norm(r, r.mapped_rank3) << ',' << norm(r, r.mapped_sg) << ','
        << norm(r, r.random_sg) << ',' << norm(r, r.homog_sg) << '\n';
  }
}

SweepResult run_sweep(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  apply_example_defaults(cfg);

  SweepResult result;
  const std::string exname =
      cfg.example == 0 ? "custom" : "example" + std::to_string(cfg.example);
  result.example_dir = std::filesystem::path(cfg.out) / exname;
  std::filesystem::create_directories(result.example_dir);

  const int n_chi = static_cast<int>(cfg.chi.size());
  std::vector<ChiContext> ctx(n_chi);
  result.rows.resize(n_chi);

  // Stage one, serial: bounds, reconstruction, mapping, direct evaluation.
  // Cheap next to the optimization runs.
  for (int c = 0; c < n_chi; ++c) {
    auto& row = result.rows[c];
    row.chi = cfg.chi[c];
    auto& cx = ctx[c];
    try {
      cx.loads = example_loads(cfg, cfg.chi[c]);
      cx.bound = optimize_moments(cx.loads, cfg.f, cfg.material);
      cx.laminate = reconstruct_laminate(cx.bound.m);
      cx.gamma = rotate_moments(cx.bound.m).gamma;
      cx.cell = build_cell(cx.laminate);
      width_bisection(cx.cell, cx.laminate, cfg.f);
      cx.mapped_field =
          rasterize_cell(cx.cell, cfg.mesh_x, cfg.mesh_y, cfg.supersample);
      row.bound = cx.bound.energy;

      Homogenizer hom(cfg.mesh_x, cfg.mesh_y, cx.cell.basis(), cfg.material);
      hom.homogenize(cx.mapped_field);
      row.mapped_rank3 = hom.complementary_energy(cx.loads);
      cx.ok = true;
    } catch (const std::exception& e) {
      cx.error = e.what();
      row.failed = true;
    }
  }

  // Stage two: one job per (chi, starting guess).
  struct Job {
    int chi_index;
    std::string sg;
  };
  std::vector<Job> jobs;
  for (int c = 0; c < n_chi; ++c)
    for (const auto& s : cfg.sg)
      if (ctx[c].ok) jobs.push_back({c, s});

  std::mutex row_mutex;
  std::atomic<std::size_t> next{0};

  auto run_job = [&](const Job& job) {
    const auto& cx = ctx[job.chi_index];
    auto& row = result.rows[job.chi_index];
    const auto dir =
        result.example_dir / chi_dir_name(cfg.chi[job.chi_index]) / job.sg;
    std::filesystem::create_directories(dir);
    try {
      const bool mapped = job.sg == "mapped";
      const Eigen::Matrix2d basis =
          mapped ? cx.cell.basis() : Eigen::Matrix2d::Identity().eval();

      Homogenizer hom(cfg.mesh_x, cfg.mesh_y, basis, cfg.material);
      PeriodicFilter filter(cfg.mesh_x, cfg.mesh_y, basis, cfg.radius);

      Eigen::VectorXd start;
      if (mapped) {
        start = cx.mapped_field;
      } else if (job.sg == "random") {
        const int sg_index = 1;  // stable stream id per guess type
        std::mt19937 rng(static_cast<std::uint32_t>(mix_seed(
            cfg.seed + 1315423911ull * (job.chi_index * 4 + sg_index))));
        start = random_start(cfg.mesh_x, cfg.mesh_y, cfg.f, rng, filter);
      } else {
        start = homogeneous_start(cfg.mesh_x, cfg.mesh_y, basis, cfg.f,
                                  cfg.radius);
      }

      TopOptConfig top;
      top.volume_fraction = cfg.f;
      top.radius = cfg.radius;
      top.max_iterations = cfg.max_iterations;
      const TopOptResult res =
          optimize_cell(hom, filter, cx.loads, start, top);

      write_pgm(dir / "field.pgm", res.physical, cfg.mesh_x, cfg.mesh_y,
                cfg.invert_pgm);
      write_pgm_tiled(dir / "field_tiled.pgm", res.physical, cfg.mesh_x,
                      cfg.mesh_y, cfg.invert_pgm);
      write_field_csv(dir / "field.csv", res.physical, cfg.mesh_x,
                      cfg.mesh_y);
      write_iteration_log(dir / "log.csv", res.history);
      write_laminate_json(dir / "laminate.json", cx.laminate, cx.bound.m,
                          cx.gamma, cfg.f, cx.bound.energy, cx.cell);

      std::scoped_lock lock(row_mutex);
      if (job.sg == "mapped")
        row.mapped_sg = res.objective;
      else if (job.sg == "random")
        row.random_sg = res.objective;
      else
        row.homog_sg = res.objective;
    } catch (const std::exception&) {
      std::scoped_lock lock(row_mutex);
      row.failed = true;
    }
  };

  int workers = cfg.workers > 0
                    ? cfg.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (workers <= 1) {
    for (const auto& job : jobs) run_job(job);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t k = next.fetch_add(1);
          if (k >= jobs.size()) return;
          run_job(jobs[k]);
        }
      });
    for (auto& t : pool) t.join();
  }

  for (const auto& r : result.rows) result.any_failed |= r.failed;
  write_results_csv(result.example_dir / "results.csv", result.rows);
  return result;
}

}  // namespace microlam
