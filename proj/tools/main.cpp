#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "microlam/experiment.hpp"
#include "microlam/io.hpp"

namespace {

std::vector<double> parse_double_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(std::stod(tok));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Optimal rank-3 laminate bounds and single-scale microstructure "
      "optimization"};

  std::string config_path;
  std::string example_str;
  std::vector<std::string> chi_args, sg_args;
  double f = -1.0, lengthscale = -1.0;
  std::string mesh_str;
  std::uint64_t seed = 0;
  bool seed_set = false, invert = false;
  std::string out_dir;
  int workers = -1, max_iter = -1, supersample = -1;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--example", example_str, "example id: 1..4 or custom");
  app.add_option("--chi", chi_args,
                 "sweep values, comma separated or repeated");
  app.add_option("--f", f, "stiff material volume fraction");
  app.add_option("--lengthscale", lengthscale,
                 "minimum feature size 2R in cell units");
  app.add_option("--mesh", mesh_str, "elements per cell: N or NXxNY");
  app.add_option("--sg", sg_args,
                 "starting guesses: mapped, random, homog");
  app.add_option("--seed", seed, "random seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "parallel sweep workers");
  app.add_option("--max-iterations", max_iter,
                 "optimization iteration budget");
  app.add_option("--supersample", supersample,
                 "subsamples per element edge when rasterizing");
  app.add_flag("--invert-pgm", invert, "write dark material on white");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // config error
  }

  try {
    microlam::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::fprintf(stderr, "cannot read config file %s\n",
                     config_path.c_str());
        return 1;
      }
      std::stringstream buf;
      buf << in.rdbuf();
      cfg = microlam::parse_config_json(buf.str());
    }
    if (!example_str.empty()) {
      if (example_str == "custom")
        cfg.example = 0;
      else
        cfg.example = std::stoi(example_str);
    }
    if (!chi_args.empty()) {
      cfg.chi = parse_double_list(chi_args);
      cfg.chi_given = true;
    }
    if (f >= 0.0) cfg.f = f;
    if (lengthscale > 0.0) cfg.radius = 0.5 * lengthscale;
    if (!mesh_str.empty()) {
      const auto x = mesh_str.find('x');
      if (x == std::string::npos) {
        cfg.mesh_x = cfg.mesh_y = std::stoi(mesh_str);
      } else {
        cfg.mesh_x = std::stoi(mesh_str.substr(0, x));
        cfg.mesh_y = std::stoi(mesh_str.substr(x + 1));
      }
    }
    if (!sg_args.empty()) {
      cfg.sg.clear();
      for (const auto& s : sg_args) {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
          if (!tok.empty()) cfg.sg.push_back(tok);
      }
    }
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (workers >= 0) cfg.workers = workers;
    if (max_iter > 0) cfg.max_iterations = max_iter;
    if (supersample > 0) cfg.supersample = supersample;
    if (invert) cfg.invert_pgm = true;

    const auto result = microlam::run_sweep(cfg);

    std::printf("%-10s %-14s %-14s %-14s %-14s %-14s\n", "chi", "bound",
                "mapped_rank3", "mapped_sg", "random_sg", "homog_sg");
    auto show = [](const std::optional<double>& v) {
      return v ? microlam::format_double(*v) : std::string("-");
    };
    for (const auto& r : result.rows)
      std::printf("%-10g %-14s %-14s %-14s %-14s %-14s\n", r.chi,
                  show(r.bound).c_str(), show(r.mapped_rank3).c_str(),
                  show(r.mapped_sg).c_str(), show(r.random_sg).c_str(),
                  show(r.homog_sg).c_str());
    std::printf("results: %s\n",
                (result.example_dir / "results.csv").string().c_str());

    return result.any_failed ? 2 : 0;
  } catch (const microlam::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
