#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "microlam/moment_opt.hpp"
#include "microlam/topopt.hpp"

namespace microlam {

// Thrown for invalid configs; the CLI maps it to its own exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  int example = 1;           // 1..4, or 0 for custom loads
  std::vector<double> chi;   // empty -> example default sweep
  bool chi_given = false;    // explicit empty list means an empty sweep
  double f = -1.0;           // negative -> example default
  double radius = -1.0;      // filter radius R; the length scale is 2R
  int mesh_x = 100;
  int mesh_y = 100;
  int supersample = 3;
  std::vector<std::string> sg = {"mapped", "random", "homog"};
  std::uint64_t seed = 42;
  std::string out = "results";
  int workers = 0;           // 0 -> hardware concurrency
  int max_iterations = 500;
  bool invert_pgm = false;
  MaterialPair material;
  std::vector<StressCase> custom_loads;  // used when example == 0
};

// Fills unset fields with the published per-example defaults and validates
// ranges; throws ConfigError on contradictions.
void apply_example_defaults(ExperimentConfig& cfg);

// Parses a JSON config document (snake_case keys matching the fields above;
// "lengthscale" is accepted as 2*radius).
ExperimentConfig parse_config_json(const std::string& text);

LoadSet build_loadset_examples123(double chi);
LoadSet build_loadset_example4(double chi_degrees);
LoadSet example_loads(const ExperimentConfig& cfg, double chi);

struct SweepRow {
  double chi = 0.0;
  std::optional<double> bound;
  std::optional<double> mapped_rank3;
  std::optional<double> mapped_sg;
  std::optional<double> random_sg;
  std::optional<double> homog_sg;
  bool failed = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::filesystem::path example_dir;
  bool any_failed = false;
};

// Runs the pipeline for each sweep point: moment bound, reconstruction,
// single-scale mapping and evaluation, then one optimization per requested
// starting guess; writes results.csv plus per-run artifacts. Failures mark
// the row and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& cfg);

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<SweepRow>& rows);

}  // namespace microlam
