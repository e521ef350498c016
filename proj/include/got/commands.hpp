#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "got/harness.hpp"

namespace got {

struct CommandOptions {
  std::filesystem::path manifest;
  std::filesystem::path model;  // predict only
  std::filesystem::path output_dir = ".";
  std::string method = "got";   // loo: got | nw | both
  std::optional<double> alpha_bound;
  std::optional<int> grid_size;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<double> tau;
  int nw_predictor = 1;  // 1-based, as users count predictors
};

struct SimulateOptions {
  std::string scenario = "theorem1";  // theorem1 | theorem2 | dominance | recovery
  std::string space = "wasserstein";  // wasserstein | euclidean | sphere | spd
  std::optional<std::size_t> replications;
  std::optional<std::size_t> n;
  std::optional<double> sigma;
  std::optional<double> alpha_bound;
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path output_dir = ".";
};

/// Defaults for a named scenario, before flag overrides.
ExperimentConfig scenario_defaults(const std::string& scenario, const std::string& space);
ExperimentConfig simulate_config(const SimulateOptions& options);

void cmd_fit(const CommandOptions& options, std::ostream& out);
void cmd_predict(const CommandOptions& options, std::ostream& out);
void cmd_loo(const CommandOptions& options, std::ostream& out);
void cmd_simulate(const SimulateOptions& options, std::ostream& out);

/// HMD period lifetables (whitespace-separated; Year Age mx qx ax lx dx Lx
/// Tx ex) to Wasserstein quantile rows, one observation per input file and
/// the given year.
struct LifetableOptions {
  std::vector<std::filesystem::path> inputs;
  int year = 0;
  int grid_size = 200;
  double max_age = 111.0;
  std::filesystem::path output;
};
void cmd_convert_lifetable(const LifetableOptions& options, std::ostream& out);

/// NOAA GHCN-Daily CSV exports (STATION, DATE, TMAX, TMIN, ...) to sphere
/// density rows on an nx-by-ny grid over (TMIN, TMAX), one observation per
/// station and year, restricted to the given months.
struct GhcndOptions {
  std::vector<std::filesystem::path> inputs;
  int nx = 32;
  int ny = 32;
  std::array<double, 4> bounds = {-30.0, 40.0, -20.0, 50.0};
  int first_month = 6;
  int last_month = 9;
  std::optional<int> year;
  double scale = 1.0;  // multiply raw values (0.1 for tenths of a degree)
  std::filesystem::path output;
};
void cmd_convert_ghcnd(const GhcndOptions& options, std::ostream& out);

}  // namespace got
