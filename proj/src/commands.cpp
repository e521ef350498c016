#include "got/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "got/io.hpp"
#include "got/parallel.hpp"
#include "got/sphere.hpp"
#include "got/wasserstein.hpp"

namespace got {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

DatasetManifest open_manifest(const CommandOptions& options) {
  if (options.manifest.empty()) throw UsageError("--manifest is required");
  auto manifest = DatasetManifest::load(options.manifest);
  if (options.grid_size) manifest.override_grid_size(*options.grid_size);
  return manifest;
}

FitConfig fit_config(const CommandOptions& options) {
  FitConfig config;
  if (options.alpha_bound) config.alpha_bound = *options.alpha_bound;
  config.seed = options.seed;
  config.validate();
  return config;
}

std::string join_ordering(const std::vector<int>& ordering) {
  std::string s = "(";
  for (std::size_t k = 0; k < ordering.size(); ++k) s += (k ? ", " : "") + std::to_string(ordering[k] + 1);
  return s + ")";
}

std::string join_values(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? ", " : "") + format_summary(v[k]);
  return s + ")";
}

std::string to_text(const std::function<void(std::ostream&)>& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace

void cmd_fit(const CommandOptions& options, std::ostream& out) {
  const auto manifest = open_manifest(options);
  if (!manifest.response) throw UsageError("fit needs a response in the manifest");
  const Dataset ds = load_dataset(manifest);
  const GotModel model = fit(ds.data, fit_config(options));

  const fs::path model_path = options.output_dir / "model.json";
  save_model(model, model_path);

  json summary;
  summary["observations"] = ds.data.size();
  summary["predictors"] = ds.data.predictor_count();
  json ord = json::array();
  for (int o : model.ordering) ord.push_back(o + 1);
  summary["ordering"] = ord;
  summary["alpha"] = std::vector<double>(model.alpha.data(), model.alpha.data() + model.alpha.size());
  summary["training_loss"] = model.training_loss;
  summary["converged"] = model.converged;
  summary["warnings"] = model.warnings;
  write_text_file(options.output_dir / "fit_summary.json", summary.dump(2) + "\n");

  out << "observations: " << ds.data.size() << "\n";
  out << "ordering: " << join_ordering(model.ordering) << "\n";
  out << "alpha: " << join_values(model.alpha) << "\n";
  out << "training loss: " << format_summary(model.training_loss) << "\n";
  for (const auto& w : model.warnings) out << "warning: " << w << "\n";
  out << "model written to " << model_path.string() << "\n";
}

void cmd_predict(const CommandOptions& options, std::ostream& out) {
  if (options.model.empty()) throw UsageError("--model is required");
  const GotModel model = load_model(options.model);
  const auto manifest = open_manifest(options);
  if (!(manifest.space == model.space->descriptor()))
    throw UsageError("manifest space does not match the model's space");
  if (manifest.predictors.size() != model.predictor_count())
    throw UsageError("manifest lists " + std::to_string(manifest.predictors.size()) +
                     " predictors, the model expects " + std::to_string(model.predictor_count()));
  Dataset ds = load_dataset(manifest);
  // Model and dataset must share one space object for dispatch checks.
  const std::size_t n = ds.ids.size();
  auto predictions = parallel_map<std::optional<SpacePoint>>(n, options.threads, [&](std::size_t i) {
    std::vector<SpacePoint> x;
    for (std::size_t j = 0; j < model.predictor_count(); ++j)
      x.push_back(SpacePoint::trusted(model.space, ds.data.predictors[j][i].payload()));
    return std::optional<SpacePoint>(predict(model, x));
  });
  std::vector<SpacePoint> points;
  for (auto& p : predictions) points.push_back(*p);

  write_text_file(options.output_dir / "predictions.csv",
                  to_text([&](std::ostream& s) { write_points(s, ds.ids, points, manifest.id_column); }));
  write_text_file(options.output_dir / "plot_data.csv",
                  to_text([&](std::ostream& s) { write_plot_data(s, ds.ids, points); }));

  if (!ds.data.response.empty()) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      total += model.space->distance(points[i].payload(), ds.data.response[i].payload());
    out << "mean distance to observed response: " << format_summary(total / static_cast<double>(n)) << "\n";
  }
  out << n << " predictions written to " << (options.output_dir / "predictions.csv").string() << "\n";
}

void cmd_loo(const CommandOptions& options, std::ostream& out) {
  std::vector<Method> methods;
  if (options.method == "got") methods = {Method::got};
  else if (options.method == "nw") methods = {Method::nw};
  else if (options.method == "both") methods = {Method::got, Method::nw};
  else throw UsageError("--method must be got, nw or both");

  const auto manifest = open_manifest(options);
  if (!manifest.response) throw UsageError("loo needs a response in the manifest");
  const Dataset ds = load_dataset(manifest);
  if (ds.data.size() < 3) throw UsageError("leave-one-out needs at least 3 observations");
  const FitConfig config = fit_config(options);
  NwConfig nw;
  nw.tau = options.tau;
  nw.predictor = options.nw_predictor - 1;
  if (nw.predictor < 0 || static_cast<std::size_t>(nw.predictor) >= ds.data.predictor_count())
    throw UsageError("--nw-predictor must name one of the " + std::to_string(ds.data.predictor_count()) +
                     " predictors");

  json summary;
  summary["observations"] = ds.data.size();
  summary["methods"] = json::array();
  for (Method m : methods) {
    const LooReport report = loo_evaluate(ds.data, m, config, nw, options.threads);
    const std::string name(to_string(m));
    write_text_file(options.output_dir / ("loo_" + name + ".csv"),
                    to_text([&](std::ostream& s) { write_loo_csv(s, report, ds.ids); }));
    summary["methods"].push_back(loo_to_json(report, ds.ids));
    out << name << " leave-one-out mean error: " << format_summary(report.mean_error);
    if (report.failed_folds > 0) out << " (" << report.failed_folds << " failed folds excluded)";
    out << "\n";
  }
  write_text_file(options.output_dir / "loo_summary.json", summary.dump(2) + "\n");
}

ExperimentConfig scenario_defaults(const std::string& scenario, const std::string& space) {
  ExperimentConfig config;
  config.name = scenario;
  auto& s = config.scenario;
  const SpaceKind kind = space_kind_from_string(space);
  switch (kind) {
    case SpaceKind::wasserstein: s.space = wasserstein_descriptor(200, -8.0, 8.0); break;
    case SpaceKind::euclidean: s.space = euclidean_descriptor(2); break;
    case SpaceKind::sphere: s.space = sphere_descriptor(20, true); break;
    case SpaceKind::spd: s.space = spd_descriptor(3); break;
  }
  s.alpha_star = {0.8, 0.3};
  s.ordering_star = {0, 1};
  s.sigma = 0.05;
  if (scenario == "theorem1") {
    s.n = 500;
    config.replications = 100;
  } else if (scenario == "theorem2") {
    s.n = 500;
    config.sample_sizes = {50, 500};
    config.replications = 50;
  } else if (scenario == "dominance") {
    s.n = 34;
    config.replications = 50;
  } else if (scenario == "recovery") {
    s.n = 100;
    s.sigma = 0.0;
    config.replications = 10;
  } else {
    throw UsageError("unknown scenario '" + scenario + "' (expected theorem1, theorem2, dominance or recovery)");
  }
  return config;
}

ExperimentConfig simulate_config(const SimulateOptions& options) {
  ExperimentConfig config = scenario_defaults(options.scenario, options.space);
  if (options.replications) config.replications = *options.replications;
  if (options.n) {
    config.scenario.n = *options.n;
    if (!config.sample_sizes.empty()) config.sample_sizes.back() = *options.n;
  }
  if (options.sigma) config.scenario.sigma = *options.sigma;
  if (options.alpha_bound) config.fit.alpha_bound = *options.alpha_bound;
  config.seed = options.seed;
  config.fit.seed = options.seed;
  config.threads = options.threads;
  return config;
}

void cmd_simulate(const SimulateOptions& options, std::ostream& out) {
  const ExperimentConfig config = simulate_config(options);
  const ExperimentReport report = run_experiment(config);
  const std::string stem = "simulate_" + config.name;
  write_text_file(options.output_dir / (stem + ".json"), experiment_to_json(report, config).dump(2) + "\n");
  write_text_file(options.output_dir / (stem + ".csv"),
                  to_text([&](std::ostream& s) { write_experiment_csv(s, report); }));

  std::size_t failures = 0;
  for (const auto& r : report.records)
    if (!r.failure.empty()) ++failures;
  out << "scenario " << config.name << ": " << report.records.size() << " replications";
  if (failures) out << " (" << failures << " failed)";
  out << "\n";
  if (std::isfinite(report.recovery_rate)) out << "ordering recovery rate: " << format_summary(report.recovery_rate) << "\n";
  if (config.name == "recovery") {
    double worst = 0.0;
    for (const auto& r : report.records)
      if (r.failure.empty()) worst = std::max(worst, r.max_alpha_error);
    out << "max |alpha - alpha*|: " << format_summary(worst) << "\n";
  }
  if (config.name == "theorem2") {
    for (std::size_t k = 0; k < report.sample_sizes.size(); ++k) {
      std::vector<double> deltas;
      for (const auto& r : report.records)
        if (r.n == report.sample_sizes[k] && r.failure.empty()) deltas.push_back(r.delta);
      std::sort(deltas.begin(), deltas.end());
      auto q = [&](double p) {
        if (deltas.empty()) return std::numeric_limits<double>::quiet_NaN();
        return deltas[static_cast<std::size_t>(std::lround(p * static_cast<double>(deltas.size() - 1)))];
      };
      out << "n=" << report.sample_sizes[k] << " delta quartiles: " << format_summary(q(0.25)) << " "
          << format_summary(report.median_delta[k]) << " " << format_summary(q(0.75)) << "\n";
    }
  }
  if (config.name == "dominance")
    out << "GOT beats NW in " << report.dominance_wins << " of " << report.records.size() << " replications\n";
  if (report.first_order_perturbation)
    out << "note: sphere perturbations preserve the Frechet mean to first order only\n";
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string observation_id(const fs::path& path) {
  const std::string name = path.filename().string();
  return name.substr(0, name.find('.'));
}

}  // namespace

void cmd_convert_lifetable(const LifetableOptions& options, std::ostream& out) {
  if (options.inputs.empty()) throw UsageError("convert-lifetable needs at least one input file");
  if (options.output.empty()) throw UsageError("--output is required");
  if (options.grid_size < 1) throw UsageError("grid size must be >= 1");
  const Support support{0.0, options.max_age};
  std::vector<std::string> ids;
  std::vector<SpacePoint> points;
  const SpacePtr space = make_space(wasserstein_descriptor(options.grid_size, support.lower, support.upper));

  for (const auto& path : options.inputs) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path.string());
    std::string line;
    int year_col = -1, age_col = -1, dx_col = -1;
    std::vector<double> edges{0.0}, masses;
    while (std::getline(in, line)) {
      const auto tok = split_ws(line);
      if (tok.empty()) continue;
      if (year_col < 0) {
        for (std::size_t c = 0; c < tok.size(); ++c) {
          if (tok[c] == "Year") year_col = static_cast<int>(c);
          if (tok[c] == "Age") age_col = static_cast<int>(c);
          if (tok[c] == "dx") dx_col = static_cast<int>(c);
        }
        if (year_col >= 0 && (age_col < 0 || dx_col < 0))
          throw IngestionError(path.string() + ": header lacks Age or dx columns");
        continue;
      }
      if (tok.size() <= static_cast<std::size_t>(std::max({year_col, age_col, dx_col}))) continue;
      if (tok[static_cast<std::size_t>(year_col)] != std::to_string(options.year)) continue;
      std::string age = tok[static_cast<std::size_t>(age_col)];
      const bool open = !age.empty() && age.back() == '+';
      if (open) age.pop_back();
      const double a = parse_double(age, path.string() + " Age");
      if (a != edges.back())
        throw IngestionError(path.string() + ": ages must run 0, 1, 2, ... without gaps (found " + age + ")");
      const double upper = open ? options.max_age : a + 1.0;
      if (upper > options.max_age) throw IngestionError(path.string() + ": age beyond --max-age");
      edges.push_back(upper);
      masses.push_back(parse_double(tok[static_cast<std::size_t>(dx_col)], path.string() + " dx"));
      if (open) break;
    }
    if (year_col < 0) throw IngestionError(path.string() + ": no 'Year Age ... dx' header found");
    if (masses.empty()) throw IngestionError(path.string() + ": no rows for year " + std::to_string(options.year));
    const auto q = wasserstein::from_histogram(edges, masses, options.grid_size, support);
    ids.push_back(observation_id(path));
    points.emplace_back(space, q.values());
  }
  write_text_file(options.output,
                  to_text([&](std::ostream& s) { write_points(s, ids, points, "observation_id"); }));
  out << ids.size() << " age-at-death quantile rows written to " << options.output.string() << "\n";
}

void cmd_convert_ghcnd(const GhcndOptions& options, std::ostream& out) {
  if (options.inputs.empty()) throw UsageError("convert-ghcnd needs at least one input file");
  if (options.output.empty()) throw UsageError("--output is required");
  if (!options.year) throw UsageError("--year is required");
  if (options.first_month < 1 || options.last_month > 12 || options.first_month > options.last_month)
    throw UsageError("months must satisfy 1 <= first <= last <= 12");
  const std::vector<double> bounds(options.bounds.begin(), options.bounds.end());
  grid_cell_weights(options.nx, options.ny, bounds);

  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> samples;
  for (const auto& path : options.inputs) {
    const CsvTable t = read_csv(path);
    auto col = [&](const std::string& name) {
      for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c] == name) return c;
      throw IngestionError(path.string() + " has no '" + name + "' column");
    };
    const std::size_t st = col("STATION"), dt = col("DATE"), tmax = col("TMAX"), tmin = col("TMIN");
    for (const auto& row : t.rows) {
      const std::string& date = row[dt];
      if (date.size() < 7) throw IngestionError(path.string() + ": malformed DATE '" + date + "'");
      const int year = std::atoi(date.substr(0, 4).c_str());
      const int month = std::atoi(date.substr(5, 2).c_str());
      if (year != *options.year || month < options.first_month || month > options.last_month) continue;
      if (row[tmax].empty() || row[tmin].empty()) continue;  // missing readings
      const double hi = options.scale * parse_double(row[tmax], path.string() + " TMAX");
      const double lo = options.scale * parse_double(row[tmin], path.string() + " TMIN");
      if (!samples.contains(row[st])) order.push_back(row[st]);
      auto& s = samples[row[st]];
      s.first.push_back(lo);
      s.second.push_back(hi);
    }
  }
  if (order.empty()) throw IngestionError("no readings in the requested year and months");

  std::ostringstream csv;
  csv << "observation_id";
  for (int k = 0; k < options.nx * options.ny; ++k) csv << ",f" << (k + 1);
  csv << "\n";
  for (const auto& id : order) {
    const auto& [lo, hi] = samples[id];
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (lo[k] < bounds[0] || lo[k] > bounds[1] || hi[k] < bounds[2] || hi[k] > bounds[3])
        throw IngestionError("station " + id + ": reading (" + format_summary(lo[k]) + ", " +
                             format_summary(hi[k]) + ") outside --bounds");
      xs.push_back(lo[k]);
      ys.push_back(hi[k]);
    }
    const Vector f = bin_samples_2d(xs, ys, options.nx, options.ny, bounds);
    csv << id;
    for (Eigen::Index k = 0; k < f.size(); ++k) csv << ',' << format_exact(f[k]);
    csv << "\n";
  }
  write_text_file(options.output, csv.str());
  out << order.size() << " station densities written to " << options.output.string() << "\n";
}

}  // namespace got
