#include "got/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "got/sphere.hpp"
#include "got/spd.hpp"
#include "got/wasserstein.hpp"

namespace got {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::string format_with(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw IngestionError(path.string() + ": row " + std::to_string(table.rows.size() + 1) + " has " +
                           std::to_string(fields.size()) + " fields, header has " +
                           std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw IngestionError(path.string() + " is empty");
  return table;
}

double parse_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  if (!field.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v))
    throw IngestionError(context + ": '" + field + "' is not a finite number");
  return v;
}

std::string format_exact(double x) { return format_with("%.17g", x); }
std::string format_summary(double x) { return format_with("%.12g", x); }

DataFormat data_format_from_string(const std::string& name) {
  if (name == "samples") return DataFormat::samples;
  if (name == "quantiles") return DataFormat::quantiles;
  if (name == "vectors") return DataFormat::vectors;
  if (name == "densities") return DataFormat::densities;
  if (name == "matrices") return DataFormat::matrices;
  if (name == "factors") return DataFormat::factors;
  throw UsageError("unknown data format '" + name +
                   "' (expected samples, quantiles, vectors, densities, matrices or factors)");
}

std::string_view to_string(DataFormat format) {
  switch (format) {
    case DataFormat::samples: return "samples";
    case DataFormat::quantiles: return "quantiles";
    case DataFormat::vectors: return "vectors";
    case DataFormat::densities: return "densities";
    case DataFormat::matrices: return "matrices";
    case DataFormat::factors: return "factors";
  }
  return "unknown";
}

json descriptor_to_json(const SpaceDescriptor& d) {
  json j;
  j["kind"] = std::string(to_string(d.kind));
  switch (d.kind) {
    case SpaceKind::euclidean:
      j["dimension"] = d.dimension;
      if (d.bounded) j["bounds"] = {d.lower, d.upper};
      break;
    case SpaceKind::wasserstein:
      j["grid_size"] = d.dimension;
      j["support"] = {d.lower, d.upper};
      break;
    case SpaceKind::sphere:
      j["dimension"] = d.dimension;
      j["orthant"] = d.orthant;
      if (!d.grid_shape.empty()) {
        j["grid"] = {{"shape", d.grid_shape}, {"bounds", d.grid_bounds}};
      } else if (!d.quadrature_weights.empty()) {
        j["weights"] = d.quadrature_weights;
      }
      break;
    case SpaceKind::spd:
      j["matrix_size"] = d.dimension;
      break;
  }
  j["tolerance"] = d.tolerance;
  return j;
}

SpaceDescriptor descriptor_from_json(const json& j) {
  try {
    SpaceDescriptor d;
    d.kind = space_kind_from_string(j.at("kind").get<std::string>());
    switch (d.kind) {
      case SpaceKind::euclidean:
        d.dimension = j.at("dimension").get<int>();
        if (j.contains("bounds")) {
          d.bounded = true;
          d.lower = j["bounds"].at(0).get<double>();
          d.upper = j["bounds"].at(1).get<double>();
        }
        break;
      case SpaceKind::wasserstein:
        d.dimension = j.value("grid_size", 200);
        d.lower = j.at("support").at(0).get<double>();
        d.upper = j.at("support").at(1).get<double>();
        break;
      case SpaceKind::sphere:
        d.orthant = j.value("orthant", false);
        if (j.contains("grid")) {
          d.grid_shape = j["grid"].at("shape").get<std::vector<int>>();
          d.grid_bounds = j["grid"].at("bounds").get<std::vector<double>>();
          if (d.grid_shape.size() != 2) throw UsageError("sphere grid shape must be [nx, ny]");
          d.dimension = d.grid_shape[0] * d.grid_shape[1];
          d.quadrature_weights = grid_cell_weights(d.grid_shape[0], d.grid_shape[1], d.grid_bounds);
        } else {
          d.dimension = j.at("dimension").get<int>();
          if (j.contains("weights")) d.quadrature_weights = j["weights"].get<std::vector<double>>();
        }
        break;
      case SpaceKind::spd:
        d.dimension = j.at("matrix_size").get<int>();
        break;
    }
    if (j.contains("tolerance")) d.tolerance = j["tolerance"].get<double>();
    d.validate();
    return d;
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid space description: ") + e.what());
  }
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open manifest " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw UsageError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(doc, path.parent_path());
}

DatasetManifest DatasetManifest::from_json(const json& doc, const fs::path& base_dir) {
  DatasetManifest m;
  m.base_dir = base_dir;
  try {
    m.space = descriptor_from_json(doc.at("space"));
    m.id_column = doc.value("id_column", std::string("observation_id"));
    auto file = [&](const json& f) {
      DataFile df;
      df.path = f.at("path").get<std::string>();
      if (df.path.is_relative()) df.path = base_dir / df.path;
      df.format = data_format_from_string(f.at("format").get<std::string>());
      if (!fs::exists(df.path)) throw IngestionError("data file " + df.path.string() + " does not exist");
      return df;
    };
    if (doc.contains("response")) m.response = file(doc["response"]);
    for (const auto& p : doc.at("predictors")) m.predictors.push_back(file(p));
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid manifest: ") + e.what());
  }
  if (m.predictors.empty()) throw UsageError("manifest needs at least one predictor");
  auto check = [&](const DataFile& f) {
    const SpaceKind k = m.space.kind;
    bool ok = false;
    switch (f.format) {
      case DataFormat::samples: ok = k == SpaceKind::wasserstein || (k == SpaceKind::sphere && !m.space.grid_shape.empty()); break;
      case DataFormat::quantiles: ok = k == SpaceKind::wasserstein; break;
      case DataFormat::vectors: ok = k == SpaceKind::euclidean || k == SpaceKind::sphere; break;
      case DataFormat::densities: ok = k == SpaceKind::sphere; break;
      case DataFormat::matrices:
      case DataFormat::factors: ok = k == SpaceKind::spd; break;
    }
    if (!ok)
      throw UsageError("format '" + std::string(to_string(f.format)) + "' is not valid for a " +
                       std::string(to_string(k)) + " space (" + f.path.string() + ")");
  };
  if (m.response) check(*m.response);
  for (const auto& p : m.predictors) check(p);
  return m;
}

void DatasetManifest::override_grid_size(int grid_size) {
  if (space.kind != SpaceKind::wasserstein)
    throw UsageError("--grid-size applies only to wasserstein data");
  if (grid_size < 1) throw UsageError("grid size must be >= 1");
  space.dimension = grid_size;
}

namespace {

std::size_t id_index(const CsvTable& t, const std::string& id_column, const fs::path& path) {
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c] == id_column) return c;
  throw IngestionError(path.string() + " has no '" + id_column + "' column");
}

std::vector<double> numeric_fields(const std::vector<std::string>& row, std::size_t skip,
                                   const std::string& context) {
  std::vector<double> out;
  for (std::size_t c = 0; c < row.size(); ++c)
    if (c != skip) out.push_back(parse_double(row[c], context));
  return out;
}

SpacePoint checked_point(const SpacePtr& space, Vector payload, const std::string& context) {
  try {
    return SpacePoint(space, std::move(payload));
  } catch (const GeometryError& e) {
    throw IngestionError(context + ": " + e.what());
  }
}

}  // namespace

std::vector<std::pair<std::string, SpacePoint>> load_points(const DataFile& file,
                                                            const SpacePtr& space,
                                                            const std::string& id_column) {
  const CsvTable t = read_csv(file.path);
  const std::size_t idc = id_index(t, id_column, file.path);
  const SpaceDescriptor& d = space->descriptor();
  std::vector<std::pair<std::string, SpacePoint>> out;

  if (file.format == DataFormat::samples) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::vector<double>>> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const std::string ctx = file.path.string() + " row " + std::to_string(r + 1);
      const auto& id = t.rows[r][idc];
      if (!groups.contains(id)) order.push_back(id);
      groups[id].push_back(numeric_fields(t.rows[r], idc, ctx));
    }
    for (const auto& id : order) {
      const auto& rows = groups[id];
      const std::string ctx = file.path.string() + " observation " + id;
      if (d.kind == SpaceKind::wasserstein) {
        std::vector<double> samples;
        for (const auto& r : rows) {
          if (r.size() != 1) throw IngestionError(ctx + ": sample rows need exactly one value column");
          samples.push_back(r[0]);
        }
        auto q = wasserstein::from_samples(samples, d.dimension, {d.lower, d.upper});
        out.emplace_back(id, SpacePoint(space, q.values()));
      } else {
        std::vector<double> xs, ys;
        for (const auto& r : rows) {
          if (r.size() != 2) throw IngestionError(ctx + ": 2-D sample rows need two value columns");
          xs.push_back(r[0]);
          ys.push_back(r[1]);
        }
        const auto& sphere = static_cast<const SphereSpace&>(*space);
        const Vector f = bin_samples_2d(xs, ys, d.grid_shape[0], d.grid_shape[1], d.grid_bounds);
        out.emplace_back(id, SpacePoint(space, sphere.embed_density(f)));
      }
    }
    return out;
  }

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string ctx = file.path.string() + " row " + std::to_string(r + 1);
    const auto values = numeric_fields(t.rows[r], idc, ctx);
    const Vector v = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    const std::string& id = t.rows[r][idc];
    auto need = [&](std::size_t count) {
      if (values.size() != count)
        throw IngestionError(ctx + ": expected " + std::to_string(count) + " values, got " +
                             std::to_string(values.size()));
    };
    switch (file.format) {
      case DataFormat::quantiles: {
        if (static_cast<int>(values.size()) == d.dimension) {
          out.emplace_back(id, checked_point(space, v, ctx));
        } else {
          if (values.empty()) throw IngestionError(ctx + ": empty quantile row");
          const Support s{d.lower, d.upper};
          checked_point(make_space(wasserstein_descriptor(static_cast<int>(values.size()), d.lower, d.upper)), v, ctx);
          const Vector lv = wasserstein::levels(d.dimension);
          Vector q(d.dimension);
          for (int k = 0; k < d.dimension; ++k) q[k] = wasserstein::quantile_at(v, s, lv[k]);
          out.emplace_back(id, checked_point(space, space->project(q), ctx));
        }
        break;
      }
      case DataFormat::vectors: {
        need(static_cast<std::size_t>(d.dimension));
        if (d.kind == SpaceKind::sphere) {
          const auto& sphere = static_cast<const SphereSpace&>(*space);
          const double n = sphere.norm(v);
          if (std::abs(n - 1.0) > 1e-6)
            throw IngestionError(ctx + ": sphere vector has weighted norm " + std::to_string(n));
          out.emplace_back(id, checked_point(space, std::abs(n - 1.0) <= d.tolerance ? v : Vector(v / n), ctx));
        } else {
          out.emplace_back(id, checked_point(space, v, ctx));
        }
        break;
      }
      case DataFormat::densities: {
        need(static_cast<std::size_t>(d.dimension));
        const auto& sphere = static_cast<const SphereSpace&>(*space);
        try {
          out.emplace_back(id, SpacePoint(space, sphere.embed_density(v)));
        } catch (const IngestionError& e) {
          throw IngestionError(ctx + ": " + e.what());
        }
        break;
      }
      case DataFormat::matrices: {
        const auto m = static_cast<std::size_t>(d.dimension);
        need(m * m);
        Eigen::MatrixXd s(d.dimension, d.dimension);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t k = 0; k < m; ++k) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = values[i * m + k];
        try {
          out.emplace_back(id, SpacePoint(space, cholesky_factor(s)));
        } catch (const IngestionError& e) {
          throw IngestionError(ctx + ": " + e.what());
        }
        break;
      }
      case DataFormat::factors:
        need(static_cast<std::size_t>(space->payload_size()));
        out.emplace_back(id, checked_point(space, v, ctx));
        break;
      case DataFormat::samples:
        break;
    }
  }
  return out;
}

Dataset load_dataset(const DatasetManifest& manifest) {
  const SpacePtr space = make_space(manifest.space);
  Dataset ds;
  ds.data.space = space;

  auto keyed = [&](const DataFile& f) {
    auto pts = load_points(f, space, manifest.id_column);
    std::map<std::string, SpacePoint> by_id;
    for (auto& [id, p] : pts)
      if (!by_id.emplace(id, p).second)
        throw IngestionError(f.path.string() + ": duplicate observation id '" + id + "'");
    return std::make_pair(std::move(pts), std::move(by_id));
  };

  std::vector<std::map<std::string, SpacePoint>> predictor_maps;
  std::vector<std::pair<std::string, SpacePoint>> lead;
  if (manifest.response) {
    auto [pts, by_id] = keyed(*manifest.response);
    lead = std::move(pts);
    for (const auto& [id, p] : lead) {
      ds.ids.push_back(id);
      ds.data.response.push_back(p);
    }
  }
  for (std::size_t j = 0; j < manifest.predictors.size(); ++j) {
    auto [pts, by_id] = keyed(manifest.predictors[j]);
    if (!manifest.response && j == 0)
      for (const auto& [id, p] : pts) ds.ids.push_back(id);
    predictor_maps.push_back(std::move(by_id));
  }
  for (std::size_t j = 0; j < predictor_maps.size(); ++j) {
    const auto& map = predictor_maps[j];
    if (map.size() != ds.ids.size())
      throw IngestionError(manifest.predictors[j].path.string() + " has " + std::to_string(map.size()) +
                           " observations, expected " + std::to_string(ds.ids.size()));
    std::vector<SpacePoint> column;
    for (const auto& id : ds.ids) {
      auto it = map.find(id);
      if (it == map.end())
        throw IngestionError(manifest.predictors[j].path.string() + " lacks observation '" + id + "'");
      column.push_back(it->second);
    }
    ds.data.predictors.push_back(std::move(column));
  }
  return ds;
}

namespace {

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json stage_to_json(const StageDiagnostic& s) {
  json j;
  j["stage"] = s.stage;
  j["selected"] = s.selected + 1;
  j["loss"] = s.loss;
  j["runner_up_gap"] = std::isfinite(s.runner_up_gap) ? json(s.runner_up_gap) : json(nullptr);
  if (!s.candidate_losses.empty()) {
    json c = json::array();
    for (double v : s.candidate_losses) c.push_back(std::isnan(v) ? json(nullptr) : json(v));
    j["candidate_losses"] = c;
  }
  return j;
}

json fit_config_to_json(const FitConfig& c) {
  return {{"alpha_bound", c.alpha_bound},     {"coarse_grid", c.coarse_grid},
          {"tolerance", c.tolerance},         {"max_iterations", c.max_iterations},
          {"max_starts", c.max_starts},       {"max_grid_points", c.max_grid_points},
          {"seed", c.seed}};
}

FitConfig fit_config_from_json(const json& j) {
  FitConfig c;
  c.alpha_bound = j.value("alpha_bound", c.alpha_bound);
  if (j.contains("coarse_grid")) c.coarse_grid = j["coarse_grid"].get<std::vector<double>>();
  c.tolerance = j.value("tolerance", c.tolerance);
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  c.max_starts = j.value("max_starts", c.max_starts);
  c.max_grid_points = j.value("max_grid_points", c.max_grid_points);
  c.seed = j.value("seed", c.seed);
  return c;
}

}  // namespace

json model_to_json(const GotModel& model) {
  json j;
  j["format"] = "got-model";
  j["library_version"] = library_version;
  j["space"] = descriptor_to_json(model.space->descriptor());
  json ordering = json::array();
  for (int o : model.ordering) ordering.push_back(o + 1);
  j["ordering"] = ordering;
  j["alpha"] = vector_to_json(model.alpha);
  json means = json::array();
  for (const auto& m : model.predictor_means) means.push_back(vector_to_json(m));
  j["predictor_means"] = means;
  j["response_mean"] = vector_to_json(model.response_mean);
  j["training_loss"] = model.training_loss;
  json stages = json::array();
  for (const auto& s : model.stages) stages.push_back(stage_to_json(s));
  j["stages"] = stages;
  j["warnings"] = model.warnings;
  j["converged"] = model.converged;
  j["config"] = fit_config_to_json(model.config);
  return j;
}

GotModel model_from_json(const json& j) {
  try {
    GotModel model;
    model.space = make_space(descriptor_from_json(j.at("space")));
    for (int o : j.at("ordering").get<std::vector<int>>()) model.ordering.push_back(o - 1);
    model.alpha = vector_from_json(j.at("alpha"));
    for (const auto& m : j.at("predictor_means")) model.predictor_means.push_back(vector_from_json(m));
    model.response_mean = vector_from_json(j.at("response_mean"));
    model.training_loss = j.value("training_loss", 0.0);
    model.warnings = j.value("warnings", std::vector<std::string>{});
    model.converged = j.value("converged", true);
    if (j.contains("config")) model.config = fit_config_from_json(j["config"]);

    const std::size_t p = model.predictor_means.size();
    if (model.ordering.size() != p || static_cast<std::size_t>(model.alpha.size()) != p)
      throw IngestionError("model ordering, coefficients and means disagree in length");
    std::vector<bool> seen(p, false);
    for (int o : model.ordering) {
      if (o < 0 || static_cast<std::size_t>(o) >= p || seen[static_cast<std::size_t>(o)])
        throw IngestionError("model ordering is not a permutation");
      seen[static_cast<std::size_t>(o)] = true;
    }
    for (const auto& m : model.predictor_means) model.space->check_member(m);
    model.space->check_member(model.response_mean);
    return model;
  } catch (const json::exception& e) {
    throw IngestionError(std::string("invalid model document: ") + e.what());
  } catch (const GeometryError& e) {
    throw IngestionError(std::string("invalid model document: ") + e.what());
  }
}

void save_model(const GotModel& model, const fs::path& path) {
  write_text_file(path, model_to_json(model).dump(2) + "\n");
}

GotModel load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open model " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IngestionError("model " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

DataFormat native_format(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::wasserstein: return DataFormat::quantiles;
    case SpaceKind::spd: return DataFormat::factors;
    case SpaceKind::euclidean:
    case SpaceKind::sphere: return DataFormat::vectors;
  }
  return DataFormat::vectors;
}

void write_points(std::ostream& out, const std::vector<std::string>& ids,
                  const std::vector<SpacePoint>& points, const std::string& id_column) {
  if (ids.size() != points.size()) throw UsageError("write_points: ids and points differ in length");
  if (points.empty()) {
    out << id_column << "\n";
    return;
  }
  const char* prefix = "v";
  switch (points.front().kind()) {
    case SpaceKind::wasserstein: prefix = "q"; break;
    case SpaceKind::spd: prefix = "l"; break;
    default: break;
  }
  out << id_column;
  for (Eigen::Index k = 0; k < points.front().payload().size(); ++k) out << ',' << prefix << (k + 1);
  out << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << ids[i];
    for (Eigen::Index k = 0; k < points[i].payload().size(); ++k) out << ',' << format_exact(points[i].payload()[k]);
    out << '\n';
  }
}

void write_plot_data(std::ostream& out, const std::vector<std::string>& ids,
                     const std::vector<SpacePoint>& points) {
  if (points.empty()) return;
  const Space& space = points.front().space();
  const SpaceDescriptor& d = space.descriptor();
  switch (space.kind()) {
    case SpaceKind::wasserstein: {
      out << "observation_id,x_left,x_right,x_mid,mass,density\n";
      const Support s{d.lower, d.upper};
      const Vector lv = wasserstein::extended_levels(d.dimension);
      for (std::size_t i = 0; i < points.size(); ++i) {
        const Vector knots = wasserstein::extended_knots(points[i].payload(), s);
        for (Eigen::Index k = 0; k + 1 < knots.size(); ++k) {
          const double mass = lv[k + 1] - lv[k];
          const double width = knots[k + 1] - knots[k];
          out << ids[i] << ',' << format_summary(knots[k]) << ',' << format_summary(knots[k + 1]) << ','
              << format_summary(0.5 * (knots[k] + knots[k + 1])) << ',' << format_summary(mass) << ','
              << (width > 0 ? format_summary(mass / width) : std::string("inf")) << '\n';
        }
      }
      break;
    }
    case SpaceKind::sphere: {
      const auto& sphere = static_cast<const SphereSpace&>(space);
      if (!d.grid_shape.empty()) {
        out << "observation_id,x,y,density\n";
        const int nx = d.grid_shape[0], ny = d.grid_shape[1];
        const double dx = (d.grid_bounds[1] - d.grid_bounds[0]) / nx;
        const double dy = (d.grid_bounds[3] - d.grid_bounds[2]) / ny;
        for (std::size_t i = 0; i < points.size(); ++i) {
          const Vector f = sphere.density_of(points[i].payload());
          for (int a = 0; a < nx; ++a)
            for (int b = 0; b < ny; ++b)
              out << ids[i] << ',' << format_summary(d.grid_bounds[0] + (a + 0.5) * dx) << ','
                  << format_summary(d.grid_bounds[2] + (b + 0.5) * dy) << ','
                  << format_summary(f[static_cast<Eigen::Index>(a) * ny + b]) << '\n';
        }
      } else {
        out << "observation_id,index,coefficient,density\n";
        for (std::size_t i = 0; i < points.size(); ++i) {
          const Vector f = sphere.density_of(points[i].payload());
          for (Eigen::Index k = 0; k < f.size(); ++k)
            out << ids[i] << ',' << (k + 1) << ',' << format_summary(points[i].payload()[k]) << ','
                << format_summary(f[k]) << '\n';
        }
      }
      break;
    }
    case SpaceKind::spd: {
      out << "observation_id,row,col,value\n";
      for (std::size_t i = 0; i < points.size(); ++i) {
        const Eigen::MatrixXd s = to_spd(points[i].payload(), d.dimension);
        for (Eigen::Index r = 0; r < s.rows(); ++r)
          for (Eigen::Index c = 0; c < s.cols(); ++c)
            out << ids[i] << ',' << (r + 1) << ',' << (c + 1) << ',' << format_summary(s(r, c)) << '\n';
      }
      break;
    }
    case SpaceKind::euclidean: {
      out << "observation_id,coordinate,value\n";
      for (std::size_t i = 0; i < points.size(); ++i)
        for (Eigen::Index k = 0; k < points[i].payload().size(); ++k)
          out << ids[i] << ',' << (k + 1) << ',' << format_summary(points[i].payload()[k]) << '\n';
      break;
    }
  }
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json loo_to_json(const LooReport& report, const std::vector<std::string>& ids) {
  json j;
  j["method"] = std::string(to_string(report.method));
  j["observations"] = report.errors.size();
  j["mean_error"] = number_or_null(report.mean_error);
  j["failed_folds"] = report.failed_folds;
  j["failures"] = report.failures;
  json per = json::array();
  for (std::size_t i = 0; i < report.errors.size(); ++i)
    per.push_back({{"observation_id", i < ids.size() ? ids[i] : std::to_string(i + 1)},
                   {"error", number_or_null(report.errors[i])}});
  j["per_observation"] = per;
  return j;
}

void write_loo_csv(std::ostream& out, const LooReport& report, const std::vector<std::string>& ids) {
  out << "observation_id,method,error\n";
  for (std::size_t i = 0; i < report.errors.size(); ++i)
    out << (i < ids.size() ? ids[i] : std::to_string(i + 1)) << ',' << to_string(report.method) << ','
        << (std::isnan(report.errors[i]) ? std::string("NA") : format_summary(report.errors[i])) << '\n';
}

json experiment_to_json(const ExperimentReport& report, const ExperimentConfig& config) {
  json j;
  j["format"] = "got-experiment";
  j["library_version"] = library_version;
  j["scenario"] = report.name;
  j["space"] = descriptor_to_json(config.scenario.space);
  j["n"] = config.scenario.n;
  j["alpha_star"] = config.scenario.alpha_star;
  json ord = json::array();
  for (int o : config.scenario.ordering_star) ord.push_back(o + 1);
  j["ordering_star"] = ord;
  j["sigma"] = config.scenario.sigma;
  j["seed"] = config.seed;
  j["replications"] = report.replications;
  j["fit_config"] = fit_config_to_json(config.fit);
  std::size_t failures = 0;
  for (const auto& r : report.records)
    if (!r.failure.empty()) ++failures;
  j["failed_replications"] = failures;
  j["first_order_perturbation"] = report.first_order_perturbation;
  if (report.name == "theorem1" || report.name == "recovery")
    j["recovery_rate"] = number_or_null(report.recovery_rate);
  if (report.name == "recovery") {
    double worst = 0.0;
    for (const auto& r : report.records)
      if (r.failure.empty()) worst = std::max(worst, r.max_alpha_error);
    j["max_alpha_error"] = worst;
  }
  if (report.name == "theorem2") {
    json md = json::array();
    for (std::size_t k = 0; k < report.sample_sizes.size(); ++k)
      md.push_back({{"n", report.sample_sizes[k]}, {"median_delta", number_or_null(report.median_delta[k])}});
    j["median_delta"] = md;
    j["test_size"] = config.test_size;
  }
  if (report.name == "dominance") j["got_wins"] = report.dominance_wins;
  return j;
}

void write_experiment_csv(std::ostream& out, const ExperimentReport& report) {
  out << "replication,n,ordering,alpha,recovered,max_alpha_error,delta,got_loo,nw_loo,failure\n";
  auto num = [](double v) { return std::isnan(v) ? std::string("NA") : format_summary(v); };
  for (const auto& r : report.records) {
    std::string ord, alpha;
    for (std::size_t k = 0; k < r.ordering.size(); ++k) ord += (k ? " " : "") + std::to_string(r.ordering[k] + 1);
    for (Eigen::Index k = 0; k < r.alpha.size(); ++k) alpha += (k ? " " : "") + format_summary(r.alpha[k]);
    std::string failure = r.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    out << (r.replication + 1) << ',' << r.n << ',' << ord << ',' << alpha << ',' << (r.recovered ? 1 : 0)
        << ',' << num(r.max_alpha_error) << ',' << num(r.delta) << ',' << num(r.got_loo) << ','
        << num(r.nw_loo) << ',' << failure << '\n';
  }
}

void write_text_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << contents;
  if (!out) throw UsageError("failed writing " + path.string());
}

}  // namespace got
