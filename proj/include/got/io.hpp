#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "got/harness.hpp"
#include "got/regression.hpp"

namespace got {

inline constexpr const char* library_version = "1.0.0";

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
double parse_double(const std::string& field, const std::string& context);

/// Full round-trip precision (%.17g).
std::string format_exact(double x);
/// Human-facing output, 12 significant digits.
std::string format_summary(double x);

enum class DataFormat { samples, quantiles, vectors, densities, matrices, factors };
DataFormat data_format_from_string(const std::string& name);
std::string_view to_string(DataFormat format);

struct DataFile {
  std::filesystem::path path;
  DataFormat format = DataFormat::quantiles;
};

struct DatasetManifest {
  SpaceDescriptor space;
  std::string id_column = "observation_id";
  std::optional<DataFile> response;
  std::vector<DataFile> predictors;
  std::filesystem::path base_dir;

  static DatasetManifest load(const std::filesystem::path& path);
  static DatasetManifest from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  /// Override the Wasserstein grid size (samples are re-summarized, quantile
  /// rows re-interpolated).
  void override_grid_size(int grid_size);
};

struct Dataset {
  std::vector<std::string> ids;
  RegressionData data;  // response empty when the manifest has none
};

Dataset load_dataset(const DatasetManifest& manifest);
/// Reads one data file into points keyed by observation id, in file order.
std::vector<std::pair<std::string, SpacePoint>> load_points(const DataFile& file,
                                                            const SpacePtr& space,
                                                            const std::string& id_column);

nlohmann::json descriptor_to_json(const SpaceDescriptor& d);
SpaceDescriptor descriptor_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const GotModel& model);
GotModel model_from_json(const nlohmann::json& j);
void save_model(const GotModel& model, const std::filesystem::path& path);
GotModel load_model(const std::filesystem::path& path);

/// Points in the space's native layout (quantiles, vectors, factors), with
/// a header, re-ingestible through load_points.
void write_points(std::ostream& out, const std::vector<std::string>& ids,
                  const std::vector<SpacePoint>& points, const std::string& id_column);
DataFormat native_format(SpaceKind kind);

/// Plot-ready rows: Wasserstein densities as piecewise-constant cells between
/// quantile knots; sphere densities on the grid; SPD matrix entries;
/// Euclidean coordinates.
void write_plot_data(std::ostream& out, const std::vector<std::string>& ids,
                     const std::vector<SpacePoint>& points);

nlohmann::json loo_to_json(const LooReport& report, const std::vector<std::string>& ids);
void write_loo_csv(std::ostream& out, const LooReport& report, const std::vector<std::string>& ids);

nlohmann::json experiment_to_json(const ExperimentReport& report, const ExperimentConfig& config);
void write_experiment_csv(std::ostream& out, const ExperimentReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace got
