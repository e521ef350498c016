#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "got/nadaraya_watson.hpp"
#include "got/regression.hpp"

namespace got {

using Rng = std::mt19937_64;

/// Independent stream for replication `index` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Random perturbation map with Fréchet mean preserved: exact for Euclidean,
/// SPD (chart noise) and Wasserstein (zero-mean quantile noise); first order
/// on the sphere (symmetric tangent noise through the exp map).
struct PerturbationSpec {
  double sigma = 0.0;
};

SpacePoint perturb(const SpacePoint& z, const PerturbationSpec& spec, Rng& rng);

struct SimulationScenario {
  SpaceDescriptor space = wasserstein_descriptor(200, -8.0, 8.0);
  std::size_t n = 100;
  std::vector<double> alpha_star = {0.8, 0.3};
  std::vector<int> ordering_star = {0, 1};  // chain order; alpha_star[k] goes with ordering_star[k]
  double sigma = 0.05;
  double predictor_spread = 1.0;

  std::size_t predictor_count() const { return ordering_star.size(); }
  void validate() const;
};

struct SimulationTruth {
  std::vector<Vector> predictor_means;  // population means by predictor
  Vector response_mean;
  std::vector<int> ordering;
  Vector alpha;
  bool mean_exact = true;  // false on the sphere (first-order only)
};

struct SimulatedData {
  RegressionData data;
  SimulationTruth truth;
};

SimulationTruth population_truth(const SimulationScenario& scenario);
SimulatedData simulate_got(const SimulationScenario& scenario, std::uint64_t seed);

enum class Method { got, nw };
std::string_view to_string(Method method);

struct LooReport {
  Method method = Method::got;
  std::vector<double> errors;  // d(Y_i, prediction); NaN where the fold failed
  std::vector<std::string> failures;
  double mean_error = 0.0;     // over successful folds
  std::size_t failed_folds = 0;
};

LooReport loo_evaluate(const RegressionData& data, Method method, const FitConfig& fit_config,
                       const NwConfig& nw_config, int threads = 1);

/// Monte Carlo prediction gap on a fresh sample of `test_size` from the
/// generating model, using population transports in the true ordering.
double estimate_delta(const GotModel& model, const SimulationScenario& scenario,
                      const SimulationTruth& truth, std::size_t test_size, std::uint64_t seed);

struct ExperimentConfig {
  std::string name;  // theorem1 | theorem2 | dominance | recovery
  SimulationScenario scenario;
  std::size_t replications = 100;
  std::vector<std::size_t> sample_sizes;  // theorem2: sizes compared
  std::size_t test_size = 1000;
  FitConfig fit;
  NwConfig nw;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct ReplicationRecord {
  std::size_t replication = 0;
  std::size_t n = 0;
  std::vector<int> ordering;
  Vector alpha;
  bool recovered = false;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double got_loo = std::numeric_limits<double>::quiet_NaN();
  double nw_loo = std::numeric_limits<double>::quiet_NaN();
  double max_alpha_error = std::numeric_limits<double>::quiet_NaN();
  std::string failure;
};

struct ExperimentReport {
  std::string name;
  std::size_t replications = 0;
  std::vector<ReplicationRecord> records;
  double recovery_rate = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::size_t> sample_sizes;
  std::vector<double> median_delta;  // per sample size
  std::size_t dominance_wins = 0;
  bool first_order_perturbation = false;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

double median(std::vector<double> values);

}  // namespace got
