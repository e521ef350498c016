#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "got/space.hpp"

namespace got {

struct FitConfig {
  double alpha_bound = 2.0;
  std::vector<double> coarse_grid = {-1.5, -0.75, 0.0, 0.75, 1.5};
  double tolerance = 1e-6;
  int max_iterations = 500;
  int max_starts = 64;
  // Cross products larger than this are subsampled (seeded) before ranking.
  int max_grid_points = 20000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// n observations of p predictors and one response, all in one space.
/// predictors[j][i] is predictor j of observation i.
struct RegressionData {
  SpacePtr space;
  std::vector<std::vector<SpacePoint>> predictors;
  std::vector<SpacePoint> response;

  std::size_t size() const { return response.size(); }
  std::size_t predictor_count() const { return predictors.size(); }
  void validate(std::size_t min_size = 2) const;
  RegressionData without(std::size_t index) const;
  RegressionData subset(std::span<const std::size_t> rows) const;
};

/// Empirical loss (1/n) sum_i d^2(Y_i, chain_i(start)) of transport chains
/// whose k-th term moves sources[j_k] to the observation's predictor j_k.
class ChainLoss {
 public:
  ChainLoss(SpacePtr space, std::vector<Vector> sources, Vector start,
            std::vector<std::vector<Vector>> targets, std::vector<Vector> responses);

  /// Geometry failures anywhere in the sample make the loss +inf.
  double operator()(std::span<const int> ordering, const Vector& coefficients) const;
  Vector predict(std::span<const int> ordering, const Vector& coefficients, std::size_t i) const;

  const Space& space() const { return *space_; }
  std::size_t size() const { return responses_.size(); }

 private:
  SpacePtr space_;
  std::vector<Vector> sources_;
  Vector start_;
  std::vector<std::vector<Vector>> targets_;
  std::vector<Vector> responses_;
};

struct SearchResult {
  Vector coefficients;
  double loss = std::numeric_limits<double>::infinity();
  bool converged = true;
};

/// Multi-start Nelder-Mead over [-A, A]^k. Starts are the warm starts
/// followed by the coarse-grid cross product, ranked by loss and capped at
/// config.max_starts; the first strict minimum wins. Coordinates flagged in
/// `fixed_zero` stay at 0.
SearchResult minimize_coefficients(const ChainLoss& loss, std::span<const int> ordering,
                                   const std::vector<bool>& fixed_zero,
                                   std::span<const Vector> warm_starts, const FitConfig& config,
                                   bool use_grid = true);

struct StageDiagnostic {
  int stage = 0;
  int selected = -1;
  double loss = std::numeric_limits<double>::quiet_NaN();
  // Loss of the best rejected candidate minus the winner's (inf if none).
  double runner_up_gap = std::numeric_limits<double>::infinity();
  std::vector<double> candidate_losses;  // indexed by predictor, NaN if not a candidate
};

struct OrderSelection {
  std::vector<int> ordering;
  Vector staged_coefficients;  // for all but the left-over predictor
  std::vector<StageDiagnostic> stages;
  std::vector<std::string> warnings;
};

struct GotModel {
  SpacePtr space;
  std::vector<int> ordering;  // predictor indices, chain order
  Vector alpha;               // alpha[k] belongs to ordering[k]
  std::vector<Vector> predictor_means;  // by predictor index
  Vector response_mean;
  double training_loss = 0.0;
  std::vector<StageDiagnostic> stages;
  std::vector<std::string> warnings;
  bool converged = true;
  FitConfig config;

  std::size_t predictor_count() const { return predictor_means.size(); }
  SpacePoint response_mean_point() const { return SpacePoint::trusted(space, response_mean); }
  /// Coefficient of predictor j (0-based predictor index).
  double coefficient_of(int predictor) const;
};

struct FrechetMeans {
  std::vector<Vector> predictors;
  Vector response;
};

FrechetMeans estimate_means(const RegressionData& data);

/// Predictors whose observations all coincide with their mean.
std::vector<bool> degenerate_predictors(const RegressionData& data, const FrechetMeans& means);

ChainLoss make_chain_loss(const RegressionData& data, const FrechetMeans& means);

OrderSelection select_order(const ChainLoss& loss, const std::vector<bool>& degenerate,
                            const FitConfig& config);

SearchResult estimate_alpha(const ChainLoss& loss, std::span<const int> ordering,
                            const std::vector<bool>& degenerate, const Vector& warm_start,
                            const FitConfig& config);

GotModel fit(const RegressionData& data, const FitConfig& config = {});

/// x holds one point per predictor, by predictor index.
SpacePoint predict(const GotModel& model, std::span<const SpacePoint> x);

}  // namespace got
