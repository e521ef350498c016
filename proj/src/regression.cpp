#include "got/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "got/optimize.hpp"
#include "got/transport.hpp"

namespace got {

void FitConfig::validate() const {
  if (!(alpha_bound > 0) || !std::isfinite(alpha_bound))
    throw UsageError("alpha bound must be a positive finite number");
  if (coarse_grid.empty()) throw UsageError("coarse grid must not be empty");
  for (double g : coarse_grid)
    if (!(std::abs(g) <= alpha_bound))
      throw UsageError("coarse grid points must lie within [-alpha_bound, alpha_bound]");
  if (!(tolerance > 0)) throw UsageError("optimizer tolerance must be positive");
  if (max_iterations < 1) throw UsageError("optimizer iteration cap must be >= 1");
  if (max_starts < 1) throw UsageError("multi-start cap must be >= 1");
  if (max_grid_points < 1) throw UsageError("grid point cap must be >= 1");
}

void RegressionData::validate(std::size_t min_size) const {
  if (!space) throw UsageError("regression data has no space");
  if (predictors.empty()) throw UsageError("at least one predictor is required");
  if (response.size() < min_size)
    throw UsageError("at least " + std::to_string(min_size) + " observations are required");
  for (const auto& column : predictors) {
    if (column.size() != response.size())
      throw UsageError("every predictor needs one point per response");
    for (const auto& x : column)
      if (!same_space(x.space(), *space)) throw DispatchError("predictor point from another space");
  }
  for (const auto& y : response)
    if (!same_space(y.space(), *space)) throw DispatchError("response point from another space");
}

RegressionData RegressionData::without(std::size_t index) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i)
    if (i != index) rows.push_back(i);
  return subset(rows);
}

RegressionData RegressionData::subset(std::span<const std::size_t> rows) const {
  RegressionData out;
  out.space = space;
  out.predictors.resize(predictors.size());
  for (std::size_t i : rows) {
    for (std::size_t j = 0; j < predictors.size(); ++j) out.predictors[j].push_back(predictors[j][i]);
    out.response.push_back(response[i]);
  }
  return out;
}

ChainLoss::ChainLoss(SpacePtr space, std::vector<Vector> sources, Vector start,
                     std::vector<std::vector<Vector>> targets, std::vector<Vector> responses)
    : space_(std::move(space)),
      sources_(std::move(sources)),
      start_(std::move(start)),
      targets_(std::move(targets)),
      responses_(std::move(responses)) {
  if (sources_.size() != targets_.size())
    throw UsageError("chain loss needs one source per predictor");
  for (const auto& t : targets_)
    if (t.size() != responses_.size()) throw UsageError("chain loss targets misaligned");
}

Vector ChainLoss::predict(std::span<const int> ordering, const Vector& coefficients,
                          std::size_t i) const {
  Vector w = start_;
  for (std::size_t k = ordering.size(); k-- > 0;) {
    const auto j = static_cast<std::size_t>(ordering[k]);
    w = scale_apply(*space_, coefficients[static_cast<Eigen::Index>(k)], sources_[j],
                    targets_[j][i], w);
  }
  return w;
}

double ChainLoss::operator()(std::span<const int> ordering, const Vector& coefficients) const {
  double sum = 0.0;
  try {
    for (std::size_t i = 0; i < responses_.size(); ++i) {
      const double d = space_->distance(responses_[i], predict(ordering, coefficients, i));
      sum += d * d;
    }
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
  return sum / static_cast<double>(responses_.size());
}

namespace {

std::vector<Vector> grid_starts(std::size_t dims, const FitConfig& config) {
  const std::size_t g = config.coarse_grid.size();
  double total = 1.0;
  for (std::size_t d = 0; d < dims; ++d) total *= static_cast<double>(g);
  std::vector<Vector> starts;
  if (total <= config.max_grid_points) {
    const auto count = static_cast<std::size_t>(total);
    starts.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
      Vector x(static_cast<Eigen::Index>(dims));
      std::size_t rem = idx;
      for (std::size_t d = dims; d-- > 0;) {
        x[static_cast<Eigen::Index>(d)] = config.coarse_grid[rem % g];
        rem /= g;
      }
      starts.push_back(std::move(x));
    }
  } else {
    std::mt19937_64 rng(config.seed);
    starts.reserve(static_cast<std::size_t>(config.max_grid_points));
    for (int s = 0; s < config.max_grid_points; ++s) {
      Vector x(static_cast<Eigen::Index>(dims));
      for (std::size_t d = 0; d < dims; ++d)
        x[static_cast<Eigen::Index>(d)] = config.coarse_grid[rng() % g];
      starts.push_back(std::move(x));
    }
  }
  return starts;
}

}  // namespace

SearchResult minimize_coefficients(const ChainLoss& loss, std::span<const int> ordering,
                                   const std::vector<bool>& fixed_zero,
                                   std::span<const Vector> warm_starts, const FitConfig& config,
                                   bool use_grid) {
  const auto p = static_cast<Eigen::Index>(ordering.size());
  std::vector<Eigen::Index> free;
  for (Eigen::Index k = 0; k < p; ++k)
    if (!fixed_zero[static_cast<std::size_t>(k)]) free.push_back(k);

  auto expand = [&](const Vector& reduced) {
    Vector full = Vector::Zero(p);
    for (std::size_t f = 0; f < free.size(); ++f) full[free[f]] = reduced[static_cast<Eigen::Index>(f)];
    return full;
  };
  auto objective = [&](const Vector& reduced) { return loss(ordering, expand(reduced)); };

  SearchResult best;
  if (free.empty()) {
    best.coefficients = Vector::Zero(p);
    best.loss = loss(ordering, best.coefficients);
    return best;
  }

  const double bound = config.alpha_bound;
  std::vector<Vector> starts;
  for (const auto& w : warm_starts) {
    Vector r(static_cast<Eigen::Index>(free.size()));
    for (std::size_t f = 0; f < free.size(); ++f) r[static_cast<Eigen::Index>(f)] = std::clamp(w[free[f]], -bound, bound);
    starts.push_back(std::move(r));
  }
  if (use_grid) {
    std::vector<Vector> seeds = grid_starts(free.size(), config);
    std::vector<double> seed_loss(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) seed_loss[s] = objective(seeds[s]);
    std::vector<std::size_t> rank(seeds.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return seed_loss[a] < seed_loss[b]; });
    const std::size_t keep = std::min(rank.size(), static_cast<std::size_t>(config.max_starts));
    for (std::size_t r = 0; r < keep; ++r) starts.push_back(seeds[rank[r]]);
  }
  if (starts.empty()) throw UsageError("coefficient search needs at least one start");

  NelderMeadOptions options;
  options.tolerance = config.tolerance;
  options.max_iterations = config.max_iterations;
  bool have = false;
  for (const auto& s : starts) {
    const OptimResult run = nelder_mead(objective, s, bound, options);
    if (!have || run.value < best.loss) {
      best.coefficients = expand(run.x);
      best.loss = run.value;
      best.converged = run.converged;
      have = true;
    }
  }
  return best;
}

FrechetMeans estimate_means(const RegressionData& data) {
  FrechetMeans means;
  for (const auto& column : data.predictors) means.predictors.push_back(frechet_mean(column).payload());
  means.response = frechet_mean(data.response).payload();
  return means;
}

std::vector<bool> degenerate_predictors(const RegressionData& data, const FrechetMeans& means) {
  std::vector<bool> out(data.predictor_count(), true);
  const double tol = data.space->tolerance();
  for (std::size_t j = 0; j < data.predictor_count(); ++j)
    for (const auto& x : data.predictors[j])
      if (data.space->distance(x.payload(), means.predictors[j]) > tol) {
        out[j] = false;
        break;
      }
  return out;
}

ChainLoss make_chain_loss(const RegressionData& data, const FrechetMeans& means) {
  std::vector<std::vector<Vector>> targets(data.predictor_count());
  for (std::size_t j = 0; j < data.predictor_count(); ++j)
    for (const auto& x : data.predictors[j]) targets[j].push_back(x.payload());
  std::vector<Vector> responses;
  for (const auto& y : data.response) responses.push_back(y.payload());
  return ChainLoss(data.space, means.predictors, means.response, std::move(targets),
                   std::move(responses));
}

namespace {

std::vector<bool> fixed_mask(std::span<const int> ordering, const std::vector<bool>& degenerate) {
  std::vector<bool> mask;
  for (int j : ordering) mask.push_back(degenerate[static_cast<std::size_t>(j)]);
  return mask;
}

}  // namespace

OrderSelection select_order(const ChainLoss& loss, const std::vector<bool>& degenerate,
                            const FitConfig& config) {
  const auto p = static_cast<int>(degenerate.size());
  OrderSelection sel;
  std::vector<int> remaining(static_cast<std::size_t>(p));
  std::iota(remaining.begin(), remaining.end(), 0);
  Vector staged(0);

  for (int stage = 1; stage < p; ++stage) {
    StageDiagnostic diag;
    diag.stage = stage;
    diag.candidate_losses.assign(static_cast<std::size_t>(p), std::numeric_limits<double>::quiet_NaN());
    Vector warm(stage);
    warm.head(stage - 1) = staged;
    warm[stage - 1] = 0.0;
    const std::vector<Vector> warm_starts{warm};

    int winner = -1;
    double winner_loss = std::numeric_limits<double>::infinity();
    Vector winner_coef;
    for (int j : remaining) {
      std::vector<int> ordering = sel.ordering;
      ordering.push_back(j);
      const SearchResult r =
          minimize_coefficients(loss, ordering, fixed_mask(ordering, degenerate), warm_starts, config);
      diag.candidate_losses[static_cast<std::size_t>(j)] = r.loss;
      if (winner < 0 || r.loss < winner_loss) {
        winner = j;
        winner_loss = r.loss;
        winner_coef = r.coefficients;
      }
    }
    for (int j : remaining) {
      if (j == winner) continue;
      diag.runner_up_gap =
          std::min(diag.runner_up_gap, diag.candidate_losses[static_cast<std::size_t>(j)] - winner_loss);
    }
    if (diag.runner_up_gap <= 1e-12 * (1.0 + std::abs(winner_loss))) {
      std::ostringstream msg;
      msg << "stage " << stage << ": candidate losses tie; selected predictor " << (winner + 1)
          << " by smallest index";
      sel.warnings.push_back(msg.str());
    }
    diag.selected = winner;
    diag.loss = winner_loss;
    sel.stages.push_back(std::move(diag));
    sel.ordering.push_back(winner);
    staged = winner_coef;
    std::erase(remaining, winner);
  }
  sel.ordering.push_back(remaining.front());
  sel.staged_coefficients = staged;
  return sel;
}

SearchResult estimate_alpha(const ChainLoss& loss, std::span<const int> ordering,
                            const std::vector<bool>& degenerate, const Vector& warm_start,
                            const FitConfig& config) {
  const std::vector<Vector> warm_starts{warm_start};
  return minimize_coefficients(loss, ordering, fixed_mask(ordering, degenerate), warm_starts, config);
}

GotModel fit(const RegressionData& data, const FitConfig& config) {
  config.validate();
  data.validate(2);
  const FrechetMeans means = estimate_means(data);
  const std::vector<bool> degenerate = degenerate_predictors(data, means);
  const ChainLoss loss = make_chain_loss(data, means);

  GotModel model;
  model.space = data.space;
  model.config = config;
  model.predictor_means = means.predictors;
  model.response_mean = means.response;
  for (std::size_t j = 0; j < degenerate.size(); ++j)
    if (degenerate[j])
      model.warnings.push_back("predictor " + std::to_string(j + 1) +
                               " is degenerate (all observations equal its mean); coefficient fixed at 0");

  OrderSelection sel = select_order(loss, degenerate, config);
  const auto p = static_cast<Eigen::Index>(sel.ordering.size());
  Vector warm = Vector::Zero(p);
  warm.head(p - 1) = sel.staged_coefficients;
  const SearchResult final_fit = estimate_alpha(loss, sel.ordering, degenerate, warm, config);

  StageDiagnostic last;
  last.stage = static_cast<int>(p);
  last.selected = sel.ordering.back();
  last.loss = final_fit.loss;
  sel.stages.push_back(last);

  model.ordering = sel.ordering;
  model.alpha = final_fit.coefficients;
  model.training_loss = final_fit.loss;
  model.stages = std::move(sel.stages);
  for (auto& w : sel.warnings) model.warnings.push_back(std::move(w));
  model.converged = final_fit.converged;
  if (!final_fit.converged)
    model.warnings.push_back("coefficient search hit the iteration cap; returning best-so-far");
  if (!std::isfinite(model.training_loss))
    throw NumericError("every coefficient vector produced a geometry failure");
  return model;
}

double GotModel::coefficient_of(int predictor) const {
  for (std::size_t k = 0; k < ordering.size(); ++k)
    if (ordering[k] == predictor) return alpha[static_cast<Eigen::Index>(k)];
  throw UsageError("predictor index out of range");
}

SpacePoint predict(const GotModel& model, std::span<const SpacePoint> x) {
  if (x.size() != model.predictor_count())
    throw UsageError("prediction needs " + std::to_string(model.predictor_count()) +
                     " predictor points, got " + std::to_string(x.size()));
  for (const auto& p : x)
    if (!same_space(p.space(), *model.space)) throw DispatchError("prediction input from another space");
  Vector w = model.response_mean;
  for (std::size_t k = model.ordering.size(); k-- > 0;) {
    const auto j = static_cast<std::size_t>(model.ordering[k]);
    w = scale_apply(*model.space, model.alpha[static_cast<Eigen::Index>(k)], model.predictor_means[j],
                    x[j].payload(), w);
  }
  return SpacePoint::trusted(model.space, std::move(w));
}

}  // namespace got
