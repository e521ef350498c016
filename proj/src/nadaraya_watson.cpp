#include "got/nadaraya_watson.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace got {

namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

double median_tau(std::span<const SpacePoint> train_x, const SpacePoint& query) {
  if (train_x.empty()) throw UsageError("median heuristic needs at least one training point");
  std::vector<double> d;
  d.reserve(train_x.size());
  for (const auto& x : train_x) d.push_back(distance(x, query));
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; }))
    throw NumericError("median heuristic undefined: all training predictors equal the query; "
                       "supply an explicit tau");
  return median_of(std::move(d));
}

SpacePoint nw_predict(std::span<const SpacePoint> train_x, std::span<const SpacePoint> train_y,
                      const SpacePoint& query, const NwConfig& config) {
  if (train_x.empty() || train_x.size() != train_y.size())
    throw UsageError("Nadaraya-Watson needs matching, non-empty training predictors and responses");
  if (config.tau && !(*config.tau > 0.0)) throw UsageError("kernel scale tau must be positive");
  if (train_y.size() == 1) return train_y.front();

  std::vector<double> d;
  d.reserve(train_x.size());
  for (const auto& x : train_x) d.push_back(distance(x, query));
  std::vector<double> weights(d.size(), 1.0);
  if (!std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
    const double tau = config.tau ? *config.tau : median_of(d);
    for (std::size_t i = 0; i < d.size(); ++i) weights[i] = std::exp(-d[i] * d[i] / tau);
    if (std::all_of(weights.begin(), weights.end(), [](double w) { return w < 1e-300; }))
      throw NumericError("all kernel weights underflow; use a larger tau");
  }
  return frechet_mean(train_y, weights);
}

}  // namespace got
