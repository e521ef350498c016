#pragma once

#include <optional>
#include <span>

#include "got/space.hpp"

namespace got {

struct NwConfig {
  std::optional<double> tau;  // empty: median heuristic per query
  int predictor = 0;          // which predictor feeds the kernel
};

/// Median of d(X_i, query); even n averages the two middle values.
double median_tau(std::span<const SpacePoint> train_x, const SpacePoint& query);

/// Weighted Fréchet mean of train_y with weights exp(-d^2(X_i, query) / tau).
SpacePoint nw_predict(std::span<const SpacePoint> train_x, std::span<const SpacePoint> train_y,
                      const SpacePoint& query, const NwConfig& config = {});

}  // namespace got
