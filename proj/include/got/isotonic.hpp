#pragma once

#include <Eigen/Core>

namespace got {

/// Least-squares projection onto non-decreasing sequences (pool adjacent
/// violators). Already monotone input is returned unchanged.
Eigen::VectorXd enforce_monotone(const Eigen::VectorXd& values);

bool is_non_decreasing(const Eigen::VectorXd& values);

}  // namespace got
