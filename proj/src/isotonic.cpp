#include "got/isotonic.hpp"

#include <vector>

namespace got {

bool is_non_decreasing(const Eigen::VectorXd& values) {
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values[i] < values[i - 1]) return false;
  return true;
}

Eigen::VectorXd enforce_monotone(const Eigen::VectorXd& values) {
  if (is_non_decreasing(values)) return values;

  struct Block {
    double mean;
    double weight;
    Eigen::Index count;
  };
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i], 1.0, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double w = prev.weight + top.weight;
      prev.mean = (prev.weight * prev.mean + top.weight * top.mean) / w;
      prev.weight = w;
      prev.count += top.count;
    }
  }

  Eigen::VectorXd out(values.size());
  Eigen::Index pos = 0;
  for (const auto& b : blocks) {
    out.segment(pos, b.count).setConstant(b.mean);
    pos += b.count;
  }
  return out;
}

}  // namespace got
