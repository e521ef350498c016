#pragma once

#include <vector>

#include "got/space.hpp"

namespace got {

/// The map w -> ubiquity(source, target, w).
class GeodesicTransport {
 public:
  GeodesicTransport(SpacePoint source, SpacePoint target);

  const SpacePoint& source() const { return source_; }
  const SpacePoint& target() const { return target_; }

  SpacePoint apply(const SpacePoint& w) const;
  GeodesicTransport inverse() const { return GeodesicTransport(target_, source_); }

 private:
  SpacePoint source_;
  SpacePoint target_;
};

struct ScaledTransport {
  GeodesicTransport base;
  double coefficient = 1.0;
};

/// alpha ⊙ T applied to w, on raw payloads. Negative alpha uses the inverse
/// transport; |alpha| > 1 applies floor(|alpha|) full transports, then the
/// fractional remainder.
Vector scale_apply(const Space& space, double alpha, const Vector& source, const Vector& target,
                   const Vector& w);

SpacePoint scale_apply(double alpha, const GeodesicTransport& transport, const SpacePoint& w);

/// alpha_1 ⊙ T_1 ⊕ ... ⊕ alpha_k ⊙ T_k with ⊕ = composition: the last term
/// acts first.
class TransportChain {
 public:
  TransportChain() = default;
  explicit TransportChain(std::vector<ScaledTransport> terms);

  void append(ScaledTransport term);
  const std::vector<ScaledTransport>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  SpacePoint apply(const SpacePoint& w) const;

 private:
  std::vector<ScaledTransport> terms_;
};

inline SpacePoint chain_apply(const TransportChain& chain, const SpacePoint& w) {
  return chain.apply(w);
}

}  // namespace got
