#include "got/transport.hpp"

#include <cmath>

namespace got {

GeodesicTransport::GeodesicTransport(SpacePoint source, SpacePoint target)
    : source_(std::move(source)), target_(std::move(target)) {
  require_same_space(source_, target_);
}

SpacePoint GeodesicTransport::apply(const SpacePoint& w) const {
  return ubiquity(source_, target_, w);
}

Vector scale_apply(const Space& space, double alpha, const Vector& source, const Vector& target,
                   const Vector& w) {
  if (!std::isfinite(alpha)) throw UsageError("transport coefficient must be finite");
  if (alpha == 0.0) return w;
  const Vector& from = alpha > 0 ? source : target;
  const Vector& to = alpha > 0 ? target : source;
  const double magnitude = std::abs(alpha);
  const double whole = std::floor(magnitude);
  const double frac = magnitude - whole;
  Vector out = w;
  for (int k = 0; k < static_cast<int>(whole); ++k) out = space.ubiquity(from, to, out);
  if (frac > 0.0) out = space.partial_transport(from, to, out, frac);
  return out;
}

SpacePoint scale_apply(double alpha, const GeodesicTransport& transport, const SpacePoint& w) {
  require_same_space(transport.source(), w);
  const Space& space = w.space();
  return SpacePoint::trusted(w.space_ptr(),
                             scale_apply(space, alpha, transport.source().payload(),
                                         transport.target().payload(), w.payload()));
}

TransportChain::TransportChain(std::vector<ScaledTransport> terms) {
  for (auto& t : terms) append(std::move(t));
}

void TransportChain::append(ScaledTransport term) {
  if (!std::isfinite(term.coefficient)) throw UsageError("transport coefficient must be finite");
  if (!terms_.empty()) require_same_space(terms_.front().base.source(), term.base.source());
  terms_.push_back(std::move(term));
}

SpacePoint TransportChain::apply(const SpacePoint& w) const {
  SpacePoint out = w;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
    out = scale_apply(it->coefficient, it->base, out);
  return out;
}

}  // namespace got
