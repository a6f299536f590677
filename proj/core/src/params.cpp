#include "ept/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ept {

namespace {

void check_weight(const WeightFn& w, double b, const char* name) {
  if (!(w.slope >= 0.0) || !(w.slope <= b))
    throw std::invalid_argument(std::string("EptParams: ") + name +
                                " slope must lie in [0, b]");
  if (!(w.offset >= 0.0))
    throw std::invalid_argument(std::string("EptParams: ") + name +
                                " offset must be nonnegative");
}

}  // namespace

EptParams::EptParams(double b_, double lambda_, double alpha_, WeightFn w1_, WeightFn w2_)
    : b(b_), lambda(lambda_), alpha(alpha_), w1(w1_), w2(w2_) {
  if (!(b > 0.0) || !std::isfinite(b))
    throw std::invalid_argument("EptParams: b must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("EptParams: lambda must be nonnegative");
  check_weight(w1, b, "w1");
  check_weight(w2, b, "w2");
  if (!(alpha >= 0.0) || alpha > alpha_max() + 1e-15 * std::max(1.0, alpha_max()))
    throw std::invalid_argument(
        "EptParams: alpha must lie in [0, (b*lambda + w1(r) + w2(r)) / 2]");
}

bool alpha_in_metric_range(const EptParams& p) {
  return p.alpha < 0.5 * p.b * p.lambda + std::min(p.w1.offset, p.w2.offset);
}

}  // namespace ept
