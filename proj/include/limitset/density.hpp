#pragma once

#include <span>

#include "limitset/gauge.hpp"

namespace limitset {

// Lebesgue volume of {g <= 1} on the nonnegative orthant. Star-shapedness
// turns the volume into a radial integral of 1/g(u)^d over directions, which
// is evaluated by composite Simpson with Richardson refinement (d <= 3) or a
// deterministic Halton rule (d >= 4). Relative accuracy target 1e-4 or
// better. Throws for extended-valued gauges (the set has an empty interior).
double limit_set_volume(const GaugeSpec& g, double rel_tol = 1e-5);

// The probability density f(x) = exp(-g(x)) / (d! |G|). The normalizing
// volume is computed once at construction and cached.
class GaugeDensity {
 public:
  explicit GaugeDensity(GaugeSpec g);

  const GaugeSpec& gauge() const { return g_; }
  double volume() const { return volume_; }
  double norm() const { return norm_; }  // d! |G|
  double pdf(std::span<const double> x) const;
  double log_pdf(std::span<const double> x) const;

 private:
  GaugeSpec g_;
  double volume_;
  double norm_;
};

}  // namespace limitset
