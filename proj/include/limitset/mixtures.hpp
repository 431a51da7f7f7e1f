#pragma once

#include <string>

#include "limitset/gauge.hpp"
#include "limitset/measures.hpp"

namespace limitset {

// Additive mixing of independent exponential-tailed vectors: the gauge of
// the concatenated vector is the sum of the block gauges.
GaugeSpec concat_gauge(GaugeSpec g_s, GaugeSpec g_v);

// Gauge of an invertible linear image: z -> g(A^-1 z) on A * orthant.
GaugeSpec linear_image_gauge(GaugeSpec g, std::vector<double> a_row_major);

struct MixtureSpec {
  GaugeSpec g_v;
  double gamma;  // mixing weight of the common factor, in (0,1)
};

// Gauge of gamma * S + V with S a scalar exponential factor shared across
// coordinates: x -> min_{s in [0, min(x)/gamma]} { s + g_V(x - gamma s) }.
GaugeSpec hw_mix_gauge(const MixtureSpec& spec);

// Experimental: general common-factor gauge g_S on the S block (the box
// minimization is d-dimensional). Exposed for exploration, not exercised by
// the acceptance suite.
GaugeSpec general_mix_gauge(GaugeSpec g_s, GaugeSpec g_v, double gamma);

// Diagnostic for the scale exponent of the mixture: compares beta of the
// mixed gauge with beta of g_V, classifies the behaviour of the inner
// minimizer s*(u) near the contact point, and reports the remainder ratio
// (g_X - 1)/(g_V - 1) along the face.
struct MixBetaReport {
  double alpha_v = 0.0;
  double alpha_x = 0.0;
  BetaResult beta_v;
  BetaResult beta_x;
  bool beta_match = false;
  bool v_differentiable_at_contact = false;
  double face_slope_v = 0.0;       // right partial of g_V along the face at the contact
  double deriv_limit = 0.0;        // 1 - gamma [1 + (1-alpha) g_V,1(alpha+,1)]
  bool inner_minimizer_stays_zero = false;  // s*(u) == 0 on the probe grid
  double remainder_ratio = 0.0;    // median of (g_X-1)/(g_V-1) over small u
  std::string note;
};
MixBetaReport hw_beta_check(const MixtureSpec& spec);

}  // namespace limitset
