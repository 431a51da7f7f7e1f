#include "limitset/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "golden.hpp"
#include "limitset/stats.hpp"

namespace limitset {

GaugeSpec concat_gauge(GaugeSpec g_s, GaugeSpec g_v) {
  std::vector<GaugeSpec> blocks;
  blocks.push_back(std::move(g_s));
  blocks.push_back(std::move(g_v));
  return GaugeSpec::additive(std::move(blocks));
}

GaugeSpec linear_image_gauge(GaugeSpec g, std::vector<double> a_row_major) {
  return GaugeSpec::linear_image(std::move(g), std::move(a_row_major));
}

GaugeSpec hw_mix_gauge(const MixtureSpec& spec) {
  return GaugeSpec::hw_mix(spec.g_v, spec.gamma);
}

GaugeSpec general_mix_gauge(GaugeSpec g_s, GaugeSpec g_v, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("general_mix_gauge: gamma must lie in (0,1)");
  if (g_s.dim() != g_v.dim())
    throw std::invalid_argument("general_mix_gauge: block dimensions differ");
  const int d = g_v.dim();
  auto fn = [g_s, g_v, gamma, d](std::span<const double> x) -> double {
    std::vector<double> lo(d, 0.0), hi(d);
    for (int i = 0; i < d; ++i) hi[i] = x[i] / gamma;
    std::vector<double> v(d);
    auto f = [&](std::span<const double> s) {
      for (int i = 0; i < d; ++i) v[i] = std::max(x[i] - gamma * s[i], 0.0);
      return g_s(s) + g_v(v);
    };
    MinimizeOptions o;
    o.grid_points = 13;
    o.restarts = 6;
    o.parallel = false;
    // the all-equal candidate matters when g_S is diagonal-degenerate
    double mn = x[0];
    for (int i = 1; i < d; ++i) mn = std::min(mn, x[i]);
    std::vector<double> extras(d, mn / gamma);
    return minimize_box(f, lo, hi, o, extras).value;
  };
  return GaugeSpec::custom(d, fn, "general_mix");
}

namespace {

// argmin of s + g_V(x - gamma s) over [0, min(x)/gamma]
double inner_minimizer(const GaugeSpec& g_v, double gamma, double a, double b) {
  const double mn = std::min(a, b);
  if (mn <= 0.0) return 0.0;
  auto f = [&](double s) {
    const double p[2] = {std::max(a - gamma * s, 0.0), std::max(b - gamma * s, 0.0)};
    return s + g_v(std::span<const double>(p, 2));
  };
  auto [s, v] = detail::scan_refine_min(f, 0.0, mn / gamma, 48, 90);
  return (f(0.0) <= v) ? 0.0 : s;
}

}  // namespace

MixBetaReport hw_beta_check(const MixtureSpec& spec) {
  if (spec.g_v.dim() != 2)
    throw std::invalid_argument("hw_beta_check: bivariate g_V required");
  MixBetaReport r;
  const GaugeSpec& gv = spec.g_v;
  const GaugeSpec gx = hw_mix_gauge(spec);
  const double gamma = spec.gamma;

  const auto cv = cond_alpha(gv, 1, 0);  // condition on the second coordinate
  const auto cx = cond_alpha(gx, 1, 0);
  r.alpha_v = cv.alpha;
  r.alpha_x = cx.alpha;
  r.beta_v = cond_beta(gv, 1, 0, cv.alpha);
  r.beta_x = cond_beta(gx, 1, 0, cx.alpha);
  r.beta_match = r.beta_v.determined && r.beta_x.determined &&
                 std::abs(r.beta_v.beta - r.beta_x.beta) < 5e-3;

  const double alpha = cv.alpha;
  // one-sided partials of g_V along the face at the contact point
  const double h = 1e-7;
  auto gv2 = [&](double x0, double x1) {
    const double p[2] = {x0, x1};
    return gv(std::span<const double>(p, 2));
  };
  const double right = (gv2(alpha + h, 1.0) - gv2(alpha, 1.0)) / h;
  const double left = alpha > h ? (gv2(alpha, 1.0) - gv2(alpha - h, 1.0)) / h : right;
  r.face_slope_v = right;
  r.v_differentiable_at_contact = std::abs(right - left) < 1e-4;
  r.deriv_limit = 1.0 - gamma * (1.0 + (1.0 - alpha) * right);

  // probe the inner minimizer just beyond the contact point
  bool all_zero = true;
  std::vector<double> ratios;
  for (int k = 0; k < 12; ++k) {
    const double u = 1e-5 * std::pow(1e3, k / 11.0);
    const double s_star = inner_minimizer(gv, gamma, alpha + u, 1.0);
    if (s_star > 1e-8) all_zero = false;
    const double num = gx.face_excess(1, 0, alpha + u);
    const double den = gv.face_excess(1, 0, alpha + u);
    if (den > 0.0 && std::isfinite(num)) ratios.push_back(num / den);
  }
  r.inner_minimizer_stays_zero = all_zero;
  r.remainder_ratio = ratios.empty() ? 0.0 : median_inplace(ratios);

  if (r.v_differentiable_at_contact) {
    r.note = all_zero ? "inner minimizer vanishes; mixture remainder tracks g_V"
                      : "differentiable contact but nonzero inner minimizer";
  } else {
    r.note = r.deriv_limit > 0.0
                 ? "kinked contact, derivative limit positive: remainder tracks g_V"
                 : "kinked contact, derivative limit negative: linear remainder, scale "
                   "exponent 0";
  }
  return r;
}

}  // namespace limitset
