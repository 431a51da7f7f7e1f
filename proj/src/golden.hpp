#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace limitset::detail {

// Golden-section minimization on [a,b]. Tolerant of +inf values and flat
// stretches; endpoints compete as candidates.
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iters = 80) {
  constexpr double inv_phi = 0.61803398874989484820458683436564;
  const double a0 = a, b0 = b;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = f(xm);
  auto consider = [&](double x, double v) {
    if (v < fm) {
      fm = v;
      xm = x;
    }
  };
  consider(x1, f1);
  consider(x2, f2);
  consider(a0, f(a0));
  consider(b0, f(b0));
  return {xm, fm};
}

// Scan n+1 equispaced points on [lo,hi], then golden-refine around every
// interior local minimum of the scan and around both endpoints. Robust for
// piecewise-smooth multimodal one-dimensional minimands.
template <class F>
std::pair<double, double> scan_refine_min(F&& f, double lo, double hi, int n = 64,
                                          int iters = 80) {
  if (!(hi > lo)) return {lo, f(lo)};
  std::vector<double> xs(n + 1), vs(n + 1);
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    xs[i] = (i == n) ? hi : lo + i * h;
    vs[i] = f(xs[i]);
  }
  double best_x = xs[0], best_v = vs[0];
  auto refine = [&](double a, double b) {
    auto [x, v] = golden_min(f, a, b, iters);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  };
  for (int i = 0; i <= n; ++i) {
    if (vs[i] < best_v) {
      best_v = vs[i];
      best_x = xs[i];
    }
  }
  for (int i = 1; i < n; ++i)
    if (std::isfinite(vs[i]) && vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1])
      refine(xs[i - 1], xs[i + 1]);
  refine(xs[0], xs[1]);
  refine(xs[n - 1], xs[n]);
  return {best_x, best_v};
}

}  // namespace limitset::detail
