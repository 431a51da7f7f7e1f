#include "limitset/density.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace limitset {

namespace {

double radius_pow(const GaugeSpec& g, std::span<const double> dir, int d) {
  const double gv = g(dir);
  if (gv <= 0.0) return 0.0;  // the zero direction contributes nothing
  if (gv == kInf) return 0.0;
  return std::pow(1.0 / gv, d);
}

// Composite Simpson over [0, pi/2] of f; n panels (even).
template <class F>
double simpson(F&& f, int n) {
  const double h = 1.5707963267948966 / n;
  double s = f(0.0) + f(1.5707963267948966);
  for (int i = 1; i < n; ++i) s += f(i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

double volume2(const GaugeSpec& g, double rel_tol) {
  auto f = [&](double phi) {
    const double dir[2] = {std::cos(phi), std::sin(phi)};
    return radius_pow(g, std::span<const double>(dir, 2), 2);
  };
  double prev = simpson(f, 64);
  for (int n = 128; n <= 1 << 16; n *= 2) {
    const double cur = simpson(f, n);
    const double richardson = cur + (cur - prev) / 15.0;
    if (std::abs(cur - prev) <= 15.0 * rel_tol * std::abs(richardson)) return 0.5 * richardson;
    prev = cur;
  }
  return 0.5 * prev;
}

double volume3(const GaugeSpec& g, double rel_tol) {
  auto outer = [&](int n) {
    auto f_phi = [&](double theta) {
      auto f = [&](double phi) {
        const double st = std::sin(theta);
        const double dir[3] = {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
        return radius_pow(g, std::span<const double>(dir, 3), 3) * st;
      };
      return simpson(f, n);
    };
    return simpson(f_phi, n);
  };
  double prev = outer(32);
  for (int n = 64; n <= 1024; n *= 2) {
    const double cur = outer(n);
    const double richardson = cur + (cur - prev) / 15.0;
    if (std::abs(cur - prev) <= 15.0 * rel_tol * std::abs(richardson))
      return richardson / 3.0;
    prev = cur;
  }
  return prev / 3.0;
}

double halton(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

double volume_qmc(const GaugeSpec& g, int d) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  const std::uint64_t n = 1u << 20;
  std::vector<double> x(d);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    for (int j = 0; j < d; ++j) x[j] = halton(i, primes[j]);
    if (g(x) <= 1.0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace

double limit_set_volume(const GaugeSpec& g, double rel_tol) {
  if (g.extended_valued() && g.family() == GaugeFamily::HuslerReissGP)
    throw std::invalid_argument("limit_set_volume: extended-valued gauge has zero volume");
  const int d = g.dim();
  if (d == 1) {
    const double one[1] = {1.0};
    return 1.0 / g(std::span<const double>(one, 1));
  }
  if (d == 2) return volume2(g, rel_tol);
  if (d == 3) return volume3(g, rel_tol);
  if (d > 8) throw std::invalid_argument("limit_set_volume: dim > 8 unsupported");
  return volume_qmc(g, d);
}

GaugeDensity::GaugeDensity(GaugeSpec g) : g_(std::move(g)) {
  if (g_.extended_valued() && g_.family() == GaugeFamily::HuslerReissGP)
    throw std::invalid_argument("GaugeDensity: extended-valued gauge is not a density");
  volume_ = limit_set_volume(g_);
  double fact = 1.0;
  for (int i = 2; i <= g_.dim(); ++i) fact *= i;
  norm_ = fact * volume_;
  if (!(norm_ > 0.0)) throw std::invalid_argument("GaugeDensity: degenerate limit set");
}

double GaugeDensity::pdf(std::span<const double> x) const {
  const double gv = g_(x);
  return gv == kInf ? 0.0 : std::exp(-gv) / norm_;
}

double GaugeDensity::log_pdf(std::span<const double> x) const {
  const double gv = g_(x);
  return gv == kInf ? -kInf : -gv - std::log(norm_);
}

}  // namespace limitset
