#include "limitset/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "limitset/parallel.hpp"
#include "limitset/rng.hpp"
#include "limitset/stats.hpp"

namespace limitset {

using json = nlohmann::json;

json Estimate::to_json() const {
  json j{{"quantity", quantity}, {"index", json::parse(index_json.empty() ? "null" : index_json)},
         {"value", value},       {"raw", raw},
         {"se", se},             {"k", k},
         {"n_eff", n_eff},       {"seed", seed}};
  if (warn_low_neff) j["warn_low_neff"] = true;
  if (!note.empty()) j["note"] = note;
  return j;
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::int64_t auto_k(std::int64_t n_eff, const EstimatorConfig& cfg) {
  if (cfg.k > 0) return std::min<std::int64_t>(cfg.k, n_eff - 1);
  const auto k = static_cast<std::int64_t>(std::pow(static_cast<double>(n_eff), cfg.k_exponent));
  return std::clamp<std::int64_t>(k, 2, n_eff - 1);
}

// Hill estimate on the k upper order statistics of a positive sample.
// Rearranges v.
double hill(std::vector<double>& v, std::int64_t k, bool* tie_warn = nullptr) {
  const std::int64_t n = static_cast<std::int64_t>(v.size());
  if (k >= n) throw std::invalid_argument("hill: k too large for the sample");
  std::nth_element(v.begin(), v.begin() + (n - k - 1), v.end());
  const double thr = v[n - k - 1];
  if (thr <= 0.0) throw std::invalid_argument("hill: nonpositive threshold order statistic");
  double s = 0.0;
  std::int64_t ties = 0;
  for (std::int64_t i = n - k; i < n; ++i) {
    s += std::log(v[i] / thr);
    if (v[i] == thr) ++ties;
  }
  if (tie_warn && ties > 0) *tie_warn = true;
  return s / static_cast<double>(k);
}

struct Structured {
  std::vector<double> t;  // min over C
  std::vector<double> m;  // max outside C (  -inf when C = D)
};

Structured structure_vars(const SampleCloud& cloud, const std::vector<int>& C) {
  std::vector<bool> in_c(cloud.dim, false);
  for (int i : C) {
    require(i >= 0 && i < cloud.dim, "structure: index out of range");
    in_c[i] = true;
  }
  Structured s;
  s.t.resize(cloud.n);
  s.m.resize(cloud.n);
  const bool full = static_cast<int>(C.size()) == cloud.dim;
  par::for_index(cloud.n, [&](std::int64_t i) {
    auto row = cloud.row(i);
    double mn = kInf, mx = -kInf;
    for (int j = 0; j < cloud.dim; ++j) {
      if (in_c[j])
        mn = std::min(mn, row[j]);
      else
        mx = std::max(mx, row[j]);
    }
    s.t[i] = mn;
    s.m[i] = full ? -kInf : mx;
  }, 1 << 14);
  return s;
}

double censored_hill(const std::vector<double>& t, const std::vector<double>& m, double delta,
                     const EstimatorConfig& cfg, std::int64_t* k_out, std::int64_t* neff_out,
                     bool* tie_warn = nullptr) {
  std::vector<double> kept;
  kept.reserve(t.size() / 4);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0 && m[i] < std::pow(t[i], delta)) kept.push_back(t[i]);
  }
  const auto n_eff = static_cast<std::int64_t>(kept.size());
  if (neff_out) *neff_out = n_eff;
  if (n_eff < 3) throw std::runtime_error("tau_hat: censoring left no usable observations");
  const std::int64_t k = auto_k(n_eff, cfg);
  if (k_out) *k_out = k;
  return hill(kept, k, tie_warn);
}

double bootstrap_se(std::int64_t n, int B, std::uint64_t seed,
                    const std::function<double(const std::vector<std::int64_t>&)>& stat) {
  if (B <= 1) return 0.0;
  std::vector<double> reps(B, std::numeric_limits<double>::quiet_NaN());
  par::for_index(B, [&](std::int64_t b) {
    Rng rng(Rng::derive(seed, 0xb00 + static_cast<std::uint64_t>(b)));
    std::vector<std::int64_t> idx(n);
    for (auto& v : idx) v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
    try {
      reps[b] = stat(idx);
    } catch (const std::exception&) {
      // resample killed the cell; leave NaN
    }
  });
  std::vector<double> ok;
  for (double r : reps)
    if (std::isfinite(r)) ok.push_back(r);
  if (ok.size() < 8) return kInf;  // too unstable to quote an error
  return stdev(ok);
}

}  // namespace

Estimate hill_eta(const SampleCloud& cloud, const std::vector<int>& C,
                  const EstimatorConfig& cfg) {
  require(cloud.margins == Margins::Pareto, "hill_eta: Pareto margins required");
  require(C.size() >= 2, "hill_eta: need |C| >= 2");
  const auto s = structure_vars(cloud, C);

  Estimate e;
  e.quantity = "eta";
  e.index_json = json{{"C", C}}.dump();
  e.seed = cfg.seed;
  e.n_eff = cloud.n;
  e.k = auto_k(cloud.n, cfg);
  bool ties = false;
  {
    std::vector<double> t = s.t;
    e.raw = hill(t, e.k, &ties);
  }
  if (ties) e.note = "tied order statistics at the threshold";
  e.value = std::clamp(e.raw, 0.0, 1.0);
  e.se = bootstrap_se(cloud.n, cfg.bootstrap, cfg.seed, [&](const std::vector<std::int64_t>& idx) {
    std::vector<double> t(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) t[i] = s.t[idx[i]];
    return hill(t, auto_k(static_cast<std::int64_t>(t.size()), cfg));
  });
  return e;
}

std::vector<Estimate> hill_eta_sweep(const SampleCloud& cloud, const std::vector<int>& C,
                                     EstimatorConfig cfg) {
  std::vector<Estimate> out;
  for (double ex : {0.5, 0.6, 0.7}) {
    cfg.k = 0;
    cfg.k_exponent = ex;
    Estimate e = hill_eta(cloud, C, cfg);
    e.note = "k = n^" + std::to_string(ex);
    out.push_back(std::move(e));
  }
  return out;
}

Estimate tau_hat(const SampleCloud& cloud, const std::vector<int>& C, double delta,
                 const EstimatorConfig& cfg) {
  require(cloud.margins == Margins::Pareto, "tau_hat: Pareto margins required");
  require(!C.empty(), "tau_hat: C must be nonempty");
  require(delta >= 0.0 && delta <= 1.0, "tau_hat: delta in [0,1]");
  const auto s = structure_vars(cloud, C);

  Estimate e;
  e.quantity = "tau";
  e.index_json = json{{"C", C}, {"delta", delta}}.dump();
  e.seed = cfg.seed;
  bool ties = false;
  e.raw = censored_hill(s.t, s.m, delta, cfg, &e.k, &e.n_eff, &ties);
  if (ties) e.note = "tied order statistics at the threshold";
  e.value = std::clamp(e.raw, 0.0, 1.0);
  e.warn_low_neff = e.n_eff < 10 * e.k;
  e.se = bootstrap_se(cloud.n, cfg.bootstrap, cfg.seed, [&](const std::vector<std::int64_t>& idx) {
    std::vector<double> t(idx.size()), m(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      t[i] = s.t[idx[i]];
      m[i] = s.m[idx[i]];
    }
    return censored_hill(t, m, delta, cfg, nullptr, nullptr);
  });
  return e;
}

namespace {

double fixed_threshold_fit(const std::vector<double>& t, const std::vector<double>& m,
                           double delta, const EstimatorConfig& cfg, std::int64_t n_total,
                           std::int64_t* neff_out) {
  // thresholds from the quantiles of the structure variable restricted to
  // observations compatible with the censoring event (for rapidly decaying
  // joint tails the occupied cells sit at small thresholds)
  std::vector<double> sorted;
  sorted.reserve(t.size() / 4);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > 1.0 && m[i] <= std::pow(t[i], delta)) sorted.push_back(t[i]);
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<std::int64_t>(sorted.size());
  if (n < 64)
    throw std::runtime_error("tau_hat_fixed_threshold: censoring left no usable observations");
  const double chi = std::min<double>(cfg.count_hi, static_cast<double>(n) / 2);
  const double clo = std::max<double>(cfg.count_lo, 4.0);
  std::vector<double> lt, lp;
  std::int64_t min_count = n;
  for (int j = 0; j < cfg.t_points; ++j) {
    const double frac = static_cast<double>(j) / (cfg.t_points - 1);
    const auto c = static_cast<std::int64_t>(chi * std::pow(clo / chi, frac));
    const double thr = sorted[n - 1 - c];
    if (thr <= 1.0) continue;  // below the Pareto support floor
    std::int64_t cnt = 0;
    const double cap = std::pow(thr, delta);
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] > thr && m[i] <= cap) ++cnt;
    if (cnt < cfg.min_exceedances) continue;
    min_count = std::min(min_count, cnt);
    lt.push_back(std::log(thr));
    lp.push_back(std::log(static_cast<double>(cnt) / static_cast<double>(n_total)));
  }
  if (neff_out) *neff_out = (min_count == n) ? 0 : min_count;
  if (lt.size() < 4)
    throw std::runtime_error("tau_hat_fixed_threshold: too few occupied threshold cells");
  const LineFit fit = fit_line(lt, lp);
  if (!(fit.slope < -1e-9))
    throw std::runtime_error("tau_hat_fixed_threshold: joint tail probability not decreasing");
  return -1.0 / fit.slope;
}

}  // namespace

Estimate tau_hat_fixed_threshold(const SampleCloud& cloud, const std::vector<int>& C,
                                 double delta, const EstimatorConfig& cfg) {
  require(cloud.margins == Margins::Pareto, "tau_hat_fixed_threshold: Pareto margins required");
  require(!C.empty(), "tau_hat_fixed_threshold: C must be nonempty");
  const auto s = structure_vars(cloud, C);

  Estimate e;
  e.quantity = "tau_fixed_t";
  e.index_json = json{{"C", C}, {"delta", delta}}.dump();
  e.seed = cfg.seed;
  e.raw = fixed_threshold_fit(s.t, s.m, delta, cfg, cloud.n, &e.n_eff);
  e.value = std::clamp(e.raw, 0.0, 1.0);
  e.k = 0;
  e.se = bootstrap_se(cloud.n, cfg.bootstrap, cfg.seed, [&](const std::vector<std::int64_t>& idx) {
    std::vector<double> t(idx.size()), m(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      t[i] = s.t[idx[i]];
      m[i] = s.m[idx[i]];
    }
    return fixed_threshold_fit(t, m, delta, cfg, cloud.n, nullptr);
  });
  return e;
}

Estimate lambda_hat(const SampleCloud& cloud, std::span<const double> omega,
                    const EstimatorConfig& cfg) {
  require(cloud.margins == Margins::Exponential, "lambda_hat: exponential margins required");
  require(static_cast<int>(omega.size()) == cloud.dim, "lambda_hat: omega dimension mismatch");
  double mx = 0.0, sum = 0.0;
  for (double w : omega) {
    require(w >= 0.0, "lambda_hat: omega on the simplex");
    mx = std::max(mx, w);
    sum += w;
  }
  require(std::abs(sum - 1.0) < 1e-9, "lambda_hat: omega must sum to 1");

  // scalar structure variable: the event X > omega v is { min_j X_j/omega_j > v }
  std::vector<double> s(cloud.n);
  par::for_index(cloud.n, [&](std::int64_t i) {
    auto row = cloud.row(i);
    double v = kInf;
    for (int j = 0; j < cloud.dim; ++j)
      if (omega[j] > 0.0) v = std::min(v, row[j] / omega[j]);
    s[i] = v;
  }, 1 << 14);

  auto fit_on = [&](const std::vector<double>& vals) {
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<std::int64_t>(sorted.size());
    const double chi = std::min<double>(cfg.count_hi, static_cast<double>(n) / 2);
    const double clo = std::max<double>(cfg.count_lo, 4.0);
    std::vector<double> xs, ys;
    for (int j = 0; j < cfg.t_points; ++j) {
      const double frac = static_cast<double>(j) / (cfg.t_points - 1);
      const auto c = static_cast<std::int64_t>(chi * std::pow(clo / chi, frac));
      const double v = sorted[n - 1 - c];
      if (!(v > 0.0)) continue;
      // count exactly (quantile index can be distorted by ties)
      const auto cnt = static_cast<std::int64_t>(sorted.end() -
                                                 std::upper_bound(sorted.begin(), sorted.end(), v));
      if (cnt < cfg.min_exceedances) continue;
      xs.push_back(v);
      ys.push_back(-std::log(static_cast<double>(cnt) / static_cast<double>(n)));
    }
    if (xs.size() < 4) throw std::runtime_error("lambda_hat: too few occupied tail cells");
    return fit_line(xs, ys).slope;
  };

  Estimate e;
  e.quantity = "lambda";
  e.index_json = json{{"omega", std::vector<double>(omega.begin(), omega.end())}}.dump();
  e.seed = cfg.seed;
  e.n_eff = cloud.n;
  e.k = 0;
  e.raw = fit_on(s);
  e.value = std::clamp(e.raw, mx, 1.0);
  e.se = bootstrap_se(cloud.n, cfg.bootstrap, cfg.seed, [&](const std::vector<std::int64_t>& idx) {
    std::vector<double> v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) v[i] = s[idx[i]];
    return fit_on(v);
  });
  return e;
}

// ---------------------------------------------------------------------------
// Hausdorff distance

namespace {

// Uniform-grid nearest-neighbour accelerator for 2- and 3-dimensional point
// sets.
class PointGrid {
 public:
  PointGrid(std::span<const double> pts, int dim) : pts_(pts), dim_(dim) {
    n_ = static_cast<std::int64_t>(pts.size()) / dim;
    double mx = 1e-9;
    for (double v : pts) mx = std::max(mx, v);
    cells_ = dim == 2 ? 96 : 32;
    h_ = mx / cells_ * (1.0 + 1e-12);
    buckets_.resize(static_cast<std::size_t>(std::pow(cells_, dim)));
    for (std::int64_t i = 0; i < n_; ++i) buckets_[bucket_of(row(i))].push_back(i);
  }

  double nearest_dist(std::span<const double> q) const {
    int cell[3] = {0, 0, 0};
    for (int j = 0; j < dim_; ++j)
      cell[j] = std::clamp(static_cast<int>(q[j] / h_), 0, cells_ - 1);
    double best = kInf;
    for (int ring = 0; ring < 2 * cells_; ++ring) {
      // cells at Chebyshev ring r are at least (r-1) h away
      if (best <= (ring - 1) * h_) break;
      scan_ring(q, cell, ring, best);
    }
    if (best == kInf) {
      for (std::int64_t i = 0; i < n_; ++i) best = std::min(best, dist(q, row(i)));
    }
    return best;
  }

 private:
  std::span<const double> row(std::int64_t i) const {
    return pts_.subspan(static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_));
  }
  double dist(std::span<const double> a, std::span<const double> b) const {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
  }
  std::size_t bucket_of(std::span<const double> p) const {
    std::size_t idx = 0;
    for (int j = 0; j < dim_; ++j) {
      const int c = std::clamp(static_cast<int>(p[j] / h_), 0, cells_ - 1);
      idx = idx * cells_ + static_cast<std::size_t>(c);
    }
    return idx;
  }
  bool scan_ring(std::span<const double> q, const int* center, int ring, double& best) const {
    bool any = false;
    auto visit = [&](int a, int b, int c) {
      if (a < 0 || a >= cells_ || b < 0 || b >= cells_) return;
      if (dim_ == 3 && (c < 0 || c >= cells_)) return;
      std::size_t idx = dim_ == 2
                            ? static_cast<std::size_t>(a) * cells_ + b
                            : (static_cast<std::size_t>(a) * cells_ + b) * cells_ + c;
      for (std::int64_t i : buckets_[idx]) {
        any = true;
        best = std::min(best, dist(q, row(i)));
      }
    };
    if (dim_ == 2) {
      if (ring == 0) {
        visit(center[0], center[1], 0);
        return any;
      }
      for (int a = center[0] - ring; a <= center[0] + ring; ++a) {
        visit(a, center[1] - ring, 0);
        visit(a, center[1] + ring, 0);
      }
      for (int b = center[1] - ring + 1; b <= center[1] + ring - 1; ++b) {
        visit(center[0] - ring, b, 0);
        visit(center[0] + ring, b, 0);
      }
    } else {
      for (int a = center[0] - ring; a <= center[0] + ring; ++a)
        for (int b = center[1] - ring; b <= center[1] + ring; ++b)
          for (int c = center[2] - ring; c <= center[2] + ring; ++c) {
            const int cheb = std::max({std::abs(a - center[0]), std::abs(b - center[1]),
                                       std::abs(c - center[2])});
            if (cheb == ring) visit(a, b, c);
          }
    }
    return any;
  }

  std::span<const double> pts_;
  int dim_;
  std::int64_t n_;
  int cells_;
  double h_;
  std::vector<std::vector<std::int64_t>> buckets_;
};

}  // namespace

double hausdorff_distance(std::span<const double> pts, int dim, const LevelSetMesh& mesh,
                          const std::function<double(std::span<const double>)>& gauge_value) {
  if (mesh.dim != dim) throw std::invalid_argument("hausdorff: dimension mismatch");
  const std::int64_t n = static_cast<std::int64_t>(pts.size()) / dim;
  if (n == 0) throw std::invalid_argument("hausdorff: empty cloud");

  // cloud -> set: only points outside the set contribute, via the boundary
  const std::int64_t nb = static_cast<std::int64_t>(mesh.boundary_count());
  const double out = par::max_index(
      n,
      [&](std::int64_t i) {
        auto p = pts.subspan(static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim));
        if (gauge_value(p) <= 1.0) return 0.0;
        double best = kInf;
        for (std::int64_t b = 0; b < nb; ++b) {
          double s = 0.0;
          for (int j = 0; j < dim; ++j) {
            const double d = p[j] - mesh.boundary[static_cast<std::size_t>(b) * dim + j];
            s += d * d;
          }
          best = std::min(best, s);
        }
        return std::sqrt(best);
      },
      0.0);

  // set -> cloud: coverage deficiency
  const PointGrid grid(pts, dim);
  const std::int64_t ns = static_cast<std::int64_t>(mesh.set_count());
  const double in = par::max_index(
      ns,
      [&](std::int64_t i) {
        auto q = std::span<const double>(mesh.set_points)
                     .subspan(static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim));
        return grid.nearest_dist(q);
      },
      0.0);

  return std::max(out, in);
}

double hausdorff_to_limit_set(const ScaledCloud& cloud, const GaugeSpec& g,
                              const LevelSetMesh& mesh) {
  return hausdorff_distance(cloud.pts, cloud.dim, mesh,
                            [&g](std::span<const double> p) { return g(p); });
}

double hausdorff_to_limit_set(const ScaledCloud& cloud, const GaugeSpec& g) {
  return hausdorff_to_limit_set(cloud, g, level_set_mesh(g));
}

}  // namespace limitset
