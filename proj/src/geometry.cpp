#include "limitset/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "golden.hpp"
#include "limitset/parallel.hpp"
#include "limitset/rng.hpp"

namespace limitset {

using json = nlohmann::json;

json BoundaryRegion::to_json() const {
  const char* kind_name = kind == RegionKind::Omega        ? "omega"
                          : kind == RegionKind::SubsetDelta ? "subset_delta"
                                                            : "min_face";
  json jf = json::array();
  for (const auto& f : faces)
    jf.push_back({{"pinned_index", f.pinned_index},
                  {"pinned_value", f.pinned_value},
                  {"lo", f.lo},
                  {"hi", f.hi}});
  return {{"kind", kind_name}, {"faces", jf}, {"vertex", vertex}};
}

BoundaryRegion build_omega_boundary(std::span<const double> omega, double U) {
  const int d = static_cast<int>(omega.size());
  if (d < 2) throw std::invalid_argument("omega boundary: need dim >= 2");
  double sum = 0.0, mx = 0.0;
  for (double w : omega) {
    if (!(w >= 0.0)) throw std::invalid_argument("omega boundary: simplex point required");
    sum += w;
    mx = std::max(mx, w);
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("omega boundary: coordinates must sum to 1");
  if (!(U >= 1.0)) throw std::invalid_argument("omega boundary: U >= 1 required");
  BoundaryRegion r;
  r.kind = RegionKind::Omega;
  r.vertex.resize(d);
  for (int j = 0; j < d; ++j) r.vertex[j] = omega[j] / mx;
  for (int i = 0; i < d; ++i) {
    Face f;
    f.pinned_index = i;
    f.pinned_value = r.vertex[i];
    f.lo = r.vertex;
    f.hi.assign(d, U);
    f.hi[i] = f.pinned_value;
    r.faces.push_back(std::move(f));
  }
  return r;
}

BoundaryRegion build_subset_boundary(int dim, const std::vector<int>& C, double delta,
                                     double U) {
  if (C.empty()) throw std::invalid_argument("subset boundary: C must be nonempty");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("subset boundary: delta must lie in [0,1]");
  if (!(U >= 1.0)) throw std::invalid_argument("subset boundary: U >= 1 required");
  std::vector<bool> in_c(dim, false);
  for (int i : C) {
    if (i < 0 || i >= dim) throw std::invalid_argument("subset boundary: index out of range");
    in_c[i] = true;
  }
  BoundaryRegion r;
  r.kind = RegionKind::SubsetDelta;
  r.vertex.resize(dim);
  for (int j = 0; j < dim; ++j) r.vertex[j] = in_c[j] ? 1.0 : delta;
  for (int i : C) {
    Face f;
    f.pinned_index = i;
    f.pinned_value = 1.0;
    f.lo.resize(dim);
    f.hi.resize(dim);
    for (int j = 0; j < dim; ++j) {
      if (j == i) {
        f.lo[j] = f.hi[j] = 1.0;
      } else if (in_c[j]) {
        f.lo[j] = 1.0;
        f.hi[j] = U;
      } else {
        f.lo[j] = 0.0;
        f.hi[j] = delta;
      }
    }
    r.faces.push_back(std::move(f));
  }
  return r;
}

BoundaryRegion build_min_face(int dim, double U) {
  std::vector<int> all(dim);
  for (int i = 0; i < dim; ++i) all[i] = i;
  BoundaryRegion r = build_subset_boundary(dim, all, 0.0, U);
  r.kind = RegionKind::MinFace;
  return r;
}

double truncation_bound(const GaugeSpec& g, const RegionKind kind,
                        std::span<const double> vertex) {
  const int d = static_cast<int>(vertex.size());
  double best = kInf;
  const double gv = g(vertex);
  if (std::isfinite(gv)) best = gv;
  if (kind != RegionKind::SubsetDelta) {
    // all-equal point at the vertex maximum; the only finite candidate for
    // diagonal-degenerate gauges
    double mx = 0.0;
    for (double v : vertex) mx = std::max(mx, v);
    std::vector<double> diag(d, mx);
    const double gd = g(diag);
    if (std::isfinite(gd)) best = std::min(best, gd);
  }
  if (!std::isfinite(best)) {
    double mx = 0.0;
    for (double v : vertex) mx = std::max(mx, v);
    return std::max(2.0, 2.0 * mx);
  }
  return best + 1.0;
}

namespace {

// Clamped Nelder-Mead over a box. f may return +inf.
void nelder_mead(const std::function<double(std::span<const double>)>& f,
                 std::span<const double> lo, std::span<const double> hi,
                 std::vector<double>& x, double& fx, double step, int max_iter) {
  const int m = static_cast<int>(x.size());
  auto clamp = [&](std::vector<double>& p) {
    for (int i = 0; i < m; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
  };
  std::vector<std::vector<double>> pts(m + 1, x);
  std::vector<double> val(m + 1);
  for (int i = 0; i < m; ++i) {
    pts[i + 1][i] += (pts[i + 1][i] + step <= hi[i]) ? step : -step;
    clamp(pts[i + 1]);
  }
  for (int i = 0; i <= m; ++i) val[i] = f(pts[i]);
  std::vector<double> centroid(m), xr(m), xe(m), xc(m);
  for (int it = 0; it < max_iter; ++it) {
    // order
    std::vector<int> idx(m + 1);
    for (int i = 0; i <= m; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int best = idx[0], worst = idx[m], second = idx[m - 1];
    if (std::isfinite(val[best]) && std::isfinite(val[second]) &&
        val[second] - val[best] < 1e-14 * (1.0 + std::abs(val[best])))
      break;
    for (int j = 0; j < m; ++j) {
      double c = 0.0;
      for (int i = 0; i <= m; ++i)
        if (i != worst) c += pts[i][j];
      centroid[j] = c / m;
    }
    auto blend = [&](std::vector<double>& out, double t) {
      for (int j = 0; j < m; ++j) out[j] = centroid[j] + t * (centroid[j] - pts[worst][j]);
      clamp(out);
    };
    blend(xr, 1.0);
    const double fr = f(xr);
    if (fr < val[best]) {
      blend(xe, 2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
    } else if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
    } else {
      blend(xc, fr < val[worst] ? 0.5 : -0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, val[worst])) {
        pts[worst] = xc;
        val[worst] = fc;
      } else {
        for (int i = 0; i <= m; ++i) {
          if (i == best) continue;
          for (int j = 0; j < m; ++j) pts[i][j] = 0.5 * (pts[i][j] + pts[best][j]);
          clamp(pts[i]);
          val[i] = f(pts[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= m; ++i)
    if (val[i] < val[best]) best = i;
  if (val[best] < fx) {
    fx = val[best];
    x = pts[best];
  }
}

void golden_sweeps(const std::function<double(std::span<const double>)>& f,
                   std::span<const double> lo, std::span<const double> hi,
                   std::vector<double>& x, double& fx, int passes) {
  const int m = static_cast<int>(x.size());
  std::vector<double> p = x;
  for (int pass = 0; pass < passes; ++pass) {
    for (int j = 0; j < m; ++j) {
      if (hi[j] <= lo[j]) continue;
      auto f1 = [&](double t) {
        p[j] = t;
        return f(p);
      };
      auto [t, v] = detail::golden_min(f1, lo[j], hi[j], 90);
      if (v < fx) {
        fx = v;
        p[j] = t;
        x = p;
      } else {
        p[j] = x[j];
      }
    }
  }
}

}  // namespace

BoxMinResult minimize_box(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> lo, std::span<const double> hi,
                          const MinimizeOptions& opts,
                          std::span<const double> extra_candidates) {
  const int m = static_cast<int>(lo.size());
  BoxMinResult best;
  best.x.assign(lo.begin(), lo.end());
  best.value = f(best.x);
  auto consider = [&](std::span<const double> p, double v) {
    if (v < best.value) {
      best.value = v;
      best.x.assign(p.begin(), p.end());
    }
  };
  if (m == 0) return best;

  // extra candidate points (vertex, diagonal projection, ...)
  for (std::size_t off = 0; off + m <= extra_candidates.size(); off += m) {
    auto p = extra_candidates.subspan(off, m);
    consider(p, f(p));
  }

  if (m == 1) {
    auto f1 = [&](double t) {
      const double p[1] = {t};
      return f(std::span<const double>(p, 1));
    };
    auto [t, v] = detail::scan_refine_min(f1, lo[0], hi[0], std::max(2, opts.grid_points - 1), 90);
    const double p[1] = {t};
    consider(std::span<const double>(p, 1), v);
    return best;
  }

  // tensor grid scan (exact seeding for low dimension)
  const bool grid_seeded = m <= 3;
  std::vector<std::vector<double>> seeds;
  if (grid_seeded) {
    const int gp = opts.grid_points;
    std::int64_t total = 1;
    for (int j = 0; j < m; ++j) total *= gp;
    std::vector<double> vals(static_cast<std::size_t>(total));
    auto point_at = [&](std::int64_t flat, std::vector<double>& p) {
      for (int j = 0; j < m; ++j) {
        const int idx = static_cast<int>(flat % gp);
        flat /= gp;
        p[j] = (hi[j] > lo[j]) ? lo[j] + (hi[j] - lo[j]) * idx / (gp - 1) : lo[j];
      }
    };
    {
      std::vector<std::vector<double>> scratch(par::max_threads(), std::vector<double>(m));
      par::for_index(
          total,
          [&](std::int64_t i) {
#ifdef _OPENMP
            auto& p = scratch[omp_get_thread_num()];
#else
            auto& p = scratch[0];
#endif
            point_at(i, p);
            vals[static_cast<std::size_t>(i)] = f(p);
          },
          opts.parallel ? 256 : total + 1);
    }
    // best cell plus every grid-local minimum, capped
    std::vector<std::int64_t> cells;
    std::int64_t best_cell = 0;
    for (std::int64_t i = 1; i < total; ++i)
      if (vals[i] < vals[best_cell]) best_cell = i;
    cells.push_back(best_cell);
    auto neighbor = [&](std::int64_t flat, int j, int dir) -> std::int64_t {
      std::int64_t stride = 1;
      for (int q = 0; q < j; ++q) stride *= gp;
      const int idx = static_cast<int>((flat / stride) % gp);
      const int nidx = idx + dir;
      if (nidx < 0 || nidx >= gp) return -1;
      return flat + static_cast<std::int64_t>(dir) * stride;
    };
    std::vector<std::pair<double, std::int64_t>> local;
    for (std::int64_t i = 0; i < total; ++i) {
      if (!std::isfinite(vals[i])) continue;
      bool is_min = true;
      for (int j = 0; j < m && is_min; ++j)
        for (int dir = -1; dir <= 1 && is_min; dir += 2) {
          const std::int64_t nb = neighbor(i, j, dir);
          if (nb >= 0 && vals[static_cast<std::size_t>(nb)] < vals[i]) is_min = false;
        }
      if (is_min) local.emplace_back(vals[i], i);
    }
    std::sort(local.begin(), local.end());
    for (std::size_t q = 0; q < local.size() && q < 12; ++q)
      if (local[q].second != best_cell) cells.push_back(local[q].second);
    for (auto c : cells) {
      std::vector<double> p(m);
      point_at(c, p);
      seeds.push_back(std::move(p));
      consider(seeds.back(), vals[static_cast<std::size_t>(c)]);
    }
  }

  // random multistarts
  Rng rng(opts.seed);
  for (int r = 0; r < opts.restarts; ++r) {
    std::vector<double> p(m);
    for (int j = 0; j < m; ++j) p[j] = lo[j] + (hi[j] - lo[j]) * rng.uniform();
    seeds.push_back(std::move(p));
  }

  double cell = 0.0;
  for (int j = 0; j < m; ++j) cell = std::max(cell, (hi[j] - lo[j]) / (opts.grid_points - 1));
  for (auto& s : seeds) {
    std::vector<double> x = s;
    double fx = f(x);
    nelder_mead(f, lo, hi, x, fx, std::max(cell, 1e-6), 200 * m);
    golden_sweeps(f, lo, hi, x, fx, 2);
    consider(x, fx);
  }
  golden_sweeps(f, lo, hi, best.x, best.value, 1);
  return best;
}

namespace {

struct FaceResult {
  double value = kInf;
  std::vector<double> point;
};

FaceResult minimize_face(const GaugeSpec& g, const Face& face, const MinimizeOptions& opts,
                         std::uint64_t face_seed) {
  const int d = face.dim();
  const int pin = face.pinned_index;
  std::vector<int> free_ix;
  for (int j = 0; j < d; ++j)
    if (j != pin) free_ix.push_back(j);
  const int m = static_cast<int>(free_ix.size());

  std::vector<double> lo(m), hi(m);
  for (int q = 0; q < m; ++q) {
    lo[q] = face.lo[free_ix[q]];
    hi[q] = face.hi[free_ix[q]];
  }

  // candidates: vertex and the diagonal projection (all coordinates as close
  // to the pinned value as the box allows)
  std::vector<double> extras;
  for (int q = 0; q < m; ++q) extras.push_back(lo[q]);
  for (int q = 0; q < m; ++q)
    extras.push_back(std::clamp(face.pinned_value, lo[q], hi[q]));

  MinimizeOptions o = opts;
  o.seed = face_seed;
  // one start per linear piece when the family exposes its structure
  o.restarts = std::max(opts.restarts, g.piece_hint());

  struct Buf {
    std::vector<double> full;
  };
  std::vector<Buf> bufs(par::max_threads(), Buf{std::vector<double>(face.lo.begin(), face.lo.end())});
  auto f = [&](std::span<const double> free_pt) {
#ifdef _OPENMP
    auto& full = bufs[omp_get_thread_num()].full;
#else
    auto& full = bufs[0].full;
#endif
    full[pin] = face.pinned_value;
    for (int q = 0; q < m; ++q) full[free_ix[q]] = free_pt[q];
    return g(full);
  };

  MinimizeOptions box_opts = o;
  box_opts.parallel = opts.parallel;
  auto r = minimize_box(f, lo, hi, box_opts, extras);

  FaceResult out;
  out.value = r.value;
  out.point.assign(face.lo.begin(), face.lo.end());
  out.point[pin] = face.pinned_value;
  for (int q = 0; q < m; ++q) out.point[free_ix[q]] = r.x[q];
  return out;
}

}  // namespace

MinResult minimize(const GaugeSpec& g, const BoundaryRegion& region,
                   const MinimizeOptions& opts) {
  if (region.faces.empty()) throw std::invalid_argument("minimize: empty region");
  const int nf = static_cast<int>(region.faces.size());
  std::vector<FaceResult> results(nf);
  for (int i = 0; i < nf; ++i)
    results[i] = minimize_face(g, region.faces[i], opts,
                               Rng::derive(opts.seed, static_cast<std::uint64_t>(i)));

  MinResult best;
  best.certified_tol = (region.faces[0].dim() <= 4) ? opts.certified_tol : 1e-4;
  for (int i = 0; i < nf; ++i) {
    if (results[i].value < best.value) {
      best.value = results[i].value;
      best.argmin = results[i].point;
      best.face_index = i;
    }
  }
  if (!std::isfinite(best.value))
    throw std::domain_error("minimize: degenerate gauge on region (infinite on every face)");
  int near = 0;
  for (int i = 0; i < nf; ++i)
    if (results[i].value <= best.value + best.certified_tol * std::max(1.0, std::abs(best.value)))
      ++near;
  best.tie = near > 1;
  return best;
}

}  // namespace limitset
