#include "limitset/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "golden.hpp"
#include "limitset/stats.hpp"

namespace limitset {

using json = nlohmann::json;

double lambda_omega(const GaugeSpec& g, std::span<const double> omega,
                    const MinimizeOptions& opts) {
  double mx = 0.0;
  for (double w : omega) mx = std::max(mx, w);
  auto region = build_omega_boundary(omega, 1.0);
  const double U = truncation_bound(g, RegionKind::Omega, region.vertex);
  region = build_omega_boundary(omega, U);
  const auto m = minimize(g, region, opts);
  const double raw = mx * m.value;
  const double clamped = std::clamp(raw, mx, 1.0);
  if (std::abs(raw - clamped) > 1e-9)
    std::fprintf(stderr, "lambda_omega: clamped %.12g into [%.12g, 1]\n", raw, mx);
  return clamped;
}

double eta_coeff(const GaugeSpec& g, const std::vector<int>& C, const MinimizeOptions& opts) {
  if (C.empty()) throw std::invalid_argument("eta: C must be nonempty");
  if (static_cast<int>(C.size()) < g.dim()) {
    const GaugeSpec gm = marginalize(g, C);
    std::vector<int> all(gm.dim());
    for (int i = 0; i < gm.dim(); ++i) all[i] = i;
    return eta_coeff(gm, all, opts);
  }
  auto region = build_min_face(g.dim(), 2.0);
  const double U = truncation_bound(g, RegionKind::MinFace, region.vertex);
  region = build_min_face(g.dim(), U);
  const auto m = minimize(g, region, opts);
  return std::clamp(1.0 / m.value, 0.0, 1.0);
}

double tau_coeff(const GaugeSpec& g, const std::vector<int>& C, double delta,
                 const MinimizeOptions& opts) {
  if (C.empty()) throw std::invalid_argument("tau: C must be nonempty");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("tau: delta in [0,1]");
  if (static_cast<int>(C.size()) == g.dim()) return eta_coeff(g, C, opts);
  auto region = build_subset_boundary(g.dim(), C, delta, 2.0);
  const double U = truncation_bound(g, RegionKind::SubsetDelta, region.vertex);
  region = build_subset_boundary(g.dim(), C, delta, U);
  try {
    const auto m = minimize(g, region, opts);
    return std::clamp(1.0 / m.value, 0.0, 1.0);
  } catch (const std::domain_error&) {
    // infinite on the whole boundary: faster-than-any-power decay
    return 0.0;
  }
}

// ---------------------------------------------------------------------------
// marginalization

namespace {

GaugeSpec numeric_marginal(const GaugeSpec& g, const std::vector<int>& keep) {
  std::vector<int> dropped;
  std::vector<bool> kept(g.dim(), false);
  for (int i : keep) kept[i] = true;
  for (int i = 0; i < g.dim(); ++i)
    if (!kept[i]) dropped.push_back(i);

  const int m = static_cast<int>(keep.size());
  auto parent = g;  // shared immutable payload
  auto keep_ix = keep;
  auto drop_ix = dropped;
  auto fn = [parent, keep_ix, drop_ix](std::span<const double> y) -> double {
    const int d = parent.dim();
    std::vector<double> full(static_cast<std::size_t>(d), 0.0);
    for (std::size_t q = 0; q < keep_ix.size(); ++q) full[keep_ix[q]] = y[q];
    // dominance bound: dropped coordinates of a minimizer never exceed the
    // value at any feasible candidate
    double cap = parent(full);  // dropped at zero
    double mx = 0.0;
    for (double v : y) mx = std::max(mx, v);
    for (int i : drop_ix) full[i] = mx;  // all-equal extension
    const double diag = parent(full);
    cap = std::min(cap, diag);
    for (int i : drop_ix) full[i] = 0.0;
    if (!std::isfinite(cap)) return kInf;
    const double hi_box = cap + 1.0;

    double best = cap;
    if (parent.extended_valued() && drop_ix.size() > 1) {
      // the all-equal ray is the canonical finite direction of
      // diagonal-degenerate blocks; search along it explicitly
      auto fd = [&](double t) {
        for (int i : drop_ix) full[i] = t;
        return parent(full);
      };
      best = std::min(best, detail::scan_refine_min(fd, 0.0, hi_box, 64, 110).second);
      for (int i : drop_ix) full[i] = 0.0;
    }
    if (drop_ix.size() == 1) {
      auto f1 = [&](double t) {
        full[drop_ix[0]] = t;
        return parent(full);
      };
      best = std::min(best, f1(std::min(mx, hi_box)));
      auto [t, v] = detail::scan_refine_min(f1, 0.0, hi_box, 64, 110);
      (void)t;
      return std::min(best, v);
    }
    std::vector<double> lo(drop_ix.size(), 0.0), hi(drop_ix.size(), hi_box);
    std::vector<double> extras(drop_ix.size(), std::min(mx, hi_box));
    MinimizeOptions o;
    o.grid_points = 17;
    o.restarts = 4;
    o.parallel = false;
    auto f = [&](std::span<const double> t) {
      for (std::size_t q = 0; q < drop_ix.size(); ++q) full[drop_ix[q]] = t[q];
      return parent(full);
    };
    return std::min(best, minimize_box(f, lo, hi, o, extras).value);
  };
  return GaugeSpec::custom(m, fn, "marginal(" + g.label() + ")");
}

}  // namespace

GaugeSpec marginalize(const GaugeSpec& g, std::vector<int> keep, bool shortcuts) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty()) throw std::invalid_argument("marginalize: keep must be nonempty");
  for (int i : keep)
    if (i < 0 || i >= g.dim()) throw std::invalid_argument("marginalize: index out of range");
  if (static_cast<int>(keep.size()) == g.dim()) return g;  // identity

  if (shortcuts) {
    // one kept coordinate: the margin is standardized, so the limit set is
    // the unit interval
    if (keep.size() == 1) return GaugeSpec::independence(1);
    switch (g.family()) {
      case GaugeFamily::Gaussian: {
        const int d = g.dim(), m = static_cast<int>(keep.size());
        const auto& corr = g.matrix();
        std::vector<double> sub(static_cast<std::size_t>(m) * m);
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b)
            sub[static_cast<std::size_t>(a) * m + b] =
                corr[static_cast<std::size_t>(keep[a]) * d + keep[b]];
        return GaugeSpec::gaussian(m, std::move(sub));
      }
      case GaugeFamily::InvertedLogistic:
        return GaugeSpec::inverted_logistic(g.param("theta"), static_cast<int>(keep.size()));
      case GaugeFamily::Independence:
        return GaugeSpec::independence(static_cast<int>(keep.size()));
      case GaugeFamily::MaxOnly:
        return GaugeSpec::max_only(static_cast<int>(keep.size()));
      case GaugeFamily::HuslerReissGP:
        return GaugeSpec::husler_reiss_gp(static_cast<int>(keep.size()));
      case GaugeFamily::Vine3:
        if (keep == std::vector<int>{0, 1}) return GaugeSpec::independence(2);
        break;
      case GaugeFamily::HWMix:
        return GaugeSpec::hw_mix(marginalize(g.inner(), keep, true), g.param("gamma"));
      case GaugeFamily::Additive: {
        // blocks are independent, so the minimum distributes over them;
        // fully dropped blocks contribute zero at the origin
        std::vector<GaugeSpec> parts;
        int off = 0;
        for (const auto& b : g.blocks()) {
          std::vector<int> local;
          for (int i : keep)
            if (i >= off && i < off + b.dim()) local.push_back(i - off);
          if (!local.empty()) {
            if (static_cast<int>(local.size()) == b.dim())
              parts.push_back(b);
            else
              parts.push_back(marginalize(b, local, true));
          }
          off += b.dim();
        }
        if (!parts.empty()) return GaugeSpec::additive(std::move(parts));
        break;
      }
      default:
        break;
    }
  }
  return numeric_marginal(g, keep);
}

// ---------------------------------------------------------------------------
// conditional extremes exponents

namespace {

// Cancellation-aware excess h(a) = g(x_j = 1, x_i = a) - 1 >= 0, routed
// through the family form when one exists.
struct FaceExcess {
  const GaugeSpec* g;
  int pinned, other;
  double operator()(double a) const { return g->face_excess(pinned, other, a); }
};

std::pair<GaugeSpec, std::pair<int, int>> bivariate_view(const GaugeSpec& g, int cond,
                                                         int other) {
  if (g.dim() == 2) {
    if (other < 0) other = 1 - cond;
    return {g, {cond, other}};
  }
  if (other < 0) throw std::invalid_argument("cond: other_index required for dim > 2");
  std::vector<int> keep{std::min(cond, other), std::max(cond, other)};
  GaugeSpec gm = marginalize(g, keep);
  const int pin = cond < other ? 0 : 1;
  return {gm, {pin, 1 - pin}};
}

}  // namespace

ContactResult cond_alpha(const GaugeSpec& g, int cond_index, int other_index) {
  if (cond_index < 0 || cond_index >= g.dim())
    throw std::invalid_argument("cond_alpha: conditioning index out of range");
  auto [gv, ix] = bivariate_view(g, cond_index, other_index);
  FaceExcess h{&gv, ix.first, ix.second};

  constexpr int kGrid = 4096;
  std::vector<double> a(kGrid + 1), v(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    a[i] = static_cast<double>(i) / kGrid;
    v[i] = h(a[i]);
  }

  struct Cand {
    double alpha;
    double lo;      // start of contact run (for flat contacts)
    bool from_run;
  };
  std::vector<Cand> cands;

  // floating-point-zero runs of the excess: flat pieces of the contact set.
  // The run edge is bisected between a contact and a non-contact abscissa,
  // moving the contact end toward the other.
  auto refine_edge = [&](double a_contact, double a_outside) {
    for (int it = 0;
         it < 80 && std::abs(a_outside - a_contact) > 4e-16 * (1.0 + std::abs(a_outside));
         ++it) {
      const double mid = 0.5 * (a_contact + a_outside);
      if (h(mid) <= 0.0)
        a_contact = mid;
      else
        a_outside = mid;
    }
    return a_contact;
  };
  int i = 0;
  while (i <= kGrid) {
    if (v[i] <= 0.0) {
      int j = i;
      while (j + 1 <= kGrid && v[j + 1] <= 0.0) ++j;
      const double left = (i > 0) ? refine_edge(a[i], a[i - 1]) : a[i];
      const double right = (j < kGrid) ? refine_edge(a[j], a[j + 1]) : a[j];
      cands.push_back({right, left, j > i || right - left > 1e-9});
      i = j + 1;
    } else {
      ++i;
    }
  }

  // isolated contact points between grid nodes: refine every strictly
  // positive local minimum and accept it when the refined excess vanishes
  // to within solver resolution
  for (int k = 1; k < kGrid; ++k) {
    if (!(v[k] > 0.0) || !std::isfinite(v[k])) continue;
    if (v[k] <= v[k - 1] && v[k] <= v[k + 1]) {
      auto [am, vm] = detail::golden_min(h, a[k - 1], a[k + 1], 110);
      if (vm <= 1e-10) cands.push_back({am, am, false});
    }
  }

  if (cands.empty())
    throw std::runtime_error(
        "cond_alpha: no level-1 contact on the unit face (gauge violates the contact "
        "invariant)");

  ContactResult out;
  const auto best =
      *std::max_element(cands.begin(), cands.end(),
                        [](const Cand& x, const Cand& y) { return x.alpha < y.alpha; });
  out.alpha = best.alpha;
  out.interval_lo = best.from_run ? best.lo : best.alpha;
  out.interval_hi = best.alpha;
  out.flat = best.from_run && (out.interval_hi - out.interval_lo > 1e-9);
  if (out.flat && out.interval_lo < 1e-9 && out.alpha > 1.0 - 1e-9)
    out.note = "face lies at level 1 throughout; conditional limit may be degenerate";
  return out;
}

BetaResult cond_beta(const GaugeSpec& g, int cond_index, int other_index,
                     std::optional<double> alpha_in) {
  auto [gv, ix] = bivariate_view(g, cond_index, other_index);
  FaceExcess h{&gv, ix.first, ix.second};
  double alpha;
  if (alpha_in) {
    alpha = *alpha_in;
  } else {
    alpha = cond_alpha(g, cond_index, other_index).alpha;
  }

  BetaResult r;
  constexpr int kPts = 20;
  std::vector<double> lx, ly;
  const bool noisy = gv.family() == GaugeFamily::Custom || gv.family() == GaugeFamily::HWMix;
  const double floor = noisy ? 1e-11 : 1e-290;
  int infinite = 0;
  for (int k = 0; k < kPts; ++k) {
    const double u = 1e-6 * std::pow(1e4, static_cast<double>(k) / (kPts - 1));
    const double y = h(alpha + u);
    if (y == kInf) {
      ++infinite;
      continue;
    }
    if (y > floor) {
      lx.push_back(std::log(u));
      ly.push_back(std::log(y));
    }
  }
  if (infinite == kPts) {
    r.note = "extended-valued off the contact point";
    return r;
  }
  if (lx.size() < 8) {
    r.note = "remainder below numerical resolution on the u-grid";
    return r;
  }
  const LineFit fit = fit_line(lx, ly);
  r.rv_index = fit.slope;
  r.r2 = fit.r2;
  r.curvature = fit_quadratic_curvature(lx, ly);
  if (r.curvature < -0.02) {
    // remainder decays faster than any power: the scale exponent saturates
    r.determined = true;
    r.beta = 1.0;
    r.note = "rapidly varying remainder";
    return r;
  }
  if (fit.r2 < 0.999) {
    r.note = "log-log fit not linear";
    return r;
  }
  r.determined = true;
  r.beta = 1.0 - 1.0 / fit.slope;
  if (alpha < 1e-9) {
    // partial derivative along the face at the axis
    const double d2 = h(1e-7) / 1e-7;
    if (d2 < 1e-3) r.note = "contact on the axis with vanishing face slope; sign of the scale exponent not guaranteed";
  }
  return r;
}

// ---------------------------------------------------------------------------
// batch summary

std::vector<std::vector<double>> default_omega_grid(int dim, int points_per_edge) {
  std::vector<std::vector<double>> grid;
  if (dim == 2) {
    for (int i = 0; i < points_per_edge; ++i) {
      const double w = static_cast<double>(i) / (points_per_edge - 1);
      grid.push_back({w, 1.0 - w});
    }
    return grid;
  }
  // barycentric lattice
  const int n = points_per_edge - 1;
  if (dim == 3) {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j)
        grid.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n,
                        static_cast<double>(n - i - j) / n});
    return grid;
  }
  throw std::invalid_argument("default_omega_grid: dim must be 2 or 3");
}

DependenceSummary summarize(const GaugeSpec& g, const SummarizeOptions& opts_in) {
  SummarizeOptions opts = opts_in;
  const int d = g.dim();
  if (opts.omega_grid.empty()) opts.omega_grid = default_omega_grid(d, d == 2 ? 21 : 11);
  if (opts.delta_grid.empty()) {
    for (int i = 0; i <= 20; ++i) opts.delta_grid.push_back(i / 20.0);
  }
  if (opts.subsets.empty()) {
    for (int mask = 1; mask < (1 << d); ++mask) {
      std::vector<int> C;
      for (int i = 0; i < d; ++i)
        if (mask & (1 << i)) C.push_back(i);
      opts.subsets.push_back(std::move(C));
    }
  }

  DependenceSummary s;
  try {
    s.model_json = g.to_json().dump();
  } catch (const std::exception&) {
    s.model_json = json{{"family", "custom"}, {"dim", d}, {"label", g.label()}}.dump();
  }

  auto guard = [&s](const std::string& what, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      s.errors.push_back(what + ": " + e.what());
    }
  };

  for (const auto& w : opts.omega_grid)
    guard("lambda(" + json(w).dump() + ")",
          [&] { s.lambda_values.emplace_back(w, lambda_omega(g, w, opts.min_opts)); });

  for (const auto& C : opts.subsets) {
    if (C.size() < 2) continue;
    guard("eta(" + json(C).dump() + ")",
          [&] { s.eta_values[C] = eta_coeff(g, C, opts.min_opts); });
  }

  for (const auto& C : opts.subsets) {
    if (static_cast<int>(C.size()) == d) {
      guard("tau(D)", [&] {
        const double v = eta_coeff(g, C, opts.min_opts);
        for (double del : opts.delta_grid) s.tau_values[{C, del}] = v;
      });
      continue;
    }
    for (double del : opts.delta_grid)
      guard("tau(" + json(C).dump() + "," + std::to_string(del) + ")",
            [&] { s.tau_values[{C, del}] = tau_coeff(g, C, del, opts.min_opts); });
  }

  if (opts.conditionals) {
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        if (i == j) continue;
        guard("cond(" + std::to_string(j) + "," + std::to_string(i) + ")", [&] {
          CondEntry e;
          e.contact = cond_alpha(g, j, i);
          e.beta = cond_beta(g, j, i, e.contact.alpha);
          s.cond[{j, i}] = std::move(e);
        });
      }
  }
  return s;
}

json DependenceSummary::model() const { return json::parse(model_json); }

json DependenceSummary::to_json() const {
  json j;
  j["model"] = model();
  json jl = json::array();
  for (const auto& [w, v] : lambda_values) jl.push_back({{"omega", w}, {"value", v}});
  j["lambda"] = std::move(jl);
  json je = json::array();
  for (const auto& [C, v] : eta_values) je.push_back({{"C", C}, {"value", v}});
  j["eta"] = std::move(je);
  json jt = json::array();
  for (const auto& [key, v] : tau_values)
    jt.push_back({{"C", key.first}, {"delta", key.second}, {"value", v}});
  j["tau"] = std::move(jt);
  json jc = json::array();
  for (const auto& [key, e] : cond) {
    json row{{"cond", key.first},
             {"other", key.second},
             {"alpha", e.contact.alpha},
             {"alpha_interval", {e.contact.interval_lo, e.contact.interval_hi}},
             {"flat", e.contact.flat}};
    if (e.beta.determined)
      row["beta"] = e.beta.beta;
    else
      row["beta"] = "undetermined";
    row["beta_note"] = e.beta.note;
    if (!e.contact.note.empty()) row["alpha_note"] = e.contact.note;
    jc.push_back(std::move(row));
  }
  j["cond"] = std::move(jc);
  j["errors"] = errors;
  return j;
}

std::string DependenceSummary::to_csv() const {
  std::ostringstream os;
  os << "quantity,index_json,value\n";
  auto emit = [&os](const std::string& q, const json& idx, const json& val) {
    std::string ix = idx.dump();
    // quote the embedded commas
    std::string quoted = "\"";
    for (char c : ix) {
      if (c == '"') quoted += "\"\"";
      else quoted += c;
    }
    quoted += "\"";
    os << q << "," << quoted << ","
       << (val.is_string() ? val.get<std::string>() : val.dump()) << "\n";
  };
  for (const auto& [w, v] : lambda_values) emit("lambda", json{{"omega", w}}, v);
  for (const auto& [C, v] : eta_values) emit("eta", json{{"C", C}}, v);
  for (const auto& [key, v] : tau_values)
    emit("tau", json{{"C", key.first}, {"delta", key.second}}, v);
  for (const auto& [key, e] : cond) {
    emit("alpha", json{{"cond", key.first}, {"other", key.second}}, e.contact.alpha);
    emit("beta", json{{"cond", key.first}, {"other", key.second}},
         e.beta.determined ? json(e.beta.beta) : json("undetermined"));
  }
  return os.str();
}

}  // namespace limitset
