// Acceptance suite: one line per criterion, tolerances pinned in code.
// Usage: acceptance [--only 1,2,...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "limitset/estimation.hpp"
#include "limitset/measures.hpp"
#include "limitset/rng.hpp"
#include "limitset/mixtures.hpp"
#include "limitset/sampling.hpp"
#include "limitset/stats.hpp"
#include "limitset/study.hpp"

using namespace limitset;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  bool ok = true;
  int total = 0, failed = 0;
  double worst = 0.0;
  std::string worst_what;

  void expect(double got, double want, double tol, const std::string& what) {
    ++total;
    const double err = std::abs(got - want);
    if (err > worst) {
      worst = err;
      worst_what = what;
    }
    if (err > tol) {
      ok = false;
      ++failed;
      if (failed <= 5)
        std::fprintf(stderr, "    miss: %s got %.8f want %.8f (err %.2e > tol %.0e)\n",
                     what.c_str(), got, want, err, tol);
    }
  }
  void require(bool cond, const std::string& what) {
    ++total;
    if (!cond) {
      ok = false;
      ++failed;
      if (failed <= 5) std::fprintf(stderr, "    miss: %s\n", what.c_str());
    }
  }
  Outcome outcome(const std::string& extra = "") const {
    std::ostringstream os;
    os << total - failed << "/" << total << " checks";
    if (!extra.empty()) os << "; " << extra;
    if (failed == 0 && total > 0)
      os << "; worst |err| " << worst << " at " << worst_what;
    return {ok, os.str()};
  }
};

// ---------------------------------------------------------------------------
// closed-form oracles for the bivariate catalog rows

struct Row {
  std::string name;
  GaugeSpec gauge;
  std::function<double(double)> lambda;  // omega -> value
  double eta;
  std::function<double(double)> tau1;  // delta -> value
  double alpha;
  double beta;
};

std::vector<Row> table_rows() {
  std::vector<Row> rows;
  for (double rho : {0.25, 0.5, 0.75}) {
    rows.push_back(Row{
        "gaussian(" + std::to_string(rho) + ")", GaugeSpec::gaussian2(rho),
        [rho](double w) {
          const double mn = std::min(w, 1 - w), mx = std::max(w, 1 - w);
          if (mn / mx <= rho * rho) return mx;
          return (1 - 2 * rho * std::sqrt(w * (1 - w))) / (1 - rho * rho);
        },
        (1 + rho) / 2,
        [rho](double d) {
          if (d >= rho * rho) return 1.0;
          return (1 - rho * rho) / (1 + d - 2 * rho * std::sqrt(d));
        },
        rho * rho, 0.5});
  }
  for (double th : {0.3, 0.5, 0.7}) {
    rows.push_back(Row{"logistic_gp(" + std::to_string(th) + ")", GaugeSpec::logistic_gp(th),
                       [](double w) { return std::max(w, 1 - w); }, 1.0,
                       [th](double d) { return 1.0 / (1.0 / th + (1.0 - 1.0 / th) * d); },
                       1.0, 0.0});
  }
  for (double th : {0.3, 0.5, 0.7}) {
    rows.push_back(Row{"inverted_logistic(" + std::to_string(th) + ")",
                       GaugeSpec::inverted_logistic(th),
                       [th](double w) {
                         return std::pow(std::pow(w, 1 / th) + std::pow(1 - w, 1 / th), th);
                       },
                       std::pow(2.0, -th), [](double) { return 1.0; }, 0.0, 1.0 - th});
  }
  for (double l : {0.5, 1.0, 2.0}) {
    rows.push_back(Row{"inverted_husler_reiss(" + std::to_string(l) + ")",
                       GaugeSpec::inverted_husler_reiss(l),
                       [l](double w) {
                         if (w == 0.0 || w == 1.0) return 1.0;
                         const double a = 0.5 * l + std::log(w / (1 - w)) / l;
                         return w * norm_cdf(a) + (1 - w) * norm_cdf(l - a);
                       },
                       1.0 / (2.0 * norm_cdf(l / 2)), [](double) { return 1.0; }, 0.0, 1.0});
  }
  return rows;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Check c;
  for (const auto& row : table_rows()) {
    for (int i = 0; i <= 20; ++i) {
      const double w = i / 20.0;
      c.expect(lambda_omega(row.gauge, std::vector<double>{w, 1 - w}), row.lambda(w), 1e-4,
               row.name + " lambda(" + std::to_string(w) + ")");
    }
    c.expect(eta_coeff(row.gauge, {0, 1}), row.eta, 1e-4, row.name + " eta");
    for (int i = 0; i <= 20; ++i) {
      const double d = i / 20.0;
      c.expect(tau_coeff(row.gauge, {0}, d), row.tau1(d), 1e-4,
               row.name + " tau(" + std::to_string(d) + ")");
    }
    const auto a = cond_alpha(row.gauge, 0);
    c.expect(a.alpha, row.alpha, 1e-4, row.name + " alpha");
    const auto b = cond_beta(row.gauge, 0, -1, a.alpha);
    c.require(b.determined, row.name + " beta determined");
    if (b.determined) c.expect(b.beta, row.beta, 5e-3, row.name + " beta");
  }
  return c.outcome();
}

Outcome criterion2() {
  Check c;
  std::vector<GaugeSpec> cat = {
      GaugeSpec::gaussian2(0.25),
      GaugeSpec::gaussian2(0.5),
      GaugeSpec::gaussian2(0.75),
      GaugeSpec::logistic_gp(0.3),
      GaugeSpec::logistic_gp(0.5),
      GaugeSpec::logistic_gp(0.7),
      GaugeSpec::inverted_logistic(0.3),
      GaugeSpec::inverted_logistic(0.5),
      GaugeSpec::inverted_logistic(0.7),
      GaugeSpec::inverted_husler_reiss(0.5),
      GaugeSpec::inverted_husler_reiss(1.0),
      GaugeSpec::inverted_husler_reiss(2.0),
      GaugeSpec::husler_reiss_gp(2),
      GaugeSpec::mixture(0.3, 0.6),
      GaugeSpec::triangle(0.4, 0.3),
      GaugeSpec::triangle(0.5),
      GaugeSpec::independence(2),
      GaugeSpec::max_only(2),
      GaugeSpec::gaussian(3, {1, .75, .25, .75, 1, .4, .25, .4, 1}),
      GaugeSpec::vine3(1.0, 1.0),
      GaugeSpec::vine3(2.0, 0.5),
      GaugeSpec::independence(3),
      GaugeSpec::max_only(3),
      GaugeSpec::inverted_logistic(0.5, 3),
      GaugeSpec::husler_reiss_gp(3),
  };
  for (const auto& g : cat) {
    const int d = g.dim();
    std::vector<int> all(d);
    for (int i = 0; i < d; ++i) all[i] = i;
    const double eta = eta_coeff(g, all);
    const double lam = lambda_omega(g, std::vector<double>(d, 1.0 / d));
    c.expect(d * lam * eta, 1.0, 1e-8, std::string(family_name(g.family())) + " identity");
  }
  return c.outcome();
}

Outcome criterion3() {
  Check c;
  {
    auto gm = marginalize(GaugeSpec::vine3(1.0, 1.0), {0, 1}, /*shortcuts=*/false);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double x = 0.1 + 0.15 * i, y = 0.1 + 0.15 * j;
        const double p[2] = {x, y};
        worst = std::max(worst, std::abs(gm(std::span<const double>(p, 2)) - (x + y)));
      }
    c.require(worst <= 1e-6, "vine margin vs additive pair, worst " + std::to_string(worst));
  }
  {
    auto gm = marginalize(GaugeSpec::gaussian(3, {1, .75, .25, .75, 1, .4, .25, .4, 1}), {1, 2},
                          /*shortcuts=*/false);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double x = 0.15 + 0.15 * i, y = 0.15 + 0.15 * j;
        const double p[2] = {x, y};
        const double direct = (x + y - 2 * 0.4 * std::sqrt(x * y)) / (1 - 0.16);
        worst = std::max(worst, std::abs(gm(std::span<const double>(p, 2)) - direct));
      }
    c.require(worst <= 1e-4,
              "gaussian pair margin vs closed form, worst " + std::to_string(worst));
  }
  return c.outcome();
}

Outcome criterion4() {
  Check c;
  const double th = 0.5;
  auto g = GaugeSpec::triangle(th);
  const auto a = cond_alpha(g, 0);
  c.expect(a.alpha, 1.0 - th, 1e-4, "alpha");
  const auto b = cond_beta(g, 0, -1, a.alpha);
  c.require(b.determined, "beta determined");
  if (b.determined) c.expect(b.beta, 0.0, 5e-3, "beta");
  c.expect(eta_coeff(g, {0, 1}), 1.0 - th / 2, 1e-4, "eta");
  for (int i = 0; i <= 20; ++i) {
    const double w = i / 20.0;
    const double mn = std::min(w, 1 - w), mx = std::max(w, 1 - w);
    const double truth = (mx == 0.0 || mn / mx <= 1 - th) ? mx : 1.0 / (2.0 - th);
    c.expect(lambda_omega(g, std::vector<double>{w, 1 - w}), truth, 1e-4,
             "lambda(" + std::to_string(w) + ")");
  }
  return c.outcome();
}

Outcome criterion5() {
  Check c;
  struct Component {
    std::string name;
    GaugeSpec g;
    double eta_v;
  };
  const std::vector<Component> comps = {
      {"inverted_logistic(0.5)", GaugeSpec::inverted_logistic(0.5), std::pow(2.0, -0.5)},
      {"gaussian(0.5)", GaugeSpec::gaussian2(0.5), 0.75},
  };
  for (const auto& comp : comps) {
    for (int i = 1; i <= 21; ++i) {
      const double gamma = static_cast<double>(i) / 22.0;
      auto gx = hw_mix_gauge({comp.g, gamma});
      const double want = gamma < comp.eta_v ? comp.eta_v : gamma;
      c.expect(eta_coeff(gx, {0, 1}), want, 1e-4,
               comp.name + " eta_mix(" + std::to_string(gamma) + ")");
    }
    const double alpha_v = cond_alpha(comp.g, 0).alpha;
    const double alpha_x = cond_alpha(hw_mix_gauge({comp.g, 0.5}), 0).alpha;
    c.require(std::abs(alpha_x - alpha_v) <= 1e-6,
              comp.name + " alpha preserved (|diff| = " + std::to_string(alpha_x - alpha_v) +
                  ")");
  }
  {
    const auto r = hw_beta_check({GaugeSpec::gaussian2(0.5), 0.5});
    c.require(r.beta_v.determined && r.beta_x.determined && r.beta_match,
              "scale exponent match, differentiable contact");
    c.require(r.v_differentiable_at_contact && r.remainder_ratio > 0.99 &&
                  r.remainder_ratio < 1.01,
              "remainder ratio near one, differentiable contact");
  }
  {
    const auto r = hw_beta_check({GaugeSpec::triangle(0.4, 0.3), 0.8});
    c.require(r.beta_v.determined && r.beta_x.determined && r.beta_match,
              "scale exponent match, kinked contact");
    c.require(!r.v_differentiable_at_contact && r.deriv_limit < 0.0,
              "kinked contact classified");
  }
  {
    // small weight: the derivative limit stays positive and the inner
    // minimizer never leaves zero
    const auto r = hw_beta_check({GaugeSpec::triangle(0.4, 0.3), 0.1});
    c.require(r.deriv_limit > 0.0 && r.inner_minimizer_stays_zero,
              "inner minimizer pinned at zero for small weight");
  }
  return c.outcome();
}

Outcome criterion6() {
  Check c;
  const std::int64_t n = 1000000;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);

  ModelSpec model = ModelSpec::meta_gaussian2(0.5);
  model.margins = Margins::Pareto;
  const double tau_truth = tau_coeff(model.gauge(), {0}, 0.1);

  EstimatorConfig cfg;
  cfg.bootstrap = 0;

  int eta_in = 0, lam_in = 0, tau_in = 0;
  for (std::uint64_t seed : seeds) {
    cfg.seed = seed;
    const auto cloud_p = sample(model, n, seed);
    const auto e = hill_eta(cloud_p, {0, 1}, cfg);
    if (std::abs(e.value - 0.75) <= 0.05) ++eta_in;
    const auto t = tau_hat(cloud_p, {0}, 0.1, cfg);
    if (std::abs(t.value - tau_truth) <= 0.06) ++tau_in;
    const auto cloud_e = to_exponential(cloud_p);
    const auto l = lambda_hat(cloud_e, std::vector<double>{0.5, 0.5}, cfg);
    if (std::abs(l.value - 2.0 / 3.0) <= 0.08 * 2.0 / 3.0) ++lam_in;
  }
  c.require(eta_in >= 18, "eta within 0.75 +- 0.05 in " + std::to_string(eta_in) + "/20");
  c.require(lam_in >= 18,
            "lambda within 2/3 (1 +- 0.08) in " + std::to_string(lam_in) + "/20");
  c.require(tau_in >= 18, "tau within +-0.06 in " + std::to_string(tau_in) + "/20");
  return c.outcome("eta " + std::to_string(eta_in) + "/20, lambda " + std::to_string(lam_in) +
                   "/20, tau " + std::to_string(tau_in) + "/20");
}

Outcome criterion7() {
  Check c;
  struct Cell {
    ModelSpec model;
    double delta;
  };
  std::vector<Cell> cells;
  for (double d : {0.4, 0.7, 1.0}) cells.push_back({ModelSpec::meta_gaussian2(0.5), d});
  for (double d : {0.7, 1.0}) cells.push_back({ModelSpec::logistic_gp(0.5), d});
  for (double d : {0.1, 0.4, 0.7, 1.0})
    cells.push_back({ModelSpec::inverted_logistic(0.5), d});

  const std::int64_t n = 500000;
  EstimatorConfig cfg;
  cfg.bootstrap = 80;
  int pass = 0, total = 0;
  for (const auto& cell : cells) {
    ModelSpec m = cell.model;
    m.margins = Margins::Pareto;
    const auto cloud = sample(m, n, 0xce11 + total);
    for (int ci : {0, 1}) {
      ++total;
      try {
        const auto a = tau_hat(cloud, {ci}, cell.delta, cfg);
        const auto b = tau_hat_fixed_threshold(cloud, {ci}, cell.delta, cfg);
        const double z = std::abs(a.raw - b.raw) / std::hypot(a.se, b.se);
        if (z <= 2.0) ++pass;
      } catch (const std::exception& e) {
        std::fprintf(stderr, "    cell failed: %s\n", e.what());
      }
    }
  }
  const double rate = static_cast<double>(pass) / total;
  c.require(rate >= 0.9, "agreement rate " + std::to_string(rate));
  return c.outcome(std::to_string(pass) + "/" + std::to_string(total) + " cells agree");
}

Outcome criterion8() {
  Check c;
  struct Panel {
    std::string name;
    ModelSpec model;
  };
  const std::vector<Panel> panels = {
      {"meta_gaussian(0)", ModelSpec::meta_gaussian2(0.0)},
      {"meta_gaussian(0.5)", ModelSpec::meta_gaussian2(0.5)},
      {"density(triangle 0.5)", ModelSpec::density_from_gauge(GaugeSpec::triangle(0.5))},
  };
  for (const auto& panel : panels) {
    const auto g = panel.model.gauge();
    const LevelSetMesh mesh = level_set_mesh(g);
    std::vector<double> medians;
    for (std::int64_t n : {1000, 10000, 100000}) {
      std::vector<double> d;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto cloud = sample(panel.model, n, seed);
        d.push_back(hausdorff_to_limit_set(scale_cloud(cloud), g, mesh));
      }
      medians.push_back(median_inplace(d));
    }
    const bool dec = medians[0] > medians[1] && medians[1] > medians[2];
    std::ostringstream os;
    os << panel.name << " medians " << medians[0] << " > " << medians[1] << " > " << medians[2];
    c.require(dec, os.str());
  }
  return c.outcome();
}

Outcome criterion9() {
  Check c;
  const std::vector<GaugeSpec> cat = {
      GaugeSpec::gaussian2(0.5),         GaugeSpec::logistic_gp(0.5),
      GaugeSpec::inverted_logistic(0.5), GaugeSpec::inverted_husler_reiss(1.0),
      GaugeSpec::mixture(0.3, 0.6),      GaugeSpec::triangle(0.4, 0.3),
      GaugeSpec::triangle(0.5),          GaugeSpec::independence(2),
      GaugeSpec::max_only(2),            GaugeSpec::husler_reiss_gp(2),
      GaugeSpec::vine3(1.0, 1.0),
      GaugeSpec::gaussian(3, {1, .75, .25, .75, 1, .4, .25, .4, 1}),
  };
  Rng rng(2718);
  for (const auto& g : cat) {
    const int d = g.dim();
    const bool diag_only = g.family() == GaugeFamily::HuslerReissGP;
    // homogeneity on 1000 random rays
    {
      bool ok = true;
      std::vector<double> x(d), tx(d);
      for (int r = 0; r < 1000 && ok; ++r) {
        if (diag_only) {
          const double v = 0.05 + 3 * rng.uniform();
          for (auto& xi : x) xi = v;
        } else {
          for (auto& xi : x) xi = 3 * rng.uniform();
        }
        const double t = 0.05 + 4 * rng.uniform();
        for (int i = 0; i < d; ++i) tx[i] = t * x[i];
        const double g1 = g(x), g2 = g(tx);
        if (std::isfinite(g1))
          ok = std::abs(g2 - t * g1) <= 1e-12 * std::max(1.0, std::abs(t * g1));
      }
      c.require(ok, std::string(family_name(g.family())) + " homogeneity");
    }
    // dominance on 1e4 points
    {
      bool ok = true;
      std::vector<double> x(d);
      for (int r = 0; r < 10000 && ok; ++r) {
        if (diag_only) {
          const double v = 4 * rng.uniform();
          for (auto& xi : x) xi = v;
        } else {
          for (auto& xi : x) xi = 4 * rng.uniform();
        }
        double mx = 0;
        for (double xi : x) mx = std::max(mx, xi);
        ok = g(x) >= mx - 1e-12;
      }
      c.require(ok, std::string(family_name(g.family())) + " dominance");
    }
    // unit-face contact: each coordinate face reaches level one
    for (int j = 0; j < d; ++j) {
      std::vector<double> e(d, 0.0);
      e[j] = 1.0;
      const double gu = g(e);
      const double U = std::isfinite(gu) ? gu + 1.0 : 2.0;
      std::vector<double> lo(d - 1, 0.0), hi(d - 1, U);
      std::vector<double> extras;
      for (int q = 0; q < d - 1; ++q) extras.push_back(1.0);  // diagonal candidate
      auto f = [&](std::span<const double> free_pt) {
        std::vector<double> full(d);
        int q = 0;
        for (int i = 0; i < d; ++i) full[i] = (i == j) ? 1.0 : free_pt[q++];
        return g(full);
      };
      const auto r = minimize_box(f, lo, hi, {}, extras);
      c.expect(r.value, 1.0, 1e-6,
               std::string(family_name(g.family())) + " face contact j=" + std::to_string(j));
    }
  }
  // tau monotone in delta
  for (const auto& g :
       {GaugeSpec::gaussian2(0.5), GaugeSpec::logistic_gp(0.5), GaugeSpec::triangle(0.5),
        GaugeSpec::mixture(0.3, 0.6), GaugeSpec::husler_reiss_gp(2)}) {
    double prev = -1.0;
    bool mono = true;
    for (int i = 0; i <= 20; ++i) {
      const double t = tau_coeff(g, {0}, i / 20.0);
      if (t < prev - 1e-9) mono = false;
      prev = t;
    }
    c.require(mono, std::string(family_name(g.family())) + " tau monotone");
  }
  // eta lower bound, strict for the asymmetric pointed gauge
  for (const auto& g : cat) {
    const int d = g.dim();
    std::vector<int> all(d);
    for (int i = 0; i < d; ++i) all[i] = i;
    const std::vector<double> ones(d, 1.0);
    const double gv = g(ones);
    if (!std::isfinite(gv)) continue;
    c.require(eta_coeff(g, all) >= 1.0 / gv - 1e-9,
              std::string(family_name(g.family())) + " eta lower bound");
  }
  {
    auto tri = GaugeSpec::triangle(0.4, 0.3);
    const double ones[2] = {1.0, 1.0};
    c.require(eta_coeff(tri, {0, 1}) > 1.0 / tri(std::span<const double>(ones, 2)) + 1e-3,
              "strict eta bound for the pointed gauge");
  }
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  // 0: no budget
  };
  const std::vector<Criterion> criteria = {
      {1, "bivariate catalog reproduction (lambda, eta, tau, alpha, beta)", criterion1, 30},
      {2, "corner identity d * lambda(1/d) * eta = 1", criterion2, 10},
      {3, "marginal gauges against closed forms", criterion3, 0},
      {4, "pointed-gauge density example", criterion4, 0},
      {5, "scalar-factor mixture: eta curve, alpha and beta transfer", criterion5, 0},
      {6, "Monte Carlo coherence at n = 1e6, 20 seeds", criterion6, 600},
      {7, "equivalence of the two tau estimators", criterion7, 0},
      {8, "limit-set convergence of scaled clouds", criterion8, 0},
      {9, "invariant suites", criterion9, 0},
  };

  int failures = 0;
  for (const auto& cr : criteria) {
    if (!only.empty() && !only.count(cr.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome oc;
    try {
      oc = cr.run();
    } catch (const std::exception& e) {
      oc.pass = false;
      oc.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool within_budget = cr.budget_s <= 0 || secs <= cr.budget_s;
    if (!within_budget) oc.pass = false;
    std::printf("[%s] criterion %d: %s — %s (%.1f s%s)\n", oc.pass ? "PASS" : "FAIL", cr.id,
                cr.name, oc.detail.c_str(), secs,
                within_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
    if (!oc.pass) ++failures;
  }
  return failures;
}
