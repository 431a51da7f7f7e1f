#include "limitset/study.hpp"

#include <cmath>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "limitset/stats.hpp"

namespace limitset {

using json = nlohmann::json;

namespace {

double eq_z(const Estimate& a, const Estimate& b) {
  const double s = std::hypot(a.se, b.se);
  return s > 0 ? std::abs(a.raw - b.raw) / s : kInf;
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
  StudyReport rep;
  rep.model_json = cfg.model.to_json().dump();

  std::optional<GaugeSpec> gauge;
  try {
    gauge = cfg.model.gauge();
  } catch (const std::exception& e) {
    rep.errors.push_back(std::string("gauge unavailable: ") + e.what());
  }

  // geometric truths, computed once
  std::map<std::string, double> truth;
  auto guard = [&rep](const std::string& what, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      rep.errors.push_back(what + ": " + e.what());
    }
  };
  if (gauge) {
    for (const auto& C : cfg.eta_subsets)
      guard("eta truth", [&] { truth["eta" + json(C).dump()] = eta_coeff(*gauge, C); });
    for (const auto& [C, del] : cfg.tau_cells)
      guard("tau truth", [&] {
        truth["tau" + json(C).dump() + std::to_string(del)] = tau_coeff(*gauge, C, del);
      });
    for (const auto& w : cfg.lambda_omegas)
      guard("lambda truth", [&] { truth["lambda" + json(w).dump()] = lambda_omega(*gauge, w); });
  }

  for (std::uint64_t seed : cfg.seeds) {
    ModelSpec pareto_model = cfg.model;
    pareto_model.margins = Margins::Pareto;
    SampleCloud cloud_p;
    const bool need_pareto = !cfg.eta_subsets.empty() || !cfg.tau_cells.empty();
    if (need_pareto) cloud_p = sample(pareto_model, cfg.n, seed);

    EstimatorConfig est = cfg.est;
    est.seed = seed;

    for (const auto& C : cfg.eta_subsets) {
      guard("eta estimate", [&] {
        const Estimate e = hill_eta(cloud_p, C, est);
        StudyCell c;
        c.quantity = "eta";
        c.index_json = e.index_json;
        c.n = cfg.n;
        c.seed = seed;
        c.estimate = e.value;
        c.se = e.se;
        c.truth = truth.at("eta" + json(C).dump());
        c.z = e.se > 0 ? (e.value - c.truth) / e.se : 0.0;
        c.pass = std::abs(e.value - c.truth) <= cfg.tol_eta;
        rep.cells.push_back(std::move(c));
      });
    }

    for (const auto& [C, del] : cfg.tau_cells) {
      guard("tau estimate", [&] {
        const Estimate e = tau_hat(cloud_p, C, del, est);
        StudyCell c;
        c.quantity = "tau";
        c.index_json = e.index_json;
        c.n = cfg.n;
        c.seed = seed;
        c.estimate = e.value;
        c.se = e.se;
        c.truth = truth.at("tau" + json(C).dump() + std::to_string(del));
        c.z = e.se > 0 ? (e.value - c.truth) / e.se : 0.0;
        c.pass = std::abs(e.value - c.truth) <= cfg.tol_tau;
        if (e.warn_low_neff) c.note = "low effective sample after censoring";
        rep.cells.push_back(std::move(c));
      });
      if (cfg.tau_equivalence) {
        guard("tau equivalence", [&] {
          const Estimate a = tau_hat(cloud_p, C, del, est);
          const Estimate b = tau_hat_fixed_threshold(cloud_p, C, del, est);
          StudyCell c;
          c.quantity = "tau_equivalence";
          c.index_json = a.index_json;
          c.n = cfg.n;
          c.seed = seed;
          c.estimate = a.raw;
          c.truth = b.raw;  // the comparand, not a geometric truth
          c.se = std::hypot(a.se, b.se);
          c.z = eq_z(a, b);
          c.pass = c.z <= 2.0;
          c.note = "fixed-threshold comparand";
          rep.cells.push_back(std::move(c));
        });
      }
    }

    if (!cfg.lambda_omegas.empty()) {
      ModelSpec exp_model = cfg.model;
      exp_model.margins = Margins::Exponential;
      const SampleCloud cloud_e =
          need_pareto ? to_exponential(cloud_p) : sample(exp_model, cfg.n, seed);
      for (const auto& w : cfg.lambda_omegas) {
        guard("lambda estimate", [&] {
          const Estimate e = lambda_hat(cloud_e, w, est);
          StudyCell c;
          c.quantity = "lambda";
          c.index_json = e.index_json;
          c.n = cfg.n;
          c.seed = seed;
          c.estimate = e.value;
          c.se = e.se;
          c.truth = truth.at("lambda" + json(w).dump());
          c.z = e.se > 0 ? (e.value - c.truth) / e.se : 0.0;
          c.pass = std::abs(e.value - c.truth) <= cfg.tol_lambda_rel * c.truth;
          rep.cells.push_back(std::move(c));
        });
      }
    }
  }

  if (cfg.hausdorff_trend && gauge) {
    guard("hausdorff trend", [&] {
      const LevelSetMesh mesh = level_set_mesh(*gauge);
      std::vector<double> medians;
      ModelSpec exp_model = cfg.model;
      exp_model.margins = Margins::Exponential;
      for (std::int64_t n : cfg.hausdorff_ns) {
        std::vector<double> dists;
        for (std::uint64_t seed : cfg.seeds) {
          const SampleCloud c = sample(exp_model, n, seed);
          dists.push_back(hausdorff_to_limit_set(scale_cloud(c), *gauge, mesh));
        }
        medians.push_back(median_inplace(dists));
      }
      bool decreasing = true;
      for (std::size_t i = 1; i < medians.size(); ++i)
        if (!(medians[i] < medians[i - 1])) decreasing = false;
      StudyCell c;
      c.quantity = "hausdorff_trend";
      c.index_json = json{{"ns", cfg.hausdorff_ns}, {"medians", medians}}.dump();
      c.n = cfg.hausdorff_ns.back();
      c.seed = cfg.seeds.front();
      c.estimate = medians.back();
      c.truth = 0.0;
      c.pass = decreasing;
      c.note = "median distance across n";
      rep.cells.push_back(std::move(c));
    });
  }

  return rep;
}

json StudyReport::to_json() const {
  json jc = json::array();
  for (const auto& c : cells) {
    json row{{"quantity", c.quantity},
             {"index", json::parse(c.index_json.empty() ? "null" : c.index_json)},
             {"n", c.n},
             {"seed", c.seed},
             {"estimate", c.estimate},
             {"se", c.se},
             {"truth", c.truth},
             {"z", c.z},
             {"pass", c.pass}};
    if (!c.note.empty()) row["note"] = c.note;
    jc.push_back(std::move(row));
  }
  int passed = 0;
  for (const auto& c : cells) passed += c.pass ? 1 : 0;
  return json{{"model", json::parse(model_json.empty() ? "null" : model_json)},
              {"cells", jc},
              {"passed", passed},
              {"total", cells.size()},
              {"errors", errors}};
}

int StudyReport::exit_code() const {
  if (cells.empty() && !errors.empty()) return 1;
  for (const auto& c : cells)
    if (!c.pass) return 2;
  return errors.empty() ? 0 : 2;
}

}  // namespace limitset
