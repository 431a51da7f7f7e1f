#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "limitset/levelset.hpp"
#include "limitset/sampling.hpp"

namespace limitset {

struct EstimatorConfig {
  double k_exponent = 0.6;   // k = floor(n_eff^k_exponent) when k == 0
  std::int64_t k = 0;
  int bootstrap = 200;       // nonparametric replicates for the standard error
  std::uint64_t seed = 97;
  int min_exceedances = 20;  // cells below this are dropped from regressions
  int t_points = 10;
  double count_hi = 2000.0, count_lo = 25.0;  // exceedance-count range of t grids
};

struct Estimate {
  std::string quantity;
  std::string index_json;
  double value = 0.0;  // clamped into the admissible range
  double raw = 0.0;    // unclamped estimate (comparisons, equivalence tests)
  double se = 0.0;     // bootstrap standard error
  std::int64_t k = 0;
  std::int64_t n_eff = 0;
  std::uint64_t seed = 0;
  bool warn_low_neff = false;
  std::string note;

  nlohmann::json to_json() const;
};

// Hill estimate of the residual tail dependence coefficient on the structure
// variable min_{i in C} X_i. Pareto margins required; |C| >= 2.
Estimate hill_eta(const SampleCloud& cloud, const std::vector<int>& C,
                  const EstimatorConfig& cfg = {});

// Sensitivity sweep over k exponents {0.5, 0.6, 0.7}.
std::vector<Estimate> hill_eta_sweep(const SampleCloud& cloud, const std::vector<int>& C,
                                     EstimatorConfig cfg = {});

// Censored Hill estimate of tau_C(delta): restrict to observations whose
// coordinates outside C stay below (min_{i in C} X_i)^delta, then apply the
// Hill estimator to the structure variable of the restricted sample.
Estimate tau_hat(const SampleCloud& cloud, const std::vector<int>& C, double delta,
                 const EstimatorConfig& cfg = {});

// Fixed-threshold variant: regression of the log joint probability
// P(min_C > t, max outside <= t^delta) on log t.
Estimate tau_hat_fixed_threshold(const SampleCloud& cloud, const std::vector<int>& C,
                                 double delta, const EstimatorConfig& cfg = {});

// Slope of -log P(X > omega v) against v in exponential margins.
Estimate lambda_hat(const SampleCloud& cloud, std::span<const double> omega,
                    const EstimatorConfig& cfg = {});

// Symmetric Hausdorff distance between a scaled cloud and the set {g <= 1}
// (distances from cloud points count only outward excursions; coverage of
// the set is probed through a boundary-plus-radial-fill discretization).
double hausdorff_distance(std::span<const double> pts, int dim, const LevelSetMesh& mesh,
                          const std::function<double(std::span<const double>)>& gauge_value);
double hausdorff_to_limit_set(const ScaledCloud& cloud, const GaugeSpec& g);
double hausdorff_to_limit_set(const ScaledCloud& cloud, const GaugeSpec& g,
                              const LevelSetMesh& mesh);

}  // namespace limitset
