#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "limitset/geometry.hpp"

namespace limitset {

// Angular dependence exponent: max(w) times the boundary minimum of g for
// the direction w. Clamped into [max(w), 1]; a clamp beyond 1e-9 is reported
// on stderr once per call.
double lambda_omega(const GaugeSpec& g, std::span<const double> omega,
                    const MinimizeOptions& opts = {});

// Residual tail dependence coefficient of the coordinates in C (0-based).
// For proper subsets the gauge is marginalized first.
double eta_coeff(const GaugeSpec& g, const std::vector<int>& C,
                 const MinimizeOptions& opts = {});

// tau_C(delta): reciprocal boundary minimum over the faces where the C
// coordinates exceed 1 and the others stay below delta. For C = D the value
// equals eta and delta is ignored. An everywhere-infinite gauge on the
// region yields 0 (the probability decays faster than any power).
double tau_coeff(const GaugeSpec& g, const std::vector<int>& C, double delta,
                 const MinimizeOptions& opts = {});

// Gauge of the marginal vector keeping the listed coordinates (ascending
// order in the result). Closed-form reductions are used where the family
// admits them unless shortcuts = false; otherwise the returned gauge
// evaluates by numerical minimization over the dropped coordinates, bounded
// by the dominance bound. keep = all coordinates returns the gauge itself.
GaugeSpec marginalize(const GaugeSpec& g, std::vector<int> keep, bool shortcuts = true);

// Contact of the unit face {x_j = 1} with the unit level set: the largest
// a in [0,1] with g = 1 at x_j = 1, x_i = a, plus the maximal contact
// interval ending there.
struct ContactResult {
  double alpha = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  bool flat = false;  // nondegenerate contact interval
  std::string note;
};
ContactResult cond_alpha(const GaugeSpec& g, int cond_index, int other_index = -1);

// Scale exponent from the growth of g - 1 along the face beyond the contact
// point: a log-log fit of g(face at alpha+u) - 1 over a geometric u-grid.
// Rapidly varying remainders (strong concavity of the fit) map to beta = 1;
// a nonlinear fit that is not rapidly varying is reported undetermined, as
// is an extended-valued face.
struct BetaResult {
  bool determined = false;
  double beta = 0.0;
  double rv_index = 0.0;  // fitted regular-variation index of the remainder
  double r2 = 0.0;
  double curvature = 0.0;
  std::string note;
};
BetaResult cond_beta(const GaugeSpec& g, int cond_index, int other_index = -1,
                     std::optional<double> alpha = std::nullopt);

struct SummarizeOptions {
  std::vector<std::vector<double>> omega_grid;  // default: simplex grid
  std::vector<double> delta_grid;               // default: 21 points on [0,1]
  std::vector<std::vector<int>> subsets;        // default: all nonempty subsets
  bool conditionals = true;
  MinimizeOptions min_opts;
};

struct CondEntry {
  ContactResult contact;
  BetaResult beta;
};

struct DependenceSummary {
  nlohmann::json model() const;
  std::string model_json;  // descriptor of the gauge (stored serialized)
  std::vector<std::pair<std::vector<double>, double>> lambda_values;
  std::map<std::vector<int>, double> eta_values;
  std::map<std::pair<std::vector<int>, double>, double> tau_values;
  std::map<std::pair<int, int>, CondEntry> cond;  // (conditioning, other)
  std::vector<std::string> errors;                // per-entry failures

  nlohmann::json to_json() const;
  std::string to_csv() const;  // columns: quantity,index_json,value
};

// Batch driver over the operations above; per-entry errors are recorded in
// DependenceSummary::errors instead of aborting.
DependenceSummary summarize(const GaugeSpec& g, const SummarizeOptions& opts = {});

std::vector<std::vector<double>> default_omega_grid(int dim, int points_per_edge = 21);

}  // namespace limitset
