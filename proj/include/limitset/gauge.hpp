#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace limitset {

// Evaluations may legitimately be +infinity (degenerate limit sets live on
// lower-dimensional subsets); callers must not substitute large sentinels.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class GaugeFamily {
  Gaussian,            // sqrt(x)' Sigma^-1 sqrt(x), nonnegative correlations
  LogisticGP,          // max(x,y)/theta + (1-1/theta) min(x,y)
  InvertedLogistic,    // (sum x_i^{1/theta})^theta
  HuslerReissGP,       // x on the diagonal, +inf elsewhere
  InvertedHuslerReiss, // x Phi(l/2 + log(x/y)/l) + y Phi(l/2 + log(y/x)/l)
  Mixture,             // min of a LogisticGP-type and an InvertedLogistic-type unit set
  Triangle,            // max((x-y)/theta, (y-x)/theta, min(x-mu y, y-mu x)/(1-theta-mu))
  Vine3,               // trivariate vine built from two inverted-Clayton pairs
  Independence,        // sum x_i
  MaxOnly,             // max x_i
  Additive,            // sum of block gauges on disjoint coordinate blocks
  LinearImage,         // z -> g(A^-1 z) on A * orthant
  HWMix,               // x -> min_s { s + g_V(x - gamma s 1) }
  Custom,              // user-supplied callable
};

const char* family_name(GaugeFamily f);

// A 1-homogeneous gauge function on the nonnegative orthant. Immutable after
// construction; evaluation is reentrant and thread-safe.
class GaugeSpec {
 public:
  using EvalFn = std::function<double(std::span<const double>)>;

  static GaugeSpec gaussian(int dim, std::vector<double> corr_row_major);
  static GaugeSpec gaussian2(double rho);
  static GaugeSpec logistic_gp(double theta);
  static GaugeSpec inverted_logistic(double theta, int dim = 2);
  static GaugeSpec husler_reiss_gp(int dim = 2);
  static GaugeSpec inverted_husler_reiss(double lambda);
  static GaugeSpec mixture(double theta1, double theta2);
  // mu in [0, 1-theta) for the three-branch pointed set; mu = -1 selects the
  // symmetric variant max((x-y)/theta, (y-x)/theta, (x+y)/(2-theta)).
  static GaugeSpec triangle(double theta, double mu = -1.0);
  static GaugeSpec vine3(double beta, double gamma);
  static GaugeSpec independence(int dim);
  static GaugeSpec max_only(int dim);
  static GaugeSpec additive(std::vector<GaugeSpec> blocks);
  static GaugeSpec linear_image(GaugeSpec inner, std::vector<double> a_row_major);
  static GaugeSpec hw_mix(GaugeSpec g_v, double gamma);
  static GaugeSpec custom(int dim, EvalFn fn, std::string label = "custom");

  int dim() const;
  GaugeFamily family() const;
  const std::string& label() const;

  // g(x); may return +inf for extended-valued families.
  double operator()(std::span<const double> x) const;
  double eval(std::span<const double> x) const { return (*this)(x); }

  // True if the family can return +inf somewhere on the orthant.
  bool extended_valued() const;

  // Custom gauges are registered unverified until check_invariants passes.
  bool verified() const;

  // Number of linear pieces for piecewise-linear families (0 when the family
  // is smooth or the structure is unknown). Used to size multistarts.
  int piece_hint() const;

  // g(e_pinned + a e_other) - 1 for bivariate gauges, computed in a
  // cancellation-aware form where the family admits one. The generic path
  // loses all precision once g - 1 falls under machine epsilon, which is
  // exactly where the conditional-extremes location exponent lives for the
  // inverted families.
  double face_excess(int pinned, int other, double a) const;

  // Family parameters for the few places that need them (closed-form
  // marginals, samplers). Throws if the family does not carry the field.
  double param(const std::string& name) const;
  const std::vector<double>& matrix() const;       // Gaussian corr / LinearImage A
  const std::vector<GaugeSpec>& blocks() const;    // Additive
  const GaugeSpec& inner() const;                  // LinearImage / HWMix

  // Homogeneity, dominance and unit-face contact spot checks; marks custom
  // gauges verified on success. Throws std::runtime_error on violation.
  void check_invariants(int n_rays = 256, std::uint64_t seed = 17) const;

  nlohmann::json to_json() const;
  static GaugeSpec from_json(const nlohmann::json& j);

  struct Data;  // definition private to the implementation file

 private:
  explicit GaugeSpec(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
  friend struct GaugeAccess;
};

}  // namespace limitset
