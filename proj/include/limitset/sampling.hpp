#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "limitset/gauge.hpp"

namespace limitset {

enum class Margins { Exponential, Pareto };
const char* margins_name(Margins m);

enum class ModelFamily {
  MetaGaussian,              // Gaussian copula (negative correlation allowed)
  LogisticGPCopula,          // logistic generalized Pareto copula
  InvertedLogisticCopula,
  InvertedHuslerReissCopula,
  Vine3Copula,               // independence + two inverted-Clayton pairs
  DensityFromGauge,          // exp(-g(x)) / (d! |G|)
  HWSpatialMix,              // gamma * S + V with scalar exponential S
  HuslerReissGPModel,        // common exponential factor plus Gaussian noise
};
const char* model_family_name(ModelFamily f);

struct ModelSpec {
  ModelFamily family{};
  int dim = 2;
  Margins margins = Margins::Exponential;
  std::vector<double> corr;  // MetaGaussian correlation, row-major
  double theta = 0.0;        // logistic / inverted-logistic dependence
  double lambda = 0.0;       // Husler-Reiss dependence
  double beta = 0.0, gamma = 0.0;       // vine pair parameters
  double mix_gamma = 0.0;               // HWSpatialMix weight
  std::optional<GaugeSpec> density_gauge;
  std::shared_ptr<const ModelSpec> inner;  // HWSpatialMix component model

  static ModelSpec meta_gaussian(int dim, std::vector<double> corr);
  static ModelSpec meta_gaussian2(double rho);
  static ModelSpec logistic_gp(double theta);
  static ModelSpec inverted_logistic(double theta, int dim = 2);
  static ModelSpec inverted_husler_reiss(double lambda);
  static ModelSpec vine3(double beta, double gamma);
  static ModelSpec density_from_gauge(GaugeSpec g);
  static ModelSpec hw_spatial_mix(ModelSpec v_model, double gamma);
  static ModelSpec husler_reiss_gp(double lambda);

  // Gauge of the model's limit set in exponential-type margins. Throws for
  // negative-correlation MetaGaussian (no continuous gauge).
  GaugeSpec gauge() const;

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

struct SampleCloud {
  std::int64_t n = 0;
  int dim = 0;
  Margins margins = Margins::Exponential;
  std::uint64_t seed = 0;
  double r_n = 0.0;  // log n
  std::vector<double> pts;  // row-major n x dim
  std::string model_json;

  std::span<const double> row(std::int64_t i) const {
    return {pts.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

// i.i.d. draws, deterministic given the seed and independent of thread
// count (fixed-size chunks with derived per-chunk streams).
SampleCloud sample(const ModelSpec& model, std::int64_t n, std::uint64_t seed);

// Margin change Pareto = exp(Exponential); copula unchanged.
SampleCloud to_pareto(const SampleCloud& c);
SampleCloud to_exponential(const SampleCloud& c);

struct ScaledCloud {
  std::vector<double> pts;
  int dim = 0;
  double r_n = 0.0;
  bool log_transformed = false;  // Pareto input was mapped to exponential first
};
// Divides by log n (after mapping Pareto margins back to exponential).
// n = 1 is an error: the scaling is undefined.
ScaledCloud scale_cloud(const SampleCloud& c);

struct DensitySampleReport {
  SampleCloud cloud;
  double acceptance = 0.0;           // realized rejection-sampler acceptance
  double expected_acceptance = 0.0;  // d! |G| / d^d
};
// Exact rejection sampler from exp(-g(x))/(d!|G|) with independent Exp(1/d)
// proposals (valid because g dominates the coordinate mean). Aborts when the
// acceptance rate falls below 1e-4.
DensitySampleReport density_from_gauge_sample(const GaugeSpec& g, std::int64_t n,
                                              std::uint64_t seed);

// Closed-form marginal survival functions used for exact margin transforms.
double hw_mix_margin_sf(double x, double gamma);
double logistic_gp_margin_exponent(double x, double theta);  // -log survival
double hr_gp_model_margin_sf(double x, double sigma);
// Marginal survival of the density model exp(-g)/(d!|G|) where it has a
// closed form (independence, coordinate maximum, symmetric pointed set).
double density_margin_sf(const GaugeSpec& g, double x);

// Columnar CSV plus a JSON sidecar (<path>.json) carrying the descriptor.
void write_cloud_csv(const SampleCloud& c, const std::string& path);
SampleCloud read_cloud_csv(const std::string& path);

}  // namespace limitset
