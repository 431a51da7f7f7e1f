#include "limitset/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "limitset/density.hpp"
#include "limitset/parallel.hpp"
#include "limitset/rng.hpp"
#include "limitset/stats.hpp"

namespace limitset {

using json = nlohmann::json;

const char* margins_name(Margins m) {
  return m == Margins::Exponential ? "exponential" : "pareto";
}

const char* model_family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::MetaGaussian: return "meta_gaussian";
    case ModelFamily::LogisticGPCopula: return "logistic_gp";
    case ModelFamily::InvertedLogisticCopula: return "inverted_logistic";
    case ModelFamily::InvertedHuslerReissCopula: return "inverted_husler_reiss";
    case ModelFamily::Vine3Copula: return "vine3";
    case ModelFamily::DensityFromGauge: return "density_from_gauge";
    case ModelFamily::HWSpatialMix: return "hw_spatial_mix";
    case ModelFamily::HuslerReissGPModel: return "husler_reiss_gp";
  }
  return "?";
}

namespace {
void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

ModelSpec ModelSpec::meta_gaussian(int dim, std::vector<double> corr) {
  require(dim >= 2 && dim <= 32, "meta_gaussian: dim in [2,32]");
  require(corr.size() == static_cast<std::size_t>(dim) * dim, "meta_gaussian: matrix size");
  ModelSpec m;
  m.family = ModelFamily::MetaGaussian;
  m.dim = dim;
  m.corr = std::move(corr);
  return m;
}

ModelSpec ModelSpec::meta_gaussian2(double rho) {
  require(rho > -1.0 && rho < 1.0, "meta_gaussian: |rho| < 1");
  return meta_gaussian(2, {1.0, rho, rho, 1.0});
}

ModelSpec ModelSpec::logistic_gp(double theta) {
  require(theta > 0.0 && theta < 1.0, "logistic_gp model: theta in (0,1)");
  ModelSpec m;
  m.family = ModelFamily::LogisticGPCopula;
  m.dim = 2;
  m.theta = theta;
  return m;
}

ModelSpec ModelSpec::inverted_logistic(double theta, int dim) {
  require(theta > 0.0 && theta <= 1.0, "inverted_logistic model: theta in (0,1]");
  ModelSpec m;
  m.family = ModelFamily::InvertedLogisticCopula;
  m.dim = dim;
  m.theta = theta;
  return m;
}

ModelSpec ModelSpec::inverted_husler_reiss(double lambda) {
  require(lambda > 0.0, "inverted_husler_reiss model: lambda > 0");
  ModelSpec m;
  m.family = ModelFamily::InvertedHuslerReissCopula;
  m.dim = 2;
  m.lambda = lambda;
  return m;
}

ModelSpec ModelSpec::vine3(double beta, double gamma) {
  require(beta > 0.0 && gamma > 0.0, "vine3 model: beta, gamma > 0");
  ModelSpec m;
  m.family = ModelFamily::Vine3Copula;
  m.dim = 3;
  m.beta = beta;
  m.gamma = gamma;
  return m;
}

ModelSpec ModelSpec::density_from_gauge(GaugeSpec g) {
  ModelSpec m;
  m.family = ModelFamily::DensityFromGauge;
  m.dim = g.dim();
  m.density_gauge = std::move(g);
  return m;
}

ModelSpec ModelSpec::hw_spatial_mix(ModelSpec v_model, double gamma) {
  require(gamma > 0.0 && gamma < 1.0, "hw_spatial_mix: gamma in (0,1)");
  switch (v_model.family) {
    case ModelFamily::MetaGaussian:
    case ModelFamily::LogisticGPCopula:
    case ModelFamily::InvertedLogisticCopula:
    case ModelFamily::InvertedHuslerReissCopula:
    case ModelFamily::Vine3Copula:
      break;
    default:
      throw std::invalid_argument(
          "hw_spatial_mix: component model must have exact exponential margins");
  }
  ModelSpec m;
  m.family = ModelFamily::HWSpatialMix;
  m.dim = v_model.dim;
  m.mix_gamma = gamma;
  m.inner = std::make_shared<const ModelSpec>(std::move(v_model));
  return m;
}

ModelSpec ModelSpec::husler_reiss_gp(double lambda) {
  require(lambda > 0.0, "husler_reiss_gp model: lambda > 0");
  ModelSpec m;
  m.family = ModelFamily::HuslerReissGPModel;
  m.dim = 2;
  m.lambda = lambda;
  return m;
}

GaugeSpec ModelSpec::gauge() const {
  switch (family) {
    case ModelFamily::MetaGaussian: {
      for (double v : corr)
        if (v < 0.0)
          throw std::domain_error(
              "meta_gaussian gauge: negative correlation has no continuous gauge in "
              "exponential margins");
      return GaugeSpec::gaussian(dim, corr);
    }
    case ModelFamily::LogisticGPCopula:
      return GaugeSpec::logistic_gp(theta);
    case ModelFamily::InvertedLogisticCopula:
      return GaugeSpec::inverted_logistic(theta, dim);
    case ModelFamily::InvertedHuslerReissCopula:
      return GaugeSpec::inverted_husler_reiss(lambda);
    case ModelFamily::Vine3Copula:
      return GaugeSpec::vine3(beta, gamma);
    case ModelFamily::DensityFromGauge:
      return *density_gauge;
    case ModelFamily::HWSpatialMix:
      return GaugeSpec::hw_mix(inner->gauge(), mix_gamma);
    case ModelFamily::HuslerReissGPModel:
      return GaugeSpec::husler_reiss_gp(2);
  }
  throw std::logic_error("gauge: unreachable");
}

json ModelSpec::to_json() const {
  json j{{"model", model_family_name(family)},
         {"dim", dim},
         {"margins", margins_name(margins)}};
  json p = json::object();
  switch (family) {
    case ModelFamily::MetaGaussian:
      p["corr"] = corr;
      break;
    case ModelFamily::LogisticGPCopula:
    case ModelFamily::InvertedLogisticCopula:
      p["theta"] = theta;
      break;
    case ModelFamily::InvertedHuslerReissCopula:
    case ModelFamily::HuslerReissGPModel:
      p["lambda"] = lambda;
      break;
    case ModelFamily::Vine3Copula:
      p["beta"] = beta;
      p["gamma"] = gamma;
      break;
    case ModelFamily::DensityFromGauge:
      p["gauge"] = density_gauge->to_json();
      break;
    case ModelFamily::HWSpatialMix:
      p["gamma"] = mix_gamma;
      p["component"] = inner->to_json();
      break;
  }
  j["params"] = std::move(p);
  return j;
}

ModelSpec ModelSpec::from_json(const json& j) {
  const std::string fam = j.at("model").get<std::string>();
  const int dim = j.value("dim", 2);
  const json p = j.value("params", json::object());
  ModelSpec m;
  if (fam == "meta_gaussian") {
    if (p.contains("corr"))
      m = meta_gaussian(dim, p.at("corr").get<std::vector<double>>());
    else
      m = meta_gaussian2(p.at("rho").get<double>());
  } else if (fam == "logistic_gp") {
    m = logistic_gp(p.at("theta").get<double>());
  } else if (fam == "inverted_logistic") {
    m = inverted_logistic(p.at("theta").get<double>(), dim);
  } else if (fam == "inverted_husler_reiss") {
    m = inverted_husler_reiss(p.at("lambda").get<double>());
  } else if (fam == "vine3") {
    m = vine3(p.at("beta").get<double>(), p.at("gamma").get<double>());
  } else if (fam == "density_from_gauge") {
    m = density_from_gauge(GaugeSpec::from_json(p.at("gauge")));
  } else if (fam == "hw_spatial_mix") {
    m = hw_spatial_mix(from_json(p.at("component")), p.at("gamma").get<double>());
  } else if (fam == "husler_reiss_gp") {
    m = husler_reiss_gp(p.at("lambda").get<double>());
  } else {
    throw std::invalid_argument("model from_json: unknown family '" + fam + "'");
  }
  const std::string mg = j.value("margins", "exponential");
  m.margins = (mg == "pareto") ? Margins::Pareto : Margins::Exponential;
  return m;
}

// ---------------------------------------------------------------------------
// marginal transforms

double hw_mix_margin_sf(double x, double gamma) {
  if (x <= 0.0) return 1.0;
  return (std::exp(-x) - gamma * std::exp(-x / gamma)) / (1.0 - gamma);
}

double logistic_gp_margin_exponent(double x, double theta) {
  // -log P(X > x) for the conditionally exponential margins
  const double l2 = std::log(2.0);
  if (x >= 0.0) return x + theta * l2;
  const double tail =
      std::exp(theta * l2) - std::exp(-x) * std::expm1(theta * std::log1p(std::exp(x / theta)));
  return theta * l2 - std::log(tail);
}

double hr_gp_model_margin_sf(double x, double sigma) {
  // survival of E + Z, E ~ Exp(1) independent of Z ~ N(0, sigma^2)
  return std::exp(-x + 0.5 * sigma * sigma) * norm_cdf((x - sigma * sigma) / sigma) +
         norm_sf(x / sigma);
}

// ---------------------------------------------------------------------------
// per-chunk fillers

namespace {

constexpr std::int64_t kChunk = 8192;

// Stable FNV-1a over the model descriptor: streams must be independent
// across models and sample sizes, not only across seeds.
std::uint64_t descriptor_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double positive_stable(Rng& rng, double theta) {
  // Kanter's representation for Laplace exponent t^theta, theta in (0,1)
  double v;
  do {
    v = rng.uniform();
  } while (v == 0.0);
  const double u = 3.14159265358979323846 * v;  // strictly inside (0, pi)
  const double w = rng.exponential();
  const double t1 = 1.0 - theta;
  const double a = std::sin(t1 * u) * std::pow(std::sin(theta * u), theta / t1) /
                   std::pow(std::sin(u), 1.0 / t1);
  return std::pow(a / w, t1 / theta);
}

double clayton_hinv(double p, double a, double b) {
  // v with dC(a,v)/da = p for the Clayton copula with parameter b
  return std::pow(std::pow(p * std::pow(a, b + 1.0), -b / (1.0 + b)) - std::pow(a, -b) + 1.0,
                  -1.0 / b);
}

double inverted_clayton_hinv(double p, double u, double b) {
  return 1.0 - clayton_hinv(1.0 - p, 1.0 - u, b);
}

struct Filler {
  const ModelSpec& model;
  // meta-Gaussian factor
  std::vector<double> chol;  // lower-triangular, row-major

  explicit Filler(const ModelSpec& m) : model(m) {
    if (m.family == ModelFamily::MetaGaussian) {
      Eigen::MatrixXd s(m.dim, m.dim);
      for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) s(i, j) = m.corr[static_cast<std::size_t>(i) * m.dim + j];
      Eigen::LLT<Eigen::MatrixXd> llt(s);
      require(llt.info() == Eigen::Success, "meta_gaussian: correlation not positive definite");
      Eigen::MatrixXd l = llt.matrixL();
      chol.resize(static_cast<std::size_t>(m.dim) * m.dim, 0.0);
      for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j <= i; ++j) chol[static_cast<std::size_t>(i) * m.dim + j] = l(i, j);
    }
  }

  void fill(Rng& rng, double* row) const {
    const int d = model.dim;
    switch (model.family) {
      case ModelFamily::MetaGaussian: {
        double z[32], zn[32];
        for (int i = 0; i < d; ++i) zn[i] = rng.normal();
        for (int i = 0; i < d; ++i) {
          double s = 0.0;
          for (int j = 0; j <= i; ++j) s += chol[static_cast<std::size_t>(i) * d + j] * zn[j];
          z[i] = s;
        }
        for (int i = 0; i < d; ++i) row[i] = -std::log(norm_sf(z[i]));
        break;
      }
      case ModelFamily::LogisticGPCopula: {
        const double th = model.theta;
        const double m = rng.exponential();
        const double p = rng.uniform();
        const double dgap = th * std::log(2.0 * std::pow(1.0 - p, 1.0 / (th - 1.0)) - 1.0);
        const bool first_max = rng.below(2) == 0;
        const double a = m, b = m - dgap;
        const double x = first_max ? a : b, y = first_max ? b : a;
        row[0] = logistic_gp_margin_exponent(x, th);
        row[1] = logistic_gp_margin_exponent(y, th);
        break;
      }
      case ModelFamily::InvertedLogisticCopula: {
        const double th = model.theta;
        if (th >= 1.0) {
          for (int i = 0; i < d; ++i) row[i] = rng.exponential();
          break;
        }
        const double s = positive_stable(rng, th);
        for (int i = 0; i < d; ++i) row[i] = std::pow(rng.exponential() / s, th);
        break;
      }
      case ModelFamily::InvertedHuslerReissCopula: {
        const double l = model.lambda;
        const double x = rng.exponential();  // -log U1
        const double p = rng.uniform_pos();  // conditional level
        // solve exp(x - ell(x,y)) * Phi(l/2 + log(x/y)/l) = p for y; the
        // left side decreases from 1 to 0 in y
        auto hfun = [&](double y) {
          const double a = 0.5 * l + std::log(x / y) / l;
          const double ell = x * norm_cdf(a) + y * norm_cdf(l - a);
          return std::exp(x - ell) * norm_cdf(a);
        };
        double loy = 1e-14, hiy = x + 55.0;
        if (hfun(loy) < p) {
          row[0] = x;
          row[1] = loy;
          break;
        }
        for (int it = 0; it < 90; ++it) {
          const double mid = 0.5 * (loy + hiy);
          if (hfun(mid) >= p)
            loy = mid;
          else
            hiy = mid;
        }
        row[0] = x;
        row[1] = 0.5 * (loy + hiy);
        break;
      }
      case ModelFamily::Vine3Copula: {
        const double w1 = rng.uniform(), w2 = rng.uniform(), w3 = rng.uniform();
        const double u1 = w1, u2 = w2;
        const double a = u1;  // conditional rank of u1 given u2 (independent pair)
        const double b = inverted_clayton_hinv(w3, a, model.gamma);
        const double u3 = inverted_clayton_hinv(b, u2, model.beta);
        row[0] = -std::log1p(-u1);
        row[1] = -std::log1p(-u2);
        row[2] = -std::log1p(-u3);
        break;
      }
      case ModelFamily::HWSpatialMix:
        throw std::logic_error("fill: mixtures are assembled at the sampling level");
      case ModelFamily::HuslerReissGPModel: {
        const double sigma = model.lambda / std::sqrt(2.0);
        const double e = rng.exponential();
        for (int i = 0; i < d; ++i) {
          const double x = e + sigma * rng.normal();
          row[i] = -std::log(hr_gp_model_margin_sf(x, sigma));
        }
        break;
      }
      case ModelFamily::DensityFromGauge:
        throw std::logic_error("fill: density models go through the rejection sampler");
    }
  }
};

}  // namespace

SampleCloud sample(const ModelSpec& model, std::int64_t n, std::uint64_t seed) {
  require(n >= 1, "sample: n >= 1");
  if (model.family == ModelFamily::DensityFromGauge) {
    auto rep = density_from_gauge_sample(*model.density_gauge, n, seed);
    rep.cloud.model_json = model.to_json().dump();
    if (model.margins == Margins::Pareto) return to_pareto(rep.cloud);
    return std::move(rep.cloud);
  }

  SampleCloud c;
  c.n = n;
  c.dim = model.dim;
  c.margins = Margins::Exponential;
  c.seed = seed;
  c.r_n = std::log(static_cast<double>(n));
  c.pts.resize(static_cast<std::size_t>(n) * model.dim);
  c.model_json = model.to_json().dump();

  const bool is_mix = model.family == ModelFamily::HWSpatialMix;
  const Filler filler(is_mix ? *model.inner : model);

  // fold the size and the descriptor into the stream so clouds of different
  // sizes or models are independent draws rather than nested or shared ones
  const std::uint64_t base =
      Rng::derive(seed, static_cast<std::uint64_t>(n) ^ descriptor_hash(c.model_json));
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  par::for_index(chunks, [&](std::int64_t ci) {
    Rng rng(Rng::derive(base, static_cast<std::uint64_t>(ci)));
    const std::int64_t lo = ci * kChunk, hi = std::min(n, lo + kChunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      double* row = c.pts.data() + i * model.dim;
      filler.fill(rng, row);
      if (is_mix) {
        const double s = rng.exponential();
        const double gam = model.mix_gamma;
        for (int k = 0; k < model.dim; ++k) {
          const double x = gam * s + row[k];
          row[k] = -std::log(hw_mix_margin_sf(x, gam));
        }
      }
    }
  });

  if (model.margins == Margins::Pareto) return to_pareto(c);
  return c;
}

SampleCloud to_pareto(const SampleCloud& c) {
  if (c.margins == Margins::Pareto) return c;
  SampleCloud out = c;
  out.margins = Margins::Pareto;
  for (auto& v : out.pts) v = std::exp(v);
  return out;
}

SampleCloud to_exponential(const SampleCloud& c) {
  if (c.margins == Margins::Exponential) return c;
  SampleCloud out = c;
  out.margins = Margins::Exponential;
  for (auto& v : out.pts) v = std::log(std::max(v, 1.0));
  return out;
}

ScaledCloud scale_cloud(const SampleCloud& c) {
  if (c.n < 2) throw std::invalid_argument("scale_cloud: undefined scaling for n < 2");
  ScaledCloud s;
  s.dim = c.dim;
  s.r_n = std::log(static_cast<double>(c.n));
  s.log_transformed = c.margins == Margins::Pareto;
  const SampleCloud* src = &c;
  SampleCloud tmp;
  if (s.log_transformed) {
    tmp = to_exponential(c);
    src = &tmp;
  }
  s.pts = src->pts;
  for (auto& v : s.pts) v /= s.r_n;
  return s;
}

DensitySampleReport density_from_gauge_sample(const GaugeSpec& g, std::int64_t n,
                                              std::uint64_t seed) {
  require(n >= 1, "density sampler: n >= 1");
  if (g.family() == GaugeFamily::HuslerReissGP)
    throw std::invalid_argument("density sampler: extended-valued gauge is not a density");
  const int d = g.dim();

  SampleCloud c;
  c.n = n;
  c.dim = d;
  c.margins = Margins::Exponential;
  c.seed = seed;
  c.r_n = std::log(static_cast<double>(std::max<std::int64_t>(n, 2)));
  c.pts.resize(static_cast<std::size_t>(n) * d);
  {
    json desc{{"model", "density_from_gauge"}, {"dim", d}};
    try {
      desc["params"] = json{{"gauge", g.to_json()}};
    } catch (const std::exception&) {
      desc["params"] = json{{"gauge", g.label()}};
    }
    c.model_json = desc.dump();
  }

  std::atomic<std::int64_t> proposals{0};
  std::atomic<bool> abort_low_acceptance{false};

  const std::uint64_t base =
      Rng::derive(seed, static_cast<std::uint64_t>(n) ^ descriptor_hash(c.model_json));
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  par::for_index(chunks, [&](std::int64_t ci) {
    if (abort_low_acceptance.load()) return;
    Rng rng(Rng::derive(base, static_cast<std::uint64_t>(ci)));
    const std::int64_t lo = ci * kChunk, hi = std::min(n, lo + kChunk);
    std::vector<double> x(d);
    std::int64_t local_prop = 0;
    for (std::int64_t i = lo; i < hi; ++i) {
      for (;;) {
        ++local_prop;
        if (local_prop >= 1000000 &&
            static_cast<double>(i - lo + 1) < 1e-4 * static_cast<double>(local_prop)) {
          abort_low_acceptance.store(true);
          return;
        }
        double sum = 0.0;
        for (int k = 0; k < d; ++k) {
          x[k] = d * rng.exponential();
          sum += x[k];
        }
        const double gv = g(x);
        if (gv == kInf) continue;
        if (std::log(rng.uniform_pos()) < sum / d - gv) break;
      }
      double* row = c.pts.data() + i * d;
      std::copy(x.begin(), x.end(), row);
    }
    proposals.fetch_add(local_prop);
  });

  if (abort_low_acceptance.load())
    throw std::runtime_error(
        "density sampler: acceptance rate below 1e-4; the limit set is too thin for "
        "orthant proposals - reparametrize the gauge or reduce the dimension");

  DensitySampleReport rep;
  rep.acceptance = static_cast<double>(n) / static_cast<double>(proposals.load());
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  try {
    rep.expected_acceptance = fact * limit_set_volume(g) / std::pow(d, d);
  } catch (const std::exception&) {
    rep.expected_acceptance = 0.0;
  }
  rep.cloud = std::move(c);
  return rep;
}

// Closed-form marginal survival of the density model exp(-g)/(d!|G|) for the
// gauges where it integrates in closed form; used for exact margin maps.
double density_margin_sf(const GaugeSpec& g, double x) {
  if (x <= 0.0) return 1.0;
  switch (g.family()) {
    case GaugeFamily::Independence:
      return std::exp(-x);
    case GaugeFamily::MaxOnly:
      if (g.dim() == 2) return (1.0 + 0.5 * x) * std::exp(-x);
      break;
    case GaugeFamily::Triangle: {
      if (g.param("mu") == -1.0 && g.dim() == 2) {
        const double th = g.param("theta");
        if (th < 1.0) {
          const double om = 1.0 - th;
          return (2.0 * std::exp(-x) - th * th * std::exp(-x / th) -
                  2.0 * om * om * std::exp(-x / om)) /
                 (4.0 * th - 3.0 * th * th);
        }
        return std::exp(-x);  // theta = 1 degenerates to the simplex density
      }
      break;
    }
    default:
      break;
  }
  throw std::invalid_argument("density_margin_sf: no closed-form margin for this gauge");
}

void write_cloud_csv(const SampleCloud& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_cloud_csv: cannot open " + path);
  for (int j = 0; j < c.dim; ++j) f << (j ? ",x" : "x") << (j + 1);
  f << "\n";
  char buf[32];
  for (std::int64_t i = 0; i < c.n; ++i) {
    for (int j = 0; j < c.dim; ++j) {
      const auto res =
          std::to_chars(buf, buf + sizeof(buf), c.pts[static_cast<std::size_t>(i) * c.dim + j]);
      if (j) f << ',';
      f.write(buf, res.ptr - buf);
    }
    f << "\n";
  }
  json side{{"model", json::parse(c.model_json.empty() ? "null" : c.model_json)},
            {"n", c.n},
            {"dim", c.dim},
            {"seed", c.seed},
            {"margins", margins_name(c.margins)},
            {"r_n", c.r_n}};
  std::ofstream sf(path + ".json");
  sf << side.dump(2) << "\n";
}

SampleCloud read_cloud_csv(const std::string& path) {
  std::ifstream sf(path + ".json");
  if (!sf) throw std::runtime_error("read_cloud_csv: missing sidecar " + path + ".json");
  json side;
  sf >> side;
  SampleCloud c;
  c.n = side.at("n").get<std::int64_t>();
  c.dim = side.at("dim").get<int>();
  c.seed = side.at("seed").get<std::uint64_t>();
  c.r_n = side.at("r_n").get<double>();
  c.margins =
      side.at("margins").get<std::string>() == "pareto" ? Margins::Pareto : Margins::Exponential;
  c.model_json = side.at("model").dump();
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_cloud_csv: cannot open " + path);
  std::string line;
  std::getline(f, line);  // header
  c.pts.reserve(static_cast<std::size_t>(c.n) * c.dim);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) c.pts.push_back(std::stod(cell));
  }
  if (c.pts.size() != static_cast<std::size_t>(c.n) * c.dim)
    throw std::runtime_error("read_cloud_csv: row count does not match sidecar");
  return c;
}

}  // namespace limitset
