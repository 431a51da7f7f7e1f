#include "limitset/gauge.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "golden.hpp"
#include "limitset/rng.hpp"
#include "limitset/stats.hpp"

namespace limitset {

using json = nlohmann::json;

namespace {
constexpr int kMaxDim = 32;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

struct GaugeSpec::Data {
  GaugeFamily family{};
  int dim = 0;
  double theta = 0, theta2 = 0, mu = 0, lambda = 0, beta = 0, gamma = 0;
  std::vector<double> mat;      // Gaussian correlation / LinearImage A (row-major)
  std::vector<double> mat_inv;  // cached inverse
  std::vector<GaugeSpec> blocks;
  std::shared_ptr<const GaugeSpec> inner;
  EvalFn fn;
  std::string label;
  mutable std::atomic<bool> verified{true};
};

struct GaugeAccess {
  static std::shared_ptr<const GaugeSpec::Data> data(const GaugeSpec& g) { return g.d_; }
  static GaugeSpec wrap(std::shared_ptr<const GaugeSpec::Data> d) {
    return GaugeSpec(std::move(d));
  }
};

namespace {

using Data = GaugeSpec::Data;

GaugeSpec make(std::shared_ptr<Data> d) { return GaugeAccess::wrap(std::move(d)); }

double eval_gaussian(const Data& d, std::span<const double> x) {
  std::array<double, kMaxDim> u;
  const int n = d.dim;
  for (int i = 0; i < n; ++i) u[i] = std::sqrt(x[i]);
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += d.mat_inv[i * n + j] * u[j];
    q += u[i] * row;
  }
  return q;
}

double eval_logistic_gp(double theta, double x, double y) {
  const double hi = std::max(x, y), lo = std::min(x, y);
  return hi / theta + (1.0 - 1.0 / theta) * lo;
}

double eval_inverted_logistic(const Data& d, std::span<const double> x) {
  // (sum x_i^{1/theta})^theta, stably via the largest coordinate.
  const double inv = 1.0 / d.theta;
  double m = 0.0;
  for (int i = 0; i < d.dim; ++i) m = std::max(m, x[i]);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < d.dim; ++i) s += std::pow(x[i] / m, inv);
  return m * std::pow(s, d.theta);
}

double eval_hr_gp(const Data& d, std::span<const double> x) {
  const double v = x[0];
  for (int i = 1; i < d.dim; ++i)
    if (x[i] != v) return kInf;
  return v;
}

double eval_ihr(double lambda, double x, double y) {
  if (x == 0.0 && y == 0.0) return 0.0;
  if (y == 0.0) return x;
  if (x == 0.0) return y;
  const double a = 0.5 * lambda + std::log(x / y) / lambda;
  return x * norm_cdf(a) + y * norm_cdf(lambda - a);
}

double eval_triangle(const Data& d, double x, double y) {
  const double b1 = (x - y) / d.theta;
  const double b2 = (y - x) / d.theta;
  const double b3 = std::min(x - d.mu * y, y - d.mu * x) / (1.0 - d.theta - d.mu);
  return std::max(b3, std::max(b1, b2));
}

double eval_vine3(const Data& d, std::span<const double> x) {
  const double hi = std::max(x[1], x[2]), lo = std::min(x[1], x[2]);
  const double b = d.beta, g = d.gamma;
  const double w = (b + 1.0) * (hi - x[1]);
  return (1.0 + b) * hi - b * lo - g * x[0] - (g + 1.0) * w +
         (2.0 * g + 1.0) * std::max(x[0], w);
}

double eval_hw_mix(const Data& d, std::span<const double> x);

double eval_linear_image(const Data& d, std::span<const double> z) {
  std::array<double, kMaxDim> y;
  const int n = d.dim;
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(z[i]));
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += d.mat_inv[i * n + j] * z[j];
    if (s < -1e-9 * scale) return kInf;  // outside A * orthant
    y[i] = std::max(s, 0.0);
  }
  return (*d.inner)(std::span<const double>(y.data(), static_cast<std::size_t>(n)));
}

double eval_any(const Data& d, std::span<const double> x);

double eval_additive(const Data& d, std::span<const double> x) {
  double s = 0.0;
  std::size_t off = 0;
  for (const auto& b : d.blocks) {
    s += b(x.subspan(off, static_cast<std::size_t>(b.dim())));
    if (s == kInf) return kInf;
    off += static_cast<std::size_t>(b.dim());
  }
  return s;
}

double eval_hw_mix(const Data& d, std::span<const double> x) {
  const double gamma = d.gamma;
  const int n = d.dim;
  double mn = x[0];
  for (int i = 1; i < n; ++i) mn = std::min(mn, x[i]);
  const GaugeSpec& gv = *d.inner;
  std::array<double, kMaxDim> y;
  auto f = [&](double s) {
    for (int i = 0; i < n; ++i) y[i] = std::max(x[i] - gamma * s, 0.0);
    return s + gv(std::span<const double>(y.data(), static_cast<std::size_t>(n)));
  };
  if (mn <= 0.0) return f(0.0);
  auto [s_star, v] = detail::scan_refine_min(f, 0.0, mn / gamma, 48, 90);
  (void)s_star;
  return std::min(v, f(0.0));
}

double eval_any(const Data& d, std::span<const double> x) {
  switch (d.family) {
    case GaugeFamily::Gaussian:
      return eval_gaussian(d, x);
    case GaugeFamily::LogisticGP:
      return eval_logistic_gp(d.theta, x[0], x[1]);
    case GaugeFamily::InvertedLogistic:
      return eval_inverted_logistic(d, x);
    case GaugeFamily::HuslerReissGP:
      return eval_hr_gp(d, x);
    case GaugeFamily::InvertedHuslerReiss:
      return eval_ihr(d.lambda, x[0], x[1]);
    case GaugeFamily::Mixture: {
      const double a = eval_logistic_gp(d.theta, x[0], x[1]);
      const double m = std::max(x[0], x[1]);
      double b;
      if (m == 0.0) {
        b = 0.0;
      } else {
        const double inv = 1.0 / d.theta2;
        b = m * std::pow(std::pow(x[0] / m, inv) + std::pow(x[1] / m, inv), d.theta2);
      }
      return std::min(a, b);
    }
    case GaugeFamily::Triangle:
      return eval_triangle(d, x[0], x[1]);
    case GaugeFamily::Vine3:
      return eval_vine3(d, x);
    case GaugeFamily::Independence: {
      double s = 0.0;
      for (int i = 0; i < d.dim; ++i) s += x[i];
      return s;
    }
    case GaugeFamily::MaxOnly: {
      double m = 0.0;
      for (int i = 0; i < d.dim; ++i) m = std::max(m, x[i]);
      return m;
    }
    case GaugeFamily::Additive:
      return eval_additive(d, x);
    case GaugeFamily::LinearImage:
      return eval_linear_image(d, x);
    case GaugeFamily::HWMix:
      return eval_hw_mix(d, x);
    case GaugeFamily::Custom:
      return d.fn(x);
  }
  return kInf;
}

std::vector<double> invert_matrix(const std::vector<double>& m, int n, const char* what) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = m[static_cast<std::size_t>(i) * n + j];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  require(lu.isInvertible(), std::string(what) + ": matrix is singular");
  Eigen::MatrixXd inv = lu.inverse();
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = inv(i, j);
  return out;
}

}  // namespace

const char* family_name(GaugeFamily f) {
  switch (f) {
    case GaugeFamily::Gaussian: return "gaussian";
    case GaugeFamily::LogisticGP: return "logistic_gp";
    case GaugeFamily::InvertedLogistic: return "inverted_logistic";
    case GaugeFamily::HuslerReissGP: return "husler_reiss_gp";
    case GaugeFamily::InvertedHuslerReiss: return "inverted_husler_reiss";
    case GaugeFamily::Mixture: return "mixture";
    case GaugeFamily::Triangle: return "triangle";
    case GaugeFamily::Vine3: return "vine3";
    case GaugeFamily::Independence: return "independence";
    case GaugeFamily::MaxOnly: return "max_only";
    case GaugeFamily::Additive: return "additive";
    case GaugeFamily::LinearImage: return "linear_image";
    case GaugeFamily::HWMix: return "hw_mix";
    case GaugeFamily::Custom: return "custom";
  }
  return "?";
}

GaugeSpec GaugeSpec::gaussian(int dim, std::vector<double> corr) {
  require(dim >= 2 && dim <= kMaxDim, "gaussian: dim out of range");
  require(corr.size() == static_cast<std::size_t>(dim) * dim, "gaussian: matrix size mismatch");
  for (int i = 0; i < dim; ++i) {
    require(corr[static_cast<std::size_t>(i) * dim + i] == 1.0, "gaussian: diagonal must be 1");
    for (int j = 0; j < dim; ++j) {
      const double v = corr[static_cast<std::size_t>(i) * dim + j];
      require(v >= 0.0 && v < 1.0 + 1e-15, "gaussian: correlations must lie in [0,1)");
      require(v == corr[static_cast<std::size_t>(j) * dim + i], "gaussian: matrix not symmetric");
    }
  }
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = corr[static_cast<std::size_t>(i) * dim + j];
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  require(llt.info() == Eigen::Success, "gaussian: matrix not positive definite");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::Gaussian;
  d->dim = dim;
  d->mat = std::move(corr);
  d->mat_inv = invert_matrix(d->mat, dim, "gaussian");
  d->label = "gaussian";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::gaussian2(double rho) {
  return gaussian(2, {1.0, rho, rho, 1.0});
}

GaugeSpec GaugeSpec::logistic_gp(double theta) {
  require(theta > 0.0 && theta < 1.0, "logistic_gp: theta must lie in (0,1)");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::LogisticGP;
  d->dim = 2;
  d->theta = theta;
  d->label = "logistic_gp";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::inverted_logistic(double theta, int dim) {
  require(theta > 0.0 && theta <= 1.0, "inverted_logistic: theta must lie in (0,1]");
  require(dim >= 2 && dim <= kMaxDim, "inverted_logistic: dim out of range");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::InvertedLogistic;
  d->dim = dim;
  d->theta = theta;
  d->label = "inverted_logistic";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::husler_reiss_gp(int dim) {
  require(dim >= 2 && dim <= kMaxDim, "husler_reiss_gp: dim out of range");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::HuslerReissGP;
  d->dim = dim;
  d->label = "husler_reiss_gp";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::inverted_husler_reiss(double lambda) {
  require(lambda > 0.0, "inverted_husler_reiss: lambda must be positive");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::InvertedHuslerReiss;
  d->dim = 2;
  d->lambda = lambda;
  d->label = "inverted_husler_reiss";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::mixture(double theta1, double theta2) {
  require(theta1 > 0.0 && theta1 < 1.0, "mixture: theta1 must lie in (0,1)");
  require(theta2 > 0.0 && theta2 < 1.0, "mixture: theta2 must lie in (0,1)");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::Mixture;
  d->dim = 2;
  d->theta = theta1;
  d->theta2 = theta2;
  d->label = "mixture";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::triangle(double theta, double mu) {
  if (mu < 0.0) {
    require(mu == -1.0, "triangle: mu must be -1 or in [0, 1-theta)");
    require(theta > 0.0 && theta <= 1.0, "triangle: theta must lie in (0,1]");
  } else {
    require(theta > 0.0 && theta < 1.0 && theta + mu < 1.0,
            "triangle: need theta in (0,1) and theta + mu < 1");
  }
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::Triangle;
  d->dim = 2;
  d->theta = theta;
  d->mu = mu;
  d->label = "triangle";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::vine3(double beta, double gamma) {
  require(beta > 0.0, "vine3: beta must be positive");
  require(gamma > 0.0, "vine3: gamma must be positive");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::Vine3;
  d->dim = 3;
  d->beta = beta;
  d->gamma = gamma;
  d->label = "vine3";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::independence(int dim) {
  require(dim >= 1 && dim <= kMaxDim, "independence: dim out of range");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::Independence;
  d->dim = dim;
  d->label = "independence";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::max_only(int dim) {
  require(dim >= 1 && dim <= kMaxDim, "max_only: dim out of range");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::MaxOnly;
  d->dim = dim;
  d->label = "max_only";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::additive(std::vector<GaugeSpec> blocks) {
  require(!blocks.empty(), "additive: needs at least one block");
  int dim = 0;
  for (const auto& b : blocks) dim += b.dim();
  require(dim <= kMaxDim, "additive: total dim out of range");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::Additive;
  d->dim = dim;
  d->blocks = std::move(blocks);
  d->label = "additive";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::linear_image(GaugeSpec inner, std::vector<double> a) {
  const int n = inner.dim();
  require(a.size() == static_cast<std::size_t>(n) * n, "linear_image: matrix size mismatch");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::LinearImage;
  d->dim = n;
  d->mat = std::move(a);
  d->mat_inv = invert_matrix(d->mat, n, "linear_image");
  d->inner = std::make_shared<const GaugeSpec>(std::move(inner));
  d->label = "linear_image";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::hw_mix(GaugeSpec g_v, double gamma) {
  require(gamma > 0.0 && gamma < 1.0, "hw_mix: gamma must lie in (0,1)");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::HWMix;
  d->dim = g_v.dim();
  d->gamma = gamma;
  d->inner = std::make_shared<const GaugeSpec>(std::move(g_v));
  d->label = "hw_mix";
  return make(std::move(d));
}

GaugeSpec GaugeSpec::custom(int dim, EvalFn fn, std::string label) {
  require(dim >= 1 && dim <= kMaxDim, "custom: dim out of range");
  require(static_cast<bool>(fn), "custom: empty callable");
  auto d = std::make_shared<Data>();
  d->family = GaugeFamily::Custom;
  d->dim = dim;
  d->fn = std::move(fn);
  d->label = std::move(label);
  d->verified.store(false);
  return make(std::move(d));
}

int GaugeSpec::dim() const { return d_->dim; }
GaugeFamily GaugeSpec::family() const { return d_->family; }
const std::string& GaugeSpec::label() const { return d_->label; }
bool GaugeSpec::verified() const { return d_->verified.load(); }

double GaugeSpec::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_->dim)
    throw std::invalid_argument("gauge: point dimension mismatch");
  for (double v : x)
    if (!(v >= 0.0)) throw std::domain_error("gauge: point must lie in the nonnegative orthant");
  return eval_any(*d_, x);
}

bool GaugeSpec::extended_valued() const {
  switch (d_->family) {
    case GaugeFamily::HuslerReissGP:
      return true;
    case GaugeFamily::LinearImage:
      return true;  // points outside A * orthant
    case GaugeFamily::Additive: {
      for (const auto& b : d_->blocks)
        if (b.extended_valued()) return true;
      return false;
    }
    case GaugeFamily::HWMix:
      return d_->inner->extended_valued();
    case GaugeFamily::Custom:
      return true;  // unknown; be conservative
    default:
      return false;
  }
}

int GaugeSpec::piece_hint() const {
  switch (d_->family) {
    case GaugeFamily::LogisticGP:
    case GaugeFamily::MaxOnly:
      return 2;
    case GaugeFamily::Triangle:
      return 3;
    case GaugeFamily::Mixture:
      return 4;
    case GaugeFamily::Vine3:
      return 6;
    case GaugeFamily::Independence:
      return 1;
    case GaugeFamily::Additive: {
      int p = 0;
      for (const auto& b : d_->blocks) p += b.piece_hint();
      return p;
    }
    default:
      return 0;
  }
}

double GaugeSpec::face_excess(int pinned, int other, double a) const {
  require(d_->dim == 2, "face_excess: bivariate gauges only");
  require(pinned != other && pinned >= 0 && pinned < 2 && other >= 0 && other < 2,
          "face_excess: bad coordinate indices");
  switch (d_->family) {
    case GaugeFamily::Gaussian: {
      // (sqrt(a) - rho)^2 / (1 - rho^2), exact at the contact point.
      const double rho = d_->mat[1];
      const double t = std::sqrt(a) - rho;
      return t * t / (1.0 - rho * rho);
    }
    case GaugeFamily::InvertedLogistic: {
      // (1 + a^{1/theta})^theta - 1 without the cancellation.
      if (a == 0.0) return 0.0;
      return std::expm1(d_->theta * std::log1p(std::pow(a, 1.0 / d_->theta)));
    }
    case GaugeFamily::InvertedHuslerReiss: {
      // a Phi(l/2 + log(a)/l) - Phibar(l/2 - log(a)/l); both terms stay
      // representable long after g - 1 underflows.
      if (a == 0.0) return 0.0;
      const double l = d_->lambda;
      const double t = 0.5 * l + std::log(a) / l;
      return a * norm_cdf(t) - norm_sf(l - t);
    }
    default: {
      double p[2];
      p[pinned] = 1.0;
      p[other] = a;
      return eval_any(*d_, std::span<const double>(p, 2)) - 1.0;
    }
  }
}

double GaugeSpec::param(const std::string& name) const {
  if (name == "theta") return d_->theta;
  if (name == "theta2") return d_->theta2;
  if (name == "mu") return d_->mu;
  if (name == "lambda") return d_->lambda;
  if (name == "beta") return d_->beta;
  if (name == "gamma") return d_->gamma;
  if (name == "rho") {
    require(d_->family == GaugeFamily::Gaussian && d_->dim == 2, "param: rho is bivariate");
    return d_->mat[1];
  }
  throw std::invalid_argument("param: unknown field " + name);
}

const std::vector<double>& GaugeSpec::matrix() const { return d_->mat; }
const std::vector<GaugeSpec>& GaugeSpec::blocks() const { return d_->blocks; }
const GaugeSpec& GaugeSpec::inner() const {
  require(d_->inner != nullptr, "inner: gauge has no inner component");
  return *d_->inner;
}

void GaugeSpec::check_invariants(int n_rays, std::uint64_t seed) const {
  Rng rng(seed);
  const int n = d_->dim;
  std::vector<double> x(n), tx(n);
  const bool diag_only = extended_valued() && d_->family == GaugeFamily::HuslerReissGP;
  for (int r = 0; r < n_rays; ++r) {
    if (diag_only) {
      const double v = 0.05 + 3.0 * rng.uniform();
      for (int i = 0; i < n; ++i) x[i] = v;
    } else {
      for (int i = 0; i < n; ++i) x[i] = 3.0 * rng.uniform();
    }
    const double t = 0.05 + 4.0 * rng.uniform();
    for (int i = 0; i < n; ++i) tx[i] = t * x[i];
    const double g1 = eval_any(*d_, x);
    const double g2 = eval_any(*d_, tx);
    if (g1 == kInf || g2 == kInf) {
      if ((g1 == kInf) != (g2 == kInf)) {
        throw std::runtime_error("gauge invariant violated: homogeneity of the infinite set");
      }
      continue;
    }
    if (std::abs(g2 - t * g1) > 1e-12 * std::max(1.0, std::abs(t * g1)))
      throw std::runtime_error("gauge invariant violated: 1-homogeneity");
    double mx = 0.0;
    for (int i = 0; i < n; ++i) mx = std::max(mx, x[i]);
    if (g1 < mx - 1e-12)
      throw std::runtime_error("gauge invariant violated: g(x) >= max(x)");
  }
  d_->verified.store(true);
}

json GaugeSpec::to_json() const {
  json p = json::object();
  json j{{"family", family_name(d_->family)}, {"dim", d_->dim}};
  switch (d_->family) {
    case GaugeFamily::Gaussian:
      p["corr"] = d_->mat;
      break;
    case GaugeFamily::LogisticGP:
    case GaugeFamily::InvertedLogistic:
      p["theta"] = d_->theta;
      break;
    case GaugeFamily::HuslerReissGP:
      break;
    case GaugeFamily::InvertedHuslerReiss:
      p["lambda"] = d_->lambda;
      break;
    case GaugeFamily::Mixture:
      p["theta1"] = d_->theta;
      p["theta2"] = d_->theta2;
      break;
    case GaugeFamily::Triangle:
      p["theta"] = d_->theta;
      p["mu"] = d_->mu;
      break;
    case GaugeFamily::Vine3:
      p["beta"] = d_->beta;
      p["gamma"] = d_->gamma;
      break;
    case GaugeFamily::Independence:
    case GaugeFamily::MaxOnly:
      break;
    case GaugeFamily::Additive: {
      json blocks = json::array();
      for (const auto& b : d_->blocks) blocks.push_back(b.to_json());
      p["blocks"] = std::move(blocks);
      break;
    }
    case GaugeFamily::LinearImage:
      p["matrix"] = d_->mat;
      p["inner"] = d_->inner->to_json();
      break;
    case GaugeFamily::HWMix:
      p["gamma"] = d_->gamma;
      p["inner"] = d_->inner->to_json();
      break;
    case GaugeFamily::Custom:
      throw std::invalid_argument("to_json: custom gauges are not serializable");
  }
  j["params"] = std::move(p);
  return j;
}

GaugeSpec GaugeSpec::from_json(const json& j) {
  const std::string fam = j.at("family").get<std::string>();
  const int dim = j.value("dim", 2);
  const json p = j.value("params", json::object());
  if (fam == "gaussian") {
    if (p.contains("corr")) return gaussian(dim, p.at("corr").get<std::vector<double>>());
    return gaussian2(p.at("rho").get<double>());
  }
  if (fam == "logistic_gp") return logistic_gp(p.at("theta").get<double>());
  if (fam == "inverted_logistic") return inverted_logistic(p.at("theta").get<double>(), dim);
  if (fam == "husler_reiss_gp") return husler_reiss_gp(dim);
  if (fam == "inverted_husler_reiss") return inverted_husler_reiss(p.at("lambda").get<double>());
  if (fam == "mixture") return mixture(p.at("theta1").get<double>(), p.at("theta2").get<double>());
  if (fam == "triangle") return triangle(p.at("theta").get<double>(), p.value("mu", -1.0));
  if (fam == "vine3") return vine3(p.at("beta").get<double>(), p.at("gamma").get<double>());
  if (fam == "independence") return independence(dim);
  if (fam == "max_only") return max_only(dim);
  if (fam == "additive") {
    std::vector<GaugeSpec> blocks;
    for (const auto& b : p.at("blocks")) blocks.push_back(from_json(b));
    return additive(std::move(blocks));
  }
  if (fam == "linear_image")
    return linear_image(from_json(p.at("inner")), p.at("matrix").get<std::vector<double>>());
  if (fam == "hw_mix") return hw_mix(from_json(p.at("inner")), p.at("gamma").get<double>());
  throw std::invalid_argument("from_json: unknown gauge family '" + fam + "'");
}

}  // namespace limitset
