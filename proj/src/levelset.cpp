#include "limitset/levelset.hpp"

#include <cmath>
#include <stdexcept>

#include "limitset/measures.hpp"

namespace limitset {

namespace {

void radial_fill(LevelSetMesh& mesh, int layers) {
  const int d = mesh.dim;
  mesh.set_points = mesh.boundary;
  const std::size_t nb = mesh.boundary_count();
  for (int l = 1; l < layers; ++l) {
    const double t = static_cast<double>(l) / layers;
    for (std::size_t i = 0; i < nb; ++i)
      for (int j = 0; j < d; ++j)
        mesh.set_points.push_back(t * mesh.boundary[i * d + j]);
  }
  mesh.set_points.insert(mesh.set_points.end(), static_cast<std::size_t>(d), 0.0);
}

}  // namespace

LevelSetMesh level_set_mesh(const GaugeSpec& g, int n, int radial_layers) {
  const int d = g.dim();
  LevelSetMesh mesh;
  mesh.dim = d;
  if (d == 2) {
    if (n <= 0) n = 400;
    for (int i = 0; i <= n; ++i) {
      const double phi = 1.5707963267948966 * i / n;
      const double dir[2] = {std::cos(phi), std::sin(phi)};
      const double gv = g(std::span<const double>(dir, 2));
      if (!std::isfinite(gv) || gv <= 0.0) continue;
      mesh.boundary.push_back(dir[0] / gv);
      mesh.boundary.push_back(dir[1] / gv);
    }
  } else if (d == 3) {
    if (n <= 0) n = 50;
    for (int a = 0; a <= n; ++a) {
      const double theta = 1.5707963267948966 * a / n;
      for (int b = 0; b <= n; ++b) {
        const double phi = 1.5707963267948966 * b / n;
        const double dir[3] = {std::sin(theta) * std::cos(phi),
                               std::sin(theta) * std::sin(phi), std::cos(theta)};
        const double gv = g(std::span<const double>(dir, 3));
        if (!std::isfinite(gv) || gv <= 0.0) continue;
        mesh.boundary.push_back(dir[0] / gv);
        mesh.boundary.push_back(dir[1] / gv);
        mesh.boundary.push_back(dir[2] / gv);
      }
    }
  } else {
    throw std::invalid_argument("level_set_mesh: dim must be 2 or 3");
  }
  if (mesh.boundary.empty())
    throw std::domain_error("level_set_mesh: gauge infinite in every direction");
  radial_fill(mesh, radial_layers);
  return mesh;
}

LevelSetMesh neg_corr_gaussian_mesh(double rho, int n, int radial_layers) {
  if (!(rho < 0.0 && rho > -1.0))
    throw std::invalid_argument("neg_corr_gaussian_mesh: rho in (-1,0) required");
  LevelSetMesh mesh;
  mesh.dim = 2;
  const double denom = 1.0 - rho * rho;
  for (int i = 0; i <= n; ++i) {
    const double phi = 1.5707963267948966 * i / n;
    const double x = std::cos(phi), y = std::sin(phi);
    const double gv = (x + y - 2.0 * rho * std::sqrt(x * y)) / denom;
    mesh.boundary.push_back(x / gv);
    mesh.boundary.push_back(y / gv);
  }
  // unit segments along the axes belong to the limit set
  const int seg = n / 4;
  for (int i = 0; i <= seg; ++i) {
    const double t = static_cast<double>(i) / seg;
    mesh.boundary.push_back(t);
    mesh.boundary.push_back(0.0);
    mesh.boundary.push_back(0.0);
    mesh.boundary.push_back(t);
  }
  radial_fill(mesh, radial_layers);
  return mesh;
}

std::vector<double> lambda_overlay_polyline(const GaugeSpec& g, int n) {
  if (g.dim() != 2)
    throw std::invalid_argument("lambda_overlay_polyline: bivariate gauges only");
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) {
    const double w = static_cast<double>(i) / n;
    const double omega[2] = {w, 1.0 - w};
    const double mx = std::max(w, 1.0 - w);
    const double lam = lambda_omega(g, omega);
    const double r = mx / lam;  // first touching radius of the corner region
    out.push_back(r * w / mx);
    out.push_back(r * (1.0 - w) / mx);
  }
  return out;
}

}  // namespace limitset
