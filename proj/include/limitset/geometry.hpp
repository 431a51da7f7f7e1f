#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "limitset/gauge.hpp"

namespace limitset {

// One axis-aligned face: a box with a single pinned coordinate.
struct Face {
  int pinned_index = 0;
  double pinned_value = 0.0;
  std::vector<double> lo, hi;  // full-dimensional; lo = hi = pinned_value at pinned_index

  int dim() const { return static_cast<int>(lo.size()); }
};

enum class RegionKind { Omega, SubsetDelta, MinFace };

// A finite union of faces covering the mathematical boundary up to the
// truncation bound U.
struct BoundaryRegion {
  RegionKind kind{};
  std::vector<Face> faces;
  std::vector<double> vertex;  // corner point shared by all faces

  nlohmann::json to_json() const;
};

// Faces pinning x_i = w_i / max(w) with the free coordinates in
// [w_j / max(w), U]. Zero components are permitted and pin a face at 0.
BoundaryRegion build_omega_boundary(std::span<const double> omega, double U);

// For each i in C a face pins x_i = 1, the other C coordinates range over
// [1, U] and the coordinates outside C over [0, delta].
BoundaryRegion build_subset_boundary(int dim, const std::vector<int>& C, double delta, double U);

// The boundary of the region where every coordinate exceeds 1.
BoundaryRegion build_min_face(int dim, double U);

// Truncation bound via dominance: g(y) >= max(y) caps every coordinate of a
// minimizer by the value of g at any finite region point, so U = that value
// plus one. Tries the region vertex first, then the projection of the
// diagonal onto each face (extended-valued gauges are often finite only
// there). Falls back to max(2, 2 max(vertex)).
double truncation_bound(const GaugeSpec& g, const RegionKind kind,
                        std::span<const double> vertex);

struct MinimizeOptions {
  int grid_points = 33;      // per free dimension (exact-grid seeding for dim <= 4)
  int restarts = 8;          // random multistarts on top of grid seeds
  std::uint64_t seed = 0x51eadbeef;
  bool parallel = true;
  double certified_tol = 1e-6;  // relative; widened to 1e-4 above dim 4
};

struct MinResult {
  double value = kInf;
  std::vector<double> argmin;
  int face_index = -1;
  double certified_tol = 1e-6;
  bool tie = false;  // several faces reach the minimum within tolerance
};

// Minimum of g over the region. Per face: coarse grid scan seeding clamped
// Nelder-Mead multistart, then a golden-section sweep along each coordinate;
// the face vertex and the diagonal projection always enter as candidates.
// Deterministic given the seed. Throws if g is infinite on every face
// ("degenerate gauge on region").
MinResult minimize(const GaugeSpec& g, const BoundaryRegion& region,
                   const MinimizeOptions& opts = {});

// Same search over a plain box; used for numerical marginalization.
struct BoxMinResult {
  double value = kInf;
  std::vector<double> x;
};
BoxMinResult minimize_box(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> lo, std::span<const double> hi,
                          const MinimizeOptions& opts = {},
                          std::span<const double> extra_candidates = {});

}  // namespace limitset
