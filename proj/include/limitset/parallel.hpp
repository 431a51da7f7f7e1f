#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace limitset::par {

// Process-wide switch. The OpenMP kernels are written so that results are
// bit-identical with the switch on or off; the serial path doubles as the
// reference implementation in tests and benchmarks.
bool enabled();
void set_enabled(bool on);

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace detail {
inline bool& flag() {
  static bool on = true;
  return on;
}
}  // namespace detail

inline bool enabled() { return detail::flag(); }
inline void set_enabled(bool on) { detail::flag() = on; }

// Index-parallel loop. Body must only write to per-index state.
template <class F>
void for_index(std::int64_t n, F&& body, std::int64_t grain = 1) {
  if (enabled() && n > grain) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
#endif
  }
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Parallel max-reduction; max over doubles is order-independent, so the
// result matches the serial path exactly.
template <class F>
double max_index(std::int64_t n, F&& value, double init) {
  double best = init;
  if (enabled() && n > 1) {
#ifdef _OPENMP
#pragma omp parallel
    {
      double local = init;
#pragma omp for schedule(static) nowait
      for (std::int64_t i = 0; i < n; ++i) {
        const double v = value(i);
        if (v > local) local = v;
      }
#pragma omp critical
      {
        if (local > best) best = local;
      }
    }
    return best;
#endif
  }
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = value(i);
    if (v > best) best = v;
  }
  return best;
}

}  // namespace limitset::par
