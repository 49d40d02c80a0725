#pragma once

// Shared numeric helpers: deterministic pairwise reduction, sign, and
// finiteness checks used throughout the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace pgs {

inline double sgn(double x) { return static_cast<double>(x > 0.0) - static_cast<double>(x < 0.0); }

// Pairwise (tree) reduction over a generator f(i). The association order is a
// function of the index range only, so results are bit-identical for a given
// input regardless of the execution environment.
template <class F>
double pairwise_accumulate(std::int64_t lo, std::int64_t hi, const F& f) {
  const std::int64_t n = hi - lo;
  if (n <= 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    return s;
  }
  const std::int64_t mid = lo + n / 2;
  return pairwise_accumulate(lo, mid, f) + pairwise_accumulate(mid, hi, f);
}

inline double pairwise_sum(std::span<const double> v) {
  return pairwise_accumulate(0, static_cast<std::int64_t>(v.size()),
                             [&](std::int64_t i) { return v[static_cast<std::size_t>(i)]; });
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_finite(std::span<const double> v, const char* what) {
  if (!all_finite(v)) throw std::domain_error(std::string("non-finite input: ") + what);
}

// Thrown when a requested region, image point or cutoff support does not fit
// inside the truncated grid.
class TruncationError : public std::runtime_error {
 public:
  explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pgs
