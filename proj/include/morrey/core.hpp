#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace morrey {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  invalid_input = 2,
  cost_guard = 3,
  degenerate_corpus = 4,
  numerical = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

/// A point of R^n for n <= 2; unused trailing coordinates are zero.
using Point = std::array<double, 2>;

inline double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

inline double norm(const Point& a, int dim) { return distance(a, Point{0.0, 0.0}, dim); }

/// Pairwise (tree) summation of term(0), ..., term(n-1).
///
/// The split points depend only on n, so the result is bit-identical for a
/// given input no matter who calls it or how often.
template <class Term>
double pairwise_sum(std::size_t first, std::size_t last, const Term& term) {
  constexpr std::size_t leaf = 16;
  if (last - first <= leaf) {
    double s = 0.0;
    for (std::size_t i = first; i < last; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = first + (last - first) / 2;
  return pairwise_sum(first, mid, term) + pairwise_sum(mid, last, term);
}

template <class Term>
double pairwise_sum(std::size_t n, const Term& term) {
  return pairwise_sum(std::size_t{0}, n, term);
}

/// Seeded generator with a platform-independent unit mapping.
///
/// std::mt19937_64 output is fixed by the standard; the standard
/// distributions are not, so uniform() maps the top 53 bits by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] (modulo bias is irrelevant at these spans).
  long integer(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline double relative_difference(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace morrey
