#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "morrey/core.hpp"

namespace morrey {

/// Uniform cell-centred lattice over the cube [-L, L]^n.
///
/// Samples sit at -L + (i + 1/2) h along each axis, so no sample is ever at
/// the origin and |x| >= h/2 for every sample.
class Grid {
 public:
  Grid(int dim, double half_extent, double spacing)
      : dim_(dim), half_extent_(half_extent), spacing_(spacing) {
    if (dim != 1 && dim != 2) fail(ErrorCode::invalid_input, "grid dimension must be 1 or 2");
    if (!(spacing > 0.0) || !(half_extent > 0.0))
      fail(ErrorCode::invalid_input, "grid spacing and half-extent must be positive");
    const double ratio = half_extent / spacing;
    const auto rounded = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(rounded)) > 1e-9 * ratio || !is_power_of_two(rounded))
      fail(ErrorCode::invalid_input, "L/h must be a power of two");
    per_axis_ = 2 * rounded;
  }

  int dim() const { return dim_; }
  double half_extent() const { return half_extent_; }
  double spacing() const { return spacing_; }
  std::size_t per_axis() const { return per_axis_; }
  std::size_t size() const { return dim_ == 1 ? per_axis_ : per_axis_ * per_axis_; }
  double cell_volume() const { return dim_ == 1 ? spacing_ : spacing_ * spacing_; }

  double coordinate(std::size_t axis_index) const {
    return -half_extent_ + (static_cast<double>(axis_index) + 0.5) * spacing_;
  }

  /// Row-major: the first coordinate varies slowest.
  Point point(std::size_t index) const {
    if (dim_ == 1) return {coordinate(index), 0.0};
    return {coordinate(index / per_axis_), coordinate(index % per_axis_)};
  }

  Grid refined() const { return Grid(dim_, half_extent_, spacing_ / 2.0); }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && half_extent_ == other.half_extent_ && spacing_ == other.spacing_;
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int dim_;
  double half_extent_;
  double spacing_;
  std::size_t per_axis_ = 0;
};

/// One finite real value per lattice sample.
class SampledFunction {
 public:
  SampledFunction(Grid grid, std::vector<double> values, std::string name = {})
      : grid_(std::move(grid)), values_(std::move(values)), name_(std::move(name)) {
    if (values_.size() != grid_.size())
      fail(ErrorCode::invalid_input, "sample count does not match grid");
    for (double v : values_)
      if (!std::isfinite(v)) fail(ErrorCode::numerical, "non-finite sample value");
  }

  static SampledFunction constant(const Grid& grid, double c, std::string name = {}) {
    return SampledFunction(grid, std::vector<double>(grid.size(), c), std::move(name));
  }

  template <class Fn>
  static SampledFunction sample(const Grid& grid, Fn&& fn, std::string name = {}) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(grid.point(i));
    return SampledFunction(grid, std::move(values), std::move(name));
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  const std::string& name() const { return name_; }

  SampledFunction renamed(std::string name) const {
    SampledFunction copy = *this;
    copy.name_ = std::move(name);
    return copy;
  }

  template <class Fn>
  SampledFunction map(Fn&& fn) const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(values_[i]);
    return SampledFunction(grid_, std::move(out), name_);
  }

  SampledFunction abs() const {
    return map([](double v) { return std::abs(v); });
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  friend SampledFunction operator*(double c, const SampledFunction& f) {
    return f.map([c](double v) { return c * v; });
  }

  friend SampledFunction operator+(const SampledFunction& a, const SampledFunction& b) {
    return combine(a, b, [](double x, double y) { return x + y; });
  }
  friend SampledFunction operator-(const SampledFunction& a, const SampledFunction& b) {
    return combine(a, b, [](double x, double y) { return x - y; });
  }
  friend SampledFunction operator*(const SampledFunction& a, const SampledFunction& b) {
    return combine(a, b, [](double x, double y) { return x * y; });
  }

 private:
  template <class Op>
  static SampledFunction combine(const SampledFunction& a, const SampledFunction& b, Op op) {
    if (a.grid_ != b.grid_) fail(ErrorCode::invalid_input, "functions live on different grids");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a.values_[i], b.values_[i]);
    return SampledFunction(a.grid_, std::move(out), a.name_);
  }

  Grid grid_;
  std::vector<double> values_;
  std::string name_;
};

/// Open Euclidean ball.
struct Ball {
  Point center{0.0, 0.0};
  double radius = 1.0;

  bool contains(const Point& x, int dim) const { return distance(x, center, dim) < radius; }

  Ball scaled(double t) const { return {center, radius * t}; }
};

/// True when the ball reaches outside the grid cube.
inline bool clipped(const Grid& grid, const Ball& ball) {
  for (int d = 0; d < grid.dim(); ++d)
    if (ball.center[d] - ball.radius < -grid.half_extent() ||
        ball.center[d] + ball.radius > grid.half_extent())
      return true;
  return false;
}

/// Sorted sample indices of a subset of the grid.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<std::size_t> indices) : indices_(std::move(indices)) {}

  static Region whole(const Grid& grid) {
    std::vector<std::size_t> idx(grid.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return Region(std::move(idx));
  }

  static Region of(const Grid& grid, const Ball& ball) {
    std::vector<std::size_t> idx;
    const double h = grid.spacing();
    const auto n = grid.per_axis();
    auto axis_range = [&](double c) {
      // Conservative index window, refined by the exact membership test below.
      const double lo = (c - ball.radius + grid.half_extent()) / h - 1.0;
      const double hi = (c + ball.radius + grid.half_extent()) / h + 1.0;
      const auto first = static_cast<std::size_t>(std::clamp(std::floor(lo), 0.0, double(n)));
      const auto last = static_cast<std::size_t>(std::clamp(std::ceil(hi), 0.0, double(n)));
      return std::pair{first, last};
    };
    const auto [r0, r1] = axis_range(ball.center[0]);
    if (grid.dim() == 1) {
      for (std::size_t i = r0; i < r1; ++i)
        if (ball.contains(grid.point(i), 1)) idx.push_back(i);
    } else {
      const auto [c0, c1] = axis_range(ball.center[1]);
      for (std::size_t i = r0; i < r1; ++i)
        for (std::size_t j = c0; j < c1; ++j) {
          const std::size_t k = i * n + j;
          if (ball.contains(grid.point(k), 2)) idx.push_back(k);
        }
    }
    return Region(std::move(idx));
  }

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  /// Lebesgue measure of the sampled region, h^n times the sample count.
  double measure(const Grid& grid) const { return grid.cell_volume() * static_cast<double>(size()); }

 private:
  std::vector<std::size_t> indices_;
};

/// Pairwise-ordered sum of term(k) over the region's canonical index order.
template <class Term>
double region_sum(const Region& region, const Term& term) {
  const auto& idx = region.indices();
  return pairwise_sum(idx.size(), [&](std::size_t k) { return term(idx[k]); });
}

/// Midpoint-rule integral h^n * sum f(x_i) over the region.
inline double integrate(const SampledFunction& f, const Region& region) {
  if (region.empty()) fail(ErrorCode::invalid_input, "empty region");
  const auto& v = f.values();
  return f.grid().cell_volume() * region_sum(region, [&](std::size_t i) { return v[i]; });
}

inline double integrate(const SampledFunction& f, const Ball& ball) {
  return integrate(f, Region::of(f.grid(), ball));
}

inline double integrate(const SampledFunction& f) { return integrate(f, Region::whole(f.grid())); }

/// Integral of the product f*g over the region.
inline double integrate_product(const SampledFunction& f, const SampledFunction& g,
                                const Region& region) {
  if (region.empty()) fail(ErrorCode::invalid_input, "empty region");
  const auto& a = f.values();
  const auto& b = g.values();
  return f.grid().cell_volume() * region_sum(region, [&](std::size_t i) { return a[i] * b[i]; });
}

/// Average (1/|B|) * integral over the sampled region.
inline double region_average(const SampledFunction& f, const Region& region) {
  if (region.empty()) fail(ErrorCode::invalid_input, "empty region");
  const auto& v = f.values();
  return region_sum(region, [&](std::size_t i) { return v[i]; }) / static_cast<double>(region.size());
}

template <class Term>
double region_average_of(const Region& region, const Term& term) {
  if (region.empty()) fail(ErrorCode::invalid_input, "empty region");
  return region_sum(region, term) / static_cast<double>(region.size());
}

inline double region_min(const SampledFunction& f, const Region& region) {
  if (region.empty()) fail(ErrorCode::invalid_input, "empty region");
  double m = std::numeric_limits<double>::infinity();
  for (auto i : region.indices()) m = std::min(m, f[i]);
  return m;
}

struct AnnulusPair {
  Ball outer;  // 2^{j+1} B
  Ball inner;  // 2^j B
  int level = 1;
};

/// Dyadic dilations (2^{j+1}B, 2^jB) for j = 1..j_max. Clipping to the cube
/// happens when the balls are turned into regions.
inline std::vector<AnnulusPair> dyadic_annuli(const Ball& ball, int j_max) {
  if (j_max < 1) fail(ErrorCode::invalid_input, "j_max must be at least 1");
  std::vector<AnnulusPair> out;
  for (int j = 1; j <= j_max; ++j)
    out.push_back({ball.scaled(std::ldexp(1.0, j + 1)), ball.scaled(std::ldexp(1.0, j)), j});
  return out;
}

enum class CenterLayout { origin, lattice };

/// Generation parameters of a ball family: a dyadic radius ladder
/// r_min * 2^k <= r_max and a center layout.
struct FamilyParams {
  CenterLayout centers = CenterLayout::lattice;
  double r_min = 0.0;  // 0 means "2h"
  double r_max = 0.0;  // 0 means "2L"
  double center_spacing = 0.5;  // lattice centers every center_spacing * r
  bool include_domain_ball = true;

  /// Ladder extended by `steps` dyadic radii above r_max.
  FamilyParams extended_up(int steps) const {
    FamilyParams p = *this;
    p.r_max = r_max * std::ldexp(1.0, steps);
    return p;
  }

  /// Ladder extended by `steps` dyadic radii below r_min.
  FamilyParams extended_down(int steps) const {
    FamilyParams p = *this;
    p.r_min = r_min * std::ldexp(1.0, -steps);
    return p;
  }
};

/// Finite stand-in for "all balls": balls over a dyadic radius ladder with
/// precomputed sample regions. Balls whose region is empty are dropped.
class BallFamily {
 public:
  BallFamily(const Grid& grid, FamilyParams params) : grid_(grid), params_(params) {
    const double h = grid.spacing();
    const double L = grid.half_extent();
    if (params_.r_min <= 0.0) params_.r_min = 2.0 * h;
    if (params_.r_max <= 0.0) params_.r_max = 2.0 * L;
    if (params_.r_min < h * (1.0 - 1e-12))
      fail(ErrorCode::invalid_input, "ball radius below grid spacing");
    if (params_.r_max < params_.r_min) fail(ErrorCode::invalid_input, "empty radius ladder");

    for (double r = params_.r_min; r <= params_.r_max * (1.0 + 1e-12); r *= 2.0) {
      radii_.push_back(r);
      if (params_.centers == CenterLayout::origin) {
        add({{0.0, 0.0}, r});
        continue;
      }
      const double step = params_.center_spacing * r;
      const long count = static_cast<long>(std::floor(L / step + 1e-9));
      for (long a = -count; a <= count; ++a) {
        if (grid.dim() == 1) {
          add({{a * step, 0.0}, r});
        } else {
          for (long b = -count; b <= count; ++b) add({{a * step, b * step}, r});
        }
      }
    }
    if (params_.include_domain_ball) add({{0.0, 0.0}, 2.0 * L});
    if (balls_.empty()) fail(ErrorCode::invalid_input, "ball family is empty");
  }

  const Grid& grid() const { return grid_; }
  const FamilyParams& params() const { return params_; }
  const std::vector<Ball>& balls() const { return balls_; }
  const std::vector<Region>& regions() const { return regions_; }
  const std::vector<double>& radii() const { return radii_; }
  std::size_t size() const { return balls_.size(); }

  bool covers_domain() const {
    return std::any_of(regions_.begin(), regions_.end(),
                       [&](const Region& r) { return r.size() == grid_.size(); });
  }

  BallFamily on(const Grid& grid) const { return BallFamily(grid, params_); }

  /// A family with new parameters on the same grid.
  BallFamily with(FamilyParams params) const { return BallFamily(grid_, params); }

 private:
  void add(const Ball& ball) {
    Region region = Region::of(grid_, ball);
    if (region.empty()) return;
    balls_.push_back(ball);
    regions_.push_back(std::move(region));
  }

  Grid grid_;
  FamilyParams params_;
  std::vector<Ball> balls_;
  std::vector<Region> regions_;
  std::vector<double> radii_;
};

}  // namespace morrey
