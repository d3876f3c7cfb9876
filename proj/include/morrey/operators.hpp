#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "morrey/lattice.hpp"
#include "morrey/orlicz.hpp"

namespace morrey {

enum class KernelKind { majorant, homogeneous };

/// m-linear kernel on R^n with u = (x - y_1, ..., x - y_m).
///
/// majorant:    A / (sum_i |u_i|)^{mn}
/// homogeneous: A * Omega(u/|u|) / |u|^{mn}, with Omega(v) = Re (v_0 + i v_1)^k
///              when mn >= 2 (cos k phi on the circle) and v_0^k when mn = 1.
class MultilinearKernel {
 public:
  static MultilinearKernel majorant(int m, int n, double amplitude = 1.0) {
    return MultilinearKernel(KernelKind::majorant, m, n, amplitude, 0);
  }
  static MultilinearKernel homogeneous(int m, int n, int harmonic, double amplitude = 1.0) {
    if (harmonic < 0) fail(ErrorCode::invalid_input, "harmonic must be nonnegative");
    return MultilinearKernel(KernelKind::homogeneous, m, n, amplitude, harmonic);
  }

  KernelKind kind() const { return kind_; }
  int arity() const { return m_; }
  int dim() const { return n_; }
  int harmonic() const { return k_; }
  double amplitude() const { return a_; }

  /// Claimed size constant: |K| <= size_constant() / (sum |u_i|)^{mn}.
  double size_constant() const {
    if (kind_ == KernelKind::majorant) return a_;
    return a_ * std::pow(static_cast<double>(m_), 0.5 * m_ * n_);
  }

  /// K evaluated from the flattened difference vector u (length mn).
  double from_differences(const double* u) const {
    const int d = m_ * n_;
    if (kind_ == KernelKind::majorant) {
      double s = 0.0;
      for (int i = 0; i < m_; ++i) {
        double q = 0.0;
        for (int c = 0; c < n_; ++c) q += u[i * n_ + c] * u[i * n_ + c];
        s += std::sqrt(q);
      }
      return a_ / ipow(s, d);
    }
    double q = 0.0;
    for (int j = 0; j < d; ++j) q += u[j] * u[j];
    if (d == 1) {
      const double sign = u[0] > 0.0 ? 1.0 : -1.0;
      return a_ * (k_ % 2 == 0 ? 1.0 : sign) / std::abs(u[0]);
    }
    const double r = std::sqrt(q);
    double omega;
    if (k_ == 0) omega = 1.0;
    else if (k_ == 2) omega = (u[0] * u[0] - u[1] * u[1]) / q;
    else omega = std::real(std::pow(std::complex<double>(u[0] / r, u[1] / r), k_));
    return a_ * omega / ipow(r, d);
  }

  double operator()(const Point& x, const std::vector<Point>& ys) const {
    double u[4];
    for (int i = 0; i < m_; ++i)
      for (int c = 0; c < n_; ++c) u[i * n_ + c] = x[c] - ys[i][c];
    return from_differences(u);
  }

  std::string describe() const {
    return (kind_ == KernelKind::majorant ? "majorant" : "homogeneous(k=" + std::to_string(k_) + ")") +
           " m=" + std::to_string(m_) + " n=" + std::to_string(n_) + " A=" + std::to_string(a_);
  }

 private:
  MultilinearKernel(KernelKind kind, int m, int n, double a, int k) : kind_(kind), m_(m), n_(n), a_(a), k_(k) {
    if (m < 1 || n < 1 || n > 2) fail(ErrorCode::invalid_input, "kernel needs m >= 1 and n in {1,2}");
    if (m * n > 4) fail(ErrorCode::cost_guard, "kernel with m*n > 4 exceeds the quadrature budget");
    if (!(a > 0.0)) fail(ErrorCode::invalid_input, "kernel amplitude must be positive");
  }

  static double ipow(double v, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= v;
    return r;
  }

  KernelKind kind_;
  int m_, n_;
  double a_;
  int k_;
};

struct KernelConstants {
  double size = 0.0;   // condition on |K|
  double reg_x = 0.0;  // smoothness in x
  double reg_y = 0.0;  // smoothness in each y_k (max over k)
  std::size_t samples = 0;
};

/// Smallest constants making the size and both smoothness conditions hold on
/// `budget` seeded random tuples in [-1,1]^n, displacements within half the
/// largest |x - y_i|.
inline KernelConstants kernel_condition_check(const MultilinearKernel& k, const ThetaModulus& theta,
                                              std::size_t budget, std::uint64_t seed = 1) {
  if (budget < 1000) fail(ErrorCode::invalid_input, "kernel check needs a sample budget of at least 1000");
  Rng rng(seed);
  const int m = k.arity(), n = k.dim();
  auto random_point = [&] {
    Point p{0.0, 0.0};
    for (int c = 0; c < n; ++c) p[c] = rng.uniform(-1.0, 1.0);
    return p;
  };
  auto displaced = [&](const Point& base, double radius) {
    Point d{0.0, 0.0};
    if (n == 1) {
      d[0] = rng.uniform(-radius, radius);
    } else {
      const double rho = radius * std::sqrt(rng.uniform());
      const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
      d = {rho * std::cos(ang), rho * std::sin(ang)};
    }
    return Point{base[0] + d[0], base[1] + d[1]};
  };

  KernelConstants out;
  auto record = [](double& slot, double value) {
    if (!std::isfinite(value)) fail(ErrorCode::numerical, "kernel inadmissible");
    slot = std::max(slot, value);
  };
  for (std::size_t s = 0; s < budget; ++s) {
    const Point x = random_point();
    std::vector<Point> ys(m);
    double sum = 0.0, mx = 0.0;
    for (auto& y : ys) {
      y = random_point();
      const double d = distance(x, y, n);
      sum += d;
      mx = std::max(mx, d);
    }
    if (sum == 0.0) continue;
    const double scale = std::pow(sum, m * n);
    const double kv = k(x, ys);
    record(out.size, std::abs(kv) * scale);

    const Point xp = displaced(x, 0.5 * mx);
    const double tx = theta(distance(x, xp, n) / sum);
    const double dx = std::abs(kv - k(xp, ys));
    if (dx > 0.0) record(out.reg_x, dx * scale / tx);

    for (int i = 0; i < m; ++i) {
      std::vector<Point> yp = ys;
      yp[i] = displaced(ys[i], 0.5 * mx);
      const double ty = theta(distance(ys[i], yp[i], n) / sum);
      const double dy = std::abs(kv - k(x, yp));
      if (dy > 0.0) record(out.reg_y, dy * scale / ty);
    }
    ++out.samples;
  }
  return out;
}

/// Tuples with some |x - y_i| < epsilon are skipped; epsilon defaults to h.
struct TruncationPolicy {
  double epsilon_over_h = 1.0;
};

struct ApplyOptions {
  TruncationPolicy trunc;
  bool audit = false;
  /// Output sample indices to evaluate; all samples when empty.
  std::vector<std::size_t> targets;
};

struct ApplyStats {
  double evaluations = 0.0;
  std::size_t audit_checked = 0;
  std::size_t audit_violations = 0;
};

inline constexpr double max_kernel_evaluations = 1e9;

namespace detail {

struct Support {
  std::vector<std::size_t> index;
  std::vector<double> value;
};

inline Support support_of(const SampledFunction& f) {
  Support s;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != 0.0) {
      s.index.push_back(i);
      s.value.push_back(f[i]);
    }
  return s;
}

}  // namespace detail

/// h^{mn} sum over admissible tuples of factor(x, y) K(x, y) prod f_i(y_i),
/// where factor receives the output index and the tuple's sample indices.
template <class Factor>
SampledFunction apply_weighted(const MultilinearKernel& k, const std::vector<SampledFunction>& fs,
                               const ApplyOptions& opt, Factor&& factor, ApplyStats* stats = nullptr) {
  const int m = k.arity(), n = k.dim();
  if (static_cast<int>(fs.size()) != m) fail(ErrorCode::invalid_input, "operator arity mismatch");
  const Grid& grid = fs.front().grid();
  for (const auto& f : fs)
    if (f.grid() != grid) fail(ErrorCode::invalid_input, "grid mismatch");
  if (grid.dim() != n) fail(ErrorCode::invalid_input, "kernel and grid dimensions differ");
  if (opt.trunc.epsilon_over_h < 0.5) fail(ErrorCode::invalid_input, "truncation radius below h/2");

  std::vector<detail::Support> sup;
  for (const auto& f : fs) sup.push_back(detail::support_of(f));

  std::vector<std::size_t> targets = opt.targets;
  if (targets.empty()) {
    targets.resize(grid.size());
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = i;
  }
  double cost = static_cast<double>(targets.size());
  for (const auto& s : sup) cost *= static_cast<double>(s.index.size());
  if (cost > max_kernel_evaluations)
    fail(ErrorCode::cost_guard, "operator application needs ~" + std::to_string(static_cast<long long>(cost)) +
                                    " kernel evaluations (limit 1e9)");

  std::vector<double> out(grid.size(), 0.0);
  const double eps = opt.trunc.epsilon_over_h * grid.spacing();
  const double weight = std::pow(grid.cell_volume(), m);
  const double a_size = k.size_constant();
  std::vector<std::vector<Point>> pts(m);
  for (int i = 0; i < m; ++i)
    for (std::size_t j : sup[i].index) pts[i].push_back(grid.point(j));

  std::size_t checked = 0, violations = 0;
  std::vector<std::size_t> cursor(m), yidx(m);
  std::vector<double> terms;
  for (std::size_t t : targets) {
    const Point x = grid.point(t);
    bool any_empty = false;
    for (const auto& s : sup) any_empty = any_empty || s.index.empty();
    if (any_empty) break;
    terms.clear();
    std::fill(cursor.begin(), cursor.end(), 0);
    double u[4];
    // Odometer over the Cartesian product of supports, last slot fastest.
    while (true) {
      bool admissible = true;
      double prod = 1.0, l1 = 0.0;
      for (int i = 0; i < m && admissible; ++i) {
        const Point& y = pts[i][cursor[i]];
        double q = 0.0;
        for (int c = 0; c < n; ++c) {
          u[i * n + c] = x[c] - y[c];
          q += u[i * n + c] * u[i * n + c];
        }
        const double dist = std::sqrt(q);
        if (dist < eps) admissible = false;
        l1 += dist;
        prod *= sup[i].value[cursor[i]];
        yidx[i] = sup[i].index[cursor[i]];
      }
      if (admissible) {
        const double kv = k.from_differences(u);
        if (opt.audit) {
          ++checked;
          if (std::abs(kv) * std::pow(l1, m * n) > a_size * (1.0 + 1e-12)) ++violations;
        }
        terms.push_back(kv * prod * factor(t, yidx));
      }
      int slot = m - 1;
      while (slot >= 0 && ++cursor[slot] == sup[slot].index.size()) cursor[slot--] = 0;
      if (slot < 0) break;
    }
    out[t] = weight * pairwise_sum(terms.size(), [&](std::size_t i) { return terms[i]; });
  }
  if (stats) {
    stats->evaluations += cost;
    stats->audit_checked += checked;
    stats->audit_violations += violations;
  }
  return SampledFunction(grid, std::move(out), "T");
}

inline SampledFunction apply_operator(const MultilinearKernel& k, const std::vector<SampledFunction>& fs,
                                      const ApplyOptions& opt = {}, ApplyStats* stats = nullptr) {
  return apply_weighted(k, fs, opt, [](std::size_t, const std::vector<std::size_t>&) { return 1.0; }, stats);
}

/// Geometric constant of the tail bound: (4 V_n^{1/n})^{mn}, i.e. 8^m in 1D.
inline double tail_geometric_constant(int m, int n) {
  const double vn = n == 1 ? 2.0 : std::numbers::pi;
  return std::pow(4.0 * std::pow(vn, 1.0 / n), m * n);
}

struct TailMajorant {
  double value = 0.0;
  double c_geo = 0.0;
  std::vector<double> terms;  // prod_i average |f_i| over 2^{j+1}B, j = 1..j_max
};

/// A C_geo sum_{j=1}^{j_max} prod_i average of |f_i| over the clipped 2^{j+1}B.
inline TailMajorant tail_majorant(const MultilinearKernel& k, const Ball& ball,
                                  const std::vector<SampledFunction>& fs, int j_max) {
  if (static_cast<int>(fs.size()) != k.arity()) fail(ErrorCode::invalid_input, "operator arity mismatch");
  const Grid& grid = fs.front().grid();
  TailMajorant t;
  t.c_geo = tail_geometric_constant(k.arity(), k.dim());
  double sum = 0.0;
  for (const auto& pair : dyadic_annuli(ball, j_max)) {
    const Region outer = Region::of(grid, pair.outer);
    double prod = 1.0;
    for (const auto& f : fs) {
      const auto& v = f.values();
      prod *= outer.empty() ? 0.0 : region_average_of(outer, [&](std::size_t i) { return std::abs(v[i]); });
    }
    t.terms.push_back(prod);
    sum += prod;
  }
  t.value = k.size_constant() * t.c_geo * sum;
  return t;
}

// --- commutators --------------------------------------------------------------

struct CommutatorPair {
  SampledFunction kernel_form;
  SampledFunction algebraic_form;
};

/// [Sigma b, T](f) = sum_k [b_k(x) - b_k(y_k)] K prod f_i, by the kernel
/// formula and as sum_k (b_k T(f) - T(..., b_k f_k, ...)).
inline CommutatorPair multilinear_commutator(const MultilinearKernel& k, const std::vector<SampledFunction>& bs,
                                             const std::vector<SampledFunction>& fs, const ApplyOptions& opt = {},
                                             ApplyStats* stats = nullptr) {
  if (bs.size() != fs.size()) fail(ErrorCode::invalid_input, "symbol count must equal arity");
  auto kernel_form =
      apply_weighted(k, fs, opt,
                     [&](std::size_t x, const std::vector<std::size_t>& y) {
                       double s = 0.0;
                       for (std::size_t i = 0; i < bs.size(); ++i) s += bs[i][x] - bs[i][y[i]];
                       return s;
                     },
                     stats);
  const SampledFunction base = apply_operator(k, fs, opt, stats);
  SampledFunction alg = SampledFunction::constant(base.grid(), 0.0);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    auto shifted = fs;
    shifted[i] = bs[i] * fs[i];
    alg = alg + (bs[i] * base - apply_operator(k, shifted, opt, stats));
  }
  if (!opt.targets.empty()) {
    std::vector<double> v(alg.size(), 0.0);
    for (std::size_t t : opt.targets) v[t] = alg[t];
    alg = SampledFunction(alg.grid(), std::move(v));
  }
  return {kernel_form.renamed("[Sb,T]"), alg.renamed("[Sb,T] algebraic")};
}

/// [Pi b, T](f) = prod_k [b_k(x) - b_k(y_k)] K prod f_i.
inline SampledFunction iterated_commutator(const MultilinearKernel& k, const std::vector<SampledFunction>& bs,
                                           const std::vector<SampledFunction>& fs, const ApplyOptions& opt = {},
                                           ApplyStats* stats = nullptr) {
  if (bs.size() != fs.size()) fail(ErrorCode::invalid_input, "symbol count must equal arity");
  return apply_weighted(k, fs, opt,
                        [&](std::size_t x, const std::vector<std::size_t>& y) {
                          double p = 1.0;
                          for (std::size_t i = 0; i < bs.size(); ++i) p *= bs[i][x] - bs[i][y[i]];
                          return p;
                        },
                        stats)
      .renamed("[Pb,T]");
}

/// m = 2 expansion b1 b2 T(f1,f2) - b1 T(f1,b2 f2) - b2 T(b1 f1,f2) + T(b1 f1,b2 f2).
inline SampledFunction iterated_expansion(const MultilinearKernel& k, const std::vector<SampledFunction>& bs,
                                          const std::vector<SampledFunction>& fs, const ApplyOptions& opt = {},
                                          ApplyStats* stats = nullptr) {
  if (k.arity() != 2 || bs.size() != 2 || fs.size() != 2)
    fail(ErrorCode::invalid_input, "iterated expansion is defined for m = 2");
  const auto& b1 = bs[0];
  const auto& b2 = bs[1];
  const auto& f1 = fs[0];
  const auto& f2 = fs[1];
  const SampledFunction out = (b1 * b2) * apply_operator(k, {f1, f2}, opt, stats) -
                              b1 * apply_operator(k, {f1, b2 * f2}, opt, stats) -
                              b2 * apply_operator(k, {b1 * f1, f2}, opt, stats) +
                              apply_operator(k, {b1 * f1, b2 * f2}, opt, stats);
  if (opt.targets.empty()) return out.renamed("[Pb,T] expansion");
  std::vector<double> v(out.size(), 0.0);
  for (std::size_t t : opt.targets) v[t] = out[t];
  return SampledFunction(out.grid(), std::move(v), "[Pb,T] expansion");
}

/// Max relative discrepancy between two evaluations, scaled by the larger sup norm.
inline double relative_sup_difference(const SampledFunction& a, const SampledFunction& b) {
  const double scale = std::max(a.max_abs(), b.max_abs());
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d / scale;
}

/// Trapezoid rule for (1/2 pi) int_0^{2 pi} exp(e^{i phi} d) e^{-i phi} dphi = d.
inline double cauchy_error(double d, int node_count) {
  std::complex<double> acc{0.0, 0.0};
  for (int q = 0; q < node_count; ++q) {
    const double ang = 2.0 * std::numbers::pi * q / node_count;
    const std::complex<double> e = std::polar(1.0, ang);
    acc += std::exp(e * d) * std::conj(e);
  }
  acc /= static_cast<double>(node_count);
  return std::abs(acc - std::complex<double>(d, 0.0));
}

/// Max Cauchy-representation error over `pairs` seeded sample pairs (x, y)
/// with optional cap |b(x) - b(y)| <= max_gap.
inline double cauchy_representation_check(const SampledFunction& b, int node_count, std::size_t pairs = 100,
                                          std::uint64_t seed = 7,
                                          double max_gap = std::numeric_limits<double>::infinity()) {
  if (node_count < 16 || !is_power_of_two(static_cast<std::size_t>(node_count)))
    fail(ErrorCode::invalid_input, "node count must be a power of two >= 16");
  Rng rng(seed);
  const long last = static_cast<long>(b.size()) - 1;
  double worst = 0.0;
  std::size_t found = 0;
  for (std::size_t attempt = 0; found < pairs && attempt < 1000 * pairs; ++attempt) {
    const double d = b[rng.integer(0, last)] - b[rng.integer(0, last)];
    if (std::abs(d) > max_gap) continue;
    worst = std::max(worst, cauchy_error(d, node_count));
    ++found;
  }
  return worst;
}

}  // namespace morrey
