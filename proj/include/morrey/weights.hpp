#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "morrey/lattice.hpp"

namespace morrey {

/// Closed-form BMO symbols that weights and commutators can refer to by name.
inline std::function<double(const Point&, int)> bmo_symbol(const std::string& name) {
  if (name == "log_abs") return [](const Point& x, int dim) { return std::log(norm(x, dim)); };
  if (name == "log_abs_first") return [](const Point& x, int) { return std::log(std::abs(x[0])); };
  if (name == "heaviside") return [](const Point& x, int) { return x[0] > 0.0 ? 1.0 : 0.0; };
  if (name == "zero") return [](const Point&, int) { return 0.0; };
  fail(ErrorCode::invalid_input, "unknown BMO symbol '" + name + "'");
}

inline SampledFunction sample_symbol(const Grid& grid, const std::string& name) {
  auto b = bmo_symbol(name);
  return SampledFunction::sample(grid, [&](const Point& x) { return b(x, grid.dim()); }, name);
}

struct PowerTerm {
  Point center{0.0, 0.0};
  double exponent = 0.0;
};

struct BmoTerm {
  std::string symbol;
  double eta = 0.0;
};

enum class WeightKind { constant, power, exp_bmo, composite };

/// Analytically known class memberships; nullopt where no closed-form
/// criterion applies (exp_bmo and mixed weights).
struct ClassClaims {
  std::optional<bool> a1;
  std::optional<bool> a_infinity;
  std::function<std::optional<bool>(double)> ap;  // p > 1
  std::string note;
};

/// Positive weight stored in log-linear form
///   log w(x) = log c + sum_j alpha_j log|x - a_j| + sum_k eta_k b_k(x),
/// which is closed under products and real powers.
class Weight {
 public:
  Weight() = default;

  static Weight constant(double c) {
    if (!(c > 0.0)) fail(ErrorCode::invalid_input, "weight constant must be positive");
    Weight w;
    w.log_scale_ = std::log(c);
    return w;
  }

  static Weight power(double c, std::vector<PowerTerm> terms) {
    Weight w = constant(c);
    w.powers_ = std::move(terms);
    return w;
  }

  /// c * |x|^alpha.
  static Weight radial_power(double alpha, double c = 1.0) {
    return power(c, {PowerTerm{{0.0, 0.0}, alpha}});
  }

  static Weight exp_bmo(double eta, std::string symbol, double c = 1.0) {
    bmo_symbol(symbol);  // validates the name
    Weight w = constant(c);
    w.bmo_.push_back({std::move(symbol), eta});
    return w;
  }

  double log_value(const Point& x, int dim) const {
    double s = log_scale_;
    for (const auto& t : powers_)
      if (t.exponent != 0.0) s += t.exponent * std::log(distance(x, t.center, dim));
    for (const auto& t : bmo_)
      if (t.eta != 0.0) s += t.eta * bmo_symbol(t.symbol)(x, dim);
    return s;
  }

  double operator()(const Point& x, int dim) const { return std::exp(log_value(x, dim)); }

  Weight pow(double s) const {
    Weight w = *this;
    w.log_scale_ *= s;
    for (auto& t : w.powers_) t.exponent *= s;
    for (auto& t : w.bmo_) t.eta *= s;
    return w;
  }

  friend Weight operator*(const Weight& a, const Weight& b) {
    Weight w = a;
    w.log_scale_ += b.log_scale_;
    for (const auto& t : b.powers_) w.add_power(t);
    for (const auto& t : b.bmo_) w.add_bmo(t);
    return w;
  }

  WeightKind kind() const {
    const bool has_power = std::any_of(powers_.begin(), powers_.end(),
                                       [](const PowerTerm& t) { return t.exponent != 0.0; });
    const bool has_bmo =
        std::any_of(bmo_.begin(), bmo_.end(), [](const BmoTerm& t) { return t.eta != 0.0; });
    if (has_power && has_bmo) return WeightKind::composite;
    if (has_power) return WeightKind::power;
    if (has_bmo) return WeightKind::exp_bmo;
    return WeightKind::constant;
  }

  double scale() const { return std::exp(log_scale_); }
  const std::vector<PowerTerm>& power_terms() const { return powers_; }
  const std::vector<BmoTerm>& bmo_terms() const { return bmo_; }

  /// Power weights prod |x - a_j|^{alpha_j} with distinct centers lie in A_p
  /// iff every -n < alpha_j < n(p-1); in A_1 iff every -n < alpha_j <= 0.
  ClassClaims claims(int dim) const {
    ClassClaims c;
    const auto k = kind();
    if (k == WeightKind::constant) {
      c.a1 = true;
      c.a_infinity = true;
      c.ap = [](double) { return std::optional<bool>(true); };
      return c;
    }
    if (k == WeightKind::power) {
      const auto exps = merged_exponents();
      const double n = dim;
      c.a1 = std::all_of(exps.begin(), exps.end(), [&](double a) { return a > -n && a <= 0.0; });
      c.a_infinity = std::all_of(exps.begin(), exps.end(), [&](double a) { return a > -n; });
      c.ap = [exps, n](double p) {
        return std::optional<bool>(std::all_of(exps.begin(), exps.end(), [&](double a) {
          return a > -n && a < n * (p - 1.0);
        }));
      };
      return c;
    }
    c.ap = [](double) { return std::optional<bool>(); };
    c.note = "exp(eta*b) lies in A_p only under a smallness condition on eta*||b||_*; not enforced";
    return c;
  }

  std::string describe() const {
    std::string s = "w(x) = " + format_number(scale());
    for (const auto& t : powers_)
      if (t.exponent != 0.0)
        s += " * |x - (" + format_number(t.center[0]) + "," + format_number(t.center[1]) + ")|^" +
             format_number(t.exponent);
    for (const auto& t : bmo_)
      if (t.eta != 0.0) s += " * exp(" + format_number(t.eta) + "*" + t.symbol + ")";
    return s;
  }

  /// Samples the weight; every sample must be finite and strictly positive.
  SampledFunction sample(const Grid& grid) const {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = (*this)(grid.point(i), grid.dim());
      if (!std::isfinite(v[i]) || !(v[i] > 0.0))
        fail(ErrorCode::numerical, "weight singular on sample");
    }
    return SampledFunction(grid, std::move(v), describe());
  }

 private:
  static std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  void add_power(const PowerTerm& t) {
    for (auto& p : powers_)
      if (p.center == t.center) {
        p.exponent += t.exponent;
        return;
      }
    powers_.push_back(t);
  }

  void add_bmo(const BmoTerm& t) {
    for (auto& b : bmo_)
      if (b.symbol == t.symbol) {
        b.eta += t.eta;
        return;
      }
    bmo_.push_back(t);
  }

  std::vector<double> merged_exponents() const {
    std::vector<double> out;
    for (const auto& t : powers_)
      if (t.exponent != 0.0) out.push_back(t.exponent);
    return out;
  }

  double log_scale_ = 0.0;
  std::vector<PowerTerm> powers_;
  std::vector<BmoTerm> bmo_;
};

/// Weight vector with its exponent vector P = (p_1, ..., p_m).
class MultiWeight {
 public:
  MultiWeight(std::vector<Weight> weights, std::vector<double> exponents)
      : weights_(std::move(weights)), exponents_(std::move(exponents)) {
    if (weights_.empty()) fail(ErrorCode::invalid_input, "multi-weight needs m >= 1");
    if (weights_.size() != exponents_.size())
      fail(ErrorCode::invalid_input, "weight and exponent vectors differ in length");
    double inv = 0.0;
    for (double p : exponents_) {
      if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::invalid_input, "invalid exponent");
      inv += 1.0 / p;
    }
    p_ = 1.0 / inv;
  }

  std::size_t arity() const { return weights_.size(); }
  const std::vector<Weight>& weights() const { return weights_; }
  const std::vector<double>& exponents() const { return exponents_; }
  const Weight& weight(std::size_t k) const { return weights_[k]; }
  double exponent(std::size_t k) const { return exponents_[k]; }

  /// 1/p = sum_k 1/p_k.
  double p() const { return p_; }

 private:
  std::vector<Weight> weights_;
  std::vector<double> exponents_;
  double p_ = 1.0;
};

/// nu = prod_k w_k^{p/p_k}.
inline Weight nu_weight(const MultiWeight& mw) {
  Weight nu = Weight::constant(1.0);
  for (std::size_t k = 0; k < mw.arity(); ++k) nu = nu * mw.weight(k).pow(mw.p() / mw.exponent(k));
  return nu;
}

inline SampledFunction sample_pow(const SampledFunction& w, double s) {
  return w.map([s](double v) { return std::pow(v, s); });
}

// --- Characteristics over a ball family ------------------------------------

/// Per-ball A_p quantity; p = 1 uses the minimum over samples for ess inf.
inline double ap_ball_value(const SampledFunction& w, double p, const Region& region) {
  const auto& v = w.values();
  const double mean = region_average(w, region);
  if (p == 1.0) return mean / region_min(w, region);
  const double dual_exp = -1.0 / (p - 1.0);  // -p'/p
  const double dual = region_average_of(region, [&](std::size_t i) { return std::pow(v[i], dual_exp); });
  const double p_conj = p / (p - 1.0);
  return std::pow(mean, 1.0 / p) * std::pow(dual, 1.0 / p_conj);
}

inline double ap_characteristic(const SampledFunction& w, double p, const BallFamily& family) {
  if (!(p >= 1.0)) fail(ErrorCode::invalid_input, "invalid exponent");
  double sup = 0.0;
  for (const auto& region : family.regions()) sup = std::max(sup, ap_ball_value(w, p, region));
  return sup;
}

inline double ap_characteristic(const Weight& w, double p, const BallFamily& family) {
  if (!(p >= 1.0)) fail(ErrorCode::invalid_input, "invalid exponent");
  return ap_characteristic(w.sample(family.grid()), p, family);
}

/// sup over the family of mean(w) / exp(mean(log w)).
inline double ainf_characteristic(const SampledFunction& w, const BallFamily& family) {
  const auto& v = w.values();
  double sup = 0.0;
  for (const auto& region : family.regions()) {
    const double mean = region_average(w, region);
    const double log_mean = region_average_of(region, [&](std::size_t i) { return std::log(v[i]); });
    sup = std::max(sup, mean / std::exp(log_mean));
  }
  return sup;
}

inline double ainf_characteristic(const Weight& w, const BallFamily& family) {
  return ainf_characteristic(w.sample(family.grid()), family);
}

struct DoublingEstimate {
  double doubling = 0.0;    // sup w(2B)/w(B)
  double delta = 0.0;       // comparability exponent estimate, clamped to [0, inf)
  double compare_constant = 0.0;  // sup (w(E)/w(B)) / (|E|/|B|)^delta over tested pairs
};

/// Doubling constant over the family (2B clipped to the cube) and the
/// comparability exponent from origin-centred pairs E = B(0, r/2) in B(0, r).
inline DoublingEstimate doubling_and_comparability(const SampledFunction& w,
                                                   const BallFamily& family) {
  const Grid& grid = family.grid();
  DoublingEstimate est;
  for (std::size_t b = 0; b < family.size(); ++b) {
    const Region dbl = Region::of(grid, family.balls()[b].scaled(2.0));
    const double ratio = integrate(w, dbl) / integrate(w, family.regions()[b]);
    est.doubling = std::max(est.doubling, ratio);
  }
  struct Pair {
    double log_w, log_m;
  };
  std::vector<Pair> pairs;
  double delta = std::numeric_limits<double>::infinity();
  for (double r : family.radii()) {
    const Region outer = Region::of(grid, {{0.0, 0.0}, r});
    const Region inner = Region::of(grid, {{0.0, 0.0}, r / 2.0});
    if (inner.empty() || outer.size() == inner.size()) continue;
    const double log_w = std::log(integrate(w, inner) / integrate(w, outer));
    const double log_m = std::log(static_cast<double>(inner.size()) / static_cast<double>(outer.size()));
    pairs.push_back({log_w, log_m});
    delta = std::min(delta, log_w / log_m);
  }
  if (pairs.empty()) return est;
  est.delta = std::max(0.0, delta);
  for (const auto& pr : pairs) est.compare_constant = std::max(est.compare_constant, std::exp(pr.log_w - est.delta * pr.log_m));
  return est;
}

inline double multi_ap_ball_value(const MultiWeight& mw, const SampledFunction& nu,
                                  const std::vector<SampledFunction>& ws, const Region& region) {
  double value = std::pow(region_average(nu, region), 1.0 / mw.p());
  for (std::size_t k = 0; k < mw.arity(); ++k) {
    const double pk = mw.exponent(k);
    if (pk == 1.0) {
      value /= region_min(ws[k], region);
      continue;
    }
    const double pk_conj = pk / (pk - 1.0);
    const double dual_exp = -pk_conj / pk;
    const auto& v = ws[k].values();
    const double dual = region_average_of(region, [&](std::size_t i) { return std::pow(v[i], dual_exp); });
    value *= std::pow(dual, 1.0 / pk_conj);
  }
  return value;
}

/// Multilinear A_P characteristic; p_k = 1 slots use (min w_k)^{-1}.
inline double multi_ap_characteristic(const MultiWeight& mw, const BallFamily& family) {
  const Grid& grid = family.grid();
  const SampledFunction nu = nu_weight(mw).sample(grid);
  std::vector<SampledFunction> ws;
  for (const auto& w : mw.weights()) ws.push_back(w.sample(grid));
  double sup = 0.0;
  for (const auto& region : family.regions())
    sup = std::max(sup, multi_ap_ball_value(mw, nu, ws, region));
  return sup;
}

// --- Finiteness proxies -------------------------------------------------------

/// A characteristic evaluated on a base family, on the ladder extended by
/// three dyadic steps, and on the base family over the refined grid.
struct ScaleStudy {
  double base = 0.0;
  double extended = 0.0;
  double refined = 0.0;

  double ladder_growth() const { return extended / base; }
  double refine_growth() const { return refined / base; }

  /// Stable iff neither growth factor reaches the threshold.
  bool stable(double threshold) const {
    return ladder_growth() < threshold && refine_growth() < threshold;
  }
};

enum class LadderDirection { up, down };

inline BallFamily extend_family(const BallFamily& family, int steps, LadderDirection dir) {
  return family.with(dir == LadderDirection::up ? family.params().extended_up(steps)
                                                : family.params().extended_down(steps));
}

template <class Eval>
ScaleStudy scale_study(const BallFamily& family, Eval&& eval, int steps = 3,
                       LadderDirection dir = LadderDirection::up) {
  ScaleStudy s;
  s.base = eval(family);
  s.extended = eval(extend_family(family, steps, dir));
  s.refined = eval(family.on(family.grid().refined()));
  return s;
}

inline ScaleStudy ap_study(const Weight& w, double p, const BallFamily& family) {
  return scale_study(family, [&](const BallFamily& f) { return ap_characteristic(w, p, f); });
}

inline ScaleStudy multi_ap_study(const MultiWeight& mw, const BallFamily& family) {
  return scale_study(family, [&](const BallFamily& f) { return multi_ap_characteristic(mw, f); });
}

/// Growth threshold used by the Muckenhoupt finiteness checks. A divergent
/// power-weight characteristic grows like (r/h)^gamma; over the 8x scale
/// extension, 1.25 separates gamma >= 0.11 from the slow drift of
/// convergent but weakly singular quadratures.
inline constexpr double default_growth_threshold = 1.25;

struct LemmaMultiReport {
  ScaleStudy multi;
  ScaleStudy nu;              // nu in A_{mp}
  std::vector<ScaleStudy> duals;  // w_k^{1-p'_k} in A_{m p'_k}, or w_k^{1/m} in A_1
  bool multi_stable = false;
  bool conjunction_stable = false;
  bool agreement = false;
};

/// Compares the multilinear A_P verdict with the conjunction
/// nu in A_{mp} and w_k^{1-p'_k} in A_{m p'_k} (w_k^{1/m} in A_1 when p_k = 1).
inline LemmaMultiReport check_lemma_multi(const MultiWeight& mw, const BallFamily& family,
                                          double threshold = default_growth_threshold) {
  LemmaMultiReport rep;
  const double m = static_cast<double>(mw.arity());
  rep.multi = multi_ap_study(mw, family);
  rep.nu = ap_study(nu_weight(mw), m * mw.p(), family);
  bool all_duals = true;
  for (std::size_t k = 0; k < mw.arity(); ++k) {
    const double pk = mw.exponent(k);
    ScaleStudy s;
    if (pk == 1.0) {
      s = ap_study(mw.weight(k).pow(1.0 / m), 1.0, family);
    } else {
      const double pk_conj = pk / (pk - 1.0);
      s = ap_study(mw.weight(k).pow(1.0 - pk_conj), m * pk_conj, family);
    }
    all_duals = all_duals && s.stable(threshold);
    rep.duals.push_back(s);
  }
  rep.multi_stable = rep.multi.stable(threshold);
  rep.conjunction_stable = rep.nu.stable(threshold) && all_duals;
  rep.agreement = rep.multi_stable == rep.conjunction_stable;
  return rep;
}

/// sup over the family of ((1/|B|) int w^s)^{1/s} / ((1/|B|) int w).
inline double reverse_holder_ratio(const SampledFunction& w, double s, const BallFamily& family) {
  const auto& v = w.values();
  double sup = 0.0;
  for (const auto& region : family.regions()) {
    const double mean = region_average(w, region);
    const double mean_s = region_average_of(region, [&](std::size_t i) { return std::pow(v[i], s); });
    sup = std::max(sup, std::pow(mean_s, 1.0 / s) / mean);
  }
  return sup;
}

/// Largest s in the ascending grid whose reverse Hoelder ratio stays below
/// `ratio_threshold` and is stable under ladder extension and refinement.
inline std::optional<double> reverse_holder_exponent(const Weight& w, const BallFamily& family,
                                                     const std::vector<double>& s_grid,
                                                     double ratio_threshold = 10.0,
                                                     double growth_threshold = default_growth_threshold) {
  if (!std::is_sorted(s_grid.begin(), s_grid.end()))
    fail(ErrorCode::invalid_input, "s grid must be sorted ascending");
  std::optional<double> best;
  for (double s : s_grid) {
    if (!(s > 1.0)) fail(ErrorCode::invalid_input, "reverse Hoelder exponents must exceed 1");
    const ScaleStudy st = scale_study(family, [&](const BallFamily& f) {
      return reverse_holder_ratio(w.sample(f.grid()), s, f);
    });
    if (st.base < ratio_threshold && st.stable(growth_threshold)) best = s;
    else break;
  }
  return best;
}

}  // namespace morrey
