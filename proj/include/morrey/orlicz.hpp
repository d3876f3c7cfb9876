#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "morrey/lattice.hpp"

namespace morrey {

inline double log_plus(double t) { return t > 1.0 ? std::log(t) : 0.0; }

/// Phi(t) = t (1 + log+ t).
inline double phi(double t) { return t * (1.0 + log_plus(t)); }

enum class YoungKind { power, phi, phi_iter, expm1, phi_conjugate };

/// Scalar Young function. `phi_conjugate` is the exact Legendre conjugate of
/// Phi: 0 on [0,1], s - 1 on [1,2], e^{s-2} beyond.
class YoungFunction {
 public:
  static YoungFunction power(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::invalid_input, "power Young function needs p >= 1");
    return YoungFunction(YoungKind::power, p, 1);
  }
  static YoungFunction linear() { return power(1.0); }
  static YoungFunction llogl() { return YoungFunction(YoungKind::phi, 1.0, 1); }
  static YoungFunction phi_iter(int m) {
    if (m < 1) fail(ErrorCode::invalid_input, "Phi iterate needs m >= 1");
    return YoungFunction(YoungKind::phi_iter, 1.0, m);
  }
  static YoungFunction expm1() { return YoungFunction(YoungKind::expm1, 1.0, 1); }
  static YoungFunction phi_conjugate() { return YoungFunction(YoungKind::phi_conjugate, 1.0, 1); }

  YoungKind kind() const { return kind_; }
  double p() const { return p_; }
  int iterations() const { return m_; }

  double operator()(double t) const {
    if (t < 0.0) fail(ErrorCode::invalid_input, "Young function argument must be nonnegative");
    switch (kind_) {
      case YoungKind::power: return p_ == 1.0 ? t : std::pow(t, p_);
      case YoungKind::phi: return phi(t);
      case YoungKind::phi_iter: {
        double v = t;
        for (int k = 0; k < m_; ++k) v = phi(v);
        return v;
      }
      case YoungKind::expm1: return std::expm1(t);
      case YoungKind::phi_conjugate:
        if (t <= 1.0) return 0.0;
        if (t <= 2.0) return t - 1.0;
        return std::exp(t - 2.0);
    }
    return 0.0;
  }

  /// Smallest t with A(t) >= s, by bisection to 1e-12 relative.
  double inverse(double s) const {
    if (s < 0.0) fail(ErrorCode::invalid_input, "Young inverse argument must be nonnegative");
    if (s == 0.0) return kind_ == YoungKind::phi_conjugate ? 1.0 : 0.0;
    double lo = 0.0, hi = 1.0;
    while ((*this)(hi) < s) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) fail(ErrorCode::numerical, "Young inverse overflow");
    }
    while (hi - lo > 1e-12 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      ((*this)(mid) < s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  std::string name() const {
    switch (kind_) {
      case YoungKind::power: return "t^" + std::to_string(p_);
      case YoungKind::phi: return "Phi";
      case YoungKind::phi_iter: return "Phi^(" + std::to_string(m_) + ")";
      case YoungKind::expm1: return "exp-1";
      case YoungKind::phi_conjugate: return "Phi*";
    }
    return {};
  }

 private:
  YoungFunction(YoungKind kind, double p, int m) : kind_(kind), p_(p), m_(m) {}
  YoungKind kind_;
  double p_;
  int m_;
};

/// sup_t (s t - A(t)) by golden-section search on the concave objective.
inline double legendre_conjugate(const YoungFunction& a, double s, double t_max = 1e3) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = t_max;
  auto obj = [&](double t) { return s * t - a(t); };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 300 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = obj(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = obj(x1);
    }
  }
  return std::max({0.0, obj(0.5 * (lo + hi)), obj(0.0)});
}

/// Luxemburg norm ||f||_{A(w),B}; `weight` null means Lebesgue measure.
inline double luxemburg_norm(const SampledFunction& f, const YoungFunction& a, const Region& region,
                             const SampledFunction* weight = nullptr) {
  if (region.empty()) fail(ErrorCode::invalid_input, "empty region");
  const auto& v = f.values();
  const auto& idx = region.indices();
  double top = 0.0;
  for (std::size_t i : idx) top = std::max(top, std::abs(v[i]));
  if (top == 0.0) return 0.0;

  const double mass = weight ? region_sum(region, [&](std::size_t i) { return (*weight)[i]; })
                             : static_cast<double>(idx.size());
  auto criterion = [&](double sigma) {
    const double s = region_sum(region, [&](std::size_t i) {
      const double val = a(std::abs(v[i]) / sigma);
      return weight ? val * (*weight)[i] : val;
    });
    return s / mass;
  };

  // Bracket: criterion(lo) > 1 >= criterion(hi).
  double lo = top, hi = top;
  int steps = 0;
  while (!(criterion(hi) <= 1.0)) {
    lo = hi;
    hi *= 2.0;
    if (++steps > 200) fail(ErrorCode::numerical, "norm overflow");
  }
  if (lo == hi) {
    steps = 0;
    while (criterion(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (++steps > 200) fail(ErrorCode::numerical, "norm overflow");
    }
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = std::sqrt(lo * hi);
    (criterion(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

inline double luxemburg_norm(const SampledFunction& f, const YoungFunction& a, const Ball& ball,
                             const SampledFunction* weight = nullptr) {
  return luxemburg_norm(f, a, Region::of(f.grid(), ball), weight);
}

struct HolderCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / (||f||_{LlogL} ||g||_{expL}), 0 when undefined
  bool pass = false;
};

/// Average of |fg| against 2 ||f||_{LlogL} ||g||_{expL}, both with respect
/// to dx/|B| or, when a weight is given, w dx / w(B).
inline HolderCheck generalized_holder_check(const SampledFunction& f, const SampledFunction& g,
                                            const Region& region, const SampledFunction* weight = nullptr) {
  if (f.grid() != g.grid()) fail(ErrorCode::invalid_input, "grid mismatch");
  if (region.empty()) fail(ErrorCode::invalid_input, "empty region");
  HolderCheck c;
  const double mass = weight ? region_sum(region, [&](std::size_t i) { return (*weight)[i]; })
                             : static_cast<double>(region.size());
  c.lhs = region_sum(region, [&](std::size_t i) {
            const double prod = std::abs(f[i] * g[i]);
            return weight ? prod * (*weight)[i] : prod;
          }) /
          mass;
  const double product = luxemburg_norm(f, YoungFunction::llogl(), region, weight) *
                         luxemburg_norm(g, YoungFunction::expm1(), region, weight);
  c.rhs = 2.0 * product;
  c.ratio = product > 0.0 ? c.lhs / product : 0.0;
  c.pass = c.lhs <= c.rhs * (1.0 + 1e-12);
  return c;
}

// --- theta moduli and Dini integrals ----------------------------------------

enum class ThetaKind { power, log_power };

class ThetaModulus {
 public:
  /// theta(t) = t^eps, 0 < eps <= 1.
  static ThetaModulus power(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorCode::invalid_input, "theta power exponent must lie in (0,1]");
    return ThetaModulus(ThetaKind::power, eps);
  }
  /// theta(t) = (log(e/t))^{-beta}, beta > 0.
  static ThetaModulus log_power(double beta) {
    if (!(beta > 0.0)) fail(ErrorCode::invalid_input, "theta log exponent must be positive");
    return ThetaModulus(ThetaKind::log_power, beta);
  }

  ThetaKind kind() const { return kind_; }
  double parameter() const { return param_; }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (kind_ == ThetaKind::power) return std::pow(t, param_);
    return std::pow(1.0 + std::log(1.0 / t), -param_);  // log(e/t) = 1 + log(1/t)
  }

  /// theta(e^{-s}) without forming e^{-s}.
  double at_log(double s) const {
    if (kind_ == ThetaKind::power) return std::exp(-param_ * s);
    return std::pow(1.0 + s, -param_);
  }

  /// Analytic finiteness of the Dini-type integral of the given kind
  /// (1: plain, 2: one log factor, 3: m-th log power).
  bool dini_finite(int kind, int m = 1) const {
    if (kind_ == ThetaKind::power) return true;
    switch (kind) {
      case 1: return param_ > 1.0;
      case 2: return param_ > 2.0;
      case 3: return param_ > static_cast<double>(m) + 1.0;
    }
    fail(ErrorCode::invalid_input, "Dini kind must be 1, 2 or 3");
  }

  std::string name() const {
    return kind_ == ThetaKind::power ? "t^" + std::to_string(param_)
                                     : "log(e/t)^-" + std::to_string(param_);
  }

 private:
  ThetaModulus(ThetaKind kind, double param) : kind_(kind), param_(param) {}
  ThetaKind kind_;
  double param_;
};

struct DiniResult {
  double value = 0.0;
  bool finite = false;
};

/// int_delta^1 theta(t) (1 + |log t|^q) / t dt with q = 0, 1, m for kinds 1, 2, 3.
/// Computed in s = log(1/t) by composite Simpson on 4096 intervals.
inline DiniResult dini_integral(const ThetaModulus& theta, int kind, int m = 1, double delta = 1e-8) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::invalid_input, "delta must lie in (0,1)");
  if (kind < 1 || kind > 3) fail(ErrorCode::invalid_input, "Dini kind must be 1, 2 or 3");
  if (m < 1) fail(ErrorCode::invalid_input, "m must be positive");
  const int q = kind == 1 ? 0 : (kind == 2 ? 1 : m);
  auto integrand = [&](double s) {
    const double log_factor = q == 0 ? 0.0 : 1.0 + std::pow(s, q);
    return theta.at_log(s) * (q == 0 ? 1.0 : log_factor);
  };
  constexpr int intervals = 4096;
  const double upper = std::log(1.0 / delta);
  const double step = upper / intervals;
  const double interior = pairwise_sum(static_cast<std::size_t>(intervals - 1), [&](std::size_t k) {
    const double s = step * static_cast<double>(k + 1);
    return ((k + 1) % 2 == 1 ? 4.0 : 2.0) * integrand(s);
  });
  DiniResult r;
  r.value = step / 3.0 * (integrand(0.0) + interior + integrand(upper));
  r.finite = theta.dini_finite(kind, m);
  return r;
}

/// sup of Phi(2t)/Phi(t) over 1201 log-spaced t in [1e-6, 1e6] (t = 1 included).
inline double phi_doubling_constant() {
  double sup = 0.0;
  for (int k = 0; k <= 1200; ++k) {
    const double t = std::pow(10.0, -6.0 + k / 100.0);
    sup = std::max(sup, phi(2.0 * t) / phi(t));
  }
  return sup;
}

}  // namespace morrey
