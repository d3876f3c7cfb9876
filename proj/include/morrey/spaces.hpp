#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "morrey/lattice.hpp"
#include "morrey/orlicz.hpp"

namespace morrey {

// Every norm takes an optional sampled weight; null means Lebesgue measure.

inline double weight_at(const SampledFunction* w, std::size_t i) { return w ? (*w)[i] : 1.0; }

inline double weighted_measure(const Region& region, const Grid& grid, const SampledFunction* w) {
  if (!w) return region.measure(grid);
  return grid.cell_volume() * region_sum(region, [&](std::size_t i) { return (*w)[i]; });
}

/// w(B) for a closed-form weight sampled on the grid.
inline double weighted_measure(const SampledFunction& w, const Ball& ball) {
  const Region region = Region::of(w.grid(), ball);
  if (region.empty()) fail(ErrorCode::invalid_input, "empty region");
  return integrate(w, region);
}

inline void require_exponent(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) fail(ErrorCode::invalid_input, "invalid exponent");
}

inline void require_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) fail(ErrorCode::invalid_input, "kappa must lie in [0,1)");
}

/// (int_region |f|^p w)^{1/p}.
inline double lp_norm(const SampledFunction& f, const SampledFunction* w, double p, const Region& region) {
  require_exponent(p);
  const auto& v = f.values();
  const double s = region_sum(region, [&](std::size_t i) {
    const double a = std::abs(v[i]);
    return (p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p))) * weight_at(w, i);
  });
  return std::pow(f.grid().cell_volume() * s, 1.0 / p);
}

inline double lp_norm(const SampledFunction& f, const SampledFunction* w, double p) {
  return lp_norm(f, w, p, Region::whole(f.grid()));
}

/// sup_lambda lambda * w({x in region : |f(x)| > lambda})^{1/p}. The sup is
/// the limit lambda -> v- at a sample value v, i.e. v * w({|f| >= v})^{1/p}.
inline double weak_lp_norm(const SampledFunction& f, const SampledFunction* w, double p, const Region& region) {
  require_exponent(p);
  std::vector<std::pair<double, double>> levels;  // (|f|, cell mass)
  levels.reserve(region.size());
  const double cell = f.grid().cell_volume();
  for (std::size_t i : region.indices())
    if (f[i] != 0.0) levels.emplace_back(std::abs(f[i]), cell * weight_at(w, i));
  std::sort(levels.begin(), levels.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  double best = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < levels.size();) {
    const double v = levels[k].first;
    while (k < levels.size() && levels[k].first == v) mass += levels[k++].second;
    best = std::max(best, v * std::pow(mass, 1.0 / p));
  }
  return best;
}

inline double weak_lp_norm(const SampledFunction& f, const SampledFunction* w, double p) {
  return weak_lp_norm(f, w, p, Region::whole(f.grid()));
}

/// max over the family of (w(B)^{-kappa} int_B |f|^p w)^{1/p}.
inline double morrey_norm(const SampledFunction& f, const SampledFunction* w, double p, double kappa,
                          const BallFamily& family) {
  require_exponent(p);
  require_kappa(kappa);
  double sup = 0.0;
  for (const auto& region : family.regions()) {
    const double wb = weighted_measure(region, f.grid(), w);
    sup = std::max(sup, lp_norm(f, w, p, region) * std::pow(wb, -kappa / p));
  }
  return sup;
}

/// max over balls and levels of w(B)^{-kappa/p} lambda w({x in B : |f| > lambda})^{1/p}.
inline double weak_morrey_norm(const SampledFunction& f, const SampledFunction* w, double p, double kappa,
                               const BallFamily& family) {
  require_exponent(p);
  require_kappa(kappa);
  double sup = 0.0;
  for (const auto& region : family.regions()) {
    const double wb = weighted_measure(region, f.grid(), w);
    sup = std::max(sup, weak_lp_norm(f, w, p, region) * std::pow(wb, -kappa / p));
  }
  return sup;
}

/// max over the family of w(B)^{1-kappa} ||f||_{A(w),B}; A defaults to Phi.
inline double llogl_morrey_norm(const SampledFunction& f, const SampledFunction* w, double kappa,
                                const BallFamily& family,
                                const YoungFunction& young = YoungFunction::llogl()) {
  require_kappa(kappa);
  double sup = 0.0;
  for (const auto& region : family.regions()) {
    const double wb = weighted_measure(region, f.grid(), w);
    sup = std::max(sup, std::pow(wb, 1.0 - kappa) * luxemburg_norm(f, young, region, w));
  }
  return sup;
}

struct BmoResult {
  double norm = 0.0;
  std::vector<double> means;         // b_B per family ball
  std::vector<double> oscillations;  // (1/|B|) int_B |b - b_B|
};

inline double mean_oscillation(const SampledFunction& b, const Region& region, double mean) {
  const auto& v = b.values();
  return region_average_of(region, [&](std::size_t i) { return std::abs(v[i] - mean); });
}

inline BmoResult bmo_analysis(const SampledFunction& b, const BallFamily& family) {
  BmoResult r;
  for (const auto& region : family.regions()) {
    const double mean = region_average(b, region);
    const double osc = mean_oscillation(b, region, mean);
    r.means.push_back(mean);
    r.oscillations.push_back(osc);
    r.norm = std::max(r.norm, osc);
  }
  return r;
}

inline double bmo_norm(const SampledFunction& b, const BallFamily& family) {
  return bmo_analysis(b, family).norm;
}

enum class SpaceKind { lp, weak_lp, morrey, weak_morrey, llogl_morrey, bmo };

inline SpaceKind parse_space(const std::string& s) {
  if (s == "lp") return SpaceKind::lp;
  if (s == "wlp" || s == "weak_lp") return SpaceKind::weak_lp;
  if (s == "morrey") return SpaceKind::morrey;
  if (s == "weak_morrey") return SpaceKind::weak_morrey;
  if (s == "llogl_morrey") return SpaceKind::llogl_morrey;
  if (s == "bmo") return SpaceKind::bmo;
  fail(ErrorCode::invalid_input, "unknown space '" + s + "'");
}

inline std::string space_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::lp: return "lp";
    case SpaceKind::weak_lp: return "weak_lp";
    case SpaceKind::morrey: return "morrey";
    case SpaceKind::weak_morrey: return "weak_morrey";
    case SpaceKind::llogl_morrey: return "llogl_morrey";
    case SpaceKind::bmo: return "bmo";
  }
  return {};
}

struct NormSpec {
  SpaceKind kind = SpaceKind::lp;
  double p = 1.0;
  double kappa = 0.0;
};

/// Dispatches a norm request; `family` is needed for the ball-based spaces.
inline double evaluate_norm(const SampledFunction& f, const NormSpec& spec, const SampledFunction* w,
                            const BallFamily* family) {
  auto need_family = [&]() -> const BallFamily& {
    if (!family) fail(ErrorCode::invalid_input, "norm requires a ball family");
    return *family;
  };
  switch (spec.kind) {
    case SpaceKind::lp: return lp_norm(f, w, spec.p);
    case SpaceKind::weak_lp: return weak_lp_norm(f, w, spec.p);
    case SpaceKind::morrey: return morrey_norm(f, w, spec.p, spec.kappa, need_family());
    case SpaceKind::weak_morrey: return weak_morrey_norm(f, w, spec.p, spec.kappa, need_family());
    case SpaceKind::llogl_morrey: return llogl_morrey_norm(f, w, spec.kappa, need_family());
    case SpaceKind::bmo: return bmo_norm(f, need_family());
  }
  return 0.0;
}

// --- quasi-triangle constants -------------------------------------------------

inline double strong_triangle_bound(double p, int n) {
  return std::max(1.0, std::pow(static_cast<double>(n), (1.0 - p) / p));
}

inline double weak_triangle_bound(double p, int n) {
  return std::max(static_cast<double>(n), std::pow(static_cast<double>(n), 1.0 / p));
}

struct TriangleReport {
  double p = 1.0;
  int n = 1;
  double strong_observed = 0.0;
  double weak_observed = 0.0;
  double strong_bound = 1.0;
  double weak_bound = 1.0;
  std::size_t tuples = 0;
  std::size_t violations = 0;
  bool pass() const { return violations == 0; }
};

/// Max over tuples of ||sum f_k|| / sum ||f_k|| in L^p(w) and WL^p(w).
inline TriangleReport quasi_triangle_constants(double p, const std::vector<std::vector<SampledFunction>>& tuples,
                                               const SampledFunction* w = nullptr) {
  require_exponent(p);
  TriangleReport r;
  r.p = p;
  r.n = tuples.empty() ? 0 : static_cast<int>(tuples.front().size());
  r.strong_bound = strong_triangle_bound(p, r.n);
  r.weak_bound = weak_triangle_bound(p, r.n);
  for (const auto& tuple : tuples) {
    if (static_cast<int>(tuple.size()) != r.n) fail(ErrorCode::invalid_input, "tuples must share length");
    SampledFunction sum = tuple.front();
    for (std::size_t k = 1; k < tuple.size(); ++k) sum = sum + tuple[k];
    double strong_den = 0.0, weak_den = 0.0;
    for (const auto& f : tuple) {
      strong_den += lp_norm(f, w, p);
      weak_den += weak_lp_norm(f, w, p);
    }
    ++r.tuples;
    if (strong_den == 0.0 || weak_den == 0.0) continue;
    const double s = lp_norm(sum, w, p) / strong_den;
    const double wk = weak_lp_norm(sum, w, p) / weak_den;
    r.strong_observed = std::max(r.strong_observed, s);
    r.weak_observed = std::max(r.weak_observed, wk);
    if (s > r.strong_bound + 1e-9 || wk > r.weak_bound + 1e-9) ++r.violations;
  }
  return r;
}

}  // namespace morrey
