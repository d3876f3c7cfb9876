#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morrey/lattice.hpp"
#include "morrey/operators.hpp"
#include "morrey/orlicz.hpp"
#include "morrey/spaces.hpp"
#include "morrey/weights.hpp"

namespace morrey {

// --- corpus -------------------------------------------------------------------

/// A continuous test function described by parameters, so the same member
/// can be sampled on every grid of a refinement study.
struct Recipe {
  std::string kind;
  std::string name;
  std::vector<double> params;
  std::optional<Ball> exclude;  // forced to zero inside this ball

  double operator()(const Point& x, int dim) const {
    if (exclude && exclude->contains(x, dim)) return 0.0;
    const auto& p = params;
    if (kind == "indicator") {
      // (count, [cx, cy, r, height] * count)
      double s = 0.0;
      const int count = static_cast<int>(p[0]);
      for (int k = 0; k < count; ++k) {
        const double* q = &p[1 + 4 * k];
        if (distance(x, {q[0], q[1]}, dim) < q[2]) s += q[3];
      }
      return s;
    }
    if (kind == "bump") {
      // (cx, cy, rho, height)
      double v = p[3];
      for (int d = 0; d < dim; ++d) {
        const double t = (x[d] - p[d]) / p[2];
        if (std::abs(t) >= 1.0) return 0.0;
        v *= std::exp(1.0 - 1.0 / (1.0 - t * t));
      }
      return v;
    }
    if (kind == "oscillatory") {
      // (kx, ky, phase_x, phase_y, L)
      double v = 1.0;
      for (int d = 0; d < dim; ++d) v *= std::sin(p[d] * std::numbers::pi * x[d] / p[4] + p[2 + d]);
      return v;
    }
    if (kind == "random_pc") {
      // (cells, L, values...) on a cells^dim tensor partition of [-L, L]^dim
      const int cells = static_cast<int>(p[0]);
      const double L = p[1];
      std::size_t idx = 0;
      for (int d = 0; d < dim; ++d) {
        const int c = std::clamp(static_cast<int>(std::floor((x[d] + L) / (2.0 * L) * cells)), 0, cells - 1);
        idx = idx * static_cast<std::size_t>(cells) + static_cast<std::size_t>(c);
      }
      return p[2 + idx];
    }
    if (kind == "origin_indicator") return norm(x, dim) < p[0] ? 1.0 : 0.0;
    if (kind == "constant") return p[0];
    if (kind == "symbol") return bmo_symbol(name)(x, dim);
    fail(ErrorCode::invalid_input, "unknown corpus generator '" + kind + "'");
  }

  SampledFunction sample(const Grid& grid) const {
    return SampledFunction::sample(grid, [&](const Point& x) { return (*this)(x, grid.dim()); }, name);
  }
};

enum class TupleMode { cyclic, anchored };

struct CorpusSpec {
  std::size_t size = 20;
  std::uint64_t seed = 1;
  std::vector<std::string> generators{"indicator", "bump", "oscillatory", "random_pc"};
  /// Append chi_{B(0,r)} for every radius of the ball family's ladder.
  bool origin_ladder = false;
  /// Members vanish inside this ball.
  std::optional<Ball> exclude;
  /// cyclic: tuple k is (F[k], F[k+1], ...); anchored: (F[k], F[0], ..., F[0]).
  TupleMode tuples = TupleMode::cyclic;
};

inline Recipe make_recipe(const std::string& kind, Rng& rng, double L, int dim, std::size_t index) {
  Recipe r;
  r.kind = kind;
  r.name = kind + "#" + std::to_string(index);
  if (kind == "indicator") {
    const int count = static_cast<int>(rng.integer(1, 3));
    r.params.push_back(count);
    for (int k = 0; k < count; ++k) {
      r.params.push_back(rng.uniform(-0.8 * L, 0.8 * L));
      r.params.push_back(dim == 2 ? rng.uniform(-0.8 * L, 0.8 * L) : 0.0);
      r.params.push_back(rng.uniform(0.05 * L, 0.4 * L));
      r.params.push_back(rng.uniform(0.5, 2.0));
    }
  } else if (kind == "bump") {
    r.params = {rng.uniform(-0.6 * L, 0.6 * L), dim == 2 ? rng.uniform(-0.6 * L, 0.6 * L) : 0.0,
                rng.uniform(0.1 * L, 0.5 * L), rng.uniform(0.5, 2.0)};
  } else if (kind == "oscillatory") {
    r.params = {static_cast<double>(rng.integer(1, 6)), static_cast<double>(rng.integer(1, 6)),
                rng.uniform(0.0, std::numbers::pi), rng.uniform(0.0, std::numbers::pi), L};
  } else if (kind == "random_pc") {
    constexpr int cells = 16;
    r.params = {static_cast<double>(cells), L};
    const std::size_t total = dim == 2 ? cells * cells : cells;
    for (std::size_t k = 0; k < total; ++k) r.params.push_back(rng.uniform(-1.0, 1.0));
  } else if (kind == "constant") {
    r.params = {rng.uniform(0.5, 2.0)};
  } else {
    fail(ErrorCode::invalid_input, "unknown corpus generator '" + kind + "'");
  }
  return r;
}

struct Corpus {
  std::vector<Recipe> members;
  TupleMode tuples = TupleMode::cyclic;

  std::vector<SampledFunction> sample(const Grid& grid) const {
    std::vector<SampledFunction> out;
    out.reserve(members.size());
    for (const auto& r : members) out.push_back(r.sample(grid));
    return out;
  }

  /// Slot assignment of member k for an m-linear tuple.
  std::vector<std::size_t> tuple(std::size_t k, int m) const {
    std::vector<std::size_t> t(m);
    for (int i = 0; i < m; ++i)
      t[i] = tuples == TupleMode::cyclic ? (k + i) % members.size() : (i == 0 ? k : 0);
    return t;
  }
};

/// Deterministic corpus; member k's parameters depend only on (seed, k).
inline Corpus make_corpus(const CorpusSpec& spec, double L, int dim, const std::vector<double>& ladder = {}) {
  if (spec.generators.empty() && !spec.origin_ladder) fail(ErrorCode::invalid_input, "corpus has no generators");
  Corpus c;
  c.tuples = spec.tuples;
  for (std::size_t k = 0; k < spec.size && !spec.generators.empty(); ++k) {
    Rng rng(spec.seed * 0x9E3779B97F4A7C15ULL + k);
    Recipe r = make_recipe(spec.generators[k % spec.generators.size()], rng, L, dim, k);
    r.exclude = spec.exclude;
    c.members.push_back(std::move(r));
  }
  if (spec.origin_ladder)
    for (double r : ladder) {
      Recipe rec;
      rec.kind = "origin_indicator";
      rec.name = "origin_indicator(r=" + std::to_string(r) + ")";
      rec.params = {r};
      c.members.push_back(std::move(rec));
    }
  if (c.members.empty()) fail(ErrorCode::invalid_input, "corpus is empty");
  return c;
}

// --- inequality specs -----------------------------------------------------------

enum class PresetKind {
  identity,
  holder_direction,
  reverse_holder_direction,
  strong_morrey,
  weak_morrey,
  commutator_strong,
  commutator_endpoint,
  iterated_strong,
  iterated_endpoint,
  bmo_lemmas,
};

inline const std::vector<std::pair<std::string, PresetKind>>& preset_names() {
  static const std::vector<std::pair<std::string, PresetKind>> names{
      {"identity", PresetKind::identity},
      {"holder_direction", PresetKind::holder_direction},
      {"reverse_holder_direction", PresetKind::reverse_holder_direction},
      {"strong_morrey", PresetKind::strong_morrey},
      {"weak_morrey", PresetKind::weak_morrey},
      {"commutator_strong", PresetKind::commutator_strong},
      {"commutator_endpoint", PresetKind::commutator_endpoint},
      {"iterated_strong", PresetKind::iterated_strong},
      {"iterated_endpoint", PresetKind::iterated_endpoint},
      {"bmo_lemmas", PresetKind::bmo_lemmas},
  };
  return names;
}

inline PresetKind parse_preset(const std::string& s) {
  for (const auto& [name, kind] : preset_names())
    if (name == s) return kind;
  fail(ErrorCode::invalid_input, "unknown preset '" + s + "'");
}

inline std::string preset_name(PresetKind k) {
  for (const auto& [name, kind] : preset_names())
    if (kind == k) return name;
  return {};
}

struct InequalitySpec {
  std::string label;
  PresetKind preset = PresetKind::identity;
  std::vector<Weight> weights;     // w_1..w_m
  std::vector<double> exponents;   // p_1..p_m
  double kappa = 0.5;
  std::optional<MultilinearKernel> kernel;
  ThetaModulus theta = ThetaModulus::power(1.0);
  std::vector<std::string> symbols;  // BMO symbols b_1..b_m
  FamilyParams family;
  CorpusSpec corpus;
  TruncationPolicy trunc;
  bool audit = false;
  /// Inequalities with an explicit constant (e.g. 1 for the Hoelder direction).
  std::optional<double> constant_bound;
  /// Expected to fail: the run passes when divergence is detected.
  bool negative_control = false;
  int ladder_steps = 3;
  LadderDirection ladder_direction = LadderDirection::down;
  double bmo_p = 2.0;  // exponent of the weighted BMO lemma
  int bmo_j_max = 5;

  int arity() const { return static_cast<int>(weights.size()); }
};

/// Checks the hypothesis constraints of each preset before any compute.
inline void validate(const InequalitySpec& s) {
  auto bad = [&](const std::string& what) { fail(ErrorCode::invalid_input, s.label + ": " + what); };
  const bool needs_weights = s.preset != PresetKind::identity || !s.weights.empty();
  if (needs_weights && s.weights.empty()) bad("preset needs weights");
  if (s.weights.size() != s.exponents.size()) bad("weights and exponents differ in length");
  for (double p : s.exponents)
    if (!(p >= 1.0) || !std::isfinite(p)) bad("exponents must lie in [1, inf)");
  if (!(s.kappa >= 0.0 && s.kappa < 1.0)) bad("kappa must lie in [0,1)");
  const int m = s.arity();
  const bool operator_preset = s.preset == PresetKind::strong_morrey || s.preset == PresetKind::weak_morrey ||
                               s.preset == PresetKind::commutator_strong ||
                               s.preset == PresetKind::commutator_endpoint ||
                               s.preset == PresetKind::iterated_strong || s.preset == PresetKind::iterated_endpoint;
  if (operator_preset) {
    if (!s.kernel) bad("preset needs a kernel");
    if (s.kernel->arity() != m) bad("kernel arity differs from the number of weights");
  }
  const bool commutator = s.preset == PresetKind::commutator_strong || s.preset == PresetKind::commutator_endpoint ||
                          s.preset == PresetKind::iterated_strong || s.preset == PresetKind::iterated_endpoint;
  if (commutator && static_cast<int>(s.symbols.size()) != m) bad("need one BMO symbol per slot");
  if (s.preset == PresetKind::bmo_lemmas && s.symbols.empty()) bad("bmo_lemmas needs a symbol");
  const double min_p = s.exponents.empty() ? 1.0 : *std::min_element(s.exponents.begin(), s.exponents.end());
  const double max_p = s.exponents.empty() ? 1.0 : *std::max_element(s.exponents.begin(), s.exponents.end());
  switch (s.preset) {
    case PresetKind::strong_morrey:
    case PresetKind::commutator_strong:
    case PresetKind::iterated_strong:
      if (min_p <= 1.0) bad("strong-type presets need every p_i > 1");
      break;
    case PresetKind::weak_morrey:
      if (min_p != 1.0) bad("weak-type preset needs min p_i = 1");
      break;
    case PresetKind::commutator_endpoint:
    case PresetKind::iterated_endpoint:
      if (max_p != 1.0) bad("endpoint presets need every p_i = 1");
      break;
    default: break;
  }
}

struct Evaluation {
  std::string label;
  std::string group;
  double lhs = 0.0;
  double rhs = 0.0;
  double alt_rhs = std::numeric_limits<double>::quiet_NaN();  // secondary normalisation
};

struct LevelResult {
  double h = 0.0;
  double c_obs = 0.0;
  double c_obs_alt = std::numeric_limits<double>::quiet_NaN();
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::map<std::string, double> group_c_obs;
  std::vector<Evaluation> evaluations;
};

/// Runs one preset at one grid and ball family.
class PresetRunner {
 public:
  PresetRunner(const InequalitySpec& spec, const Grid& grid, const FamilyParams& family)
      : spec_(spec), grid_(grid), family_(grid, family) {
    corpus_ = make_corpus(spec.corpus, grid.half_extent(), grid.dim(), family_.radii());
    for (const auto& w : spec.weights) weights_.push_back(w.sample(grid));
    if (!spec.weights.empty()) {
      mw_.emplace(spec.weights, spec.exponents);
      nu_.emplace(nu_weight(*mw_).sample(grid));
    }
    for (const auto& b : spec.symbols) symbols_.push_back(sample_symbol(grid, b));
    opt_.trunc = spec.trunc;
    opt_.audit = spec.audit;
  }

  std::vector<Evaluation> run() {
    switch (spec_.preset) {
      case PresetKind::identity: return identity();
      case PresetKind::holder_direction: return holder(false);
      case PresetKind::reverse_holder_direction: return holder(true);
      case PresetKind::strong_morrey:
      case PresetKind::weak_morrey:
      case PresetKind::commutator_strong:
      case PresetKind::iterated_strong: return strong_type();
      case PresetKind::commutator_endpoint:
      case PresetKind::iterated_endpoint: return endpoint();
      case PresetKind::bmo_lemmas: return bmo_lemmas();
    }
    return {};
  }

  const ApplyStats& stats() const { return stats_; }
  const BallFamily& family() const { return family_; }

 private:
  const SampledFunction* weight(std::size_t i) const { return i < weights_.size() ? &weights_[i] : nullptr; }

  std::vector<SampledFunction> slot_inputs(const std::vector<SampledFunction>& members, std::size_t k) const {
    std::vector<SampledFunction> fs;
    for (std::size_t idx : corpus_.tuple(k, spec_.arity())) fs.push_back(members[idx]);
    return fs;
  }

  std::vector<Evaluation> identity() {
    std::vector<Evaluation> out;
    const double p = spec_.exponents.empty() ? 2.0 : spec_.exponents.front();
    for (const auto& f : corpus_.sample(grid_)) {
      const double v = lp_norm(f, weight(0), p);
      out.push_back({f.name(), "identity", v, v});
    }
    return out;
  }

  std::vector<Evaluation> holder(bool reverse) {
    std::vector<Evaluation> out;
    const double p = mw_->p();
    for (std::size_t b = 0; b < family_.size(); ++b) {
      const Region& region = family_.regions()[b];
      const double nu_b = integrate(*nu_, region);
      double prod = 1.0;
      for (std::size_t i = 0; i < weights_.size(); ++i)
        prod *= std::pow(integrate(weights_[i], region), p / spec_.exponents[i]);
      const std::string label = "ball#" + std::to_string(b);
      out.push_back(reverse ? Evaluation{label, "reverse_holder", prod, nu_b} : Evaluation{label, "holder", nu_b, prod});
    }
    return out;
  }

  SampledFunction output(const std::vector<SampledFunction>& fs) {
    const auto& k = *spec_.kernel;
    switch (spec_.preset) {
      case PresetKind::commutator_strong:
      case PresetKind::commutator_endpoint: {
        // Kernel form only; the algebraic form is an identity checked separately.
        return apply_weighted(
            k, fs, opt_,
            [&](std::size_t x, const std::vector<std::size_t>& y) {
              double s = 0.0;
              for (std::size_t i = 0; i < symbols_.size(); ++i) s += symbols_[i][x] - symbols_[i][y[i]];
              return s;
            },
            &stats_);
      }
      case PresetKind::iterated_strong:
      case PresetKind::iterated_endpoint: return iterated_commutator(k, symbols_, fs, opt_, &stats_);
      default: return apply_operator(k, fs, opt_, &stats_);
    }
  }

  double symbol_factor() const {
    if (symbols_.empty()) return 1.0;
    if (spec_.preset == PresetKind::iterated_strong) {
      double prod = 1.0;
      for (const auto& b : symbols_) prod *= bmo_norm(b, family_);
      return prod;
    }
    double mx = 0.0;
    for (const auto& b : symbols_) mx = std::max(mx, bmo_norm(b, family_));
    return mx;
  }

  std::vector<Evaluation> strong_type() {
    const auto members = corpus_.sample(grid_);
    const double p = mw_->p();
    const bool commutator = spec_.preset == PresetKind::commutator_strong || spec_.preset == PresetKind::iterated_strong;
    const double bfac = commutator ? symbol_factor() : 1.0;
    std::vector<double> input_norms(members.size());
    std::vector<Evaluation> out;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto fs = slot_inputs(members, k);
      double rhs = bfac;
      for (std::size_t i = 0; i < fs.size(); ++i)
        rhs *= morrey_norm(fs[i], weight(i), spec_.exponents[i], spec_.kappa, family_);
      Evaluation e;
      e.group = preset_name(spec_.preset);
      e.label = fs.front().name();
      for (std::size_t i = 1; i < fs.size(); ++i) e.label += "|" + fs[i].name();
      e.rhs = rhs;
      if (rhs == 0.0) {
        out.push_back(e);  // zero RHS, skipped by the report
        continue;
      }
      const SampledFunction t = output(fs);
      e.lhs = spec_.preset == PresetKind::weak_morrey ? weak_morrey_norm(t, &*nu_, p, spec_.kappa, family_)
                                                      : morrey_norm(t, &*nu_, p, spec_.kappa, family_);
      out.push_back(e);
    }
    return out;
  }

  /// Dyadic levels 2^k covering [min positive |g|, max |g|].
  static std::vector<double> dyadic_levels(const SampledFunction& g) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double v : g.values()) {
      const double a = std::abs(v);
      if (a > 0.0) lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    std::vector<double> out;
    if (hi == 0.0) return out;
    lo = std::max(lo, hi * 1e-12);
    for (int k = static_cast<int>(std::floor(std::log2(lo))); k <= static_cast<int>(std::ceil(std::log2(hi))); ++k)
      out.push_back(std::ldexp(1.0, k));
    return out;
  }

  std::vector<Evaluation> endpoint() {
    const auto members = corpus_.sample(grid_);
    const int m = spec_.arity();
    const bool iterated = spec_.preset == PresetKind::iterated_endpoint;
    double bnorm = 0.0;
    for (const auto& b : symbols_) bnorm = std::max(bnorm, bmo_norm(b, family_));
    const double phi_b = phi(bnorm);
    const YoungFunction outer = iterated ? YoungFunction::phi_iter(m) : YoungFunction::llogl();
    std::vector<Evaluation> out;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto fs = slot_inputs(members, k);
      std::string label = fs.front().name();
      for (std::size_t i = 1; i < fs.size(); ++i) label += "|" + fs[i].name();
      const SampledFunction g = output(fs);
      // Ratio maximised over (ball, lambda); we record the maximising cell.
      Evaluation best{label, preset_name(spec_.preset), 0.0, 0.0};
      double best_ratio = -1.0;
      bool any_rhs = false;
      for (double level : dyadic_levels(g)) {
        const double lambda = std::pow(level, 1.0 / m);
        double rhs = iterated ? 1.0 : phi_b;
        double alt = iterated ? 1.0 : bnorm;
        for (int i = 0; i < m; ++i) {
          const SampledFunction arg = fs[i].map([&](double v) { return outer(std::abs(v) / lambda); });
          const double nrm = llogl_morrey_norm(arg, weight(i), spec_.kappa, family_);
          rhs *= nrm;
          alt *= nrm;
        }
        if (rhs == 0.0) continue;
        any_rhs = true;
        for (std::size_t b = 0; b < family_.size(); ++b) {
          const Region& region = family_.regions()[b];
          const double nu_b = weighted_measure(region, grid_, &*nu_);
          const double level_mass = grid_.cell_volume() * region_sum(region, [&](std::size_t i) {
                                      return std::abs(g[i]) > level ? (*nu_)[i] : 0.0;
                                    });
          const double lhs = std::pow(nu_b, -m * spec_.kappa) * std::pow(level_mass, m);
          const double ratio = lhs / rhs;
          if (ratio > best_ratio) {
            best_ratio = ratio;
            best.lhs = lhs;
            best.rhs = rhs;
            best.alt_rhs = alt;
          }
        }
      }
      if (!any_rhs) best.rhs = 0.0;
      out.push_back(best);
    }
    return out;
  }

  std::vector<Evaluation> bmo_lemmas() {
    const SampledFunction& b = symbols_.front();
    const BmoResult bmo = bmo_analysis(b, family_);
    const SampledFunction* omega = weight(0);
    const SampledFunction nu1 =
        mw_ ? nu_weight(MultiWeight(spec_.weights, std::vector<double>(spec_.weights.size(), 1.0))).sample(grid_)
            : SampledFunction::constant(grid_, 1.0);
    const double m = std::max<std::size_t>(2, spec_.weights.size());
    const double q = spec_.bmo_p;
    std::vector<Evaluation> out;
    for (std::size_t k = 0; k < family_.size(); ++k) {
      const Ball& ball = family_.balls()[k];
      const Region& region = family_.regions()[k];
      const double mean = bmo.means[k];
      const SampledFunction centred = b.map([&](double v) { return v - mean; });
      const std::string tag = "ball#" + std::to_string(k);
      // Exponential average on B.
      out.push_back({tag, "exp_average", luxemburg_norm(centred, YoungFunction::expm1(), region, omega), bmo.norm});
      // (int_B |b - b_B|^{1/m} nu)^m against nu(B)^m.
      const double s = grid_.cell_volume() *
                       region_sum(region, [&](std::size_t i) { return std::pow(std::abs(centred[i]), 1.0 / m) * nu1[i]; });
      out.push_back({tag, "fractional_average", std::pow(s, m),
                     bmo.norm * std::pow(weighted_measure(region, grid_, &nu1), m)});
      for (const auto& pair : dyadic_annuli(ball, spec_.bmo_j_max)) {
        const Region outer = Region::of(grid_, pair.outer);
        const double j1 = pair.level + 1.0;
        const std::string jt = tag + ":j=" + std::to_string(pair.level);
        out.push_back({jt, "mean_drift", std::abs(region_average(b, outer) - mean), j1 * bmo.norm});
        const double lq = lp_norm(centred, omega, q, outer);
        out.push_back({jt, "weighted_oscillation", lq,
                       j1 * bmo.norm * std::pow(weighted_measure(outer, grid_, omega), 1.0 / q)});
        out.push_back({jt, "exp_average_dilated", luxemburg_norm(centred, YoungFunction::expm1(), outer, omega),
                       j1 * bmo.norm});
      }
    }
    return out;
  }

  const InequalitySpec& spec_;
  Grid grid_;
  BallFamily family_;
  Corpus corpus_;
  std::vector<SampledFunction> weights_;
  std::optional<MultiWeight> mw_;
  std::optional<SampledFunction> nu_;
  std::vector<SampledFunction> symbols_;
  ApplyOptions opt_;
  ApplyStats stats_;
};

/// Aggregates evaluations: C_obs = max ratio over members with nonzero RHS.
inline LevelResult summarize(std::vector<Evaluation> evals, double h) {
  LevelResult r;
  r.h = h;
  for (const auto& e : evals) {
    if (!(e.rhs > 0.0)) {
      ++r.skipped;
      continue;
    }
    if (!std::isfinite(e.lhs) || !std::isfinite(e.rhs)) fail(ErrorCode::numerical, "non-finite ratio for " + e.label);
    ++r.evaluated;
    const double ratio = e.lhs / e.rhs;
    r.c_obs = std::max(r.c_obs, ratio);
    auto [it, inserted] = r.group_c_obs.emplace(e.group, ratio);
    if (!inserted) it->second = std::max(it->second, ratio);
    if (std::isfinite(e.alt_rhs) && e.alt_rhs > 0.0)
      r.c_obs_alt = std::isfinite(r.c_obs_alt) ? std::max(r.c_obs_alt, e.lhs / e.alt_rhs) : e.lhs / e.alt_rhs;
  }
  if (r.evaluated == 0) fail(ErrorCode::degenerate_corpus, "degenerate corpus: every member has zero RHS");
  r.evaluations = std::move(evals);
  return r;
}

inline FamilyParams resolved_family(const InequalitySpec& spec, const Grid& grid) {
  return BallFamily(grid, spec.family).params();
}

inline LevelResult run_inequality(const InequalitySpec& spec, const Grid& grid,
                                  std::optional<FamilyParams> family = std::nullopt,
                                  ApplyStats* stats = nullptr) {
  validate(spec);
  PresetRunner runner(spec, grid, family.value_or(resolved_family(spec, grid)));
  LevelResult r = summarize(runner.run(), grid.spacing());
  if (stats) {
    stats->evaluations += runner.stats().evaluations;
    stats->audit_checked += runner.stats().audit_checked;
    stats->audit_violations += runner.stats().audit_violations;
  }
  return r;
}

inline constexpr double drift_limit = 2.0;
inline constexpr double divergence_factor = 10.0;

struct VerificationReport {
  std::string label;
  std::string preset;
  bool negative_control = false;
  std::vector<LevelResult> levels;     // h, h/2, ...
  std::vector<double> drift;           // C_obs ratio between consecutive levels
  std::optional<LevelResult> extended;  // ladder-extended family on the base grid
  double ladder_growth = std::numeric_limits<double>::quiet_NaN();
  bool finite = false;
  bool stable = false;
  bool within_bound = true;
  ApplyStats stats;

  double c_obs() const { return levels.empty() ? 0.0 : levels.front().c_obs; }

  /// Divergence seen either across refinement or under ladder extension.
  bool diverges() const {
    bool d = std::isfinite(ladder_growth) && ladder_growth >= divergence_factor;
    for (double f : drift) d = d || std::max(f, 1.0 / f) >= divergence_factor;
    return d || !finite;
  }

  /// Positive presets pass when finite, stable and within any stated bound;
  /// negative controls pass when divergence is detected.
  bool pass() const { return negative_control ? diverges() : (finite && stable && within_bound); }

  std::string verdict() const {
    if (negative_control) return diverges() ? "unstable (control detected)" : "stable (control missed)";
    return pass() ? "stable" : (finite ? "unstable" : "infinite");
  }
};

/// C_obs at h, h/2, ..., h/2^{levels-1} on a fixed family.
inline VerificationReport refinement_study(const InequalitySpec& spec, const Grid& grid, int levels = 2) {
  if (levels < 1) fail(ErrorCode::invalid_input, "levels must be positive");
  VerificationReport rep;
  rep.label = spec.label;
  rep.preset = preset_name(spec.preset);
  rep.negative_control = spec.negative_control;
  const FamilyParams family = resolved_family(spec, grid);
  Grid g = grid;
  for (int l = 0; l < levels; ++l) {
    rep.levels.push_back(run_inequality(spec, g, family, &rep.stats));
    g = g.refined();
  }
  rep.finite = std::all_of(rep.levels.begin(), rep.levels.end(),
                           [](const LevelResult& r) { return std::isfinite(r.c_obs); });
  rep.stable = true;
  for (std::size_t l = 1; l < rep.levels.size(); ++l) {
    const double a = rep.levels[l - 1].c_obs, b = rep.levels[l].c_obs;
    const double f = a > 0.0 ? b / a : (b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    rep.drift.push_back(f);
    rep.stable = rep.stable && std::max(f, 1.0 / f) < drift_limit;
  }
  if (spec.constant_bound)
    for (const auto& l : rep.levels) rep.within_bound = rep.within_bound && l.c_obs <= *spec.constant_bound;
  return rep;
}

/// Adds the ladder-extension study (base grid) to a report.
inline void ladder_study(const InequalitySpec& spec, const Grid& grid, VerificationReport& rep) {
  const FamilyParams family = resolved_family(spec, grid);
  const FamilyParams ext = spec.ladder_direction == LadderDirection::up ? family.extended_up(spec.ladder_steps)
                                                                        : family.extended_down(spec.ladder_steps);
  rep.extended = run_inequality(spec, grid, ext, &rep.stats);
  const double base = rep.levels.empty() ? run_inequality(spec, grid, family).c_obs : rep.levels.front().c_obs;
  rep.ladder_growth = rep.extended->c_obs / base;
  if (!spec.negative_control) rep.stable = rep.stable && rep.ladder_growth < drift_limit;
}

/// Full verification: refinement study, plus the ladder study for controls.
inline VerificationReport verify_inequality(const InequalitySpec& spec, const Grid& grid, int levels = 2) {
  VerificationReport rep = refinement_study(spec, grid, levels);
  if (spec.negative_control) ladder_study(spec, grid, rep);
  return rep;
}

// --- named presets --------------------------------------------------------------

/// Strong-type Morrey bound for T: m = 2, n = 1, cos 2 phi kernel.
inline InequalitySpec preset_strong_morrey(std::vector<Weight> weights, std::vector<double> exponents, double kappa,
                                           MultilinearKernel kernel) {
  InequalitySpec s;
  s.label = "strong_morrey";
  s.preset = PresetKind::strong_morrey;
  s.weights = std::move(weights);
  s.exponents = std::move(exponents);
  s.kappa = kappa;
  s.kernel = kernel;
  return s;
}

}  // namespace morrey
