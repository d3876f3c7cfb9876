// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "morrey/verify.hpp"

using namespace morrey;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

BallFamily origin_family(const Grid& g, double r_min, double r_max) {
  FamilyParams p;
  p.centers = CenterLayout::origin;
  p.include_domain_ball = false;
  p.r_min = r_min;
  p.r_max = r_max;
  return BallFamily(g, p);
}

// 1. Luxemburg norm with A(t) = t against the weighted average.
Outcome luxemburg_closed_form() {
  const Grid g(1, 1.0, std::ldexp(1.0, -8));
  CorpusSpec cs;
  cs.size = 50;
  cs.seed = 2024;
  const auto members = make_corpus(cs, 1.0, 1).sample(g);
  const auto w = Weight::radial_power(0.5).sample(g);
  const Region r = Region::of(g, Ball{{0.1, 0.0}, 0.6});
  double worst = 0.0;
  for (const auto& f : members) {
    const double direct = region_sum(r, [&](std::size_t i) { return std::abs(f[i]) * w[i]; }) /
                          region_sum(r, [&](std::size_t i) { return w[i]; });
    worst = std::max(worst, relative_difference(luxemburg_norm(f, YoungFunction::linear(), r, &w), direct));
  }
  return {worst <= 1e-6, fmt("max relative error %.3e over %zu members (tol 1e-6)", worst, members.size())};
}

// 2. Generalized Hoelder, plain and weighted.
Outcome holder_suite() {
  const Grid g(1, 1.0, std::ldexp(1.0, -8));
  CorpusSpec cs;
  cs.size = 101;
  cs.seed = 77;
  const auto members = make_corpus(cs, 1.0, 1).sample(g);
  const std::vector<SampledFunction> weights{SampledFunction::constant(g, 1.0), Weight::radial_power(0.5).sample(g),
                                             Weight::radial_power(-0.5).sample(g)};
  const std::vector<Ball> balls{{{0.0, 0.0}, 0.1}, {{0.3, 0.0}, 0.25}, {{-0.5, 0.0}, 0.4}, {{0.2, 0.0}, 0.7}, {{0.0, 0.0}, 1.0}};
  std::size_t checks = 0, violations = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < 100; ++k)
    for (const auto& w : weights)
      for (const auto& b : balls) {
        const Region r = Region::of(g, b);
        const auto plain = generalized_holder_check(members[k], members[k + 1], r);
        const auto weighted = generalized_holder_check(members[k], members[k + 1], r, &w);
        checks += 2;
        violations += !plain.pass + !weighted.pass;
        worst = std::max({worst, plain.ratio, weighted.ratio});
      }
  return {violations == 0, fmt("%zu violations in %zu checks, max LHS/(norm product) %.4f (bound 2)", violations, checks, worst)};
}

// 3. A_p calibration.
Outcome ap_calibration() {
  const Grid g2(2, 1.0, 1.0 / 16);
  double unit_err = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0})
    unit_err = std::max(unit_err, std::abs(ap_characteristic(Weight::constant(1.0), p, BallFamily(g2, {})) - 1.0));

  const Grid fine(1, 1.0, std::ldexp(1.0, -12));
  const double half = ap_characteristic(Weight::radial_power(0.5), 2.0, origin_family(fine, 0.0, 1.0));
  const double target = 2.0 / std::sqrt(3.0);
  const double half_err = std::abs(half - target) / target;

  const Grid g(1, 1.0, std::ldexp(1.0, -10));
  const auto base = origin_family(g, 2 * g.spacing(), 0.125);
  const auto s = ap_study(Weight::radial_power(1.5), 2.0, base);
  const bool flagged = !s.stable(default_growth_threshold);
  const bool grows = s.ladder_growth() >= 10.0;
  return {unit_err <= 1e-9 && half_err <= 0.01 && flagged && grows,
          fmt("(a) |A_p(1) - 1| = %.1e; (b) A_2(|x|^1/2) = %.5f vs %.5f (rel %.2e, tol 1e-2); "
              "(c) |x|^3/2 ladder growth %.3f (need >= 10), refine growth %.3f, proxy flag %s",
              unit_err, half, target, half_err, s.ladder_growth(), s.refine_growth(), flagged ? "unstable" : "stable")};
}

// 4. Multilinear A_P verdict against the conjunction of linear verdicts.
Outcome lemma_agreement() {
  const Grid g(1, 1.0, std::ldexp(1.0, -10));
  const auto family = origin_family(g, 2 * g.spacing(), 0.125);
  const std::vector<double> alphas{-0.9, -0.05, 0.8, 1.65, 2.5};
  constexpr double margin = 0.15;
  // nu = |x|^{(a1+a2)/2} in A_2 and |x|^{-a_k} in A_4 (1D, P = (2,2)).
  auto distance_to_boundary = [](double a1, double a2) {
    const double nu = 0.5 * (a1 + a2);
    double d = std::min(std::abs(nu + 1.0), std::abs(nu - 1.0));
    for (double a : {a1, a2}) d = std::min({d, std::abs(-a + 1.0), std::abs(-a - 3.0)});
    return d;
  };
  int cells = 0, skipped = 0, disagree = 0, oracle_miss = 0;
  for (double a1 : alphas)
    for (double a2 : alphas) {
      if (distance_to_boundary(a1, a2) < margin) {
        ++skipped;
        continue;
      }
      ++cells;
      const auto rep = check_lemma_multi(MultiWeight({Weight::radial_power(a1), Weight::radial_power(a2)}, {2.0, 2.0}), family);
      const double nu = 0.5 * (a1 + a2);
      const bool analytic = nu > -1.0 && nu < 1.0 && a1 < 1.0 && a2 < 1.0;
      if (!rep.agreement) {
        ++disagree;
        std::printf("  cell (%.2f, %.2f): multi %s, conjunction %s\n", a1, a2, rep.multi_stable ? "stable" : "unstable",
                    rep.conjunction_stable ? "stable" : "unstable");
      }
      oracle_miss += rep.multi_stable != analytic;
    }
  return {disagree == 0, fmt("%d disagreements on %d non-borderline cells (%d borderline skipped); "
                             "multi verdict differs from the analytic range on %d cells",
                             disagree, cells, skipped, oracle_miss)};
}

// 5. Commutator identities.
Outcome commutator_identities() {
  const Grid g(1, 1.0, std::ldexp(1.0, -6));
  CorpusSpec cs;
  cs.size = 20;
  cs.seed = 5;
  const auto members = make_corpus(cs, 1.0, 1).sample(g);
  const auto k = MultilinearKernel::homogeneous(2, 1, 2);
  const std::vector<SampledFunction> bs{sample_symbol(g, "log_abs"), sample_symbol(g, "heaviside")};
  double sum_err = 0.0, iter_err = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::vector<SampledFunction> fs{members[i], members[(i + 1) % members.size()]};
    const auto pair = multilinear_commutator(k, bs, fs);
    sum_err = std::max(sum_err, relative_sup_difference(pair.kernel_form, pair.algebraic_form));
    iter_err = std::max(iter_err, relative_sup_difference(iterated_commutator(k, bs, fs), iterated_expansion(k, bs, fs)));
  }
  return {sum_err <= 1e-10 && iter_err <= 1e-10,
          fmt("sum commutator %.2e, iterated expansion %.2e (tol 1e-10) over 20 inputs", sum_err, iter_err)};
}

// 6. Cauchy representation of b(x) - b(y).
Outcome cauchy_identity() {
  const Grid g(1, 1.0, std::ldexp(1.0, -8));
  const auto b = sample_symbol(g, "log_abs");
  const double e256 = cauchy_representation_check(b, 256, 100);
  const double e64 = cauchy_representation_check(b, 64, 100, 7, 4.0);
  const double e128 = cauchy_representation_check(b, 128, 100, 7, 4.0);
  const double gain = e128 > 0.0 ? e64 / e128 : INFINITY;
  return {e256 <= 1e-8 && gain >= 100.0,
          fmt("(a) 256 nodes: %.2e (tol 1e-8); (b) 64 -> 128 nodes: %.2e -> %.2e, gain %.2f (need >= 100)", e256, e64,
              e128, gain)};
}

// 7. Tail domination off the doubled ball.
Outcome tail_domination() {
  const Grid g(1, 1.0, std::ldexp(1.0, -7));
  const auto k = MultilinearKernel::majorant(2, 1);
  const std::vector<Ball> balls{{{0.0, 0.0}, 1.0 / 16}, {{0.35, 0.0}, 1.0 / 32}, {{-0.5, 0.0}, 1.0 / 8}};
  std::size_t checks = 0, violations = 0;
  double worst = 0.0;
  for (const auto& b : balls) {
    CorpusSpec cs;
    cs.size = 10;
    cs.seed = 31;
    cs.exclude = b.scaled(2.0);
    const auto members = make_corpus(cs, 1.0, 1).sample(g);
    int j_max = 1;
    while (std::ldexp(b.radius, j_max + 1) < 4.0 * g.half_extent()) ++j_max;
    ApplyOptions opt;
    opt.targets = Region::of(g, b).indices();
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::vector<SampledFunction> fs{members[i], members[(i + 1) % members.size()]};
      const auto out = apply_operator(k, fs, opt);
      double sup = 0.0;
      for (std::size_t t : opt.targets) sup = std::max(sup, std::abs(out[t]));
      const auto tail = tail_majorant(k, b, fs, j_max);
      ++checks;
      if (sup > tail.value) ++violations;
      if (tail.value > 0.0) worst = std::max(worst, sup / tail.value);
    }
  }
  return {violations == 0, fmt("%zu violations in %zu (ball, tuple) checks, max sup|T| / tail bound %.4f, C_geo = %g",
                               violations, checks, worst, tail_geometric_constant(2, 1))};
}

InequalitySpec strong_preset() {
  auto s = preset_strong_morrey({Weight::radial_power(0.5), Weight::radial_power(0.5)}, {2.0, 2.0}, 0.5,
                                MultilinearKernel::homogeneous(2, 1, 2));
  s.corpus.size = 20;
  return s;
}

// 8. Strong-type Morrey stability.
Outcome strong_stability() {
  const auto rep = verify_inequality(strong_preset(), Grid(1, 1.0, std::ldexp(1.0, -6)), 2);
  const double drift = rep.drift.at(0);
  return {rep.finite && std::max(drift, 1.0 / drift) < 2.0,
          fmt("C_obs %.5f at h = 2^-6, %.5f at 2^-7, drift %.4f (limit 2)", rep.levels[0].c_obs, rep.levels[1].c_obs, drift)};
}

// 9. Endpoint commutator estimate.
Outcome endpoint_stability() {
  InequalitySpec s;
  s.label = "commutator_endpoint";
  s.preset = PresetKind::commutator_endpoint;
  s.weights = {Weight::radial_power(0.5), Weight::radial_power(0.5)};
  s.exponents = {1.0, 1.0};
  s.kappa = 0.5;
  s.kernel = MultilinearKernel::homogeneous(2, 1, 2);
  s.symbols = {"log_abs", "log_abs"};
  s.corpus.size = 20;
  const auto rep = verify_inequality(s, Grid(1, 1.0, std::ldexp(1.0, -6)), 2);
  const double drift = rep.drift.at(0);
  bool cells_finite = true;
  for (const auto& l : rep.levels)
    for (const auto& e : l.evaluations) cells_finite = cells_finite && std::isfinite(e.lhs) && std::isfinite(e.rhs);
  return {rep.finite && cells_finite && std::max(drift, 1.0 / drift) < 2.0,
          fmt("C_obs %.5f at h = 2^-6, %.5f at 2^-7, drift %.4f (limit 2); ||b||-normalised C_obs %.4f", rep.levels[0].c_obs,
              rep.levels[1].c_obs, drift, rep.levels[0].c_obs_alt)};
}

// 10. Negative control: an out-of-class weight must be caught.
Outcome negative_control() {
  auto s = preset_strong_morrey({Weight::radial_power(5.0), Weight::radial_power(0.5)}, {2.0, 2.0}, 0.25,
                                MultilinearKernel::homogeneous(2, 1, 2));
  s.label = "negative_control";
  s.negative_control = true;
  s.corpus.size = 1;
  s.corpus.generators = {"bump"};
  s.corpus.origin_ladder = true;
  s.corpus.tuples = TupleMode::anchored;
  const Grid g(1, 1.0, std::ldexp(1.0, -6));
  s.family.r_min = 16 * g.spacing();
  s.ladder_steps = 3;
  s.ladder_direction = LadderDirection::down;
  const auto rep = verify_inequality(s, g, 2);
  const bool unstable = rep.verdict().rfind("unstable", 0) == 0;
  return {rep.ladder_growth >= 10.0 && unstable,
          fmt("C_obs %.4f -> %.4f under ladder extension, growth %.2f (need >= 10), verdict '%s'", rep.c_obs(),
              rep.extended->c_obs, rep.ladder_growth, rep.verdict().c_str())};
}

// 11. Quasi-triangle constants.
Outcome quasi_triangle() {
  const Grid g(1, 1.0, std::ldexp(1.0, -8));
  CorpusSpec cs;
  cs.size = 64;
  cs.seed = 11;
  const auto members = make_corpus(cs, 1.0, 1).sample(g);
  const auto w = Weight::radial_power(0.5).sample(g);
  std::size_t violations = 0, tuples = 0;
  std::string worst;
  for (double p : {0.5, 1.0, 2.0})
    for (int n : {2, 3, 8}) {
      std::vector<std::vector<SampledFunction>> ts;
      for (std::size_t k = 0; k < 50; ++k) {
        std::vector<SampledFunction> t;
        for (int i = 0; i < n; ++i) t.push_back(members[(k + static_cast<std::size_t>(i) * 7) % members.size()]);
        ts.push_back(std::move(t));
      }
      const auto rep = quasi_triangle_constants(p, ts, &w);
      violations += rep.violations;
      tuples += rep.tuples;
      worst += fmt(" p=%g,N=%d:%.3f/%.3f,%.3f/%.3f", p, n, rep.strong_observed, rep.strong_bound, rep.weak_observed,
                   rep.weak_bound);
    }
  return {violations == 0, fmt("%zu violations over %zu tuples; observed/bound (strong, weak):", violations, tuples) + worst};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Luxemburg closed form", 5, luxemburg_closed_form},
      {2, "Orlicz Hoelder suite", 30, holder_suite},
      {3, "A_p calibration", 10, ap_calibration},
      {4, "multilinear A_P agreement", 120, lemma_agreement},
      {5, "commutator identities", 120, commutator_identities},
      {6, "Cauchy identity", 5, cauchy_identity},
      {7, "tail domination", 60, tail_domination},
      {8, "strong-type Morrey stability", 600, strong_stability},
      {9, "endpoint commutator stability", 600, endpoint_stability},
      {10, "negative control", 600, negative_control},
      {11, "quasi-norm constants", 60, quasi_triangle},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d (%s): %s [%.2fs of %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
