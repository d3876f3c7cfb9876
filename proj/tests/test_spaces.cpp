#include <gtest/gtest.h>

#include <cmath>

#include "morrey/spaces.hpp"

using namespace morrey;

namespace {

BallFamily domain_family(const Grid& g) { return BallFamily(g, {}); }

SampledFunction indicator(const Grid& g, double lo, double hi) {
  return SampledFunction::sample(g, [=](const Point& x) { return x[0] >= lo && x[0] < hi ? 1.0 : 0.0; });
}

std::vector<SampledFunction> test_functions(const Grid& g) {
  Rng rng(5);
  std::vector<SampledFunction> out;
  out.push_back(indicator(g, -0.3, 0.4));
  out.push_back(SampledFunction::sample(g, [](const Point& x) { return std::exp(-8 * x[0] * x[0]); }));
  out.push_back(SampledFunction::sample(g, [](const Point& x) { return std::sin(6 * x[0]); }));
  std::vector<double> lv(16);
  for (auto& v : lv) v = rng.uniform(-1.0, 1.0);
  out.push_back(SampledFunction::sample(g, [&](const Point& x) { return lv[std::min(15, int((x[0] + 1.0) * 8))]; }));
  return out;
}

}  // namespace

TEST(LpNorm, ConstantAndWeak) {
  const Grid g(1, 1.0, 1.0 / 256);
  const auto one = SampledFunction::constant(g, 1.0);
  EXPECT_NEAR(lp_norm(one, nullptr, 2.0), std::sqrt(2.0), g.spacing());
  const auto c = SampledFunction::constant(g, 3.0);
  EXPECT_NEAR(weak_lp_norm(c, nullptr, 2.0), 3.0 * std::sqrt(2.0), 1e-12);
  const auto w = SampledFunction::sample(g, [](const Point& x) { return 1.0 + x[0]; });
  EXPECT_NEAR(weak_lp_norm(c, &w, 1.5), 3.0 * std::pow(integrate(w), 1.0 / 1.5), 1e-12);
  EXPECT_THROW(lp_norm(one, nullptr, 0.0), Error);
}

TEST(LpNorm, WeakStableWhileStrongGrows) {
  // |x|^{-1/2}: the continuum WL^2 norm is sqrt 2 and the L^2 norm diverges logarithmically.
  auto f_on = [](double h) {
    return SampledFunction::sample(Grid(1, 1.0, h), [](const Point& x) { return 1.0 / std::sqrt(std::abs(x[0])); });
  };
  const double h = std::ldexp(1.0, -10);
  const auto coarse = f_on(h), fine = f_on(h / 4);
  const double wc = weak_lp_norm(coarse, nullptr, 2.0), wf = weak_lp_norm(fine, nullptr, 2.0);
  // The sampled sup sits at the innermost level, sqrt(2 (k+1) / (k+1/2)) at k = 0.
  EXPECT_GE(wc, std::sqrt(2.0));
  EXPECT_NEAR(wc, 2.0, 1e-12);
  EXPECT_NEAR(wf / wc, 1.0, 1e-12);
  const double sc = lp_norm(coarse, nullptr, 2.0), sf = lp_norm(fine, nullptr, 2.0);
  EXPECT_GT(sf * sf - sc * sc, 2.0 * std::log(4.0) * 0.9);  // 2 log(1/h) + const
}

TEST(MorreyNorm, KappaZeroMatchesLebesgue) {
  const Grid g(1, 1.0, 1.0 / 128);
  const auto fam = domain_family(g);
  const auto w = SampledFunction::sample(g, [](const Point& x) { return std::sqrt(std::abs(x[0])); });
  for (const auto& f : test_functions(g))
    for (double p : {1.0, 2.0, 3.0}) {
      EXPECT_NEAR(morrey_norm(f, &w, p, 0.0, fam), lp_norm(f, &w, p), 1e-9 * lp_norm(f, &w, p));
      EXPECT_NEAR(weak_morrey_norm(f, &w, p, 0.0, fam), weak_lp_norm(f, &w, p), 1e-9 * weak_lp_norm(f, &w, p));
    }
}

TEST(MorreyNorm, ConstantClosedForms) {
  const Grid g(1, 1.0, 1.0 / 128);
  const auto fam = domain_family(g);
  const auto one = SampledFunction::constant(g, 1.0);
  EXPECT_NEAR(morrey_norm(one, nullptr, 1.0, 0.5, fam), std::sqrt(2.0), 1e-12);
  EXPECT_EQ(morrey_norm(SampledFunction::constant(g, 0.0), nullptr, 2.0, 0.3, fam), 0.0);
  const auto c = SampledFunction::constant(g, 2.0);
  EXPECT_NEAR(weak_morrey_norm(c, nullptr, 2.0, 0.0, fam), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(llogl_morrey_norm(c, nullptr, 0.0, fam), 2.0 * 2.0, 1e-8);
  EXPECT_EQ(llogl_morrey_norm(SampledFunction::constant(g, 0.0), nullptr, 0.4, fam), 0.0);
  EXPECT_THROW(morrey_norm(one, nullptr, 1.0, 1.0, fam), Error);
}

TEST(MorreyNorm, WeakBelowStrongAndEmbeddings) {
  const Grid g(1, 1.0, 1.0 / 128);
  const auto fam = domain_family(g);
  const auto w = SampledFunction::sample(g, [](const Point& x) { return 0.2 + std::abs(x[0]); });
  for (const auto& f : test_functions(g)) {
    for (double p : {0.5, 1.0, 2.0}) {
      EXPECT_LE(weak_lp_norm(f, &w, p), lp_norm(f, &w, p) * (1.0 + 1e-12));
      for (double kappa : {0.0, 0.4, 0.8})
        EXPECT_LE(weak_morrey_norm(f, &w, p, kappa, fam), morrey_norm(f, &w, p, kappa, fam) * (1.0 + 1e-12));
    }
    for (double kappa : {0.0, 0.5})
      EXPECT_LE(morrey_norm(f, &w, 1.0, kappa, fam), llogl_morrey_norm(f, &w, kappa, fam) * (1.0 + 1e-9));
  }
}

TEST(MorreyNorm, HomogeneousAndMonotoneInFamily) {
  const Grid g(1, 1.0, 1.0 / 128);
  FamilyParams small;
  small.r_max = 0.25;
  small.include_domain_ball = false;
  const BallFamily sub(g, small);
  const auto full = domain_family(g);
  for (const auto& f : test_functions(g)) {
    const double a = morrey_norm(f, nullptr, 2.0, 0.5, full);
    EXPECT_NEAR(morrey_norm(-3.0 * f, nullptr, 2.0, 0.5, full), 3.0 * a, 1e-12 * a);
    EXPECT_LE(morrey_norm(f, nullptr, 2.0, 0.5, sub), a * (1.0 + 1e-12));
    EXPECT_NEAR(weak_morrey_norm(2.0 * f, nullptr, 1.0, 0.3, full), 2.0 * weak_morrey_norm(f, nullptr, 1.0, 0.3, full), 1e-12);
    EXPECT_LE(morrey_norm(f, nullptr, 2.0, 0.5, full), morrey_norm(f.abs() + SampledFunction::constant(g, 0.1), nullptr, 2.0, 0.5, full));
  }
}

TEST(Bmo, BasicProperties) {
  const Grid g(1, 1.0, 1.0 / 256);
  const auto fam = domain_family(g);
  EXPECT_NEAR(bmo_norm(SampledFunction::constant(g, 4.0), fam), 0.0, 1e-12);
  for (const auto& f : test_functions(g)) {
    EXPECT_LE(bmo_norm(f, fam), 2.0 * f.max_abs() + 1e-12);
    EXPECT_NEAR(bmo_norm(f + SampledFunction::constant(g, 7.0), fam), bmo_norm(f, fam), 1e-12);
  }
}

TEST(Bmo, LogOscillationIsScaleFree) {
  const Grid g(1, 1.0, std::ldexp(1.0, -14));
  const auto b = SampledFunction::sample(g, [](const Point& x) { return std::log(std::abs(x[0])); });
  const Region r1 = Region::of(g, Ball{{0.0, 0.0}, 0.125}), r2 = Region::of(g, Ball{{0.0, 0.0}, 0.5});
  const double o1 = mean_oscillation(b, r1, region_average(b, r1));
  const double o2 = mean_oscillation(b, r2, region_average(b, r2));
  EXPECT_NEAR(o1, 2.0 / std::exp(1.0), 0.01);  // (1/r) int_0^r |log(x/r) + 1| dx = 2/e
  EXPECT_NEAR(o1, o2, 1e-3);
}

TEST(Bmo, DilatedAverageDriftGrowsLinearly) {
  const Grid g(1, 2.0, std::ldexp(1.0, -12));
  const auto b = SampledFunction::sample(g, [](const Point& x) { return std::log(std::abs(x[0])); });
  FamilyParams p;
  p.r_max = 1.0;
  p.include_domain_ball = false;
  const double star = bmo_norm(b, BallFamily(g, p));
  const Ball base{{0.0, 0.0}, 1.0 / 32};
  const double mean_b = region_average(b, Region::of(g, base));
  for (int j = 1; j <= 5; ++j) {
    const double mean_j = region_average(b, Region::of(g, base.scaled(std::ldexp(1.0, j + 1))));
    EXPECT_NEAR(mean_j - mean_b, (j + 1) * std::log(2.0), 5e-3);
    EXPECT_LE(std::abs(mean_j - mean_b), 2.0 * (j + 1) * star);
  }
}

TEST(QuasiTriangle, ConstantsAndEqualityCase) {
  const Grid g(1, 1.0, 1.0 / 64);
  EXPECT_DOUBLE_EQ(strong_triangle_bound(0.5, 2), 2.0);
  EXPECT_DOUBLE_EQ(strong_triangle_bound(2.0, 8), 1.0);
  EXPECT_DOUBLE_EQ(weak_triangle_bound(1.0, 3), 3.0);
  EXPECT_DOUBLE_EQ(weak_triangle_bound(0.5, 3), 9.0);

  // disjoint equal-size indicators saturate the p = 1/2 strong bound
  const auto rep = quasi_triangle_constants(0.5, {{indicator(g, 0.0, 1.0), indicator(g, -1.0, 0.0)}});
  EXPECT_NEAR(rep.strong_observed, 2.0, 1e-12);
  EXPECT_TRUE(rep.pass());

  std::vector<std::vector<SampledFunction>> triples;
  const auto fs = test_functions(g);
  for (std::size_t k = 0; k + 2 < fs.size(); ++k) triples.push_back({fs[k], fs[k + 1], fs[k + 2]});
  const auto one = quasi_triangle_constants(1.0, triples);
  EXPECT_LE(one.strong_observed, 1.0 + 1e-12);
  EXPECT_LE(one.weak_observed, 3.0);
  EXPECT_TRUE(one.pass());
}

TEST(EvaluateNorm, DispatchAndErrors) {
  const Grid g(1, 1.0, 1.0 / 64);
  const auto fam = domain_family(g);
  const auto f = test_functions(g)[1];
  EXPECT_DOUBLE_EQ(evaluate_norm(f, {SpaceKind::morrey, 2.0, 0.0}, nullptr, &fam), morrey_norm(f, nullptr, 2.0, 0.0, fam));
  EXPECT_DOUBLE_EQ(evaluate_norm(f, {SpaceKind::lp, 2.0, 0.0}, nullptr, nullptr), lp_norm(f, nullptr, 2.0));
  EXPECT_THROW(evaluate_norm(f, {SpaceKind::bmo, 1.0, 0.0}, nullptr, nullptr), Error);
  EXPECT_EQ(parse_space("morrey"), SpaceKind::morrey);
  EXPECT_EQ(space_name(parse_space("llogl_morrey")), "llogl_morrey");
  EXPECT_THROW(parse_space("sobolev"), Error);
  const auto zero = SampledFunction::constant(g, 0.0);
  for (auto k : {SpaceKind::lp, SpaceKind::weak_lp, SpaceKind::morrey, SpaceKind::weak_morrey, SpaceKind::llogl_morrey, SpaceKind::bmo})
    EXPECT_EQ(evaluate_norm(zero, {k, 2.0, 0.25}, nullptr, &fam), 0.0);
}
