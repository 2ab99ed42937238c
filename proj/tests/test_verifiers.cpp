#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hypercurv/catalog.hpp"
#include "hypercurv/verifiers.hpp"

using namespace hypercurv;

namespace {

std::vector<double> random_lambdas(std::mt19937_64& rng, int n, double lo = -5, double hi = 5) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> l(n);
  for (double& x : l) x = u(rng);
  return l;
}

const CheckResult& find(const std::vector<CheckResult>& cs, const std::string& qualified) {
  for (const auto& c : cs)
    if (c.qualified_name() == qualified) return c;
  throw std::runtime_error("missing check " + qualified);
}

}  // namespace

TEST(CheckResult, Semantics) {
  const CheckResult ok = make_check("x", "", 1.0, 1.0 + 5e-10, 1e-9, 1e-9);
  EXPECT_TRUE(ok.holds);
  EXPECT_TRUE(ok.equality);
  EXPECT_FALSE(ok.violated());
  const CheckResult strict = make_check("x", "", 1.0, 1.0, 1e-9, 1e-9, true);
  EXPECT_TRUE(strict.violated());
  const CheckResult bad = make_check("x", "", 1.0, 0.9, 1e-9, 1e-9);
  EXPECT_TRUE(bad.violated());
  const CheckResult na = not_applicable("x", "y", "why");
  EXPECT_FALSE(na.violated());
  EXPECT_EQ(na.qualified_name(), "x.y");
}

TEST(Chen1993, Example) {
  const auto c = check_chen_1993(ShapeSpectrum({-3, 1, 2}));
  EXPECT_EQ(c.lhs, -1);
  EXPECT_EQ(c.rhs, 0);
  EXPECT_EQ(c.slack, 1);
  EXPECT_TRUE(c.holds);
  EXPECT_THROW(check_chen_1993(ShapeSpectrum({1, 2})), DimensionError);
}

TEST(Fundamental, UmbilicEquality) {
  const auto c = check_fundamental(ShapeSpectrum({1, 1, 1, 1}), ChenTuple({2, 2}, 4), 0.0);
  EXPECT_EQ(c.lhs, 4);
  EXPECT_EQ(c.rhs, 4);
  EXPECT_TRUE(c.equality);
  EXPECT_EQ(c.label, "(2,2)");
}

TEST(Fundamental, EqualityAtUmbilicsForEveryTuple) {
  for (int n = 2; n <= 7; ++n) {
    for (double c : {-1.0, 0.0, 1.0}) {
      const ShapeSpectrum s(std::vector<double>(n, 0.7), c);
      for (const auto& t : enumerate_S(n)) {
        const auto r = check_fundamental(s, t, c);
        EXPECT_TRUE(r.holds);
        if (!t.empty()) EXPECT_GE(r.slack, -1e-12);
      }
    }
  }
}

TEST(Obstruction, Examples) {
  const auto sphere = check_minimality_obstruction(ShapeSpectrum({1, 1, 1}), 0.0);
  EXPECT_TRUE(sphere.obstructed);
  // () is checked first and is already positive
  EXPECT_EQ(sphere.witness->parts(), std::vector<int>{});
  EXPECT_NEAR(sphere.deltas[1].delta, 2.0, 1e-15);
  const auto waist = check_minimality_obstruction(ShapeSpectrum({-1, 1}), 0.0);
  EXPECT_FALSE(waist.obstructed);
  EXPECT_EQ(waist.deltas.size(), 1u);
  EXPECT_EQ(waist.deltas[0].delta, -1);
  EXPECT_FALSE(check_minimality_obstruction(ShapeSpectrum({0, 0, 0, 0}), 0.0).obstructed);
}

TEST(Obstruction, PositiveSectionalCurvatureIsObstructed) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + trial % 5;
    auto l = random_lambdas(rng, n, 0.05, 5);
    if (trial % 2) for (double& x : l) x = -x;
    EXPECT_TRUE(check_minimality_obstruction(ShapeSpectrum(l), 0.0).obstructed);
  }
}

TEST(Obstruction, ThresholdScalesWithAmbientCurvature) {
  // umbilic λ = t in a space form: δ(t) = b(t)(c + t²) exceeds b(t)·ε exactly when c + t² > ε
  const ShapeSpectrum s({0.5, 0.5, 0.5}, 1.0);
  EXPECT_TRUE(check_minimality_obstruction(s, 1.0).obstructed);
  EXPECT_FALSE(check_minimality_obstruction(s, 1.25).obstructed);
}

TEST(ConvexityGate, Examples) {
  const auto a = convexity_gate_at(ShapeSpectrum({1, 1, 1}));
  EXPECT_TRUE(a.gate_holds);
  EXPECT_DOUBLE_EQ(a.max_lhs, 2);
  EXPECT_EQ(a.rhs, 3);
  EXPECT_TRUE(a.conclusion.applicable && a.conclusion.holds);

  const auto b = convexity_gate_at(ShapeSpectrum({-1, 3, 4}));
  EXPECT_FALSE(b.gate_holds);
  EXPECT_NEAR(b.max_lhs, std::sqrt(50.0), 1e-14);
  EXPECT_EQ(b.rhs, 6);
  EXPECT_FALSE(b.conclusion.applicable);

  for (int n = 3; n <= 7; ++n) {
    const auto p = convexity_gate_at(ShapeSpectrum(std::vector<double>(n, 0.25)));
    EXPECT_TRUE(p.gate_holds);
    EXPECT_NEAR(p.rhs - p.max_lhs, 0.25, 1e-15);
  }
  EXPECT_THROW(convexity_gate_at(ShapeSpectrum({1, 1})), DimensionError);
}

TEST(ConvexityGate, Soundness) {
  std::mt19937_64 rng(32);
  int gated = 0;
  for (int trial = 0; trial < 50000; ++trial) {
    const int n = 3 + trial % 4;
    auto l = random_lambdas(rng, n, -1, 5);
    const auto p = convexity_gate_at(ShapeSpectrum(l));
    if (p.gate_holds) {
      ++gated;
      EXPECT_GE(*std::min_element(l.begin(), l.end()), -1e-12);
    }
  }
  EXPECT_GT(gated, 100);
}

TEST(ConvexityGate, Report) {
  const std::vector<ShapeSpectrum> pts{ShapeSpectrum({1, 1, 1}), ShapeSpectrum({1, 2, 2})};
  EXPECT_TRUE(check_convexity_gate(pts).convex);
  const std::vector<ShapeSpectrum> mixed{ShapeSpectrum({1, 1, 1}), ShapeSpectrum({-1, 3, 4})};
  EXPECT_FALSE(check_convexity_gate(mixed).convex);
}

TEST(Imo, Examples) {
  const double t = 1.0 / 3.0;
  const auto [lo, hi] = check_imo(ShapeSpectrum({t, t, t}));
  EXPECT_NEAR(hi.lhs, 7.0 / 27.0, 1e-15);
  EXPECT_TRUE(hi.equality);
  EXPECT_TRUE(lo.holds);

  const auto [l2, h2] = check_imo(ShapeSpectrum({0.6, 0.3, 0.1}));
  EXPECT_NEAR(h2.lhs, 0.234, 1e-15);
  EXPECT_TRUE(l2.holds && h2.holds);

  // the boundary point (1/2, 1/2, 0) is outside the strictly convex hypothesis
  EXPECT_FALSE(check_imo(ShapeSpectrum({0.5, 0.5, 0})).first.applicable);
  const auto [l3, h3] = check_imo(ShapeSpectrum({0.5 - 1e-9, 0.5 - 1e-9, 2e-9}));
  EXPECT_NEAR(h3.lhs, 0.25, 1e-8);
  EXPECT_TRUE(l3.holds && h3.holds);

  EXPECT_FALSE(check_imo(ShapeSpectrum({1, 1, 1})).first.applicable);
  EXPECT_FALSE(check_imo(ShapeSpectrum({t, t, t}, 1)).first.applicable);
  EXPECT_FALSE(check_imo(ShapeSpectrum({0.5, 0.5})).first.applicable);
}

TEST(SpreadUpper, Examples) {
  const auto [a, am] = check_spread_upper(ShapeSpectrum({-2, 3.5}));
  EXPECT_NEAR(a.slack, 0, 1e-13);
  EXPECT_TRUE(a.equality);
  const auto [b, bm] = check_spread_upper(ShapeSpectrum({0, 1, 1}));
  EXPECT_EQ(b.lhs, 1);
  EXPECT_NEAR(b.rhs, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.slack, 1.0 / 3.0, 1e-15);
  const auto [c, cm] = check_spread_upper(ShapeSpectrum({2, 2, 2}));
  EXPECT_EQ(c.lhs, 0);
  EXPECT_EQ(c.rhs, 0);
  EXPECT_TRUE(c.equality);
}

TEST(Steaua, Examples) {
  const double t = 1.5;
  const auto u = check_steaua(ShapeSpectrum({t, t, t}));
  EXPECT_DOUBLE_EQ(u.lhs, 2 * t * t);
  EXPECT_DOUBLE_EQ(u.rhs, 2.25 * t * t);
  EXPECT_FALSE(u.equality);
  const auto v = check_steaua(ShapeSpectrum({-1, 1, 0}));
  EXPECT_EQ(v.lhs, 0);
  EXPECT_EQ(v.rhs, 0);
  EXPECT_TRUE(v.equality);
  const auto w = check_steaua(ShapeSpectrum({0, 0, 0}));
  EXPECT_TRUE(w.equality);
  EXPECT_THROW(check_steaua(ShapeSpectrum({1, 2})), DimensionError);
}

TEST(RatioInterval, Examples) {
  const auto [lo, hi] = check_ratio_interval(ShapeSpectrum({-0.3, 4}));
  EXPECT_NEAR(hi.lhs, std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(hi.equality);
  const auto [lo2, hi2] = check_ratio_interval(ShapeSpectrum({0, 1, 1}));
  EXPECT_NEAR(hi2.lhs, 1.224744871391589, 1e-15);
  EXPECT_NEAR(lo2.lhs, 1.1547005383792515, 1e-15);
  const auto [lo3, hi3] = check_ratio_interval(ShapeSpectrum({0, 1, 2}));
  EXPECT_TRUE(hi3.equality);
  EXPECT_FALSE(check_ratio_interval(ShapeSpectrum({1, 1, 1})).first.applicable);
}

TEST(Rho, Examples) {
  for (double c : {-1.0, 0.0, 2.0}) {
    const auto r = check_rho(ShapeSpectrum({0.8, 0.8, 0.8, 0.8}, c));
    EXPECT_NEAR(r.lhs, c + 0.64, 1e-15);
    EXPECT_NEAR(r.rhs, c + 0.64, 1e-15);
    EXPECT_TRUE(r.equality);
  }
  const auto a = check_rho(ShapeSpectrum({0, 1, 1}));
  EXPECT_NEAR(a.lhs, 1.0 / 3.0, 1e-16);
  EXPECT_EQ(a.rhs, 0.5);
  EXPECT_FALSE(a.equality);
  const auto b = check_rho(ShapeSpectrum({0, 1}));
  EXPECT_EQ(b.lhs, 0);
  EXPECT_EQ(b.rhs, 0.25);
  EXPECT_FALSE(b.equality);
}

TEST(Rho, EqualityDetectsUmbilics) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20000; ++trial) {
    const int n = 2 + trial % 5;
    const auto l = random_lambdas(rng, n);
    const ShapeSpectrum s(l, static_cast<double>(trial % 3) - 1);
    EXPECT_EQ(check_rho(s).equality, s.spread() <= 1e-10) << trial;
  }
}

TEST(Nesbitt, Examples) {
  const auto [b1, b05] = check_nesbitt(ShapeSpectrum({1, 1, 1}));
  EXPECT_EQ(b1.rhs, 3);
  EXPECT_TRUE(b1.equality);
  EXPECT_FALSE(b1.violated());
  EXPECT_EQ(b05.rhs, 3);
  EXPECT_FALSE(b05.equality);
  EXPECT_TRUE(b05.strict);
  EXPECT_NEAR(check_nesbitt(ShapeSpectrum({1, 1, 2})).first.rhs, 10.0 / 3.0, 1e-15);
  EXPECT_EQ(check_nesbitt(ShapeSpectrum({-1, 1, 1})).first.rhs, 3);
  EXPECT_FALSE(check_nesbitt(ShapeSpectrum({1, 0, 2})).first.applicable);
  EXPECT_FALSE(check_nesbitt(ShapeSpectrum({1, 2})).first.applicable);
}

TEST(RicciMinimal, Examples) {
  const auto r = check_ricci_minimal(ShapeSpectrum({-1, 1}));
  EXPECT_TRUE(r.applicable);
  EXPECT_EQ(r.lhs, -1);
  EXPECT_FALSE(check_ricci_minimal(ShapeSpectrum({1, 1})).applicable);
  EXPECT_FALSE(check_ricci_minimal(ShapeSpectrum({-1, 1}, 1)).applicable);
  EXPECT_TRUE(check_ricci_minimal(ShapeSpectrum({-2, 0.5, 1.5})).holds);
}

TEST(Audit, FuzzNoViolations) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 2 + trial % 5;
    const ShapeSpectrum s(random_lambdas(rng, n), static_cast<double>(trial % 3) - 1);
    for (const auto& c : audit_spectrum(s).checks) ASSERT_FALSE(c.violated()) << c.qualified_name() << " " << trial;
  }
}

TEST(Audit, CheckSelection) {
  AuditOptions opt;
  opt.checks = {"rho", "nesbitt"};
  const auto a = audit_spectrum(ShapeSpectrum({1, 2, 3}), opt);
  ASSERT_EQ(a.checks.size(), 3u);
  EXPECT_EQ(a.checks[0].qualified_name(), "rho");
  EXPECT_TRUE(a.deltas.empty());
  EXPECT_FALSE(a.gate.has_value());
  EXPECT_NO_THROW(find(a.checks, "nesbitt.B05"));
}

TEST(Audit, AllCheckIdsAreStable) {
  EXPECT_EQ(all_check_ids(),
            (std::vector<std::string>{"chen1993", "fundamental", "obstruction", "convexity_gate", "imo_bound",
                                      "spread_upper", "steaua", "ratio_interval", "rho", "nesbitt",
                                      "ricci_minimal"}));
  EXPECT_FALSE(is_known_check("nope"));
}

TEST(UmbilicLimit, TwoDimensionalPathIsConstant) {
  const Chart c = make_chart("graph_expr", {{"f", "0.5*(x1^2+x2^2)+x1^3"}, {"n", 2}});
  const std::vector<double> o{0, 0}, d{1, 0};
  const auto e = umbilic_limit_estimate(c, o, d);
  EXPECT_EQ(e.ratios.size(), 12u);
  for (double r : e.ratios) EXPECT_NEAR(r, std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(e.all_in_interval());
}

TEST(UmbilicLimit, ThreeDimensionalGraph) {
  const Chart c = make_chart("graph_expr", {{"f", "0.5*(x1^2+x2^2+x3^2)+x1^3"}, {"n", 3}});
  const std::vector<double> o{0, 0, 0}, d{1, 0, 0};
  const auto e = umbilic_limit_estimate(c, o, d);
  EXPECT_TRUE(e.all_in_interval());
  EXPECT_TRUE(e.converging);
  EXPECT_LE(e.base_defect, 1e-24);
}

TEST(UmbilicLimit, SphereIsUmbilicEverywhere) {
  const Chart c = make_chart("sphere", {{"r", 1}, {"n", 2}});
  const std::vector<double> o{0, 0}, d{1, 0.5};
  EXPECT_THROW(umbilic_limit_estimate(c, o, d), UmbilicPointError);
}
