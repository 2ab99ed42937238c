#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hypercurv/catalog.hpp"
#include "hypercurv/spectrum.hpp"
#include "support/oracles.hpp"

using namespace hypercurv;
using nlohmann::json;

namespace {

ShapeSpectrum spectrum_at(const Chart& c, const std::vector<double>& u) {
  const FrameData f = evaluate_frame(c, u);
  return principal_curvatures(f.g, f.h);
}

std::vector<double> random_point(const Chart& c, std::mt19937_64& rng) {
  std::vector<double> u;
  for (const auto& iv : c.domain()) {
    const double pad = 0.02 * (iv.hi - iv.lo);
    u.push_back(std::uniform_real_distribution<double>(iv.lo + pad, iv.hi - pad)(rng));
  }
  return u;
}

void expect_spectrum(const ShapeSpectrum& s, std::vector<double> expected, double tol) {
  std::sort(expected.begin(), expected.end());
  ASSERT_EQ(s.dimension(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(s.lambda(i), expected[i], tol) << i;
}

}  // namespace

TEST(Catalog, SphereExamples) {
  const Chart s2 = make_chart("sphere", {{"r", 1}, {"n", 2}});
  expect_spectrum(spectrum_at(s2, {0.3, -0.4}), {1, 1}, 1e-12);
  const Chart s3 = make_chart("sphere", {{"r", 2}, {"n", 3}});
  expect_spectrum(spectrum_at(s3, {0.1, 0.2, -0.3}), {0.5, 0.5, 0.5}, 1e-12);
  const auto ref = reference_invariants("sphere", {{"r", 2}, {"n", 3}}, std::vector<double>{0, 0, 0});
  EXPECT_EQ(ref.lambdas, (std::vector<double>{0.5, 0.5, 0.5}));
}

TEST(Catalog, CatenoidAtWaist) {
  const Chart c = make_chart("catenoid");
  const auto p = invariants(spectrum_at(c, {0.7, 0.0}));
  EXPECT_NEAR(p.mean_curvature, 0, 1e-15);
  EXPECT_NEAR(p.gauss_kronecker, -1, 1e-14);
}

TEST(Catalog, CylinderAndTorusReferences) {
  expect_spectrum(spectrum_at(make_chart("cylinder", {{"r", 2}}), {0.5, 0.1}), {0, 0.5}, 1e-12);
  EXPECT_EQ(reference_invariants("cylinder", {{"r", 2}}, std::vector<double>{0, 0}).lambdas,
            (std::vector<double>{0, 0.5}));
  const auto t = reference_invariants("torus", {{"R", 2}, {"r", 1}}, std::vector<double>{0, 0});
  EXPECT_NEAR(t.lambdas[0], 1.0 / 3, 1e-16);
  EXPECT_EQ(t.lambdas[1], 1.0);
  expect_spectrum(spectrum_at(make_chart("torus", {{"R", 2}, {"r", 1}}), {0.0, 0.0}), {1.0 / 3, 1}, 1e-12);
}

TEST(Catalog, GraphQuadricAtOrigin) {
  const double t = 1.0 / 3;
  const json p = {{"A", {{t, 0, 0}, {0, t, 0}, {0, 0, t}}}};
  expect_spectrum(spectrum_at(make_chart("graph_quadric", p), {0, 0, 0}), {t, t, t}, 1e-15);
  EXPECT_THROW(reference_invariants("graph_quadric", p, std::vector<double>{0.1, 0, 0}), NoReferenceError);
}

TEST(Catalog, EllipsoidVertex) {
  const json p = {{"a", 2}, {"b", 1}, {"c", 3}};
  expect_spectrum(spectrum_at(make_chart("ellipsoid", p), {0, 0}), {2.0 / 1, 2.0 / 9}, 1e-12);
  EXPECT_THROW(reference_invariants("ellipsoid", p, std::vector<double>{0.1, 0}), NoReferenceError);
}

// Closed forms written out here rather than taken from the catalog.
TEST(Catalog, PipelineMatchesClosedForms) {
  std::mt19937_64 rng(41);
  struct Case {
    std::string name;
    json params;
    std::function<std::vector<double>(const std::vector<double>&)> expected;
  };
  const double R = 3, r = 1.2;
  const std::vector<Case> cases{
      {"sphere", {{"r", 1.5}, {"n", 2}}, [](const auto&) { return std::vector<double>{1 / 1.5, 1 / 1.5}; }},
      {"sphere", {{"r", 0.5}, {"n", 4}}, [](const auto&) { return std::vector<double>(4, 2.0); }},
      {"cylinder", {{"r", 0.8}}, [](const auto&) { return std::vector<double>{0, 1 / 0.8}; }},
      {"catenoid", json::object(),
       [](const auto& u) {
         const double k = 1 / std::pow(std::cosh(u[1]), 2);
         return std::vector<double>{-k, k};
       }},
      {"torus", {{"R", R}, {"r", r}},
       [=](const auto& u) { return std::vector<double>{std::cos(u[1]) / (R + r * std::cos(u[1])), 1 / r}; }},
  };
  for (const auto& c : cases) {
    const Chart chart = make_chart(c.name, c.params);
    for (int k = 0; k < 25; ++k) {
      const auto u = random_point(chart, rng);
      const auto s = spectrum_at(chart, u);
      expect_spectrum(s, c.expected(u), 1e-8);
      const auto ref = reference_invariants(c.name, c.params, u);
      expect_spectrum(s, ref.lambdas, 1e-8);
      EXPECT_NEAR(s.mean(), ref.mean_curvature, 1e-8);
    }
  }
}

TEST(Catalog, CatenoidIsMinimalOnGrid) {
  const Chart c = make_chart("catenoid");
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const std::vector<double> u{-3 + 6 * (i + 0.5) / 50, -1 + 2 * (j + 0.5) / 50};
      const auto s = spectrum_at(c, u);
      EXPECT_LE(std::abs(s.mean()), 1e-10);
      for (double ric : ricci_diagonal(s)) EXPECT_LE(ric, 1e-10);
    }
}

TEST(Catalog, ConvexGraphsHaveNonNegativeCurvatures) {
  const Chart c = make_chart("graph_expr", {{"f", "x1^2+x2^2+x3^2+0.3*x1*x2"}, {"n", 3}});
  std::mt19937_64 rng(42);
  for (int k = 0; k < 50; ++k) EXPECT_GT(spectrum_at(c, random_point(c, rng)).lambda(0), 0);
}

TEST(Catalog, Errors) {
  EXPECT_THROW(make_chart("klein_bottle"), CatalogError);
  EXPECT_THROW(make_chart("sphere", {{"radius", 1}}), CatalogError);
  EXPECT_THROW(make_chart("sphere", {{"r", -1}}), CatalogError);
  EXPECT_THROW(make_chart("torus", {{"R", 1}, {"r", 2}}), CatalogError);
  EXPECT_THROW(make_chart("graph_quadric", {{"A", {{1, 2}, {0, 1}}}}), CatalogError);
  EXPECT_THROW(make_chart("graph_expr", {{"n", 2}}), CatalogError);
  EXPECT_THROW(reference_invariants("graph_expr", {{"f", "x1*x2"}}, std::vector<double>{0, 0}), NoReferenceError);
}

TEST(Catalog, EveryEntryBuildsWithDefaults) {
  for (const auto& e : catalog()) {
    json p = json::object();
    if (e.name == "graph_quadric") p = {{"A", {{1, 0}, {0, 2}}}};
    if (e.name == "graph_expr") p = {{"f", "x1^2-x2^2"}};
    const Chart c = e.make(p);
    EXPECT_NO_THROW(evaluate_frame(c, c.center())) << e.name;
  }
}
