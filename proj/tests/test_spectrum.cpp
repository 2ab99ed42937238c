#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hypercurv/spectrum.hpp"
#include "support/oracles.hpp"

using namespace hypercurv;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

}  // namespace

TEST(ShapeOperator, DiagonalCases) {
  EXPECT_LE((shape_operator(Matrix::Identity(2, 2), diag({1, 2})) - diag({1, 2})).norm(), 1e-15);
  EXPECT_LE((shape_operator(diag({4, 1}), diag({4, 3})) - diag({1, 3})).norm(), 1e-15);
  EXPECT_THROW(shape_operator(diag({1, 0}), diag({1, 1})), SingularMetricError);
  EXPECT_THROW(shape_operator(diag({1, -1}), diag({1, 1})), SingularMetricError);
}

TEST(PrincipalCurvatures, SortedAscending) {
  const auto s = principal_curvatures(Matrix::Identity(3, 3), diag({3, 1, 2}));
  EXPECT_EQ(s.lambdas(), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(s.ambient_curvature(), 0.0);
}

TEST(PrincipalCurvatures, MatchEigenGeneralizedSolver) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    Matrix a(n, n), h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = z(rng);
    const Matrix g = a * a.transpose() + 0.5 * Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) h(i, j) = h(j, i) = z(rng);
    const auto s = principal_curvatures(g, h);
    const auto ref = oracle::generalized_eigenvalues(g, h);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(s.lambda(i), ref[i], 1e-9 * (1 + std::abs(ref[i])));
    // eigen residual of the Weingarten map
    const Matrix w = shape_operator(g, h);
    for (int i = 0; i < n; ++i) {
      EXPECT_LE(std::abs((w - s.lambda(i) * Matrix::Identity(n, n)).determinant()),
                1e-8 * std::pow(1 + w.norm(), n));
    }
    // Newton identities: trace and determinant
    double sum = 0, prod = 1;
    for (double l : s.lambdas()) sum += l, prod *= l;
    EXPECT_NEAR(sum, w.trace(), 1e-9 * (1 + w.norm()));
    EXPECT_NEAR(prod, w.determinant(), 1e-8 * std::pow(1 + w.norm(), n));
  }
}

TEST(Invariants, UnitSphere) {
  const auto p = invariants(ShapeSpectrum({1, 1}));
  EXPECT_EQ(p.mean_curvature, 1);
  EXPECT_EQ(p.gauss_kronecker, 1);
  EXPECT_EQ(p.scalar_curvature, 1);
  EXPECT_EQ(p.h_norm_sq, 2);
  EXPECT_EQ(p.spread, 0);
  EXPECT_EQ(*p.bacaloglu, 1);
  EXPECT_EQ(*p.casorati, 1);
}

TEST(Invariants, CatenoidWaist) {
  const auto p = invariants(ShapeSpectrum({-1, 1}));
  EXPECT_EQ(p.mean_curvature, 0);
  EXPECT_EQ(p.gauss_kronecker, -1);
  EXPECT_EQ(*p.bacaloglu, 0.5);
  EXPECT_FALSE(p.bacaloglu_elliptic.has_value());
}

TEST(Invariants, EllipticBacaloglu) {
  const auto p = invariants(ShapeSpectrum({1, 4}));
  EXPECT_DOUBLE_EQ(*p.bacaloglu_elliptic, 8.0 / 2.5);
}

TEST(Invariants, SymmetricImoPoint) {
  const double t = 1.0 / 3.0;
  const auto p = invariants(ShapeSpectrum({t, t, t}));
  EXPECT_NEAR(p.mean_curvature, t, 1e-16);
  EXPECT_NEAR(p.gauss_kronecker, 1.0 / 27, 1e-17);
  EXPECT_NEAR(p.scalar_curvature, t, 1e-16);
  EXPECT_NEAR(p.scalar_curvature - 2 * p.gauss_kronecker, 7.0 / 27, 1e-15);
  EXPECT_FALSE(p.casorati.has_value());
}

TEST(Invariants, AmbientCurvatureEntersSectionalTerms) {
  const ShapeSpectrum s({1, 2, 3}, -1);
  const auto p = invariants(s);
  EXPECT_DOUBLE_EQ(p.scalar_curvature, oracle::scal({1, 2, 3}, -1));
  EXPECT_DOUBLE_EQ(p.inf_sec, 1 * 2 - 1.0);
  EXPECT_EQ(p.ricci_diag, (std::vector<double>{1 * 5 - 2.0, 2 * 4 - 2.0, 3 * 3 - 2.0}));
}

TEST(CasoratiOrderK, Examples) {
  EXPECT_EQ(casorati_order_k(ShapeSpectrum({1, 2, 3}), {0, 1}), 5);
  EXPECT_EQ(casorati_order_k(ShapeSpectrum(std::vector<double>(5, 1.0)), {0, 1, 2, 3, 4}), 5);
  const ShapeSpectrum s({3, 4, -1});
  EXPECT_EQ(s.lambdas(), (std::vector<double>{-1, 3, 4}));
  EXPECT_EQ(casorati_order_k(s, {1, 2}), 25);
  EXPECT_THROW(casorati_order_k(s, {1, 1}), InvalidArgumentError);
  EXPECT_THROW(casorati_order_k(s, {3}), InvalidArgumentError);
}

TEST(RicciDiagonal, Examples) {
  EXPECT_EQ(ricci_diagonal(ShapeSpectrum({-1, 1})), (std::vector<double>{-1, -1}));
  EXPECT_EQ(ricci_diagonal(ShapeSpectrum({1, 1, 1})), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(ricci_diagonal(ShapeSpectrum({0, 0})), (std::vector<double>{0, 0}));
}

TEST(SpreadRatio, Examples) {
  EXPECT_DOUBLE_EQ(spread_ratio(ShapeSpectrum({0, 1})), std::sqrt(2.0));
  EXPECT_NEAR(spread_ratio(ShapeSpectrum({0, 1, 1})), 1.0 / std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(spread_ratio(ShapeSpectrum({0, 1, 2})), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(spread_ratio(ShapeSpectrum({1, 1})), UmbilicPointError);
}

TEST(SpreadRatio, AlwaysInInterval) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 20000; ++trial) {
    const int n = 2 + trial % 6;
    std::vector<double> l(n);
    for (double& x : l) x = u(rng);
    const double r = spread_ratio(ShapeSpectrum(l));
    EXPECT_GE(r, 2 / std::sqrt(double(n)) - 1e-12);
    EXPECT_LE(r, std::sqrt(2.0) + 1e-12);
  }
}

TEST(SpreadRatio, UmbilicDefectIsStableNearUmbilics) {
  const double d = std::ldexp(1.0, -20);
  const ShapeSpectrum s({1e3, 1e3 + d});
  EXPECT_EQ(s.umbilic_defect(), 0.5 * d * d);
  EXPECT_NEAR(spread_ratio(s), std::sqrt(2.0), 4e-16);
}

TEST(Nesbitt, Examples) {
  EXPECT_EQ(nesbitt_invariants(ShapeSpectrum({1, 1, 1})).b1, 3);
  EXPECT_EQ(nesbitt_invariants(ShapeSpectrum({1, 1, 1})).b05, 3);
  EXPECT_NEAR(nesbitt_invariants(ShapeSpectrum({1, 1, 2})).b1, 10.0 / 3, 1e-15);
  EXPECT_EQ(nesbitt_invariants(ShapeSpectrum({-1, 1, 1})).b1, 3);
  EXPECT_THROW(nesbitt_invariants(ShapeSpectrum({1, 0, 2})), VanishingCurvatureError);
  EXPECT_THROW(nesbitt_invariants(ShapeSpectrum({1, 2})), DimensionError);
}

TEST(ShapeSpectrum, Validation) {
  EXPECT_THROW(ShapeSpectrum({1}), DimensionError);
  EXPECT_THROW(ShapeSpectrum({1, NAN}), InvalidArgumentError);
  EXPECT_THROW(ShapeSpectrum({1, 2}, INFINITY), InvalidArgumentError);
}
