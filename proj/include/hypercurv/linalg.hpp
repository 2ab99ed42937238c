#pragma once

// Small dense linear algebra on top of Eigen: Cholesky whitening, a cyclic
// Jacobi eigensolver for symmetric matrices, Haar-random orthogonal matrices
// and the QR retraction used by the Stiefel descent.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "hypercurv/error.hpp"

namespace hypercurv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

/// Lower-triangular Cholesky factor L with g = L Lᵀ.
/// Throws SingularMetricError unless g is symmetric positive definite.
inline Matrix cholesky(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw SingularMetricError("metric must be a non-empty square matrix");
  }
  const Eigen::Index n = g.rows();
  const double scale = g.cwiseAbs().maxCoeff();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = g(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-14 * scale)) {
      throw SingularMetricError("metric is not positive definite");
    }
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// Off-diagonal Frobenius norm.
inline double off_norm(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values(k)
};

/// Cyclic Jacobi rotations until the off-diagonal norm drops to
/// rel_tol * ||A||_F. Input must be symmetric; only the upper triangle is read.
inline SymmetricEigen jacobi_eigen(const Matrix& input, double rel_tol = 1e-13,
                                   int max_sweeps = 100) {
  const Eigen::Index n = input.rows();
  Matrix a = input.triangularView<Eigen::Upper>();
  a.triangularView<Eigen::StrictlyLower>() = a.transpose().triangularView<Eigen::StrictlyLower>();
  Matrix v = Matrix::Identity(n, n);

  const double target = rel_tol * a.norm();
  for (int sweep = 0; sweep < max_sweeps && off_norm(a) > target; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

/// Generalized symmetric-definite eigenproblem h v = λ g v via
/// g = L Lᵀ, S = L⁻¹ h L⁻ᵀ. Returned vectors are in the original basis.
inline SymmetricEigen generalized_eigen(const Matrix& g, const Matrix& h) {
  const Matrix l = cholesky(g);
  const auto lower = l.triangularView<Eigen::Lower>();
  Matrix tmp = lower.solve(h);                            // L⁻¹ h
  Matrix s = lower.solve(tmp.transpose()).transpose();    // L⁻¹ h L⁻ᵀ
  s = 0.5 * (s + s.transpose()).eval();
  SymmetricEigen e = jacobi_eigen(s);
  e.vectors = l.transpose().triangularView<Eigen::Upper>().solve(e.vectors);
  return e;
}

/// Symmetric matrix representing the shape operator in a g-orthonormal basis.
inline Matrix whitened(const Matrix& g, const Matrix& h) {
  const Matrix l = cholesky(g);
  const auto lower = l.triangularView<Eigen::Lower>();
  Matrix tmp = lower.solve(h);
  Matrix s = lower.solve(tmp.transpose()).transpose();
  return 0.5 * (s + s.transpose());
}

/// Thin QR with a positive-diagonal R; the Q factor is the retraction
/// onto the Stiefel manifold.
inline Matrix qr_orthonormal(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

/// n×k matrix with orthonormal columns, Haar-distributed (QR of a Gaussian).
template <class Rng>
Matrix random_stiefel(Eigen::Index n, Eigen::Index k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);
  return qr_orthonormal(x);
}

template <class Rng>
Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
  return random_stiefel(n, n, rng);
}

}  // namespace linalg
}  // namespace hypercurv
