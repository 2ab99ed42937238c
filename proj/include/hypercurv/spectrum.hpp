#pragma once

// Principal curvatures and every pointwise curvature invariant derived from
// them. A hypersurface in a space form of curvature c has sectional
// curvature c + λᵢλⱼ on the plane spanned by principal directions i and j,
// so everything here is a function of the sorted spectrum and c.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypercurv/error.hpp"
#include "hypercurv/linalg.hpp"

namespace hypercurv {

/// Sorted principal curvatures λ₁ ≤ … ≤ λₙ of a hypersurface in a space form
/// of constant curvature c.
class ShapeSpectrum {
public:
  ShapeSpectrum(std::vector<double> lambdas, double c = 0.0, std::string source = "synthetic")
      : lambdas_(std::move(lambdas)), c_(c), source_(std::move(source)) {
    if (lambdas_.size() < 2) throw DimensionError("a spectrum needs at least two principal curvatures");
    for (double l : lambdas_) {
      if (!std::isfinite(l)) throw InvalidArgumentError("principal curvatures must be finite");
    }
    if (!std::isfinite(c_)) throw InvalidArgumentError("ambient curvature must be finite");
    std::sort(lambdas_.begin(), lambdas_.end());
  }

  std::size_t dimension() const { return lambdas_.size(); }
  const std::vector<double>& lambdas() const { return lambdas_; }
  double lambda(std::size_t i) const { return lambdas_[i]; }
  double ambient_curvature() const { return c_; }
  const std::string& source() const { return source_; }

  double sum() const { return std::accumulate(lambdas_.begin(), lambdas_.end(), 0.0); }
  double mean() const { return sum() / static_cast<double>(lambdas_.size()); }
  double sum_of_squares() const {
    double s = 0.0;
    for (double l : lambdas_) s += l * l;
    return s;
  }
  /// Sectional curvature of the principal plane (i, j).
  double principal_sec(std::size_t i, std::size_t j) const { return c_ + lambdas_[i] * lambdas_[j]; }

  /// Σ(λᵢ − H)² = ‖h‖² − nH², evaluated through pairwise differences so that
  /// near-umbilic spectra do not lose precision to cancellation.
  double umbilic_defect() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lambdas_.size(); ++i)
      for (std::size_t j = i + 1; j < lambdas_.size(); ++j) {
        const double d = lambdas_[j] - lambdas_[i];
        s += d * d;
      }
    return s / static_cast<double>(lambdas_.size());
  }

  double spread() const { return lambdas_.back() - lambdas_.front(); }

private:
  std::vector<double> lambdas_;
  double c_ = 0.0;
  std::string source_;
};

/// Umbilic threshold on ‖h‖² − nH².
inline constexpr double kUmbilicThreshold = 1e-24;

inline bool is_umbilic(const ShapeSpectrum& s) { return s.umbilic_defect() <= kUmbilicThreshold; }

struct PointInvariants {
  double mean_curvature = 0.0;      // H
  double gauss_kronecker = 0.0;     // K = Πλᵢ
  double scalar_curvature = 0.0;    // scal = Σ_{i<j} (c + λᵢλⱼ)
  double h_norm_sq = 0.0;           // ‖h‖² = Σλᵢ²
  std::optional<double> casorati;   // ½(κ₁² + κ₂²), n = 2 only
  double spread = 0.0;              // λₙ − λ₁
  double inf_sec = 0.0;             // min over principal planes
  std::vector<double> ricci_diag;
  std::optional<double> bacaloglu;            // H² + L²/8, n = 2
  std::optional<double> bacaloglu_elliptic;   // K^{3/2}/H, n = 2, K > 0, H ≠ 0
  std::optional<double> nesbitt_b1;           // n = 3, no vanishing curvature
  std::optional<double> nesbitt_b05;
};

/// W = g⁻¹h, the matrix of the Weingarten map.
inline Matrix shape_operator(const Matrix& g, const Matrix& h) {
  const Matrix l = linalg::cholesky(g);
  const auto lower = l.triangularView<Eigen::Lower>();
  return l.transpose().triangularView<Eigen::Upper>().solve(lower.solve(h));
}

inline ShapeSpectrum principal_curvatures(const Matrix& g, const Matrix& h,
                                          std::string source = "chart") {
  if (g.rows() != h.rows() || g.cols() != h.cols()) {
    throw InvalidArgumentError("g and h must have the same shape");
  }
  const linalg::SymmetricEigen e = linalg::jacobi_eigen(linalg::whitened(g, h));
  return ShapeSpectrum(std::vector<double>(e.values.data(), e.values.data() + e.values.size()), 0.0,
                       std::move(source));
}

inline std::vector<double> ricci_diagonal(const ShapeSpectrum& s) {
  const std::size_t n = s.dimension();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += s.principal_sec(i, j);
    out[i] = r;
  }
  return out;
}

/// Σ λᵢ² over the given (zero-based, distinct) principal indices.
inline double casorati_order_k(const ShapeSpectrum& s, std::span<const std::size_t> indices) {
  if (indices.empty()) throw InvalidArgumentError("Casorati index set must be nonempty");
  std::vector<bool> seen(s.dimension(), false);
  double sum = 0.0;
  for (std::size_t i : indices) {
    if (i >= s.dimension()) throw InvalidArgumentError("Casorati index out of range");
    if (seen[i]) throw InvalidArgumentError("Casorati indices must be distinct");
    seen[i] = true;
    sum += s.lambda(i) * s.lambda(i);
  }
  return sum;
}

inline double casorati_order_k(const ShapeSpectrum& s, std::initializer_list<std::size_t> indices) {
  const std::vector<std::size_t> v(indices);
  return casorati_order_k(s, std::span<const std::size_t>(v));
}

/// s(L)/√(‖h‖² − nH²).
inline double spread_ratio(const ShapeSpectrum& s) {
  const double defect = s.umbilic_defect();
  if (defect <= kUmbilicThreshold) throw UmbilicPointError("spread ratio is undefined at an umbilic");
  return s.spread() / std::sqrt(defect);
}

struct NesbittInvariants {
  double b1;   // Σ |kᵢ| / H̄_jk
  double b05;  // Σ √(|kᵢ| / H̄_jk)
};

inline NesbittInvariants nesbitt_invariants(const ShapeSpectrum& s, double vanishing_tol = 0.0) {
  if (s.dimension() != 3) throw DimensionError("Nesbitt invariants are defined for n = 3");
  double a[3];
  for (std::size_t i = 0; i < 3; ++i) {
    a[i] = std::abs(s.lambda(i));
    if (!(a[i] > vanishing_tol)) throw VanishingCurvatureError("a principal curvature vanishes");
  }
  NesbittInvariants out{0.0, 0.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const double hbar = 0.5 * (a[(i + 1) % 3] + a[(i + 2) % 3]);
    const double term = a[i] / hbar;
    out.b1 += term;
    out.b05 += std::sqrt(term);
  }
  return out;
}

inline double inf_principal_sec(const ShapeSpectrum& s) {
  double best = s.principal_sec(0, 1);
  for (std::size_t i = 0; i < s.dimension(); ++i)
    for (std::size_t j = i + 1; j < s.dimension(); ++j) best = std::min(best, s.principal_sec(i, j));
  return best;
}

inline PointInvariants invariants(const ShapeSpectrum& s) {
  const std::size_t n = s.dimension();
  PointInvariants p;
  p.mean_curvature = s.mean();
  p.gauss_kronecker = 1.0;
  for (double l : s.lambdas()) p.gauss_kronecker *= l;
  double scal = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) scal += s.principal_sec(i, j);
  p.scalar_curvature = scal;
  p.h_norm_sq = s.sum_of_squares();
  p.spread = s.spread();
  p.inf_sec = inf_principal_sec(s);
  p.ricci_diag = ricci_diagonal(s);

  if (n == 2) {
    const double k1 = s.lambda(0), k2 = s.lambda(1);
    p.casorati = 0.5 * (k1 * k1 + k2 * k2);
    const double l = std::abs(k1 - k2);
    p.bacaloglu = p.mean_curvature * p.mean_curvature + l * l / 8.0;
    if (p.gauss_kronecker > 0.0 && std::abs(p.mean_curvature) > 1e-12) {
      p.bacaloglu_elliptic = std::pow(p.gauss_kronecker, 1.5) / p.mean_curvature;
    }
  }
  if (n == 3 && s.lambda(0) != 0.0 && s.lambda(1) != 0.0 && s.lambda(2) != 0.0) {
    const NesbittInvariants b = nesbitt_invariants(s);
    p.nesbitt_b1 = b.b1;
    p.nesbitt_b05 = b.b05;
  }
  return p;
}

}  // namespace hypercurv
