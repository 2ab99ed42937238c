#pragma once

// Chen's δ-invariants for hypersurfaces.
//
// δ(n₁,…,n_k) = scal − inf Σⱼ scal(Lⱼ) over mutually orthogonal subspaces
// Lⱼ of dimension nⱼ. The fast path searches subspaces spanned by principal
// directions only; the oracle minimizes over all orthonormal frames by
// Riemannian gradient descent on the Stiefel manifold and is what the fast
// path is continuously checked against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypercurv/error.hpp"
#include "hypercurv/linalg.hpp"
#include "hypercurv/spectrum.hpp"

namespace hypercurv {

// ---------------------------------------------------------------------------
// Exact rationals for the tuple coefficients

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw InvalidArgumentError("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend constexpr bool operator==(const Rational&, const Rational&) = default;
};

inline std::string to_string(const Rational& r) {
  return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

// ---------------------------------------------------------------------------
// Tuples

/// An element (n₁,…,n_k) of S(n), stored with parts in non-decreasing order.
class ChenTuple {
public:
  ChenTuple(std::vector<int> parts, int n) : parts_(std::move(parts)), n_(n) {
    std::sort(parts_.begin(), parts_.end());
    if (n_ < 2) throw InvalidTupleError("dimension must be at least 2");
    int sum = 0;
    for (int p : parts_) {
      if (p < 2) throw InvalidTupleError("every part must be at least 2");
      sum += p;
    }
    if (!parts_.empty() && parts_.front() >= n_) throw InvalidTupleError("first part must be below n");
    if (sum > n_) throw InvalidTupleError("parts sum exceeds n");
  }

  static bool admissible(std::span<const int> parts, int n) {
    if (n < 2) return false;
    int sum = 0;
    for (int p : parts) {
      if (p < 2) return false;
      sum += p;
    }
    return (parts.empty() || parts.front() < n) && sum <= n;
  }

  const std::vector<int>& parts() const { return parts_; }
  int dimension() const { return n_; }
  int k() const { return static_cast<int>(parts_.size()); }
  int total() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
  bool empty() const { return parts_.empty(); }

  friend bool operator==(const ChenTuple&, const ChenTuple&) = default;

private:
  std::vector<int> parts_;
  int n_;
};

inline std::string to_string(const ChenTuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.parts().size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t.parts()[i]);
  }
  return s + ")";
}

/// S(n), ordered by k and then lexicographically.
inline std::vector<ChenTuple> enumerate_S(int n) {
  if (n < 2) throw DimensionError("S(n) needs n >= 2");
  std::vector<std::vector<int>> found;
  std::vector<int> current;
  // non-decreasing parts, each at least the previous one
  auto grow = [&](auto&& self, int min_part, int remaining) -> void {
    found.push_back(current);
    for (int p = min_part; p <= remaining; ++p) {
      if (current.empty() && p >= n) break;
      current.push_back(p);
      self(self, p, remaining - p);
      current.pop_back();
    }
  };
  grow(grow, 2, n);
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  std::vector<ChenTuple> out;
  out.reserve(found.size());
  for (auto& parts : found) out.emplace_back(std::move(parts), n);
  return out;
}

/// c(n₁,…,n_k) = n²(n + k − 1 − Σnⱼ) / (2(n + k − Σnⱼ)).
inline Rational coefficient_c_exact(const ChenTuple& t) {
  const std::int64_t n = t.dimension();
  const std::int64_t k = t.k();
  const std::int64_t sum = t.total();
  return Rational(n * n * (n + k - 1 - sum), 2 * (n + k - sum));
}

/// b(n₁,…,n_k) = ½{n(n−1) − Σ nⱼ(nⱼ−1)}.
inline Rational coefficient_b_exact(const ChenTuple& t) {
  const std::int64_t n = t.dimension();
  std::int64_t s = n * (n - 1);
  for (int p : t.parts()) s -= static_cast<std::int64_t>(p) * (p - 1);
  return Rational(s, 2);
}

inline double coefficient_c(const ChenTuple& t) { return coefficient_c_exact(t).to_double(); }
inline double coefficient_b(const ChenTuple& t) { return coefficient_b_exact(t).to_double(); }

// ---------------------------------------------------------------------------
// Principal-axis fast path

/// Σ over pairs inside `indices` of (c + λᵢλⱼ); zero-based indices.
inline double scal_of_subspace(const ShapeSpectrum& s, std::span<const std::size_t> indices) {
  if (indices.size() < 2) throw InvalidArgumentError("a subspace needs at least two directions");
  double sum = 0.0;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] >= s.dimension()) throw InvalidArgumentError("principal index out of range");
    for (std::size_t b = a + 1; b < indices.size(); ++b) {
      if (indices[a] == indices[b]) throw InvalidArgumentError("principal indices must be distinct");
      sum += s.principal_sec(indices[a], indices[b]);
    }
  }
  return sum;
}

inline double scal_of_subspace(const ShapeSpectrum& s, std::initializer_list<std::size_t> indices) {
  const std::vector<std::size_t> v(indices);
  return scal_of_subspace(s, std::span<const std::size_t>(v));
}

/// Smallest principal-plane sectional curvature (all pairs scanned).
inline double inf_sec_fast(const ShapeSpectrum& s) { return inf_principal_sec(s); }

// ---------------------------------------------------------------------------
// Stiefel-manifold oracle

struct OracleOptions {
  int restarts = 64;
  int refine_steps = 200;
  double initial_step = 0.1;
  double shrink = 0.5;
  double min_step = 1e-10;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

/// Σⱼ scal(span of column block j) for column blocks of sizes `parts`.
struct SubspaceObjective {
  const Matrix& w;
  double c;
  std::span<const int> parts;

  double value(const Matrix& q) const {
    double total = 0.0;
    Eigen::Index col = 0;
    for (int p : parts) {
      const Matrix qb = q.middleCols(col, p);
      const Matrix m = qb.transpose() * w * qb;
      const double tr = m.trace();
      total += 0.5 * p * (p - 1) * c + 0.5 * (tr * tr - m.squaredNorm());
      col += p;
    }
    return total;
  }

  /// Euclidean gradient: 2 W Qⱼ (tr(Mⱼ) I − Mⱼ) per block.
  Matrix gradient(const Matrix& q) const {
    Matrix grad(q.rows(), q.cols());
    Eigen::Index col = 0;
    for (int p : parts) {
      const Matrix qb = q.middleCols(col, p);
      const Matrix wq = w * qb;
      const Matrix m = qb.transpose() * wq;
      const Matrix inner = m.trace() * Matrix::Identity(p, p) - m;
      grad.middleCols(col, p) = 2.0 * wq * inner;
      col += p;
    }
    return grad;
  }
};

/// Riemannian conjugate-gradient descent (Polak–Ribière+) with the QR
/// retraction and a backtracking line search. Returns the final value.
inline double stiefel_descent(const SubspaceObjective& obj, Matrix q, const OracleOptions& opt) {
  auto project = [](const Matrix& x, const Matrix& v) {
    const Matrix xtv = x.transpose() * v;
    return Matrix(v - x * (0.5 * (xtv + xtv.transpose())));
  };
  double f = obj.value(q);
  Matrix xi = project(q, obj.gradient(q));
  Matrix dir = -xi;
  double trial_step = opt.initial_step;
  for (int it = 0; it < opt.refine_steps; ++it) {
    double slope = xi.cwiseProduct(dir).sum();
    if (!(slope < 0.0)) {
      dir = -xi;
      slope = -xi.squaredNorm();
    }
    if (slope == 0.0) break;
    // each search starts from twice the last accepted step
    double step = trial_step;
    bool moved = false;
    while (step >= opt.min_step) {
      Matrix trial = linalg::qr_orthonormal(q + step * dir);
      const double ft = obj.value(trial);
      if (ft <= f + 1e-4 * step * slope) {
        q = std::move(trial);
        f = ft;
        moved = true;
        break;
      }
      step *= opt.shrink;
    }
    if (!moved) break;
    trial_step = 2.0 * step;

    const Matrix xi_new = project(q, obj.gradient(q));
    const Matrix xi_old = project(q, xi);
    const double beta = std::max(0.0, xi_new.cwiseProduct(xi_new - xi_old).sum() / xi.squaredNorm());
    dir = -xi_new + beta * project(q, dir);
    xi = xi_new;
  }
  return f;
}

inline double oracle_minimum(const Matrix& w, double c, std::span<const int> parts,
                             const OracleOptions& opt) {
  const Eigen::Index n = w.rows();
  const int cols = std::accumulate(parts.begin(), parts.end(), 0);
  if (cols == 0) return 0.0;
  std::mt19937_64 rng(opt.seed);
  const SubspaceObjective obj{w, c, parts};
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    const Matrix q0 = linalg::random_stiefel(n, cols, rng);
    best = std::min(best, stiefel_descent(obj, q0, opt));
  }
  return best;
}

inline void require_symmetric(const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() < 2) throw InvalidArgumentError("W must be square with n >= 2");
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgumentError("W must be symmetric");
  }
}

}  // namespace detail

/// Infimum of c + (uᵀWu)(vᵀWv) − (uᵀWv)² over orthonormal pairs (u, v).
inline double inf_sec_oracle(const Matrix& w, double c, const OracleOptions& opt = {}) {
  detail::require_symmetric(w);
  const int parts[] = {2};
  return detail::oracle_minimum(w, c, parts, opt);
}

inline double scal_of_matrix(const Matrix& w, double c) {
  const double tr = w.trace();
  const double n = static_cast<double>(w.rows());
  return 0.5 * n * (n - 1.0) * c + 0.5 * (tr * tr - w.squaredNorm());
}

/// scal − (best Σ scal(Lⱼ) found by the Stiefel search).
inline double delta_oracle(const Matrix& w, double c, const ChenTuple& t, const OracleOptions& opt = {}) {
  detail::require_symmetric(w);
  if (t.dimension() != w.rows()) throw InvalidTupleError("tuple dimension does not match W");
  const double scal = scal_of_matrix(w, c);
  if (t.empty()) return scal;
  return scal - detail::oracle_minimum(w, c, t.parts(), opt);
}

struct DeltaResult {
  double value = 0.0;       // reported δ
  double fast_value = 0.0;  // principal-axis δ
  std::vector<std::vector<std::size_t>> achieving_partition;  // zero-based principal indices
  std::optional<double> oracle_value;
  std::optional<double> oracle_gap;  // oracle_value − fast_value
};

/// Principal-axis δ, optionally validated by the Stiefel oracle. With
/// validation the reported value corresponds to the lowest subspace sum
/// either search found.
inline DeltaResult delta_invariant(const ShapeSpectrum& s, const ChenTuple& t,
                                   const OracleOptions* validate = nullptr) {
  const std::size_t n = s.dimension();
  if (t.dimension() != static_cast<int>(n)) throw InvalidTupleError("tuple dimension does not match spectrum");

  double scal = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) scal += s.principal_sec(i, j);

  DeltaResult r;
  if (t.empty()) {
    r.value = r.fast_value = scal;
  } else {
    const auto& parts = t.parts();
    std::vector<std::vector<std::size_t>> current(parts.size());
    std::vector<bool> used(n, false);
    double best = std::numeric_limits<double>::infinity();

    // choose ascending index subsets for each part in turn
    auto choose = [&](auto&& self, std::size_t part, std::size_t start, double acc) -> void {
      auto& cur = current[part];
      if (cur.size() == static_cast<std::size_t>(parts[part])) {
        const double sub = acc + scal_of_subspace(s, cur);
        if (part + 1 == parts.size()) {
          if (sub < best) {
            best = sub;
            r.achieving_partition = current;
          }
        } else {
          self(self, part + 1, 0, sub);
        }
        return;
      }
      for (std::size_t i = start; i < n; ++i) {
        if (used[i]) continue;
        used[i] = true;
        cur.push_back(i);
        self(self, part, i + 1, acc);
        cur.pop_back();
        used[i] = false;
      }
    };
    choose(choose, 0, 0, 0.0);
    r.fast_value = scal - best;
    r.value = r.fast_value;
  }

  if (validate) {
    const Vector diag = Eigen::Map<const Vector>(s.lambdas().data(), static_cast<Eigen::Index>(n));
    const Matrix w = diag.asDiagonal();
    const double oracle = delta_oracle(w, s.ambient_curvature(), t, *validate);
    r.oracle_value = oracle;
    r.oracle_gap = oracle - r.fast_value;
    r.value = std::max(r.fast_value, oracle);
  }
  return r;
}

}  // namespace hypercurv
