#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypercurv/error.hpp"
#include "hypercurv/exprlang.hpp"
#include "hypercurv/linalg.hpp"

namespace hypercurv {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Parametric hypersurface σ: U ⊂ Rⁿ → Rⁿ⁺¹ over a box domain.
class Chart {
public:
  Chart(std::vector<std::string> variables, std::vector<Expr> components,
        std::vector<Interval> domain, bool orientation_flip = false)
      : variables_(std::move(variables)),
        components_(std::move(components)),
        domain_(std::move(domain)),
        flip_(orientation_flip) {
    const std::size_t n = variables_.size();
    if (n < 2) throw InvalidArgumentError("chart dimension must be at least 2");
    if (components_.size() != n + 1) {
      throw InvalidArgumentError("chart needs " + std::to_string(n + 1) + " components, got " +
                                 std::to_string(components_.size()));
    }
    for (const Expr& c : components_) {
      if (c.empty() || c.arity() != n) {
        throw InvalidArgumentError("chart component arity does not match the parameter count");
      }
    }
    if (domain_.size() != n) throw InvalidArgumentError("domain box has the wrong dimension");
    for (const Interval& iv : domain_) {
      if (!(iv.hi > iv.lo)) throw InvalidArgumentError("domain box must have positive volume");
    }
  }

  /// Parses component strings over the named variables.
  static Chart from_strings(std::vector<std::string> variables,
                            const std::vector<std::string>& components,
                            std::vector<Interval> domain, bool orientation_flip = false) {
    std::vector<Expr> parsed;
    parsed.reserve(components.size());
    for (const auto& c : components) parsed.push_back(parse(c, std::span<const std::string>(variables)));
    return Chart(std::move(variables), std::move(parsed), std::move(domain), orientation_flip);
  }

  std::size_t dimension() const { return variables_.size(); }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Expr>& components() const { return components_; }
  const std::vector<Interval>& domain() const { return domain_; }
  bool orientation_flip() const { return flip_; }

  Chart with_orientation_flip(bool flip) const {
    Chart c = *this;
    c.flip_ = flip;
    return c;
  }

  bool strictly_inside(std::span<const double> u) const {
    if (u.size() != domain_.size()) return false;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!(u[i] > domain_[i].lo && u[i] < domain_[i].hi)) return false;
    }
    return true;
  }

  std::vector<double> center() const {
    std::vector<double> c;
    for (const auto& iv : domain_) c.push_back(0.5 * (iv.lo + iv.hi));
    return c;
  }

  Vector position(std::span<const double> u) const {
    Vector p(static_cast<Eigen::Index>(components_.size()));
    for (std::size_t k = 0; k < components_.size(); ++k) {
      p(static_cast<Eigen::Index>(k)) = eval_scalar(components_[k], u);
    }
    return p;
  }

private:
  std::vector<std::string> variables_;
  std::vector<Expr> components_;
  std::vector<Interval> domain_;
  bool flip_ = false;
};

/// Gauss frame data at one parameter point.
struct FrameData {
  Vector point;                      // σ(u) in Rⁿ⁺¹
  std::vector<Vector> tangents;      // σ_i
  std::vector<Vector> second_partials;  // σ_ij for i ≤ j, row-major upper triangle
  Vector normal;                     // unit N
  Matrix g;                          // first fundamental form
  Matrix h;                          // second fundamental form

  const Vector& second_partial(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    const std::size_t n = tangents.size();
    return second_partials[i * n - i * (i - 1) / 2 + (j - i)];
  }
};

/// Cofactor expansion of the formal determinant whose first n rows are the
/// given vectors in Rⁿ⁺¹ and whose last row holds the basis vectors. For
/// n = 2 this is the usual cross product. Returns zero for dependent input.
inline Vector generalized_cross(std::span<const Vector> vectors) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  Matrix rows(n, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (vectors[static_cast<std::size_t>(i)].size() != n + 1) {
      throw InvalidArgumentError("generalized_cross expects n vectors in R^(n+1)");
    }
    rows.row(i) = vectors[static_cast<std::size_t>(i)].transpose();
  }
  Vector out(n + 1);
  Matrix minor(n, n);
  for (Eigen::Index k = 0; k <= n; ++k) {
    for (Eigen::Index col = 0, m = 0; col <= n; ++col) {
      if (col == k) continue;
      minor.col(m++) = rows.col(col);
    }
    // sign (-1)^((n+1)+(k+1)) for the entry in the last row, column k
    const double sign = ((n + k) % 2 == 0) ? 1.0 : -1.0;
    out(k) = n == 0 ? 1.0 : sign * minor.fullPivLu().determinant();
  }
  return out;
}

inline Vector generalized_cross(const std::vector<Vector>& vectors) {
  return generalized_cross(std::span<const Vector>(vectors));
}

/// Tangents, unit normal and both fundamental forms at a strict-interior point.
inline FrameData evaluate_frame(const Chart& chart, std::span<const double> u) {
  const std::size_t n = chart.dimension();
  if (u.size() != n) throw InvalidArgumentError("parameter point has the wrong dimension");
  if (!chart.strictly_inside(u)) {
    throw InvalidArgumentError("frame evaluation requires a strict interior point");
  }
  const auto ni = static_cast<Eigen::Index>(n);

  FrameData f;
  f.point = Vector(ni + 1);
  f.tangents.assign(n, Vector(ni + 1));
  f.second_partials.assign(n * (n + 1) / 2, Vector(ni + 1));
  for (std::size_t k = 0; k < n + 1; ++k) {
    const Jet2 jet = eval_jet(chart.components()[k], u);
    const auto kk = static_cast<Eigen::Index>(k);
    f.point(kk) = jet.value;
    for (std::size_t i = 0; i < n; ++i) {
      f.tangents[i](kk) = jet.gradient(static_cast<Eigen::Index>(i));
      for (std::size_t j = i; j < n; ++j) {
        f.second_partials[i * n - i * (i - 1) / 2 + (j - i)](kk) =
            jet.hessian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }

  Vector cross = generalized_cross(f.tangents);
  double scale = 1.0;
  for (const Vector& t : f.tangents) scale *= t.norm();
  const double len = cross.norm();
  if (!(len >= 1e-12 * scale) || len == 0.0) {
    throw DegenerateChartError("chart tangents are linearly dependent at this point");
  }
  f.normal = cross / len;
  if (chart.orientation_flip()) f.normal = -f.normal;

  f.g = Matrix(ni, ni);
  f.h = Matrix(ni, ni);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      f.g(a, b) = f.g(b, a) = f.tangents[i].dot(f.tangents[j]);
      f.h(a, b) = f.h(b, a) = f.normal.dot(f.second_partial(i, j));
    }
  }
  return f;
}

inline FrameData evaluate_frame(const Chart& chart, const std::vector<double>& u) {
  return evaluate_frame(chart, std::span<const double>(u));
}

}  // namespace hypercurv
