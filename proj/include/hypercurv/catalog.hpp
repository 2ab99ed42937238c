#pragma once

// Built-in hypersurfaces. Every chart is written in the expression language
// and goes through the same jet pipeline as user charts; entries with a known
// closed form also provide reference principal curvatures.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hypercurv/chart.hpp"
#include "hypercurv/error.hpp"
#include "hypercurv/exprlang.hpp"
#include "hypercurv/linalg.hpp"

namespace hypercurv {

struct ParamSpec {
  std::string name;
  std::string kind;  // "real", "integer", "matrix", "expression", "domain", "names"
  std::string default_value;  // empty when required
  std::string description;
};

struct Reference {
  std::vector<double> lambdas;  // ascending, for the entry's orientation
  double mean_curvature = 0.0;
  double gauss_kronecker = 0.0;
};

struct CatalogEntry {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::function<Chart(const nlohmann::json&)> make;
  // empty when the entry has no closed form
  std::function<Reference(const nlohmann::json&, std::span<const double>)> reference;
};

namespace catalog_detail {

inline std::string num(double v) {
  const std::string s = format_real(v);
  return v < 0 ? "(" + s + ")" : s;
}

inline void check_keys(const nlohmann::json& params, std::initializer_list<const char*> allowed,
                       const std::string& entry) {
  if (params.is_null()) return;
  if (!params.is_object()) throw CatalogError(entry + ": params must be an object");
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw CatalogError(entry + ": unknown parameter '" + it.key() + "'");
    }
  }
}

inline double real_param(const nlohmann::json& params, const char* key, double fallback) {
  if (params.is_null() || !params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number()) throw CatalogError(std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

inline int int_param(const nlohmann::json& params, const char* key, int fallback) {
  if (params.is_null() || !params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number_integer()) throw CatalogError(std::string("parameter '") + key + "' must be an integer");
  return v.get<int>();
}

inline std::vector<std::string> parameter_names(std::size_t n) {
  if (n == 2) return {"u", "v"};
  if (n == 3) return {"u", "v", "w"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("u" + std::to_string(i + 1));
  return out;
}

inline std::vector<std::string> graph_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("x" + std::to_string(i + 1));
  return out;
}

/// Sets the orientation so that N points toward `inward(σ(u))` at the domain center.
inline Chart orient(Chart chart, const std::function<Vector(const Vector&, std::span<const double>)>& inward) {
  const std::vector<double> c = chart.center();
  const FrameData f = evaluate_frame(chart.with_orientation_flip(false), c);
  return chart.with_orientation_flip(f.normal.dot(inward(f.point, c)) < 0.0);
}

inline std::vector<Interval> box_param(const nlohmann::json& params, std::size_t n, double lo, double hi) {
  if (params.is_null() || !params.contains("domain")) return std::vector<Interval>(n, Interval{lo, hi});
  const auto& d = params.at("domain");
  if (!d.is_array() || d.size() != n) throw CatalogError("domain must list one [lo, hi] pair per variable");
  std::vector<Interval> out;
  for (const auto& iv : d) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
      throw CatalogError("domain entries must be [lo, hi] pairs");
    }
    out.push_back({iv[0].get<double>(), iv[1].get<double>()});
    if (!(out.back().hi > out.back().lo)) throw CatalogError("domain intervals must have lo < hi");
  }
  return out;
}

inline Matrix matrix_param(const nlohmann::json& params, const char* key) {
  if (params.is_null() || !params.contains(key)) throw CatalogError(std::string("missing parameter '") + key + "'");
  const auto& a = params.at(key);
  if (!a.is_array() || a.empty()) throw CatalogError("matrix parameter must be a non-empty array of rows");
  const std::size_t n = a.size();
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!a[i].is_array() || a[i].size() != n) throw CatalogError("matrix parameter must be square");
    for (std::size_t j = 0; j < n; ++j) {
      if (!a[i][j].is_number()) throw CatalogError("matrix entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j].get<double>();
    }
  }
  if (!(m - m.transpose()).isZero(0.0)) throw CatalogError("matrix parameter must be symmetric");
  return m;
}

constexpr double kPi = std::numbers::pi;
constexpr double kPolarMargin = 0.2;

// -- sphere ---------------------------------------------------------------

inline Chart make_sphere(const nlohmann::json& p) {
  check_keys(p, {"r", "n"}, "sphere");
  const double r = real_param(p, "r", 1.0);
  const int n = int_param(p, "n", 2);
  if (!(r > 0)) throw CatalogError("sphere: radius must be positive");
  if (n < 2) throw CatalogError("sphere: dimension must be at least 2");
  const auto names = parameter_names(static_cast<std::size_t>(n));
  // nested angular chart: (cos u, sin u) then repeatedly (x·cos θ, sin θ)
  std::vector<std::string> comps{"cos(" + names[0] + ")", "sin(" + names[0] + ")"};
  for (int k = 1; k < n; ++k) {
    for (auto& c : comps) c += "*cos(" + names[static_cast<std::size_t>(k)] + ")";
    comps.push_back("sin(" + names[static_cast<std::size_t>(k)] + ")");
  }
  for (auto& c : comps) c = num(r) + "*" + c;
  std::vector<Interval> domain{{-3.0, 3.0}};
  for (int k = 1; k < n; ++k) domain.push_back({-kPi / 2 + kPolarMargin, kPi / 2 - kPolarMargin});
  Chart chart = Chart::from_strings(names, comps, domain);
  return orient(std::move(chart), [](const Vector& x, std::span<const double>) { return Vector(-x); });
}

inline Reference sphere_reference(const nlohmann::json& p, std::span<const double>) {
  const double r = real_param(p, "r", 1.0);
  const int n = int_param(p, "n", 2);
  Reference ref;
  ref.lambdas.assign(static_cast<std::size_t>(n), 1.0 / r);
  ref.mean_curvature = 1.0 / r;
  ref.gauss_kronecker = std::pow(1.0 / r, n);
  return ref;
}

// -- cylinder -------------------------------------------------------------

inline Chart make_cylinder(const nlohmann::json& p) {
  check_keys(p, {"r"}, "cylinder");
  const double r = real_param(p, "r", 1.0);
  if (!(r > 0)) throw CatalogError("cylinder: radius must be positive");
  Chart chart = Chart::from_strings({"u", "v"}, {num(r) + "*cos(u)", num(r) + "*sin(u)", "v"},
                                    {{-3.0, 3.0}, {-1.0, 1.0}});
  return orient(std::move(chart), [](const Vector& x, std::span<const double>) {
    Vector in(3);
    in << -x(0), -x(1), 0.0;
    return in;
  });
}

inline Reference cylinder_reference(const nlohmann::json& p, std::span<const double>) {
  const double r = real_param(p, "r", 1.0);
  return {{0.0, 1.0 / r}, 0.5 / r, 0.0};
}

// -- catenoid -------------------------------------------------------------

inline Chart make_catenoid(const nlohmann::json& p) {
  check_keys(p, {}, "catenoid");
  return Chart::from_strings({"u", "v"}, {"cosh(v)*cos(u)", "cosh(v)*sin(u)", "v"}, {{-3.0, 3.0}, {-1.0, 1.0}});
}

inline Reference catenoid_reference(const nlohmann::json&, std::span<const double> u) {
  const double ch = std::cosh(u[1]);
  const double k = 1.0 / (ch * ch);
  return {{-k, k}, 0.0, -k * k};
}

// -- torus ----------------------------------------------------------------

inline Chart make_torus(const nlohmann::json& p) {
  check_keys(p, {"R", "r"}, "torus");
  const double big = real_param(p, "R", 2.0);
  const double r = real_param(p, "r", 1.0);
  if (!(r > 0)) throw CatalogError("torus: tube radius must be positive");
  if (!(big > r)) throw CatalogError("torus: R must exceed r");
  const std::string ring = "(" + num(big) + "+" + num(r) + "*cos(v))";
  Chart chart = Chart::from_strings({"u", "v"}, {ring + "*cos(u)", ring + "*sin(u)", num(r) + "*sin(v)"},
                                    {{-3.0, 3.0}, {-3.0, 3.0}});
  // inward means toward the core circle of the tube
  return orient(std::move(chart), [big](const Vector& x, std::span<const double> u) {
    Vector core(3);
    core << big * std::cos(u[0]), big * std::sin(u[0]), 0.0;
    return Vector(core - x);
  });
}

inline Reference torus_reference(const nlohmann::json& p, std::span<const double> u) {
  const double big = real_param(p, "R", 2.0);
  const double r = real_param(p, "r", 1.0);
  const double k1 = std::cos(u[1]) / (big + r * std::cos(u[1]));
  const double k2 = 1.0 / r;
  Reference ref{{std::min(k1, k2), std::max(k1, k2)}, 0.5 * (k1 + k2), k1 * k2};
  return ref;
}

// -- ellipsoid ------------------------------------------------------------

inline Chart make_ellipsoid(const nlohmann::json& p) {
  check_keys(p, {"a", "b", "c"}, "ellipsoid");
  const double a = real_param(p, "a", 1.0);
  const double b = real_param(p, "b", 1.0);
  const double c = real_param(p, "c", 1.0);
  if (!(a > 0 && b > 0 && c > 0)) throw CatalogError("ellipsoid: semi-axes must be positive");
  Chart chart = Chart::from_strings(
      {"u", "v"}, {num(a) + "*cos(v)*cos(u)", num(b) + "*cos(v)*sin(u)", num(c) + "*sin(v)"},
      {{-3.0, 3.0}, {-kPi / 2 + kPolarMargin, kPi / 2 - kPolarMargin}});
  return orient(std::move(chart), [](const Vector& x, std::span<const double>) { return Vector(-x); });
}

/// Closed form only at the vertex (a, 0, 0), i.e. u = v = 0.
inline Reference ellipsoid_reference(const nlohmann::json& p, std::span<const double> u) {
  if (std::abs(u[0]) > 1e-15 || std::abs(u[1]) > 1e-15) {
    throw NoReferenceError("ellipsoid: reference values exist only at the vertex u = v = 0");
  }
  const double a = real_param(p, "a", 1.0);
  const double b = real_param(p, "b", 1.0);
  const double c = real_param(p, "c", 1.0);
  const double k1 = a / (b * b);
  const double k2 = a / (c * c);
  return {{std::min(k1, k2), std::max(k1, k2)}, 0.5 * (k1 + k2), k1 * k2};
}

// -- graphs ---------------------------------------------------------------

inline Chart graph_chart(const std::string& f, std::size_t n, std::vector<Interval> domain) {
  auto names = graph_names(n);
  std::vector<std::string> comps(names.begin(), names.end());
  comps.push_back(f);
  // the cofactor normal of a graph already has a positive last coordinate
  return Chart::from_strings(std::move(names), comps, std::move(domain));
}

inline Chart make_graph_quadric(const nlohmann::json& p) {
  check_keys(p, {"A", "domain"}, "graph_quadric");
  const Matrix a = matrix_param(p, "A");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n < 2) throw CatalogError("graph_quadric: A must be at least 2x2");
  const auto names = graph_names(n);
  std::string terms;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v == 0.0) continue;
      if (!terms.empty()) terms += "+";
      terms += num(v) + "*" + names[i] + "*" + names[j];
    }
  }
  if (terms.empty()) terms = "0";
  return graph_chart("0.5*(" + terms + ")", n, box_param(p, n, -1.0, 1.0));
}

/// Closed form only at the origin, where g = I and h = A.
inline Reference graph_quadric_reference(const nlohmann::json& p, std::span<const double> u) {
  for (double x : u) {
    if (x != 0.0) throw NoReferenceError("graph_quadric: reference values exist only at the origin");
  }
  const Matrix a = matrix_param(p, "A");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Reference ref;
  ref.lambdas.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  ref.mean_curvature = es.eigenvalues().mean();
  ref.gauss_kronecker = es.eigenvalues().prod();
  return ref;
}

inline Chart make_graph_expr(const nlohmann::json& p) {
  check_keys(p, {"f", "n", "domain"}, "graph_expr");
  if (p.is_null() || !p.contains("f") || !p.at("f").is_string()) {
    throw CatalogError("graph_expr: parameter 'f' (expression string) is required");
  }
  const int n = int_param(p, "n", 2);
  if (n < 2) throw CatalogError("graph_expr: dimension must be at least 2");
  const auto nn = static_cast<std::size_t>(n);
  return graph_chart(p.at("f").get<std::string>(), nn, box_param(p, nn, -1.0, 1.0));
}

}  // namespace catalog_detail

inline const std::vector<CatalogEntry>& catalog() {
  using namespace catalog_detail;
  static const std::vector<CatalogEntry> entries{
      {"sphere",
       "round n-sphere of radius r, nested angular chart, inward normal",
       {{"r", "real", "1", "radius"}, {"n", "integer", "2", "intrinsic dimension"}},
       make_sphere,
       sphere_reference},
      {"cylinder",
       "circular cylinder of radius r in R^3, inward normal",
       {{"r", "real", "1", "radius"}},
       make_cylinder,
       cylinder_reference},
      {"catenoid", "(cosh v cos u, cosh v sin u, v)", {}, make_catenoid, catenoid_reference},
      {"torus",
       "torus of revolution, tube radius r around a circle of radius R, normal toward the core",
       {{"R", "real", "2", "core radius"}, {"r", "real", "1", "tube radius"}},
       make_torus,
       torus_reference},
      {"graph_quadric",
       "graph of 1/2 x^T A x, upward normal",
       {{"A", "matrix", "", "symmetric n x n matrix"},
        {"domain", "domain", "[-1,1]^n", "parameter box"}},
       make_graph_quadric,
       graph_quadric_reference},
      {"graph_expr",
       "graph of f(x1..xn), upward normal",
       {{"f", "expression", "", "height function in x1..xn"},
        {"n", "integer", "2", "intrinsic dimension"},
        {"domain", "domain", "[-1,1]^n", "parameter box"}},
       make_graph_expr,
       {}},
      {"ellipsoid",
       "ellipsoid with semi-axes a, b, c, inward normal",
       {{"a", "real", "1", "x semi-axis"}, {"b", "real", "1", "y semi-axis"}, {"c", "real", "1", "z semi-axis"}},
       make_ellipsoid,
       ellipsoid_reference},
  };
  return entries;
}

inline const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw CatalogError("unknown catalog entry '" + name + "'");
}

inline Chart make_chart(const std::string& name, const nlohmann::json& params = nlohmann::json::object()) {
  return catalog_entry(name).make(params);
}

inline Reference reference_invariants(const std::string& name, const nlohmann::json& params,
                                      std::span<const double> u) {
  const CatalogEntry& e = catalog_entry(name);
  if (!e.reference) throw NoReferenceError(name + " has no closed-form reference");
  return e.reference(params, u);
}

}  // namespace hypercurv
