#pragma once

// Inequality audits. Every check compares a left side against a right side
// and records the slack rhs − lhs. A check whose hypotheses are not met at
// a point is reported as not applicable rather than failed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hypercurv/chart.hpp"
#include "hypercurv/chen.hpp"
#include "hypercurv/error.hpp"
#include "hypercurv/spectrum.hpp"

namespace hypercurv {

namespace check_id {
inline constexpr std::string_view chen1993 = "chen1993";
inline constexpr std::string_view fundamental = "fundamental";
inline constexpr std::string_view obstruction = "obstruction";
inline constexpr std::string_view convexity_gate = "convexity_gate";
inline constexpr std::string_view imo_bound = "imo_bound";
inline constexpr std::string_view spread_upper = "spread_upper";
inline constexpr std::string_view steaua = "steaua";
inline constexpr std::string_view ratio_interval = "ratio_interval";
inline constexpr std::string_view rho = "rho";
inline constexpr std::string_view nesbitt = "nesbitt";
inline constexpr std::string_view ricci_minimal = "ricci_minimal";
}  // namespace check_id

inline const std::vector<std::string>& all_check_ids() {
  static const std::vector<std::string> ids{
      std::string(check_id::chen1993),       std::string(check_id::fundamental),
      std::string(check_id::obstruction),    std::string(check_id::convexity_gate),
      std::string(check_id::imo_bound),      std::string(check_id::spread_upper),
      std::string(check_id::steaua),         std::string(check_id::ratio_interval),
      std::string(check_id::rho),            std::string(check_id::nesbitt),
      std::string(check_id::ricci_minimal)};
  return ids;
}

inline bool is_known_check(std::string_view id) {
  const auto& ids = all_check_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

struct Tolerances {
  double tol = 1e-9;             // inequality
  double tol_eq = 1e-9;          // equality flag
  double tol_constraint = 1e-8;  // |3H − 1| for the IMO bound
  double tol_pos = 1e-10;        // strict convexity / non-vanishing curvature
  double tol_minimal = 1e-12;    // |H| below which a point counts as minimal
  double tol_convex = 1e-10;     // min λ allowed by the convexity conclusion
};

/// One audited inequality lhs ≤ rhs.
struct CheckResult {
  std::string name;   // stable identifier, see check_id
  std::string label;  // variant within the check ("upper", "(2,2)", ...), may be empty
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs − lhs
  bool applicable = true;
  bool holds = false;     // slack ≥ −tol
  bool equality = false;  // |slack| ≤ tol_eq
  bool strict = false;    // the inequality is strict: equality is a violation
  double tol = 0.0;
  std::string context;
  std::string note;

  bool violated() const { return applicable && (!holds || (strict && equality)); }
  std::string qualified_name() const { return label.empty() ? name : name + "." + label; }
};

inline CheckResult make_check(std::string_view name, std::string label, double lhs, double rhs,
                              double tol, double tol_eq, bool strict = false) {
  CheckResult r;
  r.name = std::string(name);
  r.label = std::move(label);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tol = tol;
  r.strict = strict;
  r.holds = r.slack >= -tol;
  r.equality = r.holds && std::abs(r.slack) <= tol_eq;
  return r;
}

inline CheckResult not_applicable(std::string_view name, std::string label, std::string why) {
  CheckResult r;
  r.name = std::string(name);
  r.label = std::move(label);
  r.applicable = false;
  r.note = std::move(why);
  return r;
}

namespace detail {
inline double scal(const ShapeSpectrum& s) {
  double v = 0.0;
  for (std::size_t i = 0; i < s.dimension(); ++i)
    for (std::size_t j = i + 1; j < s.dimension(); ++j) v += s.principal_sec(i, j);
  return v;
}
}  // namespace detail

/// scal − inf sec ≤ n²(n−2)/(2(n−1))·H² + (n+1)(n−2)/2·c.
inline CheckResult check_chen_1993(const ShapeSpectrum& s, const Tolerances& t = {}) {
  const double n = static_cast<double>(s.dimension());
  if (s.dimension() < 3) throw DimensionError("Chen's 1993 inequality needs n >= 3");
  const double h = s.mean();
  const double lhs = detail::scal(s) - inf_sec_fast(s);
  const double rhs = n * n * (n - 2.0) / (2.0 * (n - 1.0)) * h * h +
                     (n + 1.0) * (n - 2.0) / 2.0 * s.ambient_curvature();
  return make_check(check_id::chen1993, "", lhs, rhs, t.tol, t.tol_eq);
}

/// δ(t) ≤ c(t)·H² + b(t)·max_amb_sec.
inline CheckResult check_fundamental(const ShapeSpectrum& s, const ChenTuple& tuple, double max_amb_sec,
                                     const Tolerances& t = {}, const OracleOptions* validate = nullptr) {
  const DeltaResult d = delta_invariant(s, tuple, validate);
  const double h = s.mean();
  const double rhs = coefficient_c(tuple) * h * h + coefficient_b(tuple) * max_amb_sec;
  return make_check(check_id::fundamental, to_string(tuple), d.value, rhs, t.tol, t.tol_eq);
}

struct TupleDelta {
  ChenTuple tuple;
  double delta;
  double threshold;  // b(t)·ε
};

struct ObstructionVerdict {
  bool obstructed = false;
  std::optional<ChenTuple> witness;
  double margin = 0.0;  // max over tuples of δ(t) − b(t)·ε
  std::vector<TupleDelta> deltas;
};

/// Obstruction to minimal immersion into a space form of curvature ε:
/// some δ(t) exceeds b(t)·ε.
inline ObstructionVerdict check_minimality_obstruction(std::span<const std::pair<ChenTuple, double>> deltas,
                                                       double eps, double tol = 1e-9) {
  ObstructionVerdict v;
  v.margin = -std::numeric_limits<double>::infinity();
  for (const auto& [tuple, delta] : deltas) {
    const double threshold = coefficient_b(tuple) * eps;
    v.deltas.push_back({tuple, delta, threshold});
    const double m = delta - threshold;
    if (m > v.margin) v.margin = m;
    if (m > tol && !v.obstructed) {
      v.obstructed = true;
      v.witness = tuple;
    }
  }
  return v;
}

inline ObstructionVerdict check_minimality_obstruction(const ShapeSpectrum& s, double eps, double tol = 1e-9,
                                                       const OracleOptions* validate = nullptr) {
  std::vector<std::pair<ChenTuple, double>> deltas;
  for (const ChenTuple& t : enumerate_S(static_cast<int>(s.dimension()))) {
    deltas.emplace_back(t, delta_invariant(s, t, validate).value);
  }
  return check_minimality_obstruction(std::span<const std::pair<ChenTuple, double>>(deltas), eps, tol);
}

/// The convexity gate √((n−1)·C_{n−1}) ≤ nH over all (n−1)-subsets at one point.
struct GatePoint {
  double max_lhs = 0.0;  // largest √((n−1)·Σ_{i∈S} λᵢ²)
  double rhs = 0.0;      // nH
  bool gate_holds = false;
  CheckResult conclusion;  // applicable iff the gate holds: min λ ≥ −tol_convex
};

inline GatePoint convexity_gate_at(const ShapeSpectrum& s, const Tolerances& t = {}) {
  const std::size_t n = s.dimension();
  if (n < 3) throw DimensionError("the convexity gate is stated for n >= 3");
  GatePoint p;
  p.rhs = s.sum();
  bool all = true;
  p.max_lhs = -std::numeric_limits<double>::infinity();
  for (std::size_t drop = 0; drop < n; ++drop) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != drop) c += s.lambda(i) * s.lambda(i);
    const double lhs = std::sqrt(static_cast<double>(n - 1) * c);
    p.max_lhs = std::max(p.max_lhs, lhs);
    if (!(lhs <= p.rhs)) all = false;
  }
  p.gate_holds = all;
  if (all) {
    p.conclusion = make_check(check_id::convexity_gate, "conclusion", 0.0, s.lambda(0), t.tol_convex, t.tol_eq);
  } else {
    p.conclusion = not_applicable(check_id::convexity_gate, "conclusion", "gate inequality fails");
  }
  return p;
}

struct GateReport {
  std::vector<GatePoint> points;
  bool convex = false;  // the gate holds at every sampled point
};

inline GateReport check_convexity_gate(std::span<const ShapeSpectrum> spectra, const Tolerances& t = {}) {
  GateReport r;
  r.convex = !spectra.empty();
  for (const ShapeSpectrum& s : spectra) {
    r.points.push_back(convexity_gate_at(s, t));
    if (!r.points.back().gate_holds) r.convex = false;
  }
  return r;
}

/// 0 ≤ scal − 2K ≤ 7/27 on strictly convex 3-dimensional hypersurfaces in R⁴ with H = 1/3.
inline std::pair<CheckResult, CheckResult> check_imo(const ShapeSpectrum& s, const Tolerances& t = {}) {
  auto na = [&](const std::string& why) {
    return std::pair{not_applicable(check_id::imo_bound, "lower", why),
                     not_applicable(check_id::imo_bound, "upper", why)};
  };
  if (s.dimension() != 3) return na("needs n = 3");
  if (s.ambient_curvature() != 0.0) return na("needs a Euclidean ambient space");
  if (!(s.lambda(0) > t.tol_pos)) return na("not strictly convex");
  if (!(std::abs(3.0 * s.mean() - 1.0) <= t.tol_constraint)) return na("mean curvature is not 1/3");
  const double k = s.lambda(0) * s.lambda(1) * s.lambda(2);
  const double value = detail::scal(s) - 2.0 * k;
  return {make_check(check_id::imo_bound, "lower", 0.0, value, t.tol, t.tol_eq),
          make_check(check_id::imo_bound, "upper", value, 7.0 / 27.0, t.tol, t.tol_eq)};
}

/// s² ≤ 2‖h‖² − 2nH², together with the equivalent H² ≤ (2‖h‖² − s²)/(2n).
inline std::pair<CheckResult, CheckResult> check_spread_upper(const ShapeSpectrum& s, const Tolerances& t = {}) {
  const double n = static_cast<double>(s.dimension());
  const double spread = s.spread();
  const double s2 = spread * spread;
  const double rhs = 2.0 * s.umbilic_defect();
  const double h = s.mean();
  return {make_check(check_id::spread_upper, "", s2, rhs, t.tol, t.tol_eq),
          make_check(check_id::spread_upper, "mean_form", h * h,
                     (2.0 * s.sum_of_squares() - s2) / (2.0 * n), t.tol, t.tol_eq)};
}

/// scal − inf sec ≤ n(n−2)/(4(n−1))·(2‖h‖² − s²) + (n+1)(n−2)/2·c.
inline CheckResult check_steaua(const ShapeSpectrum& s, const Tolerances& t = {}) {
  if (s.dimension() < 3) throw DimensionError("this inequality is stated for n >= 3");
  const double n = static_cast<double>(s.dimension());
  const double spread = s.spread();
  const double lhs = detail::scal(s) - inf_sec_fast(s);
  const double rhs = n * (n - 2.0) / (4.0 * (n - 1.0)) * (2.0 * s.sum_of_squares() - spread * spread) +
                     (n + 1.0) * (n - 2.0) / 2.0 * s.ambient_curvature();
  return make_check(check_id::steaua, "", lhs, rhs, t.tol, t.tol_eq);
}

/// 2/√n ≤ s/√(‖h‖² − nH²) ≤ √2 away from umbilics.
inline std::pair<CheckResult, CheckResult> check_ratio_interval(const ShapeSpectrum& s,
                                                                const Tolerances& t = {}) {
  if (is_umbilic(s)) {
    return {not_applicable(check_id::ratio_interval, "lower", "umbilic point"),
            not_applicable(check_id::ratio_interval, "upper", "umbilic point")};
  }
  const double ratio = spread_ratio(s);
  const double lo = 2.0 / std::sqrt(static_cast<double>(s.dimension()));
  return {make_check(check_id::ratio_interval, "lower", lo, ratio, t.tol, t.tol_eq),
          make_check(check_id::ratio_interval, "upper", ratio, std::sqrt(2.0), t.tol, t.tol_eq)};
}

/// ρ ≤ (2‖h‖² − s²)/(2n) + c with ρ = 2·scal/(n(n−1)); equality exactly at umbilics.
inline CheckResult check_rho(const ShapeSpectrum& s, const Tolerances& t = {}) {
  const double n = static_cast<double>(s.dimension());
  const double spread = s.spread();
  const double lhs = 2.0 * detail::scal(s) / (n * (n - 1.0));
  const double rhs = (2.0 * s.sum_of_squares() - spread * spread) / (2.0 * n) + s.ambient_curvature();
  return make_check(check_id::rho, "", lhs, rhs, t.tol, t.tol_eq);
}

/// B₁¹ ≥ 3 and B₀.₅^0.5 > 2√2 for n = 3 with no vanishing principal curvature.
inline std::pair<CheckResult, CheckResult> check_nesbitt(const ShapeSpectrum& s, const Tolerances& t = {}) {
  if (s.dimension() != 3) {
    return {not_applicable(check_id::nesbitt, "B1", "needs n = 3"),
            not_applicable(check_id::nesbitt, "B05", "needs n = 3")};
  }
  for (double l : s.lambdas()) {
    if (!(std::abs(l) > t.tol_pos)) {
      return {not_applicable(check_id::nesbitt, "B1", "vanishing principal curvature"),
              not_applicable(check_id::nesbitt, "B05", "vanishing principal curvature")};
    }
  }
  const NesbittInvariants b = nesbitt_invariants(s);
  return {make_check(check_id::nesbitt, "B1", 3.0, b.b1, t.tol, t.tol_eq),
          make_check(check_id::nesbitt, "B05", 2.0 * std::sqrt(2.0), b.b05, t.tol, t.tol_eq, true)};
}

/// Minimal hypersurfaces in Euclidean space have Ric ≤ 0.
inline CheckResult check_ricci_minimal(const ShapeSpectrum& s, const Tolerances& t = {}) {
  if (s.ambient_curvature() != 0.0) {
    return not_applicable(check_id::ricci_minimal, "", "needs a Euclidean ambient space");
  }
  if (!(std::abs(s.mean()) <= t.tol_minimal)) {
    return not_applicable(check_id::ricci_minimal, "", "not a minimal point");
  }
  const auto ric = ricci_diagonal(s);
  return make_check(check_id::ricci_minimal, "", *std::max_element(ric.begin(), ric.end()), 0.0, t.tol,
                    t.tol_eq);
}

// ---------------------------------------------------------------------------
// Whole-spectrum audit

struct AuditOptions {
  std::set<std::string> checks;  // empty means every check
  Tolerances tol;
  std::optional<double> max_amb_sec;  // defaults to the spectrum's c
  double obstruction_eps = 0.0;
  const OracleOptions* oracle = nullptr;

  bool wants(std::string_view id) const { return checks.empty() || checks.count(std::string(id)) > 0; }
};

struct SpectrumAudit {
  std::vector<CheckResult> checks;
  std::optional<GatePoint> gate;
  std::optional<ObstructionVerdict> obstruction;
  std::vector<std::pair<ChenTuple, DeltaResult>> deltas;
};

/// Runs every requested check that makes sense at this spectrum.
inline SpectrumAudit audit_spectrum(const ShapeSpectrum& s, const AuditOptions& opt = {}) {
  SpectrumAudit a;
  const std::size_t n = s.dimension();
  const Tolerances& t = opt.tol;
  auto push_pair = [&](std::pair<CheckResult, CheckResult> p) {
    a.checks.push_back(std::move(p.first));
    a.checks.push_back(std::move(p.second));
  };

  if (opt.wants(check_id::chen1993)) {
    a.checks.push_back(n >= 3 ? check_chen_1993(s, t) : not_applicable(check_id::chen1993, "", "needs n >= 3"));
  }

  const bool need_deltas = opt.wants(check_id::fundamental) || opt.wants(check_id::obstruction);
  if (need_deltas) {
    for (const ChenTuple& tuple : enumerate_S(static_cast<int>(n))) {
      a.deltas.emplace_back(tuple, delta_invariant(s, tuple, opt.oracle));
    }
  }
  if (opt.wants(check_id::fundamental)) {
    const double amb = opt.max_amb_sec.value_or(s.ambient_curvature());
    const double h = s.mean();
    for (const auto& [tuple, d] : a.deltas) {
      const double rhs = coefficient_c(tuple) * h * h + coefficient_b(tuple) * amb;
      a.checks.push_back(make_check(check_id::fundamental, to_string(tuple), d.value, rhs, t.tol, t.tol_eq));
    }
  }
  if (opt.wants(check_id::obstruction)) {
    std::vector<std::pair<ChenTuple, double>> values;
    for (const auto& [tuple, d] : a.deltas) values.emplace_back(tuple, d.value);
    a.obstruction = check_minimality_obstruction(std::span<const std::pair<ChenTuple, double>>(values),
                                                 opt.obstruction_eps, t.tol);
  }
  if (opt.wants(check_id::convexity_gate)) {
    if (n >= 3) {
      a.gate = convexity_gate_at(s, t);
      a.checks.push_back(a.gate->conclusion);
    } else {
      a.checks.push_back(not_applicable(check_id::convexity_gate, "conclusion", "needs n >= 3"));
    }
  }
  if (opt.wants(check_id::imo_bound)) push_pair(check_imo(s, t));
  if (opt.wants(check_id::spread_upper)) push_pair(check_spread_upper(s, t));
  if (opt.wants(check_id::steaua)) {
    a.checks.push_back(n >= 3 ? check_steaua(s, t) : not_applicable(check_id::steaua, "", "needs n >= 3"));
  }
  if (opt.wants(check_id::ratio_interval)) push_pair(check_ratio_interval(s, t));
  if (opt.wants(check_id::rho)) a.checks.push_back(check_rho(s, t));
  if (opt.wants(check_id::nesbitt)) push_pair(check_nesbitt(s, t));
  if (opt.wants(check_id::ricci_minimal)) a.checks.push_back(check_ricci_minimal(s, t));
  return a;
}

// ---------------------------------------------------------------------------
// Spread ratio along a path approaching an umbilic

struct LimitOptions {
  double t0 = 0.1;
  double ratio = 0.5;
  int steps = 12;
  double tol = 1e-9;
};

struct LimitEstimate {
  std::vector<double> ts;
  std::vector<double> ratios;
  double extrapolant = 0.0;
  bool converging = true;  // false: successive differences stopped shrinking
  double lower = 0.0;      // 2/√n
  double upper = 0.0;      // √2
  double base_defect = 0.0;  // ‖h‖² − nH² at the path origin, when it could be evaluated
  std::vector<CheckResult> checks;  // one per term plus the extrapolant

  bool all_in_interval() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.holds; });
  }
};

/// Spread ratio at u₀ + t_k·direction, t_k = t₀·rᵏ, with a Richardson
/// extrapolation of the last two terms toward t = 0.
inline LimitEstimate umbilic_limit_estimate(const Chart& chart, std::span<const double> origin,
                                            std::span<const double> direction, const LimitOptions& opt = {}) {
  const std::size_t n = chart.dimension();
  if (origin.size() != n || direction.size() != n) throw InvalidArgumentError("path has the wrong dimension");
  if (opt.steps < 2) throw InvalidArgumentError("need at least two path steps");
  LimitEstimate e;
  e.lower = 2.0 / std::sqrt(static_cast<double>(n));
  e.upper = std::sqrt(2.0);
  if (chart.strictly_inside(origin)) {
    const FrameData f0 = evaluate_frame(chart, origin);
    e.base_defect = principal_curvatures(f0.g, f0.h).umbilic_defect();
  }
  std::vector<double> u(n);
  double t = opt.t0;
  for (int k = 0; k < opt.steps; ++k, t *= opt.ratio) {
    for (std::size_t i = 0; i < n; ++i) u[i] = origin[i] + t * direction[i];
    const FrameData f = evaluate_frame(chart, u);
    const ShapeSpectrum s = principal_curvatures(f.g, f.h);
    if (is_umbilic(s)) {
      throw UmbilicPointError("path point at t = " + std::to_string(t) + " is an umbilic");
    }
    e.ts.push_back(t);
    e.ratios.push_back(spread_ratio(s));
  }
  const std::size_t m = e.ratios.size();
  // r(t) ≈ L + a·t  ⇒  L ≈ (r(ρt) − ρ·r(t)) / (1 − ρ)
  e.extrapolant = (e.ratios[m - 1] - opt.ratio * e.ratios[m - 2]) / (1.0 - opt.ratio);
  if (m >= 3) {
    const double d1 = std::abs(e.ratios[m - 1] - e.ratios[m - 2]);
    const double d0 = std::abs(e.ratios[m - 2] - e.ratios[m - 3]);
    e.converging = d1 <= d0 || d1 <= 1e-12;
  }
  auto in_interval = [&](double value, const std::string& where) {
    CheckResult lo = make_check(check_id::ratio_interval, "lower", e.lower, value, opt.tol, opt.tol);
    CheckResult hi = make_check(check_id::ratio_interval, "upper", value, e.upper, opt.tol, opt.tol);
    lo.context = hi.context = where;
    e.checks.push_back(lo);
    e.checks.push_back(hi);
  };
  for (std::size_t k = 0; k < m; ++k) in_interval(e.ratios[k], "t=" + format_real(e.ts[k]));
  in_interval(e.extrapolant, "extrapolant");
  return e;
}

}  // namespace hypercurv
