#pragma once

// Scene files, grid scans and report emission.
//
// A scene is a JSON object. Chart mode evaluates a chart on a strict-interior
// grid; spectrum mode audits explicitly listed principal curvatures. The
// report lists one record per point in grid order followed by a summary that
// is recomputed from those records.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hypercurv/catalog.hpp"
#include "hypercurv/chart.hpp"
#include "hypercurv/chen.hpp"
#include "hypercurv/error.hpp"
#include "hypercurv/spectrum.hpp"
#include "hypercurv/verifiers.hpp"

namespace hypercurv {

inline constexpr const char* kToolName = "hypercurv";
inline constexpr const char* kToolVersion = "1.0.0";

enum class SceneMode { chart, spectrum };
enum class OutputFormat { json, csv };

struct SpectrumInput {
  std::vector<double> lambdas;
  double c = 0.0;
};

struct ChartSource {
  std::string catalog;         // empty for raw expressions
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> expressions;
  std::vector<std::string> variables;
  std::vector<Interval> domain;
  bool orientation_flip = false;
};

struct Scene {
  SceneMode mode = SceneMode::chart;
  ChartSource chart;
  std::vector<int> grid;
  std::vector<SpectrumInput> spectra;
  double ambient_c = 0.0;
  std::optional<double> max_amb_sec;
  std::optional<std::vector<std::string>> checks;  // absent: every check; empty: invariants only
  Tolerances tol;
  std::uint64_t seed = 0;
  bool oracle_validation = false;
  int oracle_restarts = OracleOptions{}.restarts;
  int oracle_refine_steps = OracleOptions{}.refine_steps;
  double obstruction_epsilon = 0.0;
  OutputFormat format = OutputFormat::json;
  std::string output_path;  // empty: stdout
};

// ---------------------------------------------------------------------------
// Loading

namespace scene_detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw SceneError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

inline double get_real(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number()) throw SceneError("field '" + field + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SceneError("field '" + field + "' must be finite");
  return d;
}

inline bool get_bool(const nlohmann::json& v, const std::string& field) {
  if (!v.is_boolean()) throw SceneError("field '" + field + "' must be a boolean");
  return v.get<bool>();
}

inline std::vector<double> get_reals(const nlohmann::json& v, const std::string& field) {
  if (!v.is_array()) throw SceneError("field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_real(x, field));
  return out;
}

inline std::vector<Interval> get_domain(const nlohmann::json& v, const std::string& field) {
  if (!v.is_array()) throw SceneError("field '" + field + "' must be an array of [lo, hi] pairs");
  std::vector<Interval> out;
  for (const auto& iv : v) {
    const auto pair = get_reals(iv, field);
    if (pair.size() != 2 || !(pair[1] > pair[0])) {
      throw SceneError("field '" + field + "' needs [lo, hi] pairs with lo < hi");
    }
    out.push_back({pair[0], pair[1]});
  }
  return out;
}

}  // namespace scene_detail

inline Scene scene_from_json(const nlohmann::json& j) {
  using namespace scene_detail;
  if (!j.is_object()) throw SceneError("scene must be a single JSON object");
  reject_unknown(j,
                 {"mode", "chart", "grid", "spectra", "ambient_c", "max_amb_sec", "checks", "tolerances", "seed",
                  "oracle_validation", "oracle", "obstruction_epsilon", "output"},
                 "scene");
  Scene s;
  if (!j.contains("mode") || !j.at("mode").is_string()) throw SceneError("field 'mode' is required");
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "chart") {
    s.mode = SceneMode::chart;
  } else if (mode == "spectrum") {
    s.mode = SceneMode::spectrum;
  } else {
    throw SceneError("field 'mode' must be \"chart\" or \"spectrum\"");
  }

  if (j.contains("ambient_c")) s.ambient_c = get_real(j.at("ambient_c"), "ambient_c");
  if (j.contains("max_amb_sec")) s.max_amb_sec = get_real(j.at("max_amb_sec"), "max_amb_sec");

  if (s.mode == SceneMode::chart) {
    if (j.contains("grid")) {
      if (!j.at("grid").is_array()) throw SceneError("field 'grid' must be an array of integers");
      for (const auto& g : j.at("grid")) {
        if (!g.is_number_integer()) throw SceneError("field 'grid' must be an array of integers");
        const int m = g.get<int>();
        if (m < 2) throw SceneError("field 'grid': every axis needs a resolution of at least 2");
        s.grid.push_back(m);
      }
    }
    if (!j.contains("chart") || !j.at("chart").is_object()) throw SceneError("field 'chart' is required in chart mode");
    const auto& c = j.at("chart");
    if (c.contains("catalog")) {
      reject_unknown(c, {"catalog", "params"}, "chart");
      if (!c.at("catalog").is_string()) throw SceneError("field 'chart.catalog' must be a string");
      s.chart.catalog = c.at("catalog").get<std::string>();
      if (c.contains("params")) {
        if (!c.at("params").is_object()) throw SceneError("field 'chart.params' must be an object");
        s.chart.params = c.at("params");
      }
    } else {
      reject_unknown(c, {"expressions", "variables", "domain", "orientation_flip"}, "chart");
      if (!c.contains("expressions") || !c.contains("variables") || !c.contains("domain")) {
        throw SceneError("field 'chart' needs either 'catalog' or 'expressions', 'variables' and 'domain'");
      }
      for (const auto& e : c.at("expressions")) {
        if (!e.is_string()) throw SceneError("field 'chart.expressions' must hold strings");
        s.chart.expressions.push_back(e.get<std::string>());
      }
      for (const auto& v : c.at("variables")) {
        if (!v.is_string()) throw SceneError("field 'chart.variables' must hold strings");
        s.chart.variables.push_back(v.get<std::string>());
      }
      s.chart.domain = get_domain(c.at("domain"), "chart.domain");
      if (c.contains("orientation_flip")) s.chart.orientation_flip = get_bool(c.at("orientation_flip"), "chart.orientation_flip");
    }
    if (j.contains("spectra")) throw SceneError("field 'spectra' is only valid in spectrum mode");
  } else {
    if (j.contains("chart") || j.contains("grid")) throw SceneError("fields 'chart' and 'grid' are only valid in chart mode");
    if (!j.contains("spectra") || !j.at("spectra").is_array() || j.at("spectra").empty()) {
      throw SceneError("field 'spectra' must be a non-empty array in spectrum mode");
    }
    for (const auto& e : j.at("spectra")) {
      if (!e.is_object()) throw SceneError("field 'spectra' must hold objects");
      reject_unknown(e, {"lambdas", "c"}, "spectra entry");
      if (!e.contains("lambdas")) throw SceneError("field 'spectra[].lambdas' is required");
      SpectrumInput in;
      in.lambdas = get_reals(e.at("lambdas"), "spectra[].lambdas");
      if (in.lambdas.size() < 2) throw SceneError("field 'spectra[].lambdas' needs at least two values");
      in.c = e.contains("c") ? get_real(e.at("c"), "spectra[].c") : s.ambient_c;
      s.spectra.push_back(std::move(in));
    }
  }

  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) throw SceneError("field 'checks' must be an array of check identifiers");
    s.checks.emplace();
    for (const auto& c : j.at("checks")) {
      if (!c.is_string() || !is_known_check(c.get<std::string>())) {
        throw SceneError("field 'checks': unknown check identifier " + c.dump());
      }
      s.checks->push_back(c.get<std::string>());
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (!t.is_object()) throw SceneError("field 'tolerances' must be an object");
    reject_unknown(t, {"tol", "tol_eq", "tol_constraint", "tol_pos", "tol_minimal", "tol_convex"}, "tolerances");
    auto set = [&](const char* key, double& dst) {
      if (t.contains(key)) {
        dst = get_real(t.at(key), std::string("tolerances.") + key);
        if (dst < 0) throw SceneError(std::string("field 'tolerances.") + key + "' must be non-negative");
      }
    };
    set("tol", s.tol.tol);
    set("tol_eq", s.tol.tol_eq);
    set("tol_constraint", s.tol.tol_constraint);
    set("tol_pos", s.tol.tol_pos);
    set("tol_minimal", s.tol.tol_minimal);
    set("tol_convex", s.tol.tol_convex);
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() >= 0)) {
      throw SceneError("field 'seed' must be a non-negative integer");
    }
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("oracle_validation")) s.oracle_validation = get_bool(j.at("oracle_validation"), "oracle_validation");
  if (j.contains("oracle")) {
    const auto& o = j.at("oracle");
    if (!o.is_object()) throw SceneError("field 'oracle' must be an object");
    reject_unknown(o, {"restarts", "refine_steps"}, "oracle");
    auto get_pos_int = [&](const char* key, int& dst) {
      if (!o.contains(key)) return;
      if (!o.at(key).is_number_integer() || o.at(key).get<int>() < 1) {
        throw SceneError(std::string("field 'oracle.") + key + "' must be a positive integer");
      }
      dst = o.at(key).get<int>();
    };
    get_pos_int("restarts", s.oracle_restarts);
    get_pos_int("refine_steps", s.oracle_refine_steps);
  }
  if (j.contains("obstruction_epsilon")) s.obstruction_epsilon = get_real(j.at("obstruction_epsilon"), "obstruction_epsilon");
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (!o.is_object()) throw SceneError("field 'output' must be an object");
    reject_unknown(o, {"format", "path"}, "output");
    if (o.contains("format")) {
      const std::string f = o.at("format").is_string() ? o.at("format").get<std::string>() : "";
      if (f == "json") {
        s.format = OutputFormat::json;
      } else if (f == "csv") {
        s.format = OutputFormat::csv;
      } else {
        throw SceneError("field 'output.format' must be \"json\" or \"csv\"");
      }
    }
    if (o.contains("path")) {
      if (!o.at("path").is_string()) throw SceneError("field 'output.path' must be a string");
      s.output_path = o.at("path").get<std::string>();
    }
  }
  return s;
}

inline Scene parse_scene(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SceneError(std::string("scene parse error: ") + e.what());
  }
  return scene_from_json(j);
}

inline Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open scene file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

/// Builds the chart named by the scene and checks the grid against it.
inline Chart build_chart(const Scene& s) {
  try {
    if (!s.chart.catalog.empty()) return make_chart(s.chart.catalog, s.chart.params);
    return Chart::from_strings(s.chart.variables, s.chart.expressions, s.chart.domain, s.chart.orientation_flip);
  } catch (const SceneError&) {
    throw;
  } catch (const Error& e) {
    throw SceneError(std::string("field 'chart': ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Scanning

struct PointRecord {
  std::size_t index = 0;
  std::vector<int> grid_index;
  std::vector<double> u;
  std::vector<double> position;
  std::optional<ShapeSpectrum> spectrum;
  std::optional<PointInvariants> invariants;
  SpectrumAudit audit;
  std::string error;
};

struct CheckCounts {
  std::size_t holds = 0;
  std::size_t fails = 0;
  std::size_t equality = 0;
  std::size_t not_applicable = 0;
  std::optional<double> min_slack;
  std::size_t min_slack_point = 0;
};

struct Summary {
  std::map<std::string, CheckCounts> checks;
  std::size_t points = 0;
  std::size_t errored_points = 0;
  std::optional<bool> convex;
  std::optional<bool> obstructed;
  std::optional<std::size_t> obstruction_point;
  std::optional<ChenTuple> obstruction_witness;
  bool minimal = false;
  double max_abs_mean_curvature = 0.0;
  double max_spread = 0.0;
  std::size_t total_failures() const {
    std::size_t f = 0;
    for (const auto& [_, c] : checks) f += c.fails;
    return f;
  }
};

struct Report {
  Scene scene;
  std::vector<PointRecord> points;
  Summary summary;
};

inline Summary summarize(const Scene& scene, const std::vector<PointRecord>& points) {
  Summary s;
  s.points = points.size();
  auto wants = [&](std::string_view id) {
    return !scene.checks || std::find(scene.checks->begin(), scene.checks->end(), id) != scene.checks->end();
  };
  const bool wants_gate = wants(check_id::convexity_gate);
  const bool wants_obstruction = wants(check_id::obstruction);
  bool gate_everywhere = wants_gate;
  bool gate_holds = true;
  if (wants_obstruction) s.obstructed = false;
  bool any_spectrum = false;
  s.minimal = true;
  for (const PointRecord& p : points) {
    if (!p.error.empty()) {
      ++s.errored_points;
      gate_everywhere = false;
      continue;
    }
    if (p.spectrum) {
      any_spectrum = true;
      s.max_abs_mean_curvature = std::max(s.max_abs_mean_curvature, std::abs(p.spectrum->mean()));
      s.max_spread = std::max(s.max_spread, p.spectrum->spread());
      if (!(std::abs(p.spectrum->mean()) <= scene.tol.tol_minimal)) s.minimal = false;
    }
    for (const CheckResult& c : p.audit.checks) {
      CheckCounts& cc = s.checks[c.qualified_name()];
      if (!c.applicable) {
        ++cc.not_applicable;
        continue;
      }
      if (c.violated()) {
        ++cc.fails;
      } else {
        ++cc.holds;
      }
      if (c.equality) ++cc.equality;
      if (!cc.min_slack || c.slack < *cc.min_slack) {
        cc.min_slack = c.slack;
        cc.min_slack_point = p.index;
      }
    }
    if (p.audit.gate) {
      if (!p.audit.gate->gate_holds) gate_holds = false;
    } else {
      gate_everywhere = false;
    }
    if (p.audit.obstruction && p.audit.obstruction->obstructed && !s.obstruction_point) {
      s.obstructed = true;
      s.obstruction_point = p.index;
      s.obstruction_witness = p.audit.obstruction->witness;
    }
  }
  if (!any_spectrum) s.minimal = false;
  if (gate_everywhere && !points.empty()) s.convex = gate_holds;
  return s;
}

namespace scan_detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 of the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline AuditOptions audit_options(const Scene& scene) {
  AuditOptions opt;
  if (scene.checks) opt.checks = std::set<std::string>(scene.checks->begin(), scene.checks->end());
  opt.tol = scene.tol;
  opt.max_amb_sec = scene.max_amb_sec;
  opt.obstruction_eps = scene.obstruction_epsilon;
  return opt;
}

inline void audit_point(const Scene& scene, PointRecord& rec) {
  const ShapeSpectrum& s = *rec.spectrum;
  rec.invariants = invariants(s);
  AuditOptions opt = audit_options(scene);
  OracleOptions oracle;
  oracle.restarts = scene.oracle_restarts;
  oracle.refine_steps = scene.oracle_refine_steps;
  oracle.seed = mix_seed(scene.seed, rec.index);
  if (scene.oracle_validation) opt.oracle = &oracle;
  if (scene.checks && scene.checks->empty()) return;
  rec.audit = audit_spectrum(s, opt);
}

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace scan_detail

/// Strict-interior sample j of m on [lo, hi]: lo + (hi − lo)(j + ½)/m.
inline double grid_coordinate(const Interval& iv, int j, int m) {
  return iv.lo + (iv.hi - iv.lo) * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
}

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

inline Report run_scan(const Scene& scene, unsigned workers = default_workers()) {
  Report report;
  report.scene = scene;
  std::vector<PointRecord>& records = report.points;

  if (scene.mode == SceneMode::chart) {
    const Chart chart = build_chart(scene);
    const std::size_t n = chart.dimension();
    std::vector<int> grid = scene.grid;
    if (grid.empty()) grid.assign(n, 8);
    if (grid.size() != n) {
      throw SceneError("field 'grid' has " + std::to_string(grid.size()) + " axes, chart has " + std::to_string(n));
    }
    report.scene.grid = grid;
    std::size_t total = 1;
    for (int m : grid) total *= static_cast<std::size_t>(m);
    records.resize(total);
    // lexicographic order, first axis slowest
    for (std::size_t flat = 0; flat < total; ++flat) {
      PointRecord& r = records[flat];
      r.index = flat;
      r.grid_index.assign(n, 0);
      std::size_t rest = flat;
      for (std::size_t a = n; a-- > 0;) {
        r.grid_index[a] = static_cast<int>(rest % static_cast<std::size_t>(grid[a]));
        rest /= static_cast<std::size_t>(grid[a]);
      }
      r.u.resize(n);
      for (std::size_t a = 0; a < n; ++a) r.u[a] = grid_coordinate(chart.domain()[a], r.grid_index[a], grid[a]);
    }
    scan_detail::parallel_for(total, workers, [&](std::size_t i) {
      PointRecord& r = records[i];
      try {
        const FrameData f = evaluate_frame(chart, r.u);
        r.position.assign(f.point.data(), f.point.data() + f.point.size());
        r.spectrum = principal_curvatures(f.g, f.h, "point " + std::to_string(i));
        scan_detail::audit_point(scene, r);
      } catch (const std::exception& e) {
        r.spectrum.reset();
        r.invariants.reset();
        r.audit = {};
        r.error = e.what();
      }
    });
  } else {
    records.resize(scene.spectra.size());
    for (std::size_t i = 0; i < records.size(); ++i) records[i].index = i;
    scan_detail::parallel_for(records.size(), workers, [&](std::size_t i) {
      PointRecord& r = records[i];
      try {
        r.spectrum = ShapeSpectrum(scene.spectra[i].lambdas, scene.spectra[i].c, "spectrum " + std::to_string(i));
        scan_detail::audit_point(scene, r);
      } catch (const std::exception& e) {
        r.spectrum.reset();
        r.invariants.reset();
        r.audit = {};
        r.error = e.what();
      }
    });
  }
  report.summary = summarize(report.scene, records);
  return report;
}

/// 0: every check holds; 2: some check failed; 4: only per-point geometry errors.
inline int exit_code(const Report& r) {
  if (r.summary.total_failures() > 0) return 2;
  if (r.summary.errored_points > 0) return 4;
  return 0;
}

// ---------------------------------------------------------------------------
// Emission

using ojson = nlohmann::ordered_json;

inline ojson scene_to_json(const Scene& s) {
  ojson j;
  j["mode"] = s.mode == SceneMode::chart ? "chart" : "spectrum";
  if (s.mode == SceneMode::chart) {
    ojson c;
    if (!s.chart.catalog.empty()) {
      c["catalog"] = s.chart.catalog;
      c["params"] = ojson::parse(s.chart.params.dump());
    } else {
      c["expressions"] = s.chart.expressions;
      c["variables"] = s.chart.variables;
      ojson d = ojson::array();
      for (const auto& iv : s.chart.domain) d.push_back({iv.lo, iv.hi});
      c["domain"] = d;
      c["orientation_flip"] = s.chart.orientation_flip;
    }
    j["chart"] = c;
    j["grid"] = s.grid;
  } else {
    ojson sp = ojson::array();
    for (const auto& in : s.spectra) sp.push_back({{"lambdas", in.lambdas}, {"c", in.c}});
    j["spectra"] = sp;
    j["ambient_c"] = s.ambient_c;
  }
  if (s.max_amb_sec) j["max_amb_sec"] = *s.max_amb_sec;
  j["checks"] = s.checks ? *s.checks : all_check_ids();
  j["tolerances"] = {{"tol", s.tol.tol},
                     {"tol_eq", s.tol.tol_eq},
                     {"tol_constraint", s.tol.tol_constraint},
                     {"tol_pos", s.tol.tol_pos},
                     {"tol_minimal", s.tol.tol_minimal},
                     {"tol_convex", s.tol.tol_convex}};
  j["seed"] = s.seed;
  j["oracle_validation"] = s.oracle_validation;
  j["oracle"] = {{"restarts", s.oracle_restarts}, {"refine_steps", s.oracle_refine_steps}};
  j["obstruction_epsilon"] = s.obstruction_epsilon;
  j["output"] = {{"format", s.format == OutputFormat::json ? "json" : "csv"}, {"path", s.output_path}};
  return j;
}

inline ojson invariants_to_json(const PointInvariants& p) {
  ojson j;
  j["H"] = p.mean_curvature;
  j["K"] = p.gauss_kronecker;
  j["scal"] = p.scalar_curvature;
  j["h_norm_sq"] = p.h_norm_sq;
  if (p.casorati) j["casorati"] = *p.casorati;
  j["spread"] = p.spread;
  j["inf_sec"] = p.inf_sec;
  j["ricci_diag"] = p.ricci_diag;
  if (p.bacaloglu) j["bacaloglu"] = *p.bacaloglu;
  if (p.bacaloglu_elliptic) j["bacaloglu_elliptic"] = *p.bacaloglu_elliptic;
  if (p.nesbitt_b1) j["nesbitt_B1"] = *p.nesbitt_b1;
  if (p.nesbitt_b05) j["nesbitt_B05"] = *p.nesbitt_b05;
  return j;
}

inline ojson check_to_json(const CheckResult& c) {
  ojson j;
  j["check"] = c.qualified_name();
  j["applicable"] = c.applicable;
  if (c.applicable) {
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["slack"] = c.slack;
    j["holds"] = !c.violated();
    j["equality"] = c.equality;
    j["tol"] = c.tol;
  } else {
    j["note"] = c.note;
  }
  return j;
}

inline ojson delta_to_json(const ChenTuple& t, const DeltaResult& d) {
  ojson j;
  j["tuple"] = t.parts();
  j["value"] = d.value;
  j["fast_value"] = d.fast_value;
  j["partition"] = d.achieving_partition;
  if (d.oracle_value) j["oracle_value"] = *d.oracle_value;
  if (d.oracle_gap) j["oracle_gap"] = *d.oracle_gap;
  return j;
}

inline ojson point_to_json(const PointRecord& p) {
  ojson j;
  j["index"] = p.index;
  if (!p.grid_index.empty()) {
    j["grid_index"] = p.grid_index;
    j["u"] = p.u;
  }
  if (!p.position.empty()) j["position"] = p.position;
  if (!p.error.empty()) {
    j["error"] = p.error;
    return j;
  }
  j["lambdas"] = p.spectrum->lambdas();
  j["c"] = p.spectrum->ambient_curvature();
  j["invariants"] = invariants_to_json(*p.invariants);
  if (!p.audit.deltas.empty()) {
    ojson ds = ojson::array();
    for (const auto& [t, d] : p.audit.deltas) ds.push_back(delta_to_json(t, d));
    j["deltas"] = ds;
  }
  if (p.audit.gate) {
    j["convexity_gate"] = {{"max_lhs", p.audit.gate->max_lhs},
                           {"rhs", p.audit.gate->rhs},
                           {"holds", p.audit.gate->gate_holds}};
  }
  if (p.audit.obstruction) {
    ojson o;
    o["obstructed"] = p.audit.obstruction->obstructed;
    if (p.audit.obstruction->witness) o["witness"] = p.audit.obstruction->witness->parts();
    o["margin"] = p.audit.obstruction->margin;
    j["obstruction"] = o;
  }
  ojson cs = ojson::array();
  for (const CheckResult& c : p.audit.checks) cs.push_back(check_to_json(c));
  j["checks"] = cs;
  return j;
}

inline ojson summary_to_json(const Summary& s) {
  ojson j;
  j["points"] = s.points;
  j["errored_points"] = s.errored_points;
  ojson checks = ojson::object();
  for (const auto& [name, c] : s.checks) {
    ojson e;
    e["holds"] = c.holds;
    e["fails"] = c.fails;
    e["equality"] = c.equality;
    e["not_applicable"] = c.not_applicable;
    if (c.min_slack) {
      e["min_slack"] = *c.min_slack;
      e["min_slack_point"] = c.min_slack_point;
    }
    checks[name] = e;
  }
  j["checks"] = checks;
  ojson v;
  v["convex"] = s.convex ? ojson(*s.convex) : ojson(nullptr);
  v["obstructed"] = s.obstructed ? ojson(*s.obstructed) : ojson(nullptr);
  if (s.obstruction_point) {
    v["obstruction_point"] = *s.obstruction_point;
    v["obstruction_witness"] = s.obstruction_witness->parts();
  }
  v["minimal"] = s.minimal;
  j["verdicts"] = v;
  j["max_abs_mean_curvature"] = s.max_abs_mean_curvature;
  j["max_spread"] = s.max_spread;
  j["failures"] = s.total_failures();
  return j;
}

/// Everything except the timestamp; identical scenes and seeds give identical bodies.
inline ojson report_body(const Report& r) {
  ojson j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["seed"] = r.scene.seed;
  j["scene"] = scene_to_json(r.scene);
  ojson pts = ojson::array();
  for (const auto& p : r.points) pts.push_back(point_to_json(p));
  j["points"] = pts;
  j["summary"] = summary_to_json(r.summary);
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::string to_json_text(const Report& r, bool with_timestamp = true) {
  ojson j = report_body(r);
  if (with_timestamp) j["generated_at"] = utc_timestamp();
  return j.dump(2) + "\n";
}

/// One row per (point, applicable check).
inline std::string to_csv_text(const Report& r) {
  std::size_t n_u = 0, n_l = 0;
  for (const auto& p : r.points) {
    n_u = std::max(n_u, p.u.size());
    if (p.spectrum) n_l = std::max(n_l, p.spectrum->dimension());
  }
  std::ostringstream os;
  os << "point_index";
  for (std::size_t i = 0; i < n_u; ++i) os << ",u" << i + 1;
  for (std::size_t i = 0; i < n_l; ++i) os << ",lambda" << i + 1;
  os << ",check,lhs,rhs,slack,holds,equality\n";
  for (const auto& p : r.points) {
    if (!p.spectrum) continue;
    for (const CheckResult& c : p.audit.checks) {
      if (!c.applicable) continue;
      os << p.index;
      for (std::size_t i = 0; i < n_u; ++i) os << "," << (i < p.u.size() ? format_real(p.u[i]) : "");
      for (std::size_t i = 0; i < n_l; ++i) {
        os << "," << (i < p.spectrum->dimension() ? format_real(p.spectrum->lambda(i)) : "");
      }
      os << "," << c.qualified_name() << "," << format_real(c.lhs) << "," << format_real(c.rhs) << ","
         << format_real(c.slack) << "," << (c.violated() ? "false" : "true") << ","
         << (c.equality ? "true" : "false") << "\n";
    }
  }
  return os.str();
}

inline void emit(const Report& r, OutputFormat format, const std::string& path, std::ostream& fallback) {
  const std::string text = format == OutputFormat::json ? to_json_text(r) : to_csv_text(r);
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing output file '" + path + "'");
}

}  // namespace hypercurv
