// hypercurv command-line front end.
//
//   hypercurv scan scene.json [--out PATH] [--format json|csv] [--seed N] [--workers N] [--tol X] [--oracle|--no-oracle]
//   hypercurv check --lambdas 1 2 3 [--c 0]
//   hypercurv invariants --lambdas 1 2 3 [--c 0]
//   hypercurv catalog list
//   hypercurv delta --lambdas 1 2 3 --tuple 2 [--oracle]

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hypercurv/hypercurv.hpp"

namespace hc = hypercurv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 2;
constexpr int kExitScene = 3;
constexpr int kExitGeometry = 4;

void print_check(const hc::CheckResult& c) {
  if (!c.applicable) {
    std::cout << c.qualified_name() << ": NOT-APPLICABLE (" << c.note << ")\n";
    return;
  }
  std::cout << c.qualified_name() << ": " << (c.violated() ? "FAIL" : "holds") << (c.equality ? " [equality]" : "")
            << "  lhs=" << hc::format_real(c.lhs) << " rhs=" << hc::format_real(c.rhs)
            << " slack=" << hc::format_real(c.slack) << "\n";
}

int run_scan(const std::string& path, const std::optional<std::string>& out, const std::optional<std::string>& format,
             const std::optional<std::uint64_t>& seed, unsigned workers, const std::optional<double>& tol,
             const std::optional<bool>& oracle) {
  hc::Scene scene;
  try {
    scene = hc::load_scene(path);
  } catch (const hc::SceneError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return kExitScene;
  }
  if (out) scene.output_path = *out;
  if (format) scene.format = *format == "csv" ? hc::OutputFormat::csv : hc::OutputFormat::json;
  if (seed) scene.seed = *seed;
  if (tol) scene.tol.tol = *tol;
  if (oracle) scene.oracle_validation = *oracle;

  hc::Report report;
  try {
    report = hc::run_scan(scene, workers == 0 ? hc::default_workers() : workers);
  } catch (const hc::SceneError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return kExitScene;
  }
  try {
    hc::emit(report, scene.format, scene.output_path, std::cout);
  } catch (const hc::Error& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitScene;
  }
  const auto& s = report.summary;
  std::cerr << s.points << " points, " << s.errored_points << " errored, " << s.total_failures()
            << " failed checks\n";
  return hc::exit_code(report);
}

int run_check(const std::vector<double>& lambdas, double c, const std::optional<double>& tol, bool oracle) {
  const hc::ShapeSpectrum s(lambdas, c);
  hc::AuditOptions opt;
  if (tol) opt.tol.tol = *tol;
  hc::OracleOptions oo;
  if (oracle) opt.oracle = &oo;
  const hc::SpectrumAudit a = hc::audit_spectrum(s, opt);
  bool failed = false;
  for (const auto& ch : a.checks) {
    print_check(ch);
    failed = failed || ch.violated();
  }
  if (a.gate) std::cout << "convexity gate hypothesis: " << (a.gate->gate_holds ? "holds" : "does not hold") << "\n";
  if (a.obstruction) {
    std::cout << "minimality: " << (a.obstruction->obstructed ? "OBSTRUCTED" : "not obstructed");
    if (a.obstruction->witness) std::cout << " by " << hc::to_string(*a.obstruction->witness);
    std::cout << "\n";
  }
  return failed ? kExitFail : kExitOk;
}

int run_invariants(const std::vector<double>& lambdas, double c) {
  const hc::ShapeSpectrum s(lambdas, c);
  std::cout << hc::invariants_to_json(hc::invariants(s)).dump(2) << "\n";
  return kExitOk;
}

int run_catalog_list() {
  for (const auto& e : hc::catalog()) {
    std::cout << e.name << "  " << e.summary << "\n";
    for (const auto& p : e.params) std::cout << "    " << p.name << ": " << p.description << "\n";
  }
  return kExitOk;
}

int run_delta(const std::vector<double>& lambdas, double c, const std::vector<int>& tuple, bool oracle) {
  const hc::ShapeSpectrum s(lambdas, c);
  const hc::ChenTuple t(tuple, static_cast<int>(s.dimension()));
  hc::OracleOptions oo;
  const hc::DeltaResult d = hc::delta_invariant(s, t, oracle ? &oo : nullptr);
  std::cout << hc::delta_to_json(t, d).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvature invariants and inequality auditor for hypersurfaces"};
  app.set_version_flag("--version", std::string(hc::kToolVersion));
  app.require_subcommand(1);

  auto* scan = app.add_subcommand("scan", "evaluate a scene file and emit a report");
  std::string scene_path;
  std::optional<std::string> out, format;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::optional<double> tol;
  bool oracle_on = false, oracle_off = false;
  scan->add_option("scene", scene_path, "scene file")->required()->check(CLI::ExistingFile);
  scan->add_option("--out", out, "output path ('-' for stdout)");
  scan->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  scan->add_option("--seed", seed, "seed for stochastic oracles");
  scan->add_option("--workers", workers, "worker threads (0: available parallelism)");
  scan->add_option("--tol", tol, "check tolerance");
  auto* on = scan->add_flag("--oracle", oracle_on, "validate δ with the Stiefel oracle");
  scan->add_flag("--no-oracle", oracle_off, "skip oracle validation")->excludes(on);

  std::vector<double> lambdas;
  double c = 0.0;
  bool oracle = false;

  auto* check = app.add_subcommand("check", "audit one spectrum");
  check->add_option("--lambdas", lambdas, "principal curvatures")->required()->expected(2, -1);
  check->add_option("--c", c, "ambient curvature");
  check->add_option("--tol", tol, "check tolerance");
  check->add_flag("--oracle", oracle, "validate δ with the Stiefel oracle");

  auto* inv = app.add_subcommand("invariants", "pointwise invariants of one spectrum");
  inv->add_option("--lambdas", lambdas, "principal curvatures")->required()->expected(2, -1);
  inv->add_option("--c", c, "ambient curvature");

  auto* cat = app.add_subcommand("catalog", "closed-form surfaces");
  auto* list = cat->add_subcommand("list", "list catalog entries");
  cat->require_subcommand(1);

  auto* delta = app.add_subcommand("delta", "Chen invariant of one spectrum");
  std::vector<int> tuple;
  delta->add_option("--lambdas", lambdas, "principal curvatures")->required()->expected(2, -1);
  delta->add_option("--c", c, "ambient curvature");
  delta->add_option("--tuple", tuple, "tuple parts, omit for the empty tuple")->expected(0, -1);
  delta->add_flag("--oracle", oracle, "validate with the Stiefel oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitScene;
  }

  try {
    if (*scan) {
      std::optional<bool> o;
      if (oracle_on) o = true;
      if (oracle_off) o = false;
      return run_scan(scene_path, out, format, seed, workers, tol, o);
    }
    if (*check) return run_check(lambdas, c, tol, oracle);
    if (*inv) return run_invariants(lambdas, c);
    if (*list) return run_catalog_list();
    if (*delta) return run_delta(lambdas, c, tuple, oracle);
  } catch (const hc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeometry;
  }
  return kExitOk;
}
