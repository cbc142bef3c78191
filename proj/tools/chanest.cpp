// chanest: command-line front end for channel-estimation sweeps, protocol
// simulation and the validation suite.
//
// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "chanest/errors.hpp"
#include "chanest/report_io.hpp"
#include "chanest/sweep.hpp"
#include "chanest/validation.hpp"

namespace {

using chanest::Json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Flag values are collected as strings keyed by their config-file name, so
/// a config file and the command line share one parser.
struct FlagSet {
  std::string config_path;
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    app->add_option("--" + key, values[key], help);
  }

  Json merged(CLI::App* app) const {
    Json j = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw chanest::ConfigError("cannot open config file '" + config_path + "'");
      try {
        j = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw chanest::ConfigError("config file '" + config_path + "': " + e.what());
      }
      if (j.contains("manifest_version") && j.contains("config")) j = Json(j["config"]);
    }
    for (const auto& [key, value] : values) {
      if (app->count("--" + key) > 0) j[key] = value;
    }
    return j;
  }
};

void emit(const std::string& out_dir, const std::string& command, const Json& resolved, std::uint64_t seed,
          const chanest::OutputFile& file) {
  if (out_dir.empty()) {
    std::cout << file.content;
  } else {
    chanest::write_run_directory(out_dir, command, resolved, seed, {file});
    std::cerr << "wrote " << out_dir << "/" << file.name << " and manifest.json\n";
  }
}

int run_sweep(CLI::App* app, const FlagSet& flags) {
  const chanest::SweepConfig c = chanest::sweep_config_from_json(flags.merged(app));
  const auto rows = chanest::run_sweep(c);
  const Json resolved = chanest::to_json(c);
  const Eigen::Index arity = rows.empty() ? 1 : rows.front().lambda.size();
  chanest::OutputFile file;
  if (c.format == "csv") {
    file = {"sweep.csv", chanest::sweep_csv(rows, arity)};
  } else {
    file = {"sweep.json", chanest::sweep_json(rows).dump(2) + "\n"};
  }
  emit(c.out, "sweep", resolved, c.seed, file);
  return kExitOk;
}

int run_compare(CLI::App* app, const FlagSet& flags) {
  const chanest::ComparePauliConfig c = chanest::compare_pauli_config_from_json(flags.merged(app));
  const auto rows = chanest::run_compare_pauli(c);
  chanest::OutputFile file;
  if (c.format == "csv") {
    file = {"compare-pauli.csv", chanest::compare_pauli_csv(rows)};
  } else {
    file = {"compare-pauli.json", chanest::compare_pauli_json(rows).dump(2) + "\n"};
  }
  emit(c.out, "compare-pauli", chanest::to_json(c), 0, file);
  return kExitOk;
}

int run_simulate(CLI::App* app, const FlagSet& flags) {
  const chanest::SimulateConfig c = chanest::simulate_config_from_json(flags.merged(app));
  const Json report = chanest::run_simulate(c);
  emit(c.out, "simulate", chanest::to_json(c), c.seed, {"simulate.json", report.dump(2) + "\n"});
  return kExitOk;
}

int run_validate(int resolution, bool inject_fault, const std::string& format) {
  chanest::ValidationOptions opts;
  opts.resolution = resolution;
  opts.inject_affine_fault = inject_fault;
  const chanest::ValidationReport report = chanest::run_validation(opts);
  if (format == "json") {
    Json checks = Json::array();
    for (const auto& c : report.checks) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
    }
    Json j;
    j["passed"] = report.all_passed();
    j["seconds"] = report.seconds;
    j["checks"] = checks;
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& c : report.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "  (" << std::fixed
                << std::setprecision(3) << c.seconds << " s)\n"
                << std::defaultfloat;
    }
    std::size_t failed = 0;
    for (const auto& c : report.checks) failed += c.passed ? 0 : 1;
    std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
  }
  if (report.seconds > chanest::ValidationReport::kSoftBudgetSeconds) {
    std::cerr << "warning: validation took " << report.seconds << " s, above the "
              << chanest::ValidationReport::kSoftBudgetSeconds << " s budget\n";
  }
  return report.all_passed() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-resource estimation of noisy quantum channel parameters", "chanest"};
  app.set_version_flag("--version", std::string(CHANEST_VERSION));
  app.require_subcommand(1);

  FlagSet sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Mean-error curves over a lambda grid");
  sweep->add_option("--config", sweep_flags.config_path, "JSON config file; flags override it");
  sweep_flags.add(sweep, "channel", "depolarizing | phase-damping | amplitude-damping | pauli | general | generalized-pauli");
  sweep_flags.add(sweep, "protocol", "Estimation protocol (defaults to the family's standard one)");
  sweep_flags.add(sweep, "dim", "Qudit dimension for generalized-pauli");
  sweep_flags.add(sweep, "lambda", "Single parameter point, comma-separated");
  sweep_flags.add(sweep, "lambda-grid", "start:stop:step, one shared axis or one per parameter, comma-separated");
  sweep_flags.add(sweep, "n", "Resource counts N, comma-separated");
  sweep_flags.add(sweep, "cost", "stat and/or fid, comma-separated");
  sweep_flags.add(sweep, "method", "closed, enum and/or mc, comma-separated");
  sweep_flags.add(sweep, "runs", "Monte Carlo runs");
  sweep_flags.add(sweep, "seed", "Monte Carlo seed");
  sweep_flags.add(sweep, "resolution", "Sphere quadrature resolution");
  sweep_flags.add(sweep, "sanitize", "clamp | project: handling of unphysical estimates in the fidelity cost");
  sweep_flags.add(sweep, "format", "csv | json");
  sweep_flags.add(sweep, "out", "Output directory (stdout when omitted)");
  sweep_flags.add(sweep, "threads", "Worker threads (0 = all cores)");

  FlagSet compare_flags;
  auto* compare = app.add_subcommand("compare-pauli", "Separable minus entangled mean error over (lambda1, lambda3)");
  compare->add_option("--config", compare_flags.config_path, "JSON config file; flags override it");
  compare_flags.add(compare, "lambda-grid", "start:stop:step for lambda1 and lambda3 (one shared axis or two)");
  compare_flags.add(compare, "lambda2", "Fixed lambda2");
  compare_flags.add(compare, "n", "Resource counts N (multiples of 6), comma-separated");
  compare_flags.add(compare, "cost", "stat and/or fid, comma-separated");
  compare_flags.add(compare, "resolution", "Sphere quadrature resolution");
  compare_flags.add(compare, "sanitize", "clamp | project");
  compare_flags.add(compare, "format", "csv | json");
  compare_flags.add(compare, "out", "Output directory (stdout when omitted)");
  compare_flags.add(compare, "threads", "Worker threads (0 = all cores)");

  FlagSet simulate_flags;
  auto* simulate = app.add_subcommand("simulate", "Seeded protocol runs with per-run counts, estimates and costs");
  simulate->add_option("--config", simulate_flags.config_path, "JSON config file; flags override it");
  simulate_flags.add(simulate, "channel", "Channel family");
  simulate_flags.add(simulate, "protocol", "Estimation protocol");
  simulate_flags.add(simulate, "dim", "Qudit dimension for generalized-pauli");
  simulate_flags.add(simulate, "lambda", "True parameters, comma-separated");
  simulate_flags.add(simulate, "n", "Resource count N");
  simulate_flags.add(simulate, "runs", "Number of runs");
  simulate_flags.add(simulate, "seed", "Seed");
  simulate_flags.add(simulate, "cost", "stat and/or fid, comma-separated");
  simulate_flags.add(simulate, "resolution", "Sphere quadrature resolution");
  simulate_flags.add(simulate, "sanitize", "clamp | project");
  simulate_flags.add(simulate, "detail", "true | false: include per-run records");
  simulate_flags.add(simulate, "format", "json");
  simulate_flags.add(simulate, "out", "Output directory (stdout when omitted)");

  int validate_resolution = chanest::SphereQuadrature::kDefaultResolution;
  bool inject_fault = false;
  std::string validate_format = "text";
  auto* validate = app.add_subcommand("validate", "Run the identity and positivity checks");
  validate->add_option("--resolution", validate_resolution, "Sphere quadrature resolution")->check(CLI::Range(2, 4096));
  validate->add_option("--format", validate_format, "text | json")->check(CLI::IsMember({"text", "json"}));
  validate->add_flag("--inject-fault", inject_fault, "Perturb the affine parametrization (negative control)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sweep->parsed()) return run_sweep(sweep, sweep_flags);
    if (compare->parsed()) return run_compare(compare, compare_flags);
    if (simulate->parsed()) return run_simulate(simulate, simulate_flags);
    return run_validate(validate_resolution, inject_fault, validate_format);
  } catch (const chanest::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
