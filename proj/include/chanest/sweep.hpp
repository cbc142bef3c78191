#ifndef CHANEST_SWEEP_HPP
#define CHANEST_SWEEP_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chanest/analysis.hpp"
#include "chanest/report_io.hpp"

namespace chanest {

/// Inclusive arithmetic progression start, start + step, ... <= stop.
struct GridAxis {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  /// Throws ConfigError when step <= 0 or stop < start (an empty axis).
  std::vector<double> values() const;
};

/// "start:stop:step", or a bare number for a single point.
GridAxis parse_grid_axis(std::string_view text);
/// Comma-separated axes, one per free parameter or a single shared one.
std::vector<GridAxis> parse_grid(std::string_view text);

/// Every point of the product grid, last parameter varying fastest.
/// A single axis is shared by all `arity` parameters.
std::vector<Eigen::VectorXd> grid_points(const std::vector<GridAxis>& axes, Eigen::Index arity);

struct SweepConfig {
  ChannelKind channel = ChannelKind::Depolarizing;
  std::optional<ProtocolKind> protocol;  // default_protocol(channel) when unset
  int dim = 2;
  std::vector<GridAxis> grid{GridAxis{0.0, 0.5, 0.05}};
  std::vector<int> ns{1};
  std::vector<CostKind> costs{CostKind::Statistical};
  std::vector<Method> methods{Method::ClosedForm};
  int resolution = SphereQuadrature::kDefaultResolution;
  Sanitization sanitization = Sanitization::Clamp;
  std::size_t runs = 1000;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;       // output directory; empty writes to stdout
  unsigned threads = 0;  // 0 uses the hardware concurrency
};

struct ComparePauliConfig {
  std::vector<GridAxis> grid{GridAxis{0.0, 1.0, 0.05}};  // lambda1 and lambda3; one axis is shared
  double lambda2 = 0.0;
  std::vector<int> ns{6};
  std::vector<CostKind> costs{CostKind::Statistical, CostKind::Fidelity};
  int resolution = SphereQuadrature::kDefaultResolution;
  Sanitization sanitization = Sanitization::Clamp;
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
};

struct SimulateConfig {
  ChannelKind channel = ChannelKind::Depolarizing;
  std::optional<ProtocolKind> protocol;
  int dim = 2;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(1);  // free-parameter layout
  int n = 1;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  std::vector<CostKind> costs{CostKind::Statistical};
  int resolution = SphereQuadrature::kDefaultResolution;
  Sanitization sanitization = Sanitization::Clamp;
  bool detail = true;  // include per-run records
  std::string out;
};

/// Config documents mirror the command-line flags ("channel", "lambda-grid",
/// "n", "cost", ...). Numbers may be given as JSON numbers or strings, lists
/// as arrays or comma-separated strings. A RunManifest is accepted too; its
/// "config" member is used. Unknown keys raise ConfigError.
SweepConfig sweep_config_from_json(const Json& j);
ComparePauliConfig compare_pauli_config_from_json(const Json& j);
SimulateConfig simulate_config_from_json(const Json& j);

/// Fully resolved configs, in the same key vocabulary.
Json to_json(const SweepConfig& c);
Json to_json(const ComparePauliConfig& c);
Json to_json(const SimulateConfig& c);

/// Throws ConfigError for invalid combinations (out-of-range one-parameter
/// grids, N not divisible by the protocol's block size, unsupported formats).
void validate(const SweepConfig& c);
void validate(const ComparePauliConfig& c);
void validate(const SimulateConfig& c);

/// status: "ok", "invalid-lambda", "unsupported" (e.g. closed-form fidelity)
/// or "enumeration-limit".
struct SweepRow {
  ChannelKind channel = ChannelKind::Depolarizing;
  CostKind cost = CostKind::Statistical;
  Method method = Method::ClosedForm;
  int n = 0;
  Eigen::VectorXd lambda;
  std::optional<MeanErrorReport> report;
  std::string status;
};

/// Rows ordered by N, then grid point, then cost, then method.
std::vector<SweepRow> run_sweep(const SweepConfig& c);
std::string sweep_csv(const std::vector<SweepRow>& rows, Eigen::Index lambda_count);
Json sweep_json(const std::vector<SweepRow>& rows);

/// status: "ok" or "invalid-simplex". Missing costs stay empty.
struct ComparePauliRow {
  int n = 0;
  Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
  std::optional<DeltaReport> statistical;
  std::optional<DeltaReport> fidelity;
  std::string status;
};

/// Rows ordered by N, then lambda1, then lambda3.
std::vector<ComparePauliRow> run_compare_pauli(const ComparePauliConfig& c);
/// Columns: N, lambda1, lambda2, lambda3, cs_sep, cs_ent, delta_s, cf_sep,
/// cf_ent, delta_f, status.
std::string compare_pauli_csv(const std::vector<ComparePauliRow>& rows);
Json compare_pauli_json(const std::vector<ComparePauliRow>& rows);

/// Per-run counts, estimates and costs plus the aggregate mean and standard
/// error of every requested cost.
Json run_simulate(const SimulateConfig& c);

struct OutputFile {
  std::string name;
  std::string content;
};

/// Writes the files into `dir` (created if needed) together with
/// manifest.json: tool version, command, resolved config, UTC timestamp,
/// seed and the SHA-256 of every file.
void write_run_directory(const std::string& dir, const std::string& command, const Json& config,
                         std::uint64_t seed, const std::vector<OutputFile>& files);

std::string sha256_hex(std::string_view data);

}  // namespace chanest

#endif  // CHANEST_SWEEP_HPP
