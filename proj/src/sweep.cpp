#include "chanest/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "chanest/errors.hpp"

namespace chanest {

namespace {

// ---- small parsing helpers -------------------------------------------------

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": '" + t + "' is not a number");
  }
  return v;
}

template <class Int>
Int parse_integer(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(std::string(what) + ": '" + t + "' is not an integer");
  }
  return v;
}

std::string json_text(const Json& j, std::string_view what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer() || j.is_number_unsigned()) return j.dump();
  if (j.is_number_float()) return format_double(j.get<double>());
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  throw ConfigError(std::string(what) + ": expected a scalar");
}

std::vector<std::string> json_list(const Json& j, std::string_view what) {
  std::vector<std::string> out;
  if (j.is_array()) {
    for (const auto& x : j) out.push_back(json_text(x, what));
  } else {
    out = split(json_text(j, what), ',');
  }
  return out;
}

double json_double(const Json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  return parse_double(json_text(j, what), what);
}

template <class Int>
Int json_integer(const Json& j, std::string_view what) {
  if (j.is_number_unsigned()) return static_cast<Int>(j.get<std::uint64_t>());
  if (j.is_number_integer()) return static_cast<Int>(j.get<std::int64_t>());
  return parse_integer<Int>(json_text(j, what), what);
}

bool json_bool(const Json& j, std::string_view what) {
  if (j.is_boolean()) return j.get<bool>();
  const std::string t = json_text(j, what);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError(std::string(what) + ": expected true or false");
}

std::vector<int> json_int_list(const Json& j, std::string_view what) {
  std::vector<int> out;
  for (const auto& s : json_list(j, what)) out.push_back(parse_integer<int>(s, what));
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

Eigen::VectorXd json_vector(const Json& j, std::string_view what) {
  const auto items = json_list(j, what);
  Eigen::VectorXd v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_double(items[i], what);
  return v;
}

std::vector<GridAxis> json_grid(const Json& j) {
  if (j.is_array()) {
    std::vector<GridAxis> axes;
    for (const auto& a : j) {
      if (a.is_array()) {
        if (a.size() != 3) throw ConfigError("lambda-grid: axes are [start, stop, step]");
        axes.push_back({json_double(a[0], "lambda-grid"), json_double(a[1], "lambda-grid"),
                        json_double(a[2], "lambda-grid")});
      } else {
        axes.push_back(parse_grid_axis(json_text(a, "lambda-grid")));
      }
    }
    if (axes.empty()) throw ConfigError("lambda-grid: empty grid");
    return axes;
  }
  return parse_grid(json_text(j, "lambda-grid"));
}

Json grid_json(const std::vector<GridAxis>& axes) {
  Json a = Json::array();
  for (const auto& g : axes) a.push_back(Json::array({g.start, g.stop, g.step}));
  return a;
}

template <class E, class F>
std::vector<E> json_enum_list(const Json& j, std::string_view what, F from_string) {
  std::vector<E> out;
  for (const auto& s : json_list(j, what)) out.push_back(from_string(s));
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

template <class E>
Json enum_list_json(const std::vector<E>& v) {
  Json a = Json::array();
  for (const auto& e : v) a.push_back(std::string(to_string(e)));
  return a;
}

/// A manifest wraps the resolved config; unwrap it so a run can be replayed.
const Json& config_body(const Json& j) {
  if (j.is_object() && j.contains("manifest_version") && j.contains("config")) return j.at("config");
  return j;
}

void reject_unknown_keys(const Json& j, const std::set<std::string>& known, std::string_view command) {
  if (!j.is_object()) throw ConfigError(std::string(command) + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(std::string(command) + ": unknown config key '" + key + "'");
  }
}

void check_format(const std::string& f) {
  if (f != "csv" && f != "json") throw ConfigError("format must be csv or json, got '" + f + "'");
}

Eigen::Index free_parameter_count(ChannelKind kind, int dim) {
  switch (kind) {
    case ChannelKind::Depolarizing:
    case ChannelKind::PhaseDamping:
    case ChannelKind::AmplitudeDamping:
      return 1;
    case ChannelKind::PauliQubit: return 3;
    case ChannelKind::GeneralAffine: return 12;
    case ChannelKind::GeneralizedPauli: return static_cast<Eigen::Index>(dim) * dim - 1;
  }
  return 0;
}

ProtocolKind resolve_protocol(ChannelKind channel, const std::optional<ProtocolKind>& p) {
  const ProtocolKind k = p.value_or(default_protocol(channel));
  if (channel_family(k) != channel) {
    throw ConfigError("protocol '" + std::string(to_string(k)) + "' does not estimate '" +
                      std::string(to_string(channel)) + "' channels");
  }
  return k;
}

/// Runs f(0..count-1) on a worker pool. The first failure by index is
/// rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::size_t>(t, count));
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < t; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            f(i);
          } catch (...) {
            std::lock_guard lock(mutex);
            if (i < failed_index) {
              failed_index = i;
              failure = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string optional_field(const std::optional<DeltaReport>& d, double DeltaReport::*field) {
  return d ? format_double((*d).*field) : std::string();
}

}  // namespace

// ---- grids -----------------------------------------------------------------

std::vector<double> GridAxis::values() const {
  if (!(step > 0.0)) throw ConfigError("lambda grid: step must be positive");
  if (stop < start) throw ConfigError("lambda grid: empty (stop < start)");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v;
  v.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Snap to a 1e-12 lattice so 0.1 + 2 * 0.05 prints as 0.2 rather than
    // the accumulated binary neighbour.
    v.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return v;
}

GridAxis parse_grid_axis(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) {
    const double x = parse_double(parts[0], "lambda-grid");
    return {x, x, 1.0};
  }
  if (parts.size() != 3) throw ConfigError("lambda-grid: expected start:stop:step, got '" + std::string(text) + "'");
  GridAxis g{parse_double(parts[0], "lambda-grid"), parse_double(parts[1], "lambda-grid"),
             parse_double(parts[2], "lambda-grid")};
  g.values();
  return g;
}

std::vector<GridAxis> parse_grid(std::string_view text) {
  if (trim(text).empty()) throw ConfigError("lambda-grid: empty grid");
  std::vector<GridAxis> axes;
  for (const auto& part : split(text, ',')) axes.push_back(parse_grid_axis(part));
  return axes;
}

std::vector<Eigen::VectorXd> grid_points(const std::vector<GridAxis>& axes, Eigen::Index arity) {
  if (axes.empty()) throw ConfigError("lambda grid: empty grid");
  if (axes.size() != 1 && static_cast<Eigen::Index>(axes.size()) != arity) {
    throw ConfigError("lambda grid: expected 1 or " + std::to_string(arity) + " axes, got " +
                      std::to_string(axes.size()));
  }
  std::vector<std::vector<double>> values;
  for (Eigen::Index k = 0; k < arity; ++k) values.push_back(axes[axes.size() == 1 ? 0 : k].values());
  std::vector<Eigen::VectorXd> points;
  std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
  while (true) {
    Eigen::VectorXd p(arity);
    for (Eigen::Index k = 0; k < arity; ++k) p(k) = values[k][idx[k]];
    points.push_back(p);
    Eigen::Index k = arity - 1;
    while (k >= 0 && ++idx[k] == values[k].size()) idx[k--] = 0;
    if (k < 0) break;
  }
  return points;
}

// ---- configs ---------------------------------------------------------------

SweepConfig sweep_config_from_json(const Json& doc) {
  const Json& j = config_body(doc);
  reject_unknown_keys(j,
                      {"channel", "protocol", "dim", "lambda", "lambda-grid", "n", "cost", "method", "resolution",
                       "sanitize", "runs", "seed", "format", "out", "threads"},
                      "sweep");
  SweepConfig c;
  if (j.contains("channel")) c.channel = channel_kind_from_string(json_text(j["channel"], "channel"));
  if (j.contains("protocol")) c.protocol = protocol_kind_from_string(json_text(j["protocol"], "protocol"));
  if (j.contains("dim")) c.dim = json_integer<int>(j["dim"], "dim");
  if (j.contains("lambda") && j.contains("lambda-grid")) {
    throw ConfigError("give either lambda or lambda-grid, not both");
  }
  if (j.contains("lambda-grid")) c.grid = json_grid(j["lambda-grid"]);
  if (j.contains("lambda")) {
    c.grid.clear();
    const Eigen::VectorXd p = json_vector(j["lambda"], "lambda");
    for (Eigen::Index k = 0; k < p.size(); ++k) c.grid.push_back({p(k), p(k), 1.0});
  }
  if (j.contains("n")) c.ns = json_int_list(j["n"], "n");
  if (j.contains("cost")) c.costs = json_enum_list<CostKind>(j["cost"], "cost", cost_kind_from_string);
  if (j.contains("method")) c.methods = json_enum_list<Method>(j["method"], "method", method_from_string);
  if (j.contains("resolution")) c.resolution = json_integer<int>(j["resolution"], "resolution");
  if (j.contains("sanitize")) c.sanitization = sanitization_from_string(json_text(j["sanitize"], "sanitize"));
  if (j.contains("runs")) c.runs = json_integer<std::size_t>(j["runs"], "runs");
  if (j.contains("seed")) c.seed = json_integer<std::uint64_t>(j["seed"], "seed");
  if (j.contains("format")) c.format = json_text(j["format"], "format");
  if (j.contains("out")) c.out = json_text(j["out"], "out");
  if (j.contains("threads")) c.threads = json_integer<unsigned>(j["threads"], "threads");
  return c;
}

Json to_json(const SweepConfig& c) {
  Json j;
  j["channel"] = std::string(to_string(c.channel));
  j["protocol"] = std::string(to_string(resolve_protocol(c.channel, c.protocol)));
  if (c.channel == ChannelKind::GeneralizedPauli) j["dim"] = c.dim;
  j["lambda-grid"] = grid_json(c.grid);
  j["n"] = c.ns;
  j["cost"] = enum_list_json(c.costs);
  j["method"] = enum_list_json(c.methods);
  j["resolution"] = c.resolution;
  j["sanitize"] = std::string(to_string(c.sanitization));
  j["runs"] = c.runs;
  j["seed"] = c.seed;
  j["format"] = c.format;
  return j;
}

void validate(const SweepConfig& c) {
  check_format(c.format);
  const ProtocolKind kind = resolve_protocol(c.channel, c.protocol);
  if (c.ns.empty() || c.costs.empty() || c.methods.empty()) throw ConfigError("sweep: n, cost and method need values");
  if (c.resolution < 2) throw ConfigError("resolution must be at least 2");
  for (int n : c.ns) validate_protocol({kind, n, c.dim});
  if (std::find(c.methods.begin(), c.methods.end(), Method::MonteCarlo) != c.methods.end() && c.runs == 0) {
    throw ConfigError("Monte Carlo needs runs >= 1");
  }
  const Eigen::Index arity = free_parameter_count(c.channel, c.dim);
  const auto points = grid_points(c.grid, arity);
  if (arity == 1) {
    for (const auto& p : points) validate_range(from_parameters(c.channel, p, c.dim));
  }
}

ComparePauliConfig compare_pauli_config_from_json(const Json& doc) {
  const Json& j = config_body(doc);
  reject_unknown_keys(j, {"lambda-grid", "lambda2", "n", "cost", "resolution", "sanitize", "format", "out", "threads"},
                      "compare-pauli");
  ComparePauliConfig c;
  if (j.contains("lambda-grid")) c.grid = json_grid(j["lambda-grid"]);
  if (j.contains("lambda2")) c.lambda2 = json_double(j["lambda2"], "lambda2");
  if (j.contains("n")) c.ns = json_int_list(j["n"], "n");
  if (j.contains("cost")) c.costs = json_enum_list<CostKind>(j["cost"], "cost", cost_kind_from_string);
  if (j.contains("resolution")) c.resolution = json_integer<int>(j["resolution"], "resolution");
  if (j.contains("sanitize")) c.sanitization = sanitization_from_string(json_text(j["sanitize"], "sanitize"));
  if (j.contains("format")) c.format = json_text(j["format"], "format");
  if (j.contains("out")) c.out = json_text(j["out"], "out");
  if (j.contains("threads")) c.threads = json_integer<unsigned>(j["threads"], "threads");
  return c;
}

Json to_json(const ComparePauliConfig& c) {
  Json j;
  j["lambda-grid"] = grid_json(c.grid);
  j["lambda2"] = c.lambda2;
  j["n"] = c.ns;
  j["cost"] = enum_list_json(c.costs);
  j["resolution"] = c.resolution;
  j["sanitize"] = std::string(to_string(c.sanitization));
  j["format"] = c.format;
  return j;
}

void validate(const ComparePauliConfig& c) {
  check_format(c.format);
  if (c.ns.empty() || c.costs.empty()) throw ConfigError("compare-pauli: n and cost need values");
  for (int n : c.ns) {
    if (n <= 0 || n % 6 != 0) throw ConfigError("compare-pauli: N must be a positive multiple of 6");
  }
  if (c.lambda2 < 0.0 || c.lambda2 > 1.0) throw ConfigError("compare-pauli: lambda2 must lie in [0, 1]");
  if (c.resolution < 2) throw ConfigError("resolution must be at least 2");
  grid_points(c.grid, 2);
}

SimulateConfig simulate_config_from_json(const Json& doc) {
  const Json& j = config_body(doc);
  reject_unknown_keys(j,
                      {"channel", "protocol", "dim", "lambda", "n", "runs", "seed", "cost", "resolution", "sanitize",
                       "detail", "out", "format"},
                      "simulate");
  SimulateConfig c;
  if (j.contains("channel")) c.channel = channel_kind_from_string(json_text(j["channel"], "channel"));
  if (j.contains("protocol")) c.protocol = protocol_kind_from_string(json_text(j["protocol"], "protocol"));
  if (j.contains("dim")) c.dim = json_integer<int>(j["dim"], "dim");
  if (j.contains("lambda")) c.lambda = json_vector(j["lambda"], "lambda");
  if (j.contains("n")) {
    const auto ns = json_int_list(j["n"], "n");
    if (ns.size() != 1) throw ConfigError("simulate takes a single N");
    c.n = ns.front();
  }
  if (j.contains("runs")) c.runs = json_integer<std::size_t>(j["runs"], "runs");
  if (j.contains("seed")) c.seed = json_integer<std::uint64_t>(j["seed"], "seed");
  if (j.contains("cost")) c.costs = json_enum_list<CostKind>(j["cost"], "cost", cost_kind_from_string);
  if (j.contains("resolution")) c.resolution = json_integer<int>(j["resolution"], "resolution");
  if (j.contains("sanitize")) c.sanitization = sanitization_from_string(json_text(j["sanitize"], "sanitize"));
  if (j.contains("detail")) c.detail = json_bool(j["detail"], "detail");
  if (j.contains("out")) c.out = json_text(j["out"], "out");
  if (j.contains("format") && json_text(j["format"], "format") != "json") {
    throw ConfigError("simulate writes JSON only");
  }
  return c;
}

Json to_json(const SimulateConfig& c) {
  Json j;
  j["channel"] = std::string(to_string(c.channel));
  j["protocol"] = std::string(to_string(resolve_protocol(c.channel, c.protocol)));
  if (c.channel == ChannelKind::GeneralizedPauli) j["dim"] = c.dim;
  Json l = Json::array();
  for (Eigen::Index i = 0; i < c.lambda.size(); ++i) l.push_back(c.lambda(i));
  j["lambda"] = l;
  j["n"] = c.n;
  j["runs"] = c.runs;
  j["seed"] = c.seed;
  j["cost"] = enum_list_json(c.costs);
  j["resolution"] = c.resolution;
  j["sanitize"] = std::string(to_string(c.sanitization));
  j["detail"] = c.detail;
  return j;
}

void validate(const SimulateConfig& c) {
  const ProtocolKind kind = resolve_protocol(c.channel, c.protocol);
  if (c.runs == 0) throw ConfigError("simulate: runs must be at least 1");
  if (c.costs.empty()) throw ConfigError("simulate: cost needs a value");
  if (c.resolution < 2) throw ConfigError("resolution must be at least 2");
  const Eigen::Index arity = free_parameter_count(c.channel, c.dim);
  if (c.lambda.size() != arity) {
    throw ConfigError("simulate: " + std::string(to_string(c.channel)) + " takes " + std::to_string(arity) +
                      " lambda values, got " + std::to_string(c.lambda.size()));
  }
  const ChannelModel model = from_parameters(c.channel, c.lambda, c.dim);
  validate_range(model);
  const ProtocolSpec spec{kind, c.n, c.dim};
  validate_protocol(spec);
  check_compatible(model, spec);
  for (CostKind cost : c.costs) {
    if (cost == CostKind::Fidelity && !is_qubit_channel(model)) {
      throw ConfigError("simulate: fidelity cost needs a qubit channel");
    }
  }
}

// ---- sweep -----------------------------------------------------------------

std::vector<SweepRow> run_sweep(const SweepConfig& c) {
  validate(c);
  const ProtocolKind kind = resolve_protocol(c.channel, c.protocol);
  const auto points = grid_points(c.grid, free_parameter_count(c.channel, c.dim));
  const std::size_t per_point = c.costs.size() * c.methods.size();
  const std::size_t total = c.ns.size() * points.size() * per_point;

  AnalysisOptions opts;
  opts.resolution = c.resolution;
  opts.sanitization = c.sanitization;

  std::vector<SweepRow> rows(total);
  parallel_for(total, c.threads, [&](std::size_t idx) {
    const std::size_t ni = idx / (points.size() * per_point);
    const std::size_t pi = (idx / per_point) % points.size();
    const CostKind cost = c.costs[(idx / c.methods.size()) % c.costs.size()];
    const Method method = c.methods[idx % c.methods.size()];
    SweepRow& row = rows[idx];
    row.channel = c.channel;
    row.cost = cost;
    row.method = method;
    row.n = c.ns[ni];
    row.lambda = points[pi];
    const ChannelModel model = from_parameters(c.channel, row.lambda, c.dim);
    if (range_violation(model, 1e-12)) {
      row.status = "invalid-lambda";
      return;
    }
    try {
      row.report = mean_error(model, {kind, row.n, c.dim}, cost, method, c.runs, c.seed, opts);
      row.status = "ok";
    } catch (const UnsupportedMethod&) {
      row.status = "unsupported";
    } catch (const EnumerationTooLarge&) {
      row.status = "enumeration-limit";
    }
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, Eigen::Index lambda_count) {
  std::ostringstream os;
  os << join_csv(mean_error_csv_header(lambda_count)) << '\n';
  for (const auto& r : rows) {
    if (r.report) {
      os << join_csv(mean_error_csv_row(*r.report)) << '\n';
    } else {
      os << join_csv(mean_error_csv_error_row(r.channel, r.cost, r.method, r.n, r.lambda, r.status)) << '\n';
    }
  }
  return os.str();
}

Json sweep_json(const std::vector<SweepRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    Json j;
    if (r.report) {
      j = to_json(*r.report);
    } else {
      j["kind"] = std::string(to_string(r.channel));
      Json l = Json::array();
      for (Eigen::Index i = 0; i < r.lambda.size(); ++i) l.push_back(r.lambda(i));
      j["lambda"] = l;
      j["N"] = r.n;
      j["cost"] = std::string(to_string(r.cost));
      j["method"] = std::string(to_string(r.method));
    }
    j["status"] = r.status;
    a.push_back(j);
  }
  return a;
}

// ---- compare-pauli ---------------------------------------------------------

std::vector<ComparePauliRow> run_compare_pauli(const ComparePauliConfig& c) {
  validate(c);
  const auto points = grid_points(c.grid, 2);
  const std::size_t total = c.ns.size() * points.size();
  AnalysisOptions opts;
  opts.resolution = c.resolution;
  opts.sanitization = c.sanitization;
  const bool want_stat = std::find(c.costs.begin(), c.costs.end(), CostKind::Statistical) != c.costs.end();
  const bool want_fid = std::find(c.costs.begin(), c.costs.end(), CostKind::Fidelity) != c.costs.end();

  std::vector<ComparePauliRow> rows(total);
  parallel_for(total, c.threads, [&](std::size_t idx) {
    ComparePauliRow& row = rows[idx];
    row.n = c.ns[idx / points.size()];
    const Eigen::VectorXd& p = points[idx % points.size()];
    row.lambda = Eigen::Vector3d(p(0), c.lambda2, p(1));
    if (!in_range(PauliQubit{row.lambda}, 1e-12)) {
      row.status = "invalid-simplex";
      return;
    }
    if (want_stat) row.statistical = delta(row.lambda, row.n, CostKind::Statistical, opts);
    if (want_fid) row.fidelity = delta(row.lambda, row.n, CostKind::Fidelity, opts);
    row.status = "ok";
  });
  return rows;
}

std::string compare_pauli_csv(const std::vector<ComparePauliRow>& rows) {
  std::ostringstream os;
  os << "N,lambda1,lambda2,lambda3,cs_sep,cs_ent,delta_s,cf_sep,cf_ent,delta_f,status\n";
  for (const auto& r : rows) {
    os << join_csv({std::to_string(r.n), format_double(r.lambda(0)), format_double(r.lambda(1)),
                    format_double(r.lambda(2)), optional_field(r.statistical, &DeltaReport::separable),
                    optional_field(r.statistical, &DeltaReport::entangled),
                    optional_field(r.statistical, &DeltaReport::value),
                    optional_field(r.fidelity, &DeltaReport::separable),
                    optional_field(r.fidelity, &DeltaReport::entangled),
                    optional_field(r.fidelity, &DeltaReport::value), r.status})
       << '\n';
  }
  return os.str();
}

Json compare_pauli_json(const std::vector<ComparePauliRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["N"] = r.n;
    j["lambda"] = Json::array({r.lambda(0), r.lambda(1), r.lambda(2)});
    if (r.statistical) j["statistical"] = to_json(*r.statistical);
    if (r.fidelity) j["fidelity"] = to_json(*r.fidelity);
    j["status"] = r.status;
    a.push_back(j);
  }
  return a;
}

// ---- simulate --------------------------------------------------------------

Json run_simulate(const SimulateConfig& c) {
  validate(c);
  const ChannelModel model = from_parameters(c.channel, c.lambda, c.dim);
  const ProtocolSpec spec{resolve_protocol(c.channel, c.protocol), c.n, c.dim};
  const OutcomeDistribution dist = outcome_distribution(model, spec);
  const Eigen::VectorXd truth = parameters(model);

  std::optional<FidelityCost> fidelity;
  if (std::find(c.costs.begin(), c.costs.end(), CostKind::Fidelity) != c.costs.end()) {
    fidelity.emplace(model, SphereQuadrature(c.resolution));
  }
  std::map<std::vector<std::vector<int>>, double> fidelity_memo;

  struct Welford {
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    void add(double x) {
      ++count;
      const double d = x - mean;
      mean += d / static_cast<double>(count);
      m2 += d * (x - mean);
    }
    double std_error() const {
      return count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
    }
  };
  std::vector<Welford> stats(c.costs.size());
  std::size_t unphysical = 0;

  Json per_run = Json::array();
  for (std::size_t k = 0; k < c.runs; ++k) {
    const OutcomeCounts counts = sample_counts(dist, c.seed, k);
    const Estimate e = estimate(spec, counts);
    if (!e.physical) ++unphysical;
    Json costs;
    for (std::size_t ci = 0; ci < c.costs.size(); ++ci) {
      double x = 0.0;
      if (c.costs[ci] == CostKind::Statistical) {
        x = cost_statistical(truth, e.values);
      } else {
        auto it = fidelity_memo.find(counts.tallies);
        if (it == fidelity_memo.end()) {
          const double v = (*fidelity)(sanitize_estimate(c.channel, e.values, c.dim, c.sanitization));
          it = fidelity_memo.emplace(counts.tallies, v).first;
        }
        x = it->second;
      }
      stats[ci].add(x);
      costs[std::string(to_string(c.costs[ci]))] = x;
    }
    if (c.detail) {
      Json run;
      run["run"] = k;
      run["counts"] = to_json(counts);
      run["estimate"] = to_json(e).at("lambda");
      run["physical"] = e.physical;
      run["cost"] = costs;
      per_run.push_back(run);
    }
  }

  Json report;
  report["channel"] = channel_to_json(model);
  report["protocol"] = to_json(spec);
  report["runs"] = c.runs;
  report["seed"] = c.seed;
  if (fidelity) {
    report["resolution"] = c.resolution;
    report["sanitize"] = std::string(to_string(c.sanitization));
  }
  Json aggregate;
  for (std::size_t ci = 0; ci < c.costs.size(); ++ci) {
    aggregate[std::string(to_string(c.costs[ci]))] = {{"mean", stats[ci].mean}, {"std_error", stats[ci].std_error()}};
  }
  aggregate["unphysical_runs"] = unphysical;
  report["aggregate"] = aggregate;
  if (c.detail) report["per_run"] = per_run;
  return report;
}

// ---- output directories ----------------------------------------------------

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

void write_run_directory(const std::string& dir, const std::string& command, const Json& config,
                         std::uint64_t seed, const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Json outputs = Json::array();
  for (const auto& f : files) {
    std::ofstream os(fs::path(dir) / f.name, std::ios::binary);
    os << f.content;
    if (!os) throw std::runtime_error("cannot write " + (fs::path(dir) / f.name).string());
    outputs.push_back({{"file", f.name}, {"sha256", sha256_hex(f.content)}, {"bytes", f.content.size()}});
  }
  Json m;
  m["manifest_version"] = 1;
  m["tool"] = "chanest";
  m["version"] = CHANEST_VERSION;
  m["command"] = command;
  m["config"] = config;
  m["timestamp"] = utc_timestamp();
  m["seed"] = seed;
  m["outputs"] = outputs;
  std::ofstream os(fs::path(dir) / "manifest.json", std::ios::binary);
  os << m.dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write manifest in " + dir);
}

}  // namespace chanest
