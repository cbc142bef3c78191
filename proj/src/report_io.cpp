#include "chanest/report_io.hpp"

#include <iomanip>
#include <limits>
#include <sstream>

#include "chanest/errors.hpp"

namespace chanest {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const Json& j, Eigen::Index expected, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expected) {
    throw ConfigError(std::string(what) + ": expected an array of " + std::to_string(expected) + " numbers");
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    const Json& x = j[static_cast<std::size_t>(i)];
    if (!x.is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
    v(i) = x.get<double>();
  }
  return v;
}

}  // namespace

Json channel_to_json(const ChannelModel& c) {
  Json j;
  j["kind"] = std::string(to_string(kind_of(c)));
  const Eigen::VectorXd p = parameters(c);
  switch (kind_of(c)) {
    case ChannelKind::Depolarizing:
    case ChannelKind::PhaseDamping:
    case ChannelKind::AmplitudeDamping:
      j["lambda"] = p(0);
      break;
    case ChannelKind::PauliQubit:
    case ChannelKind::GeneralAffine:
      j["lambda"] = vector_json(p);
      break;
    case ChannelKind::GeneralizedPauli: {
      const auto& g = std::get<GeneralizedPauli>(c);
      j["dim"] = g.dim();
      Json rows = Json::array();
      for (int a = 0; a < g.dim(); ++a) rows.push_back(vector_json(g.lambda.row(a).transpose()));
      j["lambda"] = rows;
      break;
    }
  }
  return j;
}

ChannelModel channel_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("lambda")) {
    throw ConfigError("channel document needs \"kind\" and \"lambda\"");
  }
  const ChannelKind kind = channel_kind_from_string(j.at("kind").get<std::string>());
  const Json& l = j.at("lambda");
  switch (kind) {
    case ChannelKind::Depolarizing:
    case ChannelKind::PhaseDamping:
    case ChannelKind::AmplitudeDamping: {
      if (!l.is_number()) throw ConfigError("one-parameter channel: \"lambda\" must be a number");
      ChannelModel c = from_parameters(kind, Eigen::VectorXd::Constant(1, l.get<double>()));
      validate_range(c);
      return c;
    }
    case ChannelKind::PauliQubit:
      return make_pauli(vector_from_json(l, 3, "pauli lambda"));
    case ChannelKind::GeneralAffine:
      return make_general_affine(vector_from_json(l, 12, "general lambda"));
    case ChannelKind::GeneralizedPauli: {
      if (!l.is_array() || l.empty()) throw ConfigError("generalized-pauli: \"lambda\" must be DxD rows");
      const auto d = static_cast<Eigen::Index>(l.size());
      if (j.contains("dim") && j.at("dim").get<Eigen::Index>() != d) {
        throw ConfigError("generalized-pauli: \"dim\" does not match lambda");
      }
      Eigen::MatrixXd m(d, d);
      for (Eigen::Index a = 0; a < d; ++a) {
        m.row(a) = vector_from_json(l[static_cast<std::size_t>(a)], d, "generalized-pauli row").transpose();
      }
      return make_generalized_pauli(m);
    }
  }
  throw ConfigError("channel_from_json: unknown kind");
}

Json to_json(const ProtocolSpec& p) {
  Json j;
  j["kind"] = std::string(to_string(p.kind));
  j["N"] = p.n;
  if (p.kind == ProtocolKind::QuditPauliEntangled) j["dim"] = p.dim;
  return j;
}

Json to_json(const OutcomeCounts& counts) { return Json(counts.tallies); }

Json to_json(const Estimate& e) {
  Json j;
  j["lambda"] = vector_json(e.values);
  j["physical"] = e.physical;
  return j;
}

Json to_json(const MeanErrorReport& r) {
  Json j;
  j["kind"] = std::string(to_string(r.channel));
  j["protocol"] = std::string(to_string(r.protocol));
  j["lambda"] = vector_json(r.lambda);
  j["N"] = r.n;
  if (r.protocol == ProtocolKind::QuditPauliEntangled) j["dim"] = r.dim;
  j["cost"] = std::string(to_string(r.cost));
  j["method"] = std::string(to_string(r.method));
  j["value"] = r.value;
  j["std_error"] = r.std_error;
  if (r.resolution) j["resolution"] = *r.resolution;
  if (r.sanitization) j["sanitization"] = std::string(to_string(*r.sanitization));
  if (r.method == Method::MonteCarlo) {
    j["runs"] = r.runs;
    j["seed"] = r.seed;
  }
  return j;
}

Json to_json(const DeltaReport& r) {
  Json j;
  j["lambda"] = vector_json(r.lambda);
  j["N"] = r.n;
  j["cost"] = std::string(to_string(r.cost));
  j["method"] = std::string(to_string(r.method));
  j["separable"] = r.separable;
  j["entangled"] = r.entangled;
  j["delta"] = r.value;
  if (r.resolution) j["resolution"] = *r.resolution;
  return j;
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

std::vector<std::string> mean_error_csv_header(Eigen::Index lambda_count) {
  std::vector<std::string> h{"kind", "cost", "method", "N"};
  if (lambda_count == 1) {
    h.emplace_back("lambda");
  } else {
    for (Eigen::Index i = 1; i <= lambda_count; ++i) h.push_back("lambda" + std::to_string(i));
  }
  h.insert(h.end(), {"value", "std_error", "status"});
  return h;
}

std::vector<std::string> mean_error_csv_error_row(ChannelKind kind, CostKind cost, Method method, int n,
                                                  const Eigen::VectorXd& lambda, const std::string& status) {
  std::vector<std::string> row{std::string(to_string(kind)), std::string(to_string(cost)),
                               std::string(to_string(method)), std::to_string(n)};
  for (Eigen::Index i = 0; i < lambda.size(); ++i) row.push_back(format_double(lambda(i)));
  row.insert(row.end(), {"", "", status});
  return row;
}

std::vector<std::string> mean_error_csv_row(const MeanErrorReport& r) {
  auto row = mean_error_csv_error_row(r.channel, r.cost, r.method, r.n, r.lambda, "ok");
  row[row.size() - 3] = format_double(r.value);
  row[row.size() - 2] = format_double(r.std_error);
  return row;
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace chanest
