#include "chanest/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <string>

#include "chanest/errors.hpp"

namespace chanest {

namespace {

double binomial_pmf(int n, int i, double p) {
  if (p <= 0.0) return i == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return i == n ? 1.0 : 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                  (n - i) * std::log1p(-p));
}

void require_qubit_fidelity(const ChannelModel& c) {
  if (!is_qubit_channel(c)) {
    throw UnsupportedMethod("fidelity cost is defined for qubit channels only");
  }
}

MeanErrorReport base_report(const ChannelModel& c, const ProtocolSpec& p, CostKind cost, Method m,
                            const AnalysisOptions& opts) {
  MeanErrorReport r;
  r.channel = kind_of(c);
  r.protocol = p.kind;
  r.lambda = parameters(c);
  r.n = p.n;
  r.dim = p.dim;
  r.cost = cost;
  r.method = m;
  if (cost == CostKind::Fidelity) {
    r.resolution = opts.resolution;
    r.sanitization = opts.sanitization;
  }
  return r;
}

void prepare(const ChannelModel& c, const ProtocolSpec& p) {
  validate_protocol(p);
  check_compatible(c, p);
  validate_range(c);
}

/// Cost of one run given its raw estimate.
std::function<double(const Estimate&)> run_cost_fn(const ChannelModel& c, const ProtocolSpec& p, CostKind cost,
                                                   const AnalysisOptions& opts) {
  const Eigen::VectorXd truth = parameters(c);
  if (cost == CostKind::Statistical) {
    return [truth](const Estimate& e) { return cost_statistical(truth, e.values); };
  }
  require_qubit_fidelity(c);
  auto fc = std::make_shared<FidelityCost>(c, SphereQuadrature(opts.resolution));
  const ChannelKind kind = kind_of(c);
  const int dim = p.dim;
  const Sanitization s = opts.sanitization;
  return [fc, kind, dim, s](const Estimate& e) { return (*fc)(sanitize_estimate(kind, e.values, dim, s)); };
}

}  // namespace

std::string_view to_string(CostKind c) { return c == CostKind::Statistical ? "stat" : "fid"; }

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed";
    case Method::Enumeration: return "enum";
    case Method::MonteCarlo: return "mc";
  }
  return "unknown";
}

std::string_view to_string(Sanitization s) { return s == Sanitization::Clamp ? "clamp" : "project"; }

CostKind cost_kind_from_string(std::string_view s) {
  if (s == "stat" || s == "statistical") return CostKind::Statistical;
  if (s == "fid" || s == "fidelity") return CostKind::Fidelity;
  throw ConfigError("unknown cost kind '" + std::string(s) + "'");
}

Method method_from_string(std::string_view s) {
  if (s == "closed") return Method::ClosedForm;
  if (s == "enum") return Method::Enumeration;
  if (s == "mc") return Method::MonteCarlo;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

Sanitization sanitization_from_string(std::string_view s) {
  if (s == "clamp") return Sanitization::Clamp;
  if (s == "project") return Sanitization::Project;
  throw ConfigError("unknown sanitization '" + std::string(s) + "'");
}

double cost_statistical(const Eigen::VectorXd& lambda, const Eigen::VectorXd& estimate) {
  if (lambda.size() != estimate.size()) throw DimensionMismatch("cost_statistical: arity mismatch");
  return (lambda - estimate).squaredNorm();
}

double channel_overlap(const ChannelModel& c1, const ChannelModel& c2, const SphereQuadrature& q) {
  require_qubit_fidelity(c1);
  require_qubit_fidelity(c2);
  const AffineMap a = to_affine(c1);
  const AffineMap b = to_affine(c2);
  return q.integrate([&](const Eigen::Vector3d& n) { return fidelity_bloch<double>(a(n), b(n)); });
}

double cost_fidelity(const ChannelModel& truth, const ChannelModel& est, const SphereQuadrature& q) {
  if (kind_of(truth) != kind_of(est)) throw ConfigError("cost_fidelity: channel families differ");
  return FidelityCost(truth, q)(est);
}

std::optional<double> overlap_closed_form(const ChannelModel& truth, const ChannelModel& est) {
  if (kind_of(truth) != kind_of(est)) throw ConfigError("overlap_closed_form: channel families differ");
  const Eigen::VectorXd a = parameters(truth);
  const Eigen::VectorXd b = parameters(est);
  if (a.size() != 1) return std::nullopt;
  const double l = a(0);
  const double e = b(0);
  const double cross = std::sqrt(std::max(0.0, l * (1.0 - l) * e * (1.0 - e)));
  switch (kind_of(truth)) {
    case ChannelKind::Depolarizing: {
      const double r = std::sqrt(std::max(0.0, l * e)) + std::sqrt(std::max(0.0, (1.0 - l) * (1.0 - e)));
      return r * r;
    }
    case ChannelKind::PhaseDamping:
      return 1.0 - 2.0 / 3.0 * l - 2.0 / 3.0 * e + 4.0 / 3.0 * l * e + 4.0 / 3.0 * cross;
    case ChannelKind::AmplitudeDamping:
      return (4.0 + 2.0 * std::sqrt(std::max(0.0, (1.0 - l) * (1.0 - e))) - l - e + 4.0 * l * e + 4.0 * cross) / 6.0;
    default:
      return std::nullopt;
  }
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

ChannelModel sanitize_estimate(ChannelKind kind, const Eigen::VectorXd& raw, int dim, Sanitization s) {
  if (s == Sanitization::Clamp) return from_parameters(kind, raw, dim);
  switch (kind) {
    case ChannelKind::Depolarizing:
    case ChannelKind::PhaseDamping:
      return from_parameters(kind, raw.cwiseMax(0.0).cwiseMin(0.5), dim);
    case ChannelKind::AmplitudeDamping:
    case ChannelKind::GeneralAffine:
      return from_parameters(kind, raw.cwiseMax(0.0).cwiseMin(1.0), dim);
    case ChannelKind::PauliQubit:
    case ChannelKind::GeneralizedPauli: {
      Eigen::VectorXd full(raw.size() + 1);
      full << 1.0 - raw.sum(), raw;
      const Eigen::VectorXd proj = project_to_simplex(full);
      return from_parameters(kind, proj.tail(raw.size()), dim);
    }
  }
  throw ConfigError("sanitize_estimate: unknown kind");
}

FidelityCost::FidelityCost(const ChannelModel& truth, const SphereQuadrature& q)
    : truth_(truth), quadrature_(q) {
  require_qubit_fidelity(truth);
  const AffineMap a = to_affine(truth);
  images_.reserve(q.size());
  deficits_.reserve(q.size());
  for (const auto& node : q.nodes()) {
    images_.push_back(a(node.n));
    deficits_.push_back(purity_deficit<double>(images_.back()));
  }
}

double FidelityCost::operator()(const ChannelModel& est) const {
  if (kind_of(est) != kind_of(truth_)) throw ConfigError("fidelity cost: channel families differ");
  if (parameters(est) == parameters(truth_)) return 0.0;
  const AffineMap b = to_affine(est);
  const auto& nodes = quadrature_.nodes();
  CompensatedSum sum;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const BlochVector t = b(nodes[k].n);
    const double mixed = std::sqrt(deficits_[k] * purity_deficit<double>(t));
    const double f = std::clamp(0.5 * (1.0 + images_[k].dot(t) + mixed), 0.0, 1.0);
    sum.add(nodes[k].weight * f);
  }
  return std::max(0.0, 1.0 - sum.value());
}

MeanErrorReport mean_error_closed(const ChannelModel& c, const ProtocolSpec& p, CostKind cost) {
  prepare(c, p);
  if (cost != CostKind::Statistical) {
    throw UnsupportedMethod("no closed form for the mean fidelity error; use enumeration or Monte Carlo");
  }
  MeanErrorReport r = base_report(c, p, cost, Method::ClosedForm, {});
  const Eigen::VectorXd l = parameters(c);
  const double n = p.n;
  switch (p.kind) {
    case ProtocolKind::DepolarizingSingle:
    case ProtocolKind::PhaseSingle:
    case ProtocolKind::AmplitudeSingle:
      r.value = l(0) * (1.0 - l(0)) / n;
      break;
    case ProtocolKind::General12:
      r.value = 12.0 / n * (l.array() * (1.0 - l.array())).sum();
      break;
    case ProtocolKind::PauliSeparable:
      r.value = 9.0 / (2.0 * n) *
                (l(0) * (1.0 - l(0) - l(1)) + l(1) * (1.0 - l(1) - l(2)) + l(2) * (1.0 - l(2) - l(0)));
      break;
    case ProtocolKind::PauliEntangled:
    case ProtocolKind::QuditPauliEntangled:
      r.value = 2.0 / n * (l.array() * (1.0 - l.array())).sum();
      break;
  }
  r.value = std::max(0.0, r.value);
  return r;
}

MeanErrorReport mean_error_enumerated(const ChannelModel& c, const ProtocolSpec& p, CostKind cost,
                                      const AnalysisOptions& opts) {
  prepare(c, p);
  check_enumerable(p, opts.limits);
  MeanErrorReport r = base_report(c, p, cost, Method::Enumeration, opts);
  const auto run_cost = run_cost_fn(c, p, cost, opts);
  const OutcomeDistribution dist = outcome_distribution(c, p);
  r.value = std::max(0.0, expectation(dist, [&](const OutcomeCounts& counts) { return run_cost(estimate_unchecked(p, counts)); }));
  return r;
}

MeanErrorReport mean_error_montecarlo(const ChannelModel& c, const ProtocolSpec& p, CostKind cost, std::size_t runs,
                                      std::uint64_t seed, const AnalysisOptions& opts) {
  prepare(c, p);
  if (runs == 0) throw ConfigError("Monte Carlo needs at least one run");
  MeanErrorReport r = base_report(c, p, cost, Method::MonteCarlo, opts);
  r.runs = runs;
  r.seed = seed;
  const auto run_cost = run_cost_fn(c, p, cost, opts);
  const OutcomeDistribution dist = outcome_distribution(c, p);
  std::map<std::vector<std::vector<int>>, double> memo;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < runs; ++k) {
    const OutcomeCounts counts = sample_counts(dist, seed, k);
    double x = 0.0;
    if (cost == CostKind::Fidelity) {
      auto it = memo.find(counts.tallies);
      if (it == memo.end()) it = memo.emplace(counts.tallies, run_cost(estimate_unchecked(p, counts))).first;
      x = it->second;
    } else {
      x = run_cost(estimate_unchecked(p, counts));
    }
    const double delta = x - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (x - mean);
  }
  r.value = mean;
  r.std_error = runs > 1 ? std::sqrt(m2 / static_cast<double>(runs - 1) / static_cast<double>(runs)) : 0.0;
  return r;
}

MeanErrorReport mean_error(const ChannelModel& c, const ProtocolSpec& p, CostKind cost, Method method,
                           std::size_t runs, std::uint64_t seed, const AnalysisOptions& opts) {
  switch (method) {
    case Method::ClosedForm: return mean_error_closed(c, p, cost);
    case Method::Enumeration: return mean_error_enumerated(c, p, cost, opts);
    case Method::MonteCarlo: return mean_error_montecarlo(c, p, cost, runs, seed, opts);
  }
  throw ConfigError("mean_error: unknown method");
}

Eigen::VectorXd estimator_expectation(const ChannelModel& c, const ProtocolSpec& p, const EnumerationLimits& limits) {
  prepare(c, p);
  check_enumerable(p, limits);
  const OutcomeDistribution dist = outcome_distribution(c, p);
  const Eigen::Index size = parameters(c).size();
  return expectation(
      dist, [&](const OutcomeCounts& counts) { return estimate_unchecked(p, counts).values; }, size);
}

double frequency_estimator_error(const Eigen::VectorXd& lambda, int trials) {
  if (trials <= 0) throw ConfigError("frequency_estimator_error: trials must be positive");
  return (lambda.array() * (1.0 - lambda.array())).sum() / trials;
}

double delta_statistical_closed(const Eigen::Vector3d& l, int n) {
  const double s = l.sum();
  return (5.0 * (1.0 - s) * s + l(0) * l(1) + l(1) * l(2) + l(2) * l(0)) / (2.0 * n);
}

DeltaReport delta(const Eigen::Vector3d& lambda, int n, CostKind cost, const AnalysisOptions& opts) {
  if (n <= 0 || n % 6 != 0) throw ConfigError("delta: N must be a positive multiple of 6");
  const ChannelModel c = make_pauli(lambda);
  const ProtocolSpec sep{ProtocolKind::PauliSeparable, n, 2};
  const ProtocolSpec ent{ProtocolKind::PauliEntangled, n, 2};
  DeltaReport d;
  d.lambda = lambda;
  d.n = n;
  d.cost = cost;
  if (cost == CostKind::Statistical) {
    d.method = Method::ClosedForm;
    d.separable = mean_error_closed(c, sep, cost).value;
    d.entangled = mean_error_closed(c, ent, cost).value;
  } else {
    d.method = Method::Enumeration;
    d.resolution = opts.resolution;
    d.separable = mean_error_enumerated(c, sep, cost, opts).value;
    d.entangled = mean_error_enumerated(c, ent, cost, opts).value;
  }
  d.value = d.separable - d.entangled;
  return d;
}

double fidelity_mean_error_simplified(ChannelKind kind, double l, int n) {
  if (n <= 0) throw ConfigError("fidelity_mean_error_simplified: N must be positive");
  const double nn = n;
  CompensatedSum a;
  CompensatedSum b;
  for (int i = 0; i <= n; ++i) {
    const double w = binomial_pmf(n, i, l);
    switch (kind) {
      case ChannelKind::Depolarizing: {
        const double r = std::sqrt(l * i) + std::sqrt((1.0 - l) * (n - i));
        a.add(w * r * r);
        break;
      }
      case ChannelKind::PhaseDamping:
        a.add(w * std::sqrt(l * (1.0 - l) * i * (n - i)));
        break;
      case ChannelKind::AmplitudeDamping:
        // The first sum runs over the mirrored weights lambda^(N-i) (1-lambda)^i.
        a.add(binomial_pmf(n, i, 1.0 - l) * std::sqrt(static_cast<double>(i)));
        b.add(w * std::sqrt(static_cast<double>(i) * (n - i)));
        break;
      default:
        throw ConfigError("fidelity_mean_error_simplified: one-parameter families only");
    }
  }
  switch (kind) {
    case ChannelKind::Depolarizing: return 1.0 - a.value() / nn;
    case ChannelKind::PhaseDamping: return 4.0 / 3.0 * (l * (1.0 - l) - a.value() / nn);
    default:
      return (1.0 + l * (1.0 - 2.0 * l) - std::sqrt((1.0 - l) / nn) * a.value() -
              2.0 / nn * std::sqrt(l * (1.0 - l)) * b.value()) /
             3.0;
  }
}

}  // namespace chanest
