#include "chanest/validation.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>

#include "chanest/analysis.hpp"
#include "chanest/errors.hpp"
#include "chanest/report_io.hpp"

namespace chanest {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

/// Tracks the largest deviation seen and the case that produced it.
class Worst {
 public:
  explicit Worst(double tol) : tol_(tol) {}
  void observe(double deviation, const std::string& where) {
    if (!(deviation <= max_)) {  // also catches NaN
      max_ = deviation;
      where_ = where;
    }
  }
  Outcome outcome() const {
    std::ostringstream os;
    os << "max deviation " << format_double(max_) << " (tol " << tol_ << ")";
    if (!where_.empty()) os << " at " << where_;
    return {max_ <= tol_, os.str()};
  }

 private:
  double tol_;
  double max_ = 0.0;
  std::string where_;
};

BlochVector random_bloch(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  BlochVector s(g(rng), g(rng), g(rng));
  return s.normalized() * std::cbrt(u(rng));
}

Eigen::VectorXd random_simplex(std::mt19937_64& rng, Eigen::Index k) {
  std::exponential_distribution<double> e;
  Eigen::VectorXd w(k + 1);
  for (Eigen::Index i = 0; i <= k; ++i) w(i) = e(rng);
  w /= w.sum();
  return w.tail(k);
}

std::vector<ChannelModel> random_models(std::mt19937_64& rng, int per_family) {
  std::uniform_real_distribution<double> u;
  std::vector<ChannelModel> out;
  for (int i = 0; i < per_family; ++i) {
    out.push_back(make_depolarizing(0.5 * u(rng)));
    out.push_back(make_phase_damping(0.5 * u(rng)));
    out.push_back(make_amplitude_damping(u(rng)));
    out.push_back(make_pauli(random_simplex(rng, 3)));
    Vector12d g;
    for (int k = 0; k < 12; ++k) g(k) = u(rng);
    out.push_back(make_general_affine(g));
  }
  return out;
}

std::string describe(const ChannelModel& c) { return channel_to_json(c).dump(); }

Outcome check_bloch_density_roundtrip() {
  std::mt19937_64 rng(11);
  Worst w(1e-13);
  for (int i = 0; i < 500; ++i) {
    const BlochVector s = random_bloch(rng);
    w.observe((density_to_bloch(bloch_to_density(s)) - s).norm(), "random state");
  }
  return w.outcome();
}

Outcome check_fidelity_forms() {
  std::mt19937_64 rng(12);
  Worst w(1e-10);
  for (int i = 0; i < 500; ++i) {
    const BlochVector a = random_bloch(rng);
    const BlochVector b = i % 5 == 0 ? BlochVector(a.normalized()) : random_bloch(rng);
    const double f1 = fidelity_bloch(a, b);
    const double f2 = fidelity_density(bloch_to_density(a), bloch_to_density(b));
    w.observe(std::abs(f1 - f2), "random pair");
  }
  return w.outcome();
}

Outcome check_quadrature_moments(int resolution) {
  const SphereQuadrature q(resolution);
  Worst w(1e-12);
  w.observe(std::abs(q.integrate([](const Eigen::Vector3d&) { return 1.0; }) - 1.0), "constant");
  for (int k = 0; k < 3; ++k) {
    w.observe(std::abs(q.integrate([k](const Eigen::Vector3d& n) { return n(k) * n(k); }) - 1.0 / 3.0),
              "second moment " + std::to_string(k));
    w.observe(std::abs(q.integrate([k](const Eigen::Vector3d& n) { return n(k); })), "first moment");
  }
  w.observe(std::abs(q.integrate([](const Eigen::Vector3d& n) { return n(0) * n(1); })), "cross moment");
  return w.outcome();
}

/// The affine map must reproduce the General12 outcome law: probe m, axis k
/// gives +e_k with probability lambda_{3m+k}.
Outcome check_affine_parametrization(bool inject_fault) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u;
  const auto layout = qubit_branch_layout(ProtocolKind::General12);
  Worst w(1e-13);
  for (int i = 0; i < 200; ++i) {
    Vector12d l;
    for (int k = 0; k < 12; ++k) l(k) = u(rng);
    AffineMap a = params_to_affine(l);
    if (inject_fault) a.M(0, 2) += 1e-3;
    for (int j = 0; j < 12; ++j) {
      const double p = 0.5 * (1.0 + layout[j].tallied.dot(a(layout[j].probe)));
      w.observe(std::abs(p - l(j)), "branch " + std::to_string(j));
    }
    w.observe((affine_to_params(a) - l).cwiseAbs().maxCoeff(), "inverse map");
  }
  return w.outcome();
}

Outcome check_bloch_vs_operator_sum() {
  std::mt19937_64 rng(14);
  Worst w(1e-12);
  for (const auto& c : random_models(rng, 20)) {
    for (int i = 0; i < 10; ++i) {
      const BlochVector s = random_bloch(rng);
      const BlochVector direct = apply_channel(c, s);
      const BlochVector via_rho = density_to_bloch(apply_channel_density(c, bloch_to_density(s)));
      w.observe((direct - via_rho).norm(), describe(c));
    }
  }
  return w.outcome();
}

Outcome check_cp_in_range() {
  std::mt19937_64 rng(15);
  auto models = random_models(rng, 30);
  for (double l : {0.0, 0.5}) {
    models.push_back(make_depolarizing(l));
    models.push_back(make_phase_damping(l));
  }
  models.push_back(make_amplitude_damping(1.0));
  models.push_back(make_pauli(Eigen::Vector3d(1, 0, 0)));
  models.push_back(make_pauli(Eigen::Vector3d::Zero()));
  models.push_back(make_generalized_pauli(Eigen::MatrixXd::Constant(3, 3, 1.0 / 9.0)));
  for (const auto& c : models) {
    if (kind_of(c) == ChannelKind::GeneralAffine) continue;  // in-range does not imply CP for this family
    const double e = min_choi_eigenvalue(to_choi(c));
    if (e < -1e-10) return {false, "negative Choi eigenvalue " + format_double(e) + " for " + describe(c)};
  }
  return {true, std::to_string(models.size()) + " models"};
}

Outcome check_transpose_rejected() {
  AffineMap t;
  t.M = Eigen::Vector3d(1, -1, 1).asDiagonal();
  const double e = min_choi_eigenvalue(to_choi(t));
  return {!is_completely_positive(t), "min Choi eigenvalue " + format_double(e)};
}

Outcome check_closed_vs_enumerated() {
  Worst w(1e-12);
  for (ChannelKind kind : {ChannelKind::Depolarizing, ChannelKind::PhaseDamping, ChannelKind::AmplitudeDamping}) {
    const double max = kind == ChannelKind::AmplitudeDamping ? 1.0 : 0.5;
    for (int n = 1; n <= 30; ++n) {
      for (int k = 0; 0.05 * k <= max + 1e-12; ++k) {
        const ChannelModel c = from_parameters(kind, Eigen::VectorXd::Constant(1, 0.05 * k));
        const ProtocolSpec p{default_protocol(kind), n, 2};
        w.observe(std::abs(mean_error_enumerated(c, p, CostKind::Statistical).value -
                           mean_error_closed(c, p, CostKind::Statistical).value),
                  describe(c) + " N=" + std::to_string(n));
      }
    }
  }
  std::mt19937_64 rng(16);
  for (int i = 0; i < 6; ++i) {
    const ChannelModel c = make_pauli(random_simplex(rng, 3));
    for (int n : {6, 12}) {
      for (ProtocolKind k : {ProtocolKind::PauliSeparable, ProtocolKind::PauliEntangled}) {
        w.observe(std::abs(mean_error_enumerated(c, {k, n, 2}, CostKind::Statistical).value -
                           mean_error_closed(c, {k, n, 2}, CostKind::Statistical).value),
                  describe(c) + " " + std::string(to_string(k)));
      }
    }
  }
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 3; ++i) {
    Vector12d l;
    for (int k = 0; k < 12; ++k) l(k) = u(rng);
    const ChannelModel c = make_general_affine(l);
    const ProtocolSpec p{ProtocolKind::General12, 12, 2};
    w.observe(std::abs(mean_error_enumerated(c, p, CostKind::Statistical).value -
                       mean_error_closed(c, p, CostKind::Statistical).value),
              describe(c));
  }
  return w.outcome();
}

Outcome check_fidelity_simplified(int resolution) {
  Worst w(1e-10);
  AnalysisOptions opts;
  opts.resolution = resolution;
  for (ChannelKind kind : {ChannelKind::Depolarizing, ChannelKind::PhaseDamping, ChannelKind::AmplitudeDamping}) {
    const double max = kind == ChannelKind::AmplitudeDamping ? 1.0 : 0.5;
    for (int n = 1; n <= 20; ++n) {
      for (int k = 0; 0.1 * k <= max + 1e-12; ++k) {
        const double l = 0.1 * k;
        const ChannelModel c = from_parameters(kind, Eigen::VectorXd::Constant(1, l));
        const double enumerated = mean_error_enumerated(c, {default_protocol(kind), n, 2}, CostKind::Fidelity, opts).value;
        w.observe(std::abs(enumerated - fidelity_mean_error_simplified(kind, l, n)),
                  describe(c) + " N=" + std::to_string(n));
      }
    }
  }
  return w.outcome();
}

Outcome check_delta_statistical() {
  Worst w(1e-12);
  for (int n : {6, 12, 30}) {
    for (int a = 0; a <= 20; ++a) {
      for (int b = 0; a + b <= 20; ++b) {
        for (int c = 0; a + b + c <= 20; ++c) {
          const Eigen::Vector3d l(0.05 * a, 0.05 * b, 0.05 * c);
          const DeltaReport d = delta(l, n, CostKind::Statistical);
          const double closed = delta_statistical_closed(l, n);
          w.observe(std::abs(d.value - closed), "N=" + std::to_string(n));
          if (closed < 0.0) return {false, "negative closed-form delta at N=" + std::to_string(n)};
        }
      }
    }
  }
  return w.outcome();
}

Outcome check_bell_bases() {
  Worst w(1e-12);
  for (int d = 2; d <= 5; ++d) {
    const auto basis = bell_basis(d);
    Eigen::MatrixXcd b(d * d, d * d);
    for (int k = 0; k < d * d; ++k) b.col(k) = basis[static_cast<std::size_t>(k)];
    w.observe((b.adjoint() * b - Eigen::MatrixXcd::Identity(d * d, d * d)).cwiseAbs().maxCoeff(),
              "D=" + std::to_string(d));
  }
  return w.outcome();
}

Outcome check_generalized_pauli_reduction() {
  std::mt19937_64 rng(17);
  Worst w(1e-12);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d l = random_simplex(rng, 3);
    Eigen::MatrixXd m(2, 2);
    m << 1.0 - l.sum(), l(0), l(2), l(1);  // (0,1) = X, (1,0) = Z, (1,1) ~ Y
    const GeneralizedPauli g{m};
    const BlochVector s = random_bloch(rng);
    const DensityMatrix2 rho = bloch_to_density(s);
    const Eigen::MatrixXcd out = apply_generalized_pauli(g, rho);
    w.observe((out - apply_channel_density(make_pauli(l), rho)).cwiseAbs().maxCoeff(), "random state");
  }
  return w.outcome();
}

Outcome check_unbiased() {
  std::mt19937_64 rng(18);
  Worst w(1e-12);
  for (ChannelKind kind : {ChannelKind::Depolarizing, ChannelKind::PhaseDamping, ChannelKind::AmplitudeDamping}) {
    const ChannelModel c = from_parameters(kind, Eigen::VectorXd::Constant(1, 0.37 * (kind == ChannelKind::AmplitudeDamping ? 2.0 : 1.0)));
    w.observe((estimator_expectation(c, {default_protocol(kind), 17, 2}) - parameters(c)).cwiseAbs().maxCoeff(),
              describe(c));
  }
  const ChannelModel pauli = make_pauli(random_simplex(rng, 3));
  for (ProtocolKind k : {ProtocolKind::PauliSeparable, ProtocolKind::PauliEntangled}) {
    w.observe((estimator_expectation(pauli, {k, 12, 2}) - parameters(pauli)).cwiseAbs().maxCoeff(),
              std::string(to_string(k)));
  }
  std::uniform_real_distribution<double> u;
  Vector12d l;
  for (int k = 0; k < 12; ++k) l(k) = u(rng);
  const ChannelModel g = make_general_affine(l);
  w.observe((estimator_expectation(g, {ProtocolKind::General12, 12, 2}) - l).cwiseAbs().maxCoeff(), "general");
  return w.outcome();
}

Outcome check_probes() {
  std::vector<Eigen::MatrixXcd> paulis;
  paulis.push_back(Eigen::Matrix2cd::Identity());
  paulis.push_back(pauli::x<double>());
  paulis.push_back(pauli::y<double>());
  paulis.push_back(pauli::z<double>());
  const ProbeAdmissibility bell = check_probe_admissibility(paulis, qubit_bell_outcomes()[1]);
  Eigen::VectorXcd single(2);
  single << 1.0, 0.0;
  const ProbeAdmissibility lone = check_probe_admissibility(paulis, single);
  const bool ok = bell.orthonormal && bell.dimension_bound && !lone.dimension_bound;
  return {ok, "Bell probe deviation " + format_double(bell.max_deviation)};
}

}  // namespace

bool ValidationReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

ValidationReport run_validation(const ValidationOptions& opts) {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> suite{
      {"bloch-density-roundtrip", check_bloch_density_roundtrip},
      {"fidelity-bloch-vs-density", check_fidelity_forms},
      {"quadrature-moments", [&] { return check_quadrature_moments(opts.resolution); }},
      {"affine-parametrization", [&] { return check_affine_parametrization(opts.inject_affine_fault); }},
      {"bloch-vs-operator-sum", check_bloch_vs_operator_sum},
      {"choi-positivity-in-range", check_cp_in_range},
      {"choi-transpose-rejected", check_transpose_rejected},
      {"statistical-closed-vs-enumerated", check_closed_vs_enumerated},
      {"fidelity-simplified-vs-definitional", [&] { return check_fidelity_simplified(opts.resolution); }},
      {"pauli-delta-statistical", check_delta_statistical},
      {"bell-bases-orthonormal", check_bell_bases},
      {"generalized-pauli-qubit-reduction", check_generalized_pauli_reduction},
      {"estimators-unbiased", check_unbiased},
      {"probe-admissibility", check_probes},
  };
  ValidationReport report;
  const auto start = Clock::now();
  for (const auto& [name, fn] : suite) {
    const auto t0 = Clock::now();
    ValidationCheck check;
    check.name = name;
    try {
      const Outcome o = fn();
      check.passed = o.passed;
      check.detail = o.detail;
    } catch (const std::exception& e) {
      check.passed = false;
      check.detail = std::string("threw: ") + e.what();
    }
    check.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    report.checks.push_back(std::move(check));
  }
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace chanest
