#include "chanest/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "chanest/errors.hpp"

namespace chanest {

namespace {

constexpr ProtocolKind kAllProtocols[] = {
    ProtocolKind::DepolarizingSingle, ProtocolKind::PhaseSingle,    ProtocolKind::AmplitudeSingle,
    ProtocolKind::General12,          ProtocolKind::PauliSeparable, ProtocolKind::PauliEntangled,
    ProtocolKind::QuditPauliEntangled,
};

bool is_entangled(ProtocolKind k) {
  return k == ProtocolKind::PauliEntangled || k == ProtocolKind::QuditPauliEntangled;
}

int outcomes_per_branch(const ProtocolSpec& p) {
  switch (p.kind) {
    case ProtocolKind::PauliEntangled: return 4;
    case ProtocolKind::QuditPauliEntangled: return p.dim * p.dim;
    default: return 2;
  }
}

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 as a standard uniform random bit generator. Seeding is one
/// word, so a fresh stream per (seed, run, branch) costs nothing.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return splitmix_finalize(state_ += 0x9e3779b97f4a7c15ULL); }

 private:
  std::uint64_t state_;
};

SplitMix64 branch_rng(std::uint64_t seed, std::uint64_t run, std::size_t branch) {
  // The finalizer is a bijection, so distinct (run, branch) under one seed
  // give distinct stream keys.
  const std::uint64_t k = splitmix_finalize(splitmix_finalize(splitmix_finalize(seed) + run) + branch);
  return SplitMix64(k);
}

}  // namespace

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::DepolarizingSingle: return "depolarizing-single";
    case ProtocolKind::PhaseSingle: return "phase-single";
    case ProtocolKind::AmplitudeSingle: return "amplitude-single";
    case ProtocolKind::General12: return "general12";
    case ProtocolKind::PauliSeparable: return "pauli-separable";
    case ProtocolKind::PauliEntangled: return "pauli-entangled";
    case ProtocolKind::QuditPauliEntangled: return "qudit-entangled";
  }
  return "unknown";
}

ProtocolKind protocol_kind_from_string(std::string_view name) {
  for (ProtocolKind k : kAllProtocols) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown protocol '" + std::string(name) + "'");
}

ChannelKind channel_family(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::DepolarizingSingle: return ChannelKind::Depolarizing;
    case ProtocolKind::PhaseSingle: return ChannelKind::PhaseDamping;
    case ProtocolKind::AmplitudeSingle: return ChannelKind::AmplitudeDamping;
    case ProtocolKind::General12: return ChannelKind::GeneralAffine;
    case ProtocolKind::PauliSeparable:
    case ProtocolKind::PauliEntangled: return ChannelKind::PauliQubit;
    case ProtocolKind::QuditPauliEntangled: return ChannelKind::GeneralizedPauli;
  }
  throw ConfigError("channel_family: unknown protocol");
}

ProtocolKind default_protocol(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Depolarizing: return ProtocolKind::DepolarizingSingle;
    case ChannelKind::PhaseDamping: return ProtocolKind::PhaseSingle;
    case ChannelKind::AmplitudeDamping: return ProtocolKind::AmplitudeSingle;
    case ChannelKind::GeneralAffine: return ProtocolKind::General12;
    case ChannelKind::PauliQubit: return ProtocolKind::PauliEntangled;
    case ChannelKind::GeneralizedPauli: return ProtocolKind::QuditPauliEntangled;
  }
  throw ConfigError("default_protocol: unknown channel kind");
}

int branch_count(const ProtocolSpec& p) {
  switch (p.kind) {
    case ProtocolKind::General12: return 12;
    case ProtocolKind::PauliSeparable: return 3;
    default: return 1;
  }
}

int trials_per_branch(const ProtocolSpec& p) {
  if (is_entangled(p.kind)) return p.n / 2;
  return p.n / branch_count(p);
}

void validate_protocol(const ProtocolSpec& p) {
  if (p.n <= 0) throw ConfigError("protocol: N must be positive");
  const int divisor = is_entangled(p.kind) ? 2 : branch_count(p);
  if (p.n % divisor != 0) {
    throw ConfigError(std::string(to_string(p.kind)) + ": N must be divisible by " + std::to_string(divisor));
  }
  if (p.kind == ProtocolKind::QuditPauliEntangled && p.dim < 2) {
    throw ConfigError("qudit protocol: dimension must be >= 2");
  }
}

void check_compatible(const ChannelModel& c, const ProtocolSpec& p) {
  if (kind_of(c) != channel_family(p.kind)) {
    throw ConfigError(std::string(to_string(p.kind)) + " protocol cannot estimate a " +
                      std::string(to_string(kind_of(c))) + " channel");
  }
  if (const auto* g = std::get_if<GeneralizedPauli>(&c); g && g->dim() != p.dim) {
    throw ConfigError("qudit protocol dimension does not match the channel");
  }
}

std::vector<QubitBranchGeometry> qubit_branch_layout(ProtocolKind kind) {
  const BlochVector ex = BlochVector::UnitX();
  const BlochVector ey = BlochVector::UnitY();
  const BlochVector ez = BlochVector::UnitZ();
  // |up_z> is (0,0,-1) under the (down, up) basis convention.
  switch (kind) {
    case ProtocolKind::DepolarizingSingle: return {{-ez, ez}};
    case ProtocolKind::PhaseSingle: return {{ex, -ex}};
    case ProtocolKind::AmplitudeSingle: return {{-ez, ez}};
    case ProtocolKind::PauliSeparable: return {{ex, -ex}, {ey, -ey}, {-ez, ez}};
    case ProtocolKind::General12: {
      std::vector<QubitBranchGeometry> out;
      for (const BlochVector& probe : {BlochVector(-ez), ez, ex, ey}) {
        for (const BlochVector& axis : {ex, ey, ez}) out.push_back({probe, axis});
      }
      return out;
    }
    default: return {};
  }
}

OutcomeDistribution outcome_distribution(const ChannelModel& c, const ProtocolSpec& p) {
  validate_protocol(p);
  check_compatible(c, p);
  const int trials = trials_per_branch(p);
  OutcomeDistribution dist;
  if (p.kind == ProtocolKind::PauliEntangled) {
    const Eigen::Vector3d l = std::get<PauliQubit>(c).lambda;
    Eigen::VectorXd probs(4);
    probs << l(0), l(1), l(2), 1.0 - l.sum();
    dist.push_back({trials, probs});
    return dist;
  }
  if (p.kind == ProtocolKind::QuditPauliEntangled) {
    const auto& g = std::get<GeneralizedPauli>(c);
    Eigen::MatrixXd rows = g.lambda.transpose();  // column-major storage of the transpose is row-major of lambda
    dist.push_back({trials, Eigen::Map<const Eigen::VectorXd>(rows.data(), rows.size())});
    return dist;
  }
  for (const QubitBranchGeometry& b : qubit_branch_layout(p.kind)) {
    const BlochVector out = apply_channel(c, b.probe);
    const double tallied = std::clamp(0.5 * (1.0 + b.tallied.dot(out)), 0.0, 1.0);
    Eigen::VectorXd probs(2);
    probs << 1.0 - tallied, tallied;
    dist.push_back({trials, probs});
  }
  return dist;
}

void validate_counts(const ProtocolSpec& p, const OutcomeCounts& counts) {
  validate_protocol(p);
  const auto branches = static_cast<std::size_t>(branch_count(p));
  if (counts.tallies.size() != branches) throw ProtocolError("counts: wrong number of branches");
  const int trials = trials_per_branch(p);
  const auto outcomes = static_cast<std::size_t>(outcomes_per_branch(p));
  for (const auto& t : counts.tallies) {
    if (t.size() != outcomes) throw ProtocolError("counts: wrong number of outcomes in a branch");
    int total = 0;
    for (int v : t) {
      if (v < 0) throw ProtocolError("counts: negative tally");
      total += v;
    }
    if (total != trials) throw ProtocolError("counts: branch tallies do not sum to the trials per branch");
  }
}

Estimate estimate(const ProtocolSpec& p, const OutcomeCounts& counts) {
  validate_counts(p, counts);
  return estimate_unchecked(p, counts);
}

Estimate estimate_unchecked(const ProtocolSpec& p, const OutcomeCounts& counts) {
  const double trials = trials_per_branch(p);
  auto freq = [&](std::size_t branch, std::size_t outcome) { return counts.tallies[branch][outcome] / trials; };
  Estimate e;
  switch (p.kind) {
    case ProtocolKind::DepolarizingSingle:
    case ProtocolKind::PhaseSingle:
    case ProtocolKind::AmplitudeSingle:
      e.values = Eigen::VectorXd::Constant(1, freq(0, 1));
      break;
    case ProtocolKind::General12:
      e.values.resize(12);
      for (std::size_t j = 0; j < 12; ++j) e.values(static_cast<Eigen::Index>(j)) = freq(j, 1);
      break;
    case ProtocolKind::PauliSeparable: {
      const double fx = freq(0, 1);
      const double fy = freq(1, 1);
      const double fz = freq(2, 1);
      e.values.resize(3);
      e.values << 0.5 * (fz - fx + fy), 0.5 * (fx - fy + fz), 0.5 * (fy - fz + fx);
      break;
    }
    case ProtocolKind::PauliEntangled:
      e.values.resize(3);
      e.values << freq(0, 0), freq(0, 1), freq(0, 2);
      break;
    case ProtocolKind::QuditPauliEntangled: {
      const auto k = static_cast<Eigen::Index>(p.dim) * p.dim;
      e.values.resize(k - 1);
      for (Eigen::Index i = 1; i < k; ++i) e.values(i - 1) = freq(0, static_cast<std::size_t>(i));
      break;
    }
  }
  e.physical = in_range(from_parameters(channel_family(p.kind), e.values, p.dim));
  return e;
}

OutcomeCounts sample_counts(const OutcomeDistribution& dist, std::uint64_t seed, std::uint64_t run) {
  OutcomeCounts counts;
  counts.tallies.reserve(dist.size());
  for (std::size_t b = 0; b < dist.size(); ++b) {
    const Branch& br = dist[b];
    SplitMix64 rng = branch_rng(seed, run, b);
    std::vector<int> t(static_cast<std::size_t>(br.probabilities.size()), 0);
    // Multinomial as a chain of conditional binomials.
    int left = br.trials;
    double mass = 1.0;
    for (Eigen::Index o = 0; o + 1 < br.probabilities.size() && left > 0; ++o) {
      const double q = mass > 0.0 ? std::clamp(br.probabilities(o) / mass, 0.0, 1.0) : 0.0;
      int draw = 0;
      if (q >= 1.0) {
        draw = left;
      } else if (q > 0.0) {
        draw = std::binomial_distribution<int>(left, q)(rng);
      }
      t[static_cast<std::size_t>(o)] = draw;
      left -= draw;
      mass -= br.probabilities(o);
    }
    t.back() += left;
    counts.tallies.push_back(std::move(t));
  }
  return counts;
}

OutcomeCounts sample_counts(const ChannelModel& c, const ProtocolSpec& p, std::uint64_t seed, std::uint64_t run) {
  return sample_counts(outcome_distribution(c, p), seed, run);
}

std::vector<Eigen::VectorXcd> bell_basis(int dim) {
  const QuditOps ops = qudit_ops(dim);
  const Eigen::Index d2 = static_cast<Eigen::Index>(dim) * dim;
  Eigen::VectorXcd psi00 = Eigen::VectorXcd::Zero(d2);
  for (int i = 0; i < dim; ++i) psi00(i * dim + i) = 1.0 / std::sqrt(static_cast<double>(dim));
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(static_cast<std::size_t>(d2));
  for (int alpha = 0; alpha < dim; ++alpha) {
    for (int beta = 0; beta < dim; ++beta) {
      const Eigen::MatrixXcd u = Eigen::kroneckerProduct(id, ops.u(alpha, beta));
      basis.push_back(u * psi00);
    }
  }
  return basis;
}

std::vector<Eigen::VectorXcd> qubit_bell_outcomes() {
  const double r = 1.0 / std::numbers::sqrt2;
  // Basis |dd>, |du>, |ud>, |uu>.
  auto v = [&](double dd, double du, double ud, double uu) {
    Eigen::VectorXcd out(4);
    out << dd * r, du * r, ud * r, uu * r;
    return out;
  };
  return {v(1, 0, 0, -1), v(1, 0, 0, 1), v(0, 1, 1, 0), v(0, 1, -1, 0)};
}

ProbeAdmissibility check_probe_admissibility(const std::vector<Eigen::MatrixXcd>& error_ops,
                                             const Eigen::VectorXcd& probe, double tol) {
  ProbeAdmissibility r;
  r.operators = error_ops.size();
  r.hilbert_dim = probe.size();
  r.dimension_bound = static_cast<Eigen::Index>(error_ops.size()) <= probe.size();
  std::vector<Eigen::VectorXcd> images;
  images.reserve(error_ops.size());
  for (const Eigen::MatrixXcd& a : error_ops) {
    if (a.rows() != a.cols() || a.rows() == 0 || probe.size() % a.rows() != 0) {
      throw DimensionMismatch("check_probe_admissibility: operator does not act on the probe's last factor");
    }
    const Eigen::Index outer = probe.size() / a.rows();
    const Eigen::MatrixXcd full = Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(outer, outer), a);
    images.push_back(full * probe);
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = 0; j < images.size(); ++j) {
      const std::complex<double> g = images[i].dot(images[j]);
      const double target = i == j ? 1.0 : 0.0;
      r.max_deviation = std::max(r.max_deviation, std::abs(g - target));
    }
  }
  r.orthonormal = r.max_deviation <= tol;
  return r;
}

}  // namespace chanest
