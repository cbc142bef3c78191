#include "chanest/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chanest/errors.hpp"

namespace chanest {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
  sum_ = t;
}

namespace {

double binomial_count(int n, int k) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  const auto idx = cur.size();
  if (static_cast<int>(idx) == parts - 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur.push_back(v);
    compositions(total - v, parts, cur, out);
    cur.pop_back();
  }
}

}  // namespace

void check_enumerable(const ProtocolSpec& p, const EnumerationLimits& limits) {
  validate_protocol(p);
  auto too_large = [&](int cap) {
    throw EnumerationTooLarge(std::string(to_string(p.kind)) + ": N = " + std::to_string(p.n) +
                              " exceeds the enumeration limit " + std::to_string(cap));
  };
  switch (p.kind) {
    case ProtocolKind::DepolarizingSingle:
    case ProtocolKind::PhaseSingle:
    case ProtocolKind::AmplitudeSingle:
      if (p.n > limits.max_binomial_n) too_large(limits.max_binomial_n);
      break;
    case ProtocolKind::PauliSeparable:
      if (p.n > limits.max_pauli_separable_n) too_large(limits.max_pauli_separable_n);
      break;
    case ProtocolKind::PauliEntangled:
      if (p.n > limits.max_pauli_entangled_n) too_large(limits.max_pauli_entangled_n);
      break;
    case ProtocolKind::QuditPauliEntangled:
      if (p.dim != 2) throw UnsupportedMethod("exact enumeration is only offered for D = 2 qudit protocols");
      if (p.n > limits.max_pauli_entangled_n) too_large(limits.max_pauli_entangled_n);
      break;
    case ProtocolKind::General12: {
      const auto per = static_cast<std::uint64_t>(p.n / 12 + 1);
      std::uint64_t tuples = 1;
      for (int b = 0; b < 12; ++b) tuples = saturating_mul(tuples, per);
      if (tuples > limits.max_outcome_tuples) {
        throw EnumerationTooLarge("general12: " + std::to_string(tuples) + " outcome tuples exceed the limit " +
                                  std::to_string(limits.max_outcome_tuples));
      }
      break;
    }
  }
}

double multinomial_pmf(std::span<const int> tallies, const Eigen::VectorXd& probabilities) {
  int n = 0;
  double log_p = 0.0;
  for (std::size_t o = 0; o < tallies.size(); ++o) {
    const int t = tallies[o];
    const double q = probabilities(static_cast<Eigen::Index>(o));
    n += t;
    if (t == 0) continue;
    if (q <= 0.0) return 0.0;
    log_p += t * std::log(q) - std::lgamma(t + 1.0);
  }
  return std::exp(log_p + std::lgamma(n + 1.0));
}

BranchSupport branch_support(const Branch& branch) {
  const int k = static_cast<int>(branch.probabilities.size());
  std::vector<std::vector<int>> all;
  std::vector<int> cur;
  compositions(branch.trials, k, cur, all);
  BranchSupport s;
  for (auto& t : all) {
    const double w = multinomial_pmf(t, branch.probabilities);
    if (w == 0.0) continue;
    s.tallies.push_back(std::move(t));
    s.probability.push_back(w);
  }
  return s;
}

std::uint64_t outcome_tuple_count(const OutcomeDistribution& dist) {
  std::uint64_t total = 1;
  for (const Branch& b : dist) {
    const int k = static_cast<int>(b.probabilities.size());
    total = saturating_mul(total, static_cast<std::uint64_t>(binomial_count(b.trials + k - 1, k - 1)));
  }
  return total;
}

void for_each_outcome(const OutcomeDistribution& dist,
                      const std::function<void(const OutcomeCounts&, double)>& visit) {
  std::vector<BranchSupport> supports;
  supports.reserve(dist.size());
  for (const Branch& b : dist) {
    supports.push_back(branch_support(b));
    if (supports.back().tallies.empty()) return;  // no mass at all
  }
  const std::size_t depth = supports.size();
  OutcomeCounts counts;
  if (depth == 0) {
    visit(counts, 1.0);
    return;
  }
  // Odometer over branch supports, last branch fastest. prefix[b] holds the
  // product of the chosen probabilities of branches 0..b-1.
  std::vector<std::size_t> idx(depth, 0);
  std::vector<double> prefix(depth + 1, 1.0);
  counts.tallies.resize(depth);
  for (std::size_t b = 0; b < depth; ++b) {
    counts.tallies[b] = supports[b].tallies[0];
    prefix[b + 1] = prefix[b] * supports[b].probability[0];
  }
  while (true) {
    visit(counts, prefix[depth]);
    std::size_t b = depth;
    while (b > 0 && ++idx[b - 1] == supports[b - 1].tallies.size()) idx[--b] = 0;
    if (b == 0) return;
    for (std::size_t k = b - 1; k < depth; ++k) {
      const BranchSupport& s = supports[k];
      std::copy(s.tallies[idx[k]].begin(), s.tallies[idx[k]].end(), counts.tallies[k].begin());
      prefix[k + 1] = prefix[k] * s.probability[idx[k]];
    }
  }
}

double expectation(const OutcomeDistribution& dist, const std::function<double(const OutcomeCounts&)>& f) {
  CompensatedSum sum;
  for_each_outcome(dist, [&](const OutcomeCounts& c, double w) { sum.add(w * f(c)); });
  return sum.value();
}

Eigen::VectorXd expectation(const OutcomeDistribution& dist,
                            const std::function<Eigen::VectorXd(const OutcomeCounts&)>& f, Eigen::Index size) {
  std::vector<CompensatedSum> sums(static_cast<std::size_t>(size));
  for_each_outcome(dist, [&](const OutcomeCounts& c, double w) {
    const Eigen::VectorXd v = f(c);
    for (Eigen::Index i = 0; i < size; ++i) sums[static_cast<std::size_t>(i)].add(w * v(i));
  });
  Eigen::VectorXd out(size);
  for (Eigen::Index i = 0; i < size; ++i) out(i) = sums[static_cast<std::size_t>(i)].value();
  return out;
}

}  // namespace chanest
