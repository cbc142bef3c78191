#ifndef CHANEST_ENUMERATION_HPP
#define CHANEST_ENUMERATION_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "chanest/protocols.hpp"

namespace chanest {

/// Caps on exact enumeration. The per-protocol caps are on N; the tuple cap
/// bounds the product of branch supports for everything else.
struct EnumerationLimits {
  int max_binomial_n = 10000;
  int max_pauli_separable_n = 90;
  int max_pauli_entangled_n = 60;
  std::uint64_t max_outcome_tuples = 50'000'000;
};

/// Throws EnumerationTooLarge when `p` exceeds `limits`, UnsupportedMethod
/// for qudit protocols with D > 2.
void check_enumerable(const ProtocolSpec& p, const EnumerationLimits& limits);

/// Multinomial probability of one tally vector.
double multinomial_pmf(std::span<const int> tallies, const Eigen::VectorXd& probabilities);

/// Every tally vector of one branch with nonzero probability, in
/// lexicographic order.
struct BranchSupport {
  std::vector<std::vector<int>> tallies;
  std::vector<double> probability;
};

BranchSupport branch_support(const Branch& branch);

/// Size of the full outcome space (zero-probability tuples included).
std::uint64_t outcome_tuple_count(const OutcomeDistribution& dist);

/// Visits every outcome tuple with nonzero probability in a fixed order.
void for_each_outcome(const OutcomeDistribution& dist,
                      const std::function<void(const OutcomeCounts&, double weight)>& visit);

/// E[f] under the exact outcome law, summed in a fixed order with
/// compensation so the result does not depend on scheduling.
double expectation(const OutcomeDistribution& dist, const std::function<double(const OutcomeCounts&)>& f);

Eigen::VectorXd expectation(const OutcomeDistribution& dist,
                            const std::function<Eigen::VectorXd(const OutcomeCounts&)>& f, Eigen::Index size);

/// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace chanest

#endif  // CHANEST_ENUMERATION_HPP
