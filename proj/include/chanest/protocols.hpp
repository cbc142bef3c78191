#ifndef CHANEST_PROTOCOLS_HPP
#define CHANEST_PROTOCOLS_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chanest/channels.hpp"

namespace chanest {

enum class ProtocolKind {
  DepolarizingSingle,
  PhaseSingle,
  AmplitudeSingle,
  General12,
  PauliSeparable,
  PauliEntangled,
  QuditPauliEntangled,
};

std::string_view to_string(ProtocolKind kind);
ProtocolKind protocol_kind_from_string(std::string_view name);

/// The channel family a protocol is designed for.
ChannelKind channel_family(ProtocolKind kind);
/// Single-qubit protocol for the one-parameter families and the general
/// channel, the Bell protocol for both Pauli families.
ProtocolKind default_protocol(ChannelKind kind);

/// `n` counts qubits (qudits) consumed, so an entangled protocol with n = 10
/// uses 5 pairs.
struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::DepolarizingSingle;
  int n = 1;
  int dim = 2;  // qudit protocols only
};

/// Throws ConfigError on n <= 0, bad divisibility, or dim < 2.
void validate_protocol(const ProtocolSpec& p);
/// Throws ConfigError if the channel is not of the protocol's family (or has
/// a different qudit dimension).
void check_compatible(const ChannelModel& c, const ProtocolSpec& p);

/// Number of independent measurement branches and the trials in each.
int branch_count(const ProtocolSpec& p);
int trials_per_branch(const ProtocolSpec& p);

/// A single-qubit branch: Alice's probe Bloch vector and the Bloch direction
/// of the outcome Bob tallies.
struct QubitBranchGeometry {
  BlochVector probe;
  BlochVector tallied;
};

/// Branch layout of the single-qubit protocols (empty for entangled ones).
///
/// Binary branches list probabilities as (other, tallied). One-parameter
/// protocols and the separable Pauli protocol tally spin flips relative to
/// the probe; the separable branches are ordered (x, y, z). The general
/// protocol has 12 branches, j = 3 m + k, with probes m in
/// {(0,0,-1), (0,0,+1), (1,0,0), (0,1,0)} and tallied outcome +e_k.
std::vector<QubitBranchGeometry> qubit_branch_layout(ProtocolKind kind);

struct Branch {
  int trials = 0;
  Eigen::VectorXd probabilities;
};

using OutcomeDistribution = std::vector<Branch>;

OutcomeDistribution outcome_distribution(const ChannelModel& c, const ProtocolSpec& p);

/// tallies[b][o]: how often outcome o occurred in branch b.
struct OutcomeCounts {
  std::vector<std::vector<int>> tallies;

  friend bool operator==(const OutcomeCounts&, const OutcomeCounts&) = default;
};

/// Raw estimate in the family's free-parameter layout (see parameters()).
struct Estimate {
  Eigen::VectorXd values;
  bool physical = true;
};

/// Throws ProtocolError on tallies inconsistent with the protocol.
void validate_counts(const ProtocolSpec& p, const OutcomeCounts& counts);
Estimate estimate(const ProtocolSpec& p, const OutcomeCounts& counts);
/// estimate() without the tally checks, for counts that are valid by
/// construction (enumerated supports, sampled draws).
Estimate estimate_unchecked(const ProtocolSpec& p, const OutcomeCounts& counts);

/// Reproducible draw: each branch uses its own generator seeded from
/// (seed, run, branch).
OutcomeCounts sample_counts(const ChannelModel& c, const ProtocolSpec& p, std::uint64_t seed,
                            std::uint64_t run = 0);
/// Same, from a precomputed distribution.
OutcomeCounts sample_counts(const OutcomeDistribution& dist, std::uint64_t seed, std::uint64_t run = 0);

/// |psi_{a,b}> = (1 (x) U_{a,b}) |psi_{0,0}>, index a * D + b.
std::vector<Eigen::VectorXcd> bell_basis(int dim);

/// Qubit Bell states in the Pauli protocol's outcome order
/// (phi-, phi+, psi+, psi-), in the (down, up) basis.
std::vector<Eigen::VectorXcd> qubit_bell_outcomes();

struct ProbeAdmissibility {
  bool orthonormal = false;      // <psi_i|psi_j> = delta_ij within tol
  bool dimension_bound = false;  // operator count <= total dimension
  std::size_t operators = 0;
  Eigen::Index hilbert_dim = 0;
  double max_deviation = 0.0;
};

/// Operators act on the last factor of the probe: a probe of dimension
/// k * d sees 1_k (x) A for d x d operators A.
ProbeAdmissibility check_probe_admissibility(const std::vector<Eigen::MatrixXcd>& error_ops,
                                             const Eigen::VectorXcd& probe, double tol = 1e-12);

}  // namespace chanest

#endif  // CHANEST_PROTOCOLS_HPP
