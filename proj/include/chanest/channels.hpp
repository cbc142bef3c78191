#ifndef CHANEST_CHANNELS_HPP
#define CHANEST_CHANNELS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "chanest/qstate.hpp"

namespace chanest {

enum class ChannelKind {
  Depolarizing,
  PhaseDamping,
  AmplitudeDamping,
  PauliQubit,
  GeneralAffine,
  GeneralizedPauli,
};

std::string_view to_string(ChannelKind kind);
/// Accepts the names produced by to_string; throws ConfigError otherwise.
ChannelKind channel_kind_from_string(std::string_view name);

using Vector12d = Eigen::Matrix<double, 12, 1>;

// Channel families. The structs themselves do not range-check, so they can
// also carry raw (possibly unphysical) estimates; the make_* factories do.

/// s' = (1 - 2 lambda) s, lambda in [0, 1/2].
struct Depolarizing {
  double lambda = 0.0;
};

/// Contracts s1, s2 by (1 - 2 lambda), lambda in [0, 1/2].
struct PhaseDamping {
  double lambda = 0.0;
};

/// Decay towards |down_z>, lambda in [0, 1].
struct AmplitudeDamping {
  double lambda = 0.0;
};

/// Probabilities of sigma_x, sigma_y, sigma_z errors.
struct PauliQubit {
  Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
};

/// Twelve-parameter affine qubit channel, each parameter in [0, 1].
struct GeneralAffine {
  Vector12d lambda = Vector12d::Zero();
};

/// lambda(alpha, beta) is the probability of the Weyl error
/// U_{alpha,beta} = X^beta Z^alpha; entries sum to one.
struct GeneralizedPauli {
  Eigen::MatrixXd lambda;

  int dim() const { return static_cast<int>(lambda.rows()); }
};

using ChannelModel =
    std::variant<Depolarizing, PhaseDamping, AmplitudeDamping, PauliQubit, GeneralAffine, GeneralizedPauli>;

ChannelModel make_depolarizing(double lambda);
ChannelModel make_phase_damping(double lambda);
ChannelModel make_amplitude_damping(double lambda);
ChannelModel make_pauli(const Eigen::Vector3d& lambda);
ChannelModel make_general_affine(const Vector12d& lambda);
ChannelModel make_generalized_pauli(const Eigen::MatrixXd& lambda);

ChannelKind kind_of(const ChannelModel& c);
bool is_qubit_channel(const ChannelModel& c);

/// True iff all parameters lie in the family's range (within `tol`).
bool in_range(const ChannelModel& c, double tol = 1e-12);
/// Throws ConfigError naming the first range violation.
void validate_range(const ChannelModel& c, double tol = 1e-12);
/// Description of the first range violation, if any.
std::optional<std::string> range_violation(const ChannelModel& c, double tol = 1e-12);

/// Free parameter vector used by the statistical cost. For the generalized
/// Pauli channel this is the D^2 - 1 error probabilities, row-major in
/// (alpha, beta), skipping the identity term (0, 0).
Eigen::VectorXd parameters(const ChannelModel& c);
/// Rebuilds a model of `kind` from a free parameter vector without range
/// checks. `dim` is only used for GeneralizedPauli.
ChannelModel from_parameters(ChannelKind kind, const Eigen::VectorXd& params, int dim = 2);

template <typename Scalar>
struct Affine {
  Eigen::Matrix<Scalar, 3, 3> M = Eigen::Matrix<Scalar, 3, 3>::Identity();
  Eigen::Matrix<Scalar, 3, 1> v = Eigen::Matrix<Scalar, 3, 1>::Zero();

  Eigen::Matrix<Scalar, 3, 1> operator()(const Eigen::Matrix<Scalar, 3, 1>& s) const { return M * s + v; }
};

using AffineMap = Affine<double>;

/// The twelve-parameter affine form. Throws ConfigError if any parameter is
/// outside [0, 1].
AffineMap params_to_affine(const Vector12d& lambda);
/// Inverse of params_to_affine: lambda_j is the probability of the +axis
/// outcome for the probe and axis that j labels.
Vector12d affine_to_params(const AffineMap& map);

/// Bloch-space action of any qubit model, unphysical parameters included.
AffineMap to_affine(const ChannelModel& c);

BlochVector apply_channel(const ChannelModel& c, const BlochVector& s);
BlochVector apply_channel(const AffineMap& map, const BlochVector& s);

/// Operator-sum action (Kraus form where the family has one) on a valid
/// density matrix. Throws InvalidState on bad input.
DensityMatrix2 apply_channel_density(const ChannelModel& c, const DensityMatrix2& rho);

/// Linear extension of a qubit channel to arbitrary 2x2 operators.
Eigen::Matrix2cd apply_linear(const ChannelModel& c, const Eigen::Matrix2cd& x);
Eigen::Matrix2cd apply_linear(const AffineMap& map, const Eigen::Matrix2cd& x);

/// Weighted Kraus decomposition rho' = sum_k w_k K_k rho K_k^dagger.
/// Empty for GeneralAffine, which has no closed Kraus form here.
std::vector<std::pair<double, Eigen::Matrix2cd>> weighted_kraus(const ChannelModel& c);

/// J = sum_ij |i><j| (x) C(|i><j|): the channel acts on the second factor
/// of the unnormalized maximally entangled state, so tr J = D.
using ChoiMatrix = Eigen::MatrixXcd;

ChoiMatrix to_choi(const ChannelModel& c);
ChoiMatrix to_choi(const AffineMap& map);

double min_choi_eigenvalue(const ChoiMatrix& choi);
bool is_completely_positive(const ChannelModel& c, double tol = 1e-10);
bool is_completely_positive(const AffineMap& map, double tol = 1e-10);

/// Shift/clock operators on C^D and the D^2 Weyl operators built from them.
struct QuditOps {
  int dim = 0;
  Eigen::MatrixXcd shift;  // X|j> = |(j - 1) mod D>
  Eigen::MatrixXcd clock;  // Z|j> = exp(2 pi i j / D)|j>
  std::vector<Eigen::MatrixXcd> weyl;  // index alpha * D + beta

  const Eigen::MatrixXcd& u(int alpha, int beta) const { return weyl[static_cast<std::size_t>(alpha * dim + beta)]; }
};

/// Throws ConfigError for D < 2.
QuditOps qudit_ops(int dim);

enum class Subsystem { Whole, Second };

/// rho' = sum lambda_{a,b} U rho U^dagger, with U replaced by 1 (x) U when
/// `where` is Second (rho is then D^2 x D^2). Throws DimensionMismatch.
Eigen::MatrixXcd apply_generalized_pauli(const GeneralizedPauli& c, const Eigen::MatrixXcd& rho,
                                         Subsystem where = Subsystem::Whole);

}  // namespace chanest

#endif  // CHANEST_CHANNELS_HPP
