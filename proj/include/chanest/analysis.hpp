#ifndef CHANEST_ANALYSIS_HPP
#define CHANEST_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chanest/channels.hpp"
#include "chanest/enumeration.hpp"
#include "chanest/protocols.hpp"
#include "chanest/quadrature.hpp"

namespace chanest {

enum class CostKind { Statistical, Fidelity };
enum class Method { ClosedForm, Enumeration, MonteCarlo };

/// How an out-of-range estimate enters the fidelity cost. Clamp keeps the
/// raw estimate and relies on the radicand clamp in fidelity_bloch; Project
/// first maps it onto the family's parameter range (probability simplex for
/// the Pauli families, box clipping otherwise).
enum class Sanitization { Clamp, Project };

std::string_view to_string(CostKind c);
std::string_view to_string(Method m);
std::string_view to_string(Sanitization s);
CostKind cost_kind_from_string(std::string_view s);  // "stat" | "fid" (long names accepted)
Method method_from_string(std::string_view s);       // "closed" | "enum" | "mc"
Sanitization sanitization_from_string(std::string_view s);

struct AnalysisOptions {
  int resolution = SphereQuadrature::kDefaultResolution;
  Sanitization sanitization = Sanitization::Clamp;
  EnumerationLimits limits;
};

struct MeanErrorReport {
  ChannelKind channel = ChannelKind::Depolarizing;
  ProtocolKind protocol = ProtocolKind::DepolarizingSingle;
  Eigen::VectorXd lambda;
  int n = 0;
  int dim = 2;
  CostKind cost = CostKind::Statistical;
  Method method = Method::ClosedForm;
  double value = 0.0;
  double std_error = 0.0;
  std::optional<int> resolution;              // fidelity reports only
  std::optional<Sanitization> sanitization;   // fidelity reports only
  std::size_t runs = 0;                       // Monte Carlo only
  std::uint64_t seed = 0;                     // Monte Carlo only
};

/// Separable minus entangled mean error for the qubit Pauli channel at equal
/// resources.
struct DeltaReport {
  Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
  int n = 0;
  CostKind cost = CostKind::Statistical;
  Method method = Method::ClosedForm;
  double separable = 0.0;
  double entangled = 0.0;
  double value = 0.0;
  std::optional<int> resolution;
};

/// Squared Euclidean distance of parameter vectors; DimensionMismatch on
/// unequal lengths.
double cost_statistical(const Eigen::VectorXd& lambda, const Eigen::VectorXd& estimate);

/// Average over pure inputs of the fidelity between the two outputs.
double channel_overlap(const ChannelModel& c1, const ChannelModel& c2, const SphereQuadrature& q);

/// 1 - channel_overlap; both channels must be qubit channels of one family.
double cost_fidelity(const ChannelModel& truth, const ChannelModel& est, const SphereQuadrature& q);

/// Analytic pure-input average overlap for the one-parameter families;
/// nullopt for other families.
std::optional<double> overlap_closed_form(const ChannelModel& truth, const ChannelModel& est);

/// Channel used in the fidelity cost for a raw estimate.
ChannelModel sanitize_estimate(ChannelKind kind, const Eigen::VectorXd& raw, int dim, Sanitization s);

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Caches the true channel's images on the quadrature nodes so repeated
/// fidelity costs against many estimates stay cheap.
class FidelityCost {
 public:
  FidelityCost(const ChannelModel& truth, const SphereQuadrature& q);
  double operator()(const ChannelModel& est) const;

 private:
  ChannelModel truth_;
  SphereQuadrature quadrature_;
  std::vector<BlochVector> images_;
  std::vector<double> deficits_;
};

/// Closed form of the mean statistical error. Fidelity cost has no closed
/// form and raises UnsupportedMethod.
MeanErrorReport mean_error_closed(const ChannelModel& c, const ProtocolSpec& p, CostKind cost);

/// Exact expectation over every outcome tuple. Fidelity costs are evaluated
/// from their definition (quadrature over the sphere).
MeanErrorReport mean_error_enumerated(const ChannelModel& c, const ProtocolSpec& p, CostKind cost,
                                      const AnalysisOptions& opts = {});

MeanErrorReport mean_error_montecarlo(const ChannelModel& c, const ProtocolSpec& p, CostKind cost,
                                      std::size_t runs, std::uint64_t seed, const AnalysisOptions& opts = {});

MeanErrorReport mean_error(const ChannelModel& c, const ProtocolSpec& p, CostKind cost, Method method,
                           std::size_t runs = 0, std::uint64_t seed = 0, const AnalysisOptions& opts = {});

/// E[estimate] under the exact outcome law.
Eigen::VectorXd estimator_expectation(const ChannelModel& c, const ProtocolSpec& p,
                                      const EnumerationLimits& limits = {});

/// sum lambda_i (1 - lambda_i) / trials: the mean statistical error of any
/// protocol whose estimates are raw frequencies over `trials` probes.
double frequency_estimator_error(const Eigen::VectorXd& lambda, int trials);

/// Closed form of separable minus entangled statistical error.
double delta_statistical_closed(const Eigen::Vector3d& lambda, int n);

/// Statistical deltas use the closed forms, fidelity deltas exact
/// enumeration. Throws ConfigError unless 6 | n and lambda is on the simplex.
DeltaReport delta(const Eigen::Vector3d& lambda, int n, CostKind cost, const AnalysisOptions& opts = {});

/// The simplified single-sum forms of the one-parameter fidelity mean
/// errors (depolarizing, phase and amplitude damping).
double fidelity_mean_error_simplified(ChannelKind kind, double lambda, int n);

}  // namespace chanest

#endif  // CHANEST_ANALYSIS_HPP
