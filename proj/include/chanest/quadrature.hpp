#ifndef CHANEST_QUADRATURE_HPP
#define CHANEST_QUADRATURE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace chanest {

/// Polar angle in [0, pi], azimuth in [0, 2 pi).
struct SphereDirection {
  double theta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d unit() const;
};

/// Weighted node set over the unit sphere, normalized against dOmega / 4 pi.
///
/// The deterministic rule is a product of `resolution` Gauss-Legendre
/// nodes in cos(theta) with 2 * resolution equally spaced azimuths. It
/// integrates every polynomial in (n1, n2, n3) of total degree below
/// 2 * resolution exactly (up to rounding).
class SphereQuadrature {
 public:
  struct Node {
    SphereDirection direction;
    Eigen::Vector3d n;  // cached direction.unit()
    double weight;
  };

  static constexpr int kDefaultResolution = 32;

  /// Throws ConfigError when resolution < 2.
  explicit SphereQuadrature(int resolution = kDefaultResolution);

  /// Equal-weight random directions; for cross-checks only. `resolution()`
  /// reports 0 for these.
  static SphereQuadrature monte_carlo(std::size_t samples, std::uint64_t seed);

  int resolution() const { return resolution_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  template <typename F>
  double integrate(F&& f) const {
    // Fixed node order keeps results bit-identical across runs.
    double sum = 0.0;
    double comp = 0.0;
    for (const Node& node : nodes_) {
      const double term = node.weight * f(node.n);
      const double t = sum + term;
      comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
    }
    return sum + comp;
  }

 private:
  SphereQuadrature(int resolution, std::vector<Node> nodes)
      : resolution_(resolution), nodes_(std::move(nodes)) {}

  int resolution_;
  std::vector<Node> nodes_;
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace chanest

#endif  // CHANEST_QUADRATURE_HPP
