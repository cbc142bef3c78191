#include "chanest/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "chanest/errors.hpp"

namespace chanest {

Eigen::Vector3d SphereDirection::unit() const {
  const double st = std::sin(theta);
  return {std::cos(phi) * st, std::sin(phi) * st, std::cos(theta)};
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw ConfigError("gauss_legendre: order must be positive");
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[order - 1 - i] = x;
    nodes[i] = -x;
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
}

SphereQuadrature::SphereQuadrature(int resolution) : resolution_(resolution) {
  if (resolution < 2) throw ConfigError("quadrature resolution must be >= 2");
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(resolution, x, w);
  const int n_phi = 2 * resolution;
  nodes_.reserve(static_cast<std::size_t>(resolution) * n_phi);
  double total = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double theta = std::acos(x[i]);
    for (int j = 0; j < n_phi; ++j) {
      SphereDirection d{theta, 2.0 * std::numbers::pi * j / n_phi};
      // dOmega / 4 pi = d(cos theta) dphi / 4 pi; Gauss weights sum to 2.
      const double weight = w[i] / (2.0 * n_phi);
      nodes_.push_back({d, d.unit(), weight});
      total += weight;
    }
  }
  for (Node& node : nodes_) node.weight /= total;
}

SphereQuadrature SphereQuadrature::monte_carlo(std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw ConfigError("monte_carlo sphere: need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Node> nodes;
  nodes.reserve(samples);
  const double weight = 1.0 / static_cast<double>(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double c = 2.0 * u(rng) - 1.0;
    SphereDirection d{std::acos(c), 2.0 * std::numbers::pi * u(rng)};
    nodes.push_back({d, d.unit(), weight});
  }
  return SphereQuadrature(0, std::move(nodes));
}

}  // namespace chanest
