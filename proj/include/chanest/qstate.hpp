#ifndef CHANEST_QSTATE_HPP
#define CHANEST_QSTATE_HPP

// Qubit states in the Bloch picture and as 2x2 density matrices.
//
// Basis ordering is (|down_z>, |up_z>) and the sign convention is
// s3 = rho_dd - rho_uu, so |down_z> sits at s = (0, 0, +1). Every Bloch
// formula in the library (amplitude damping's fixed point in particular)
// relies on this ordering.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "chanest/errors.hpp"

namespace chanest {

template <typename Scalar>
using Bloch = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Density2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

using BlochVector = Bloch<double>;
using DensityMatrix2 = Density2<double>;

struct Tolerances {
  double state = 1e-9;      // validity of states (norms, traces, eigenvalues)
  double identity = 1e-12;  // algebraic identities
};

inline constexpr Tolerances kDefaultTolerances{};

namespace pauli {

template <typename Scalar = double>
Density2<Scalar> x() {
  Density2<Scalar> m;
  m << 0, 1, 1, 0;
  return m;
}

template <typename Scalar = double>
Density2<Scalar> y() {
  using C = std::complex<Scalar>;
  Density2<Scalar> m;
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}

template <typename Scalar = double>
Density2<Scalar> z() {
  Density2<Scalar> m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

template <typename Scalar>
Density2<Scalar> bloch_to_density(const Bloch<Scalar>& s,
                                  const Tolerances& tol = kDefaultTolerances) {
  if (!s.allFinite() || s.norm() > Scalar(1) + Scalar(tol.state)) {
    throw InvalidState("bloch_to_density: |s| exceeds 1");
  }
  using C = std::complex<Scalar>;
  const Scalar h(0.5);
  Density2<Scalar> rho;
  rho << C(h * (1 + s(2))), C(h * s(0), -h * s(1)),
         C(h * s(0), h * s(1)), C(h * (1 - s(2)));
  return rho;
}

/// Checks hermiticity and unit trace; eigenvalue positivity only when
/// `require_positive` is set.
template <typename Scalar>
void validate_density(const Density2<Scalar>& rho, const Tolerances& tol = kDefaultTolerances,
                      bool require_positive = true) {
  if (!rho.allFinite()) throw InvalidState("density matrix has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol.state) {
    throw InvalidState("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - std::complex<Scalar>(1)) > tol.state) {
    throw InvalidState("density matrix trace differs from 1");
  }
  if (require_positive) {
    const Density2<Scalar> herm = (rho + rho.adjoint()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Density2<Scalar>> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -Scalar(tol.state)) {
      throw InvalidState("density matrix has a negative eigenvalue");
    }
  }
}

template <typename Scalar>
Bloch<Scalar> density_to_bloch(const Density2<Scalar>& rho,
                               const Tolerances& tol = kDefaultTolerances) {
  validate_density(rho, tol, /*require_positive=*/false);
  const std::complex<Scalar> lower = rho(1, 0);
  const std::complex<Scalar> upper = std::conj(rho(0, 1));
  const std::complex<Scalar> off = (lower + upper) / Scalar(2);
  return Bloch<Scalar>(2 * off.real(), 2 * off.imag(), rho(0, 0).real() - rho(1, 1).real());
}

/// 1 - |s|^2, floored at zero. Norms within a few ulps of 1 count as pure:
/// otherwise the square root in the mixed-state term turns 1e-16 of
/// rounding into 1e-8 of fidelity.
template <typename Scalar>
Scalar purity_deficit(const Bloch<Scalar>& s) {
  constexpr Scalar snap = 16 * std::numeric_limits<Scalar>::epsilon();
  const Scalar d = Scalar(1) - s.squaredNorm();
  return d < snap ? Scalar(0) : d;
}

/// Qubit fidelity from Bloch vectors. Super-unit vectors (unphysical
/// estimates) are accepted: their radicand is clamped at 0 and the result
/// is clamped into [0, 1].
template <typename Scalar>
Scalar fidelity_bloch(const Bloch<Scalar>& s1, const Bloch<Scalar>& s2) {
  const Scalar mixed = std::sqrt(purity_deficit(s1) * purity_deficit(s2));
  const Scalar f = Scalar(0.5) * (Scalar(1) + s1.dot(s2) + mixed);
  return std::clamp(f, Scalar(0), Scalar(1));
}

namespace detail {

/// Square roots of PSD eigenvalues; those within rounding of zero (relative
/// to the largest) are set to zero rather than rooted.
template <typename Vec>
Vec snapped_sqrt(const Vec& eigenvalues) {
  using Real = typename Vec::Scalar;
  const Real floor = 64 * std::numeric_limits<Real>::epsilon() * eigenvalues.cwiseAbs().maxCoeff();
  return eigenvalues.unaryExpr([floor](Real x) { return x <= floor ? Real(0) : std::sqrt(x); });
}

template <typename Scalar>
Density2<Scalar> psd_sqrt(const Density2<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Density2<Scalar>> es(m);
  const auto vals = snapped_sqrt(es.eigenvalues().eval());
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Tr^2 sqrt(sqrt(rho1) rho2 sqrt(rho1)) by eigendecomposition.
template <typename Scalar>
Scalar fidelity_density(const Density2<Scalar>& rho1, const Density2<Scalar>& rho2,
                        const Tolerances& tol = kDefaultTolerances) {
  validate_density(rho1, tol);
  validate_density(rho2, tol);
  const Density2<Scalar> r1 = detail::psd_sqrt<Scalar>((rho1 + rho1.adjoint()) / Scalar(2));
  Density2<Scalar> inner = r1 * rho2 * r1;
  inner = (inner + inner.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Density2<Scalar>> es(inner, Eigen::EigenvaluesOnly);
  const Scalar t = detail::snapped_sqrt(es.eigenvalues().eval()).sum();
  return std::clamp(t * t, Scalar(0), Scalar(1));
}

}  // namespace chanest

#endif  // CHANEST_QSTATE_HPP
