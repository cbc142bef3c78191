#include <doctest.h>

#include <random>

#include "chanest/qstate.hpp"

using namespace chanest;

namespace {

BlochVector random_ball(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  BlochVector s(g(rng), g(rng), g(rng));
  return s.normalized() * std::cbrt(u(rng));
}

}  // namespace

TEST_CASE("pauli matrices satisfy the algebra") {
  const auto x = pauli::x();
  const auto y = pauli::y();
  const auto z = pauli::z();
  const std::complex<double> i(0, 1);
  CHECK((x * x - DensityMatrix2::Identity()).norm() == 0.0);
  CHECK((x * y - i * z).norm() < 1e-15);
  CHECK((y * z - i * x).norm() < 1e-15);
  CHECK((z * x - i * y).norm() < 1e-15);
}

TEST_CASE("basis convention: s3 = +1 is the first basis vector") {
  const DensityMatrix2 rho = bloch_to_density(BlochVector(0, 0, 1));
  CHECK(rho(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(rho(1, 1)) < 1e-15);
  const DensityMatrix2 plus_x = bloch_to_density(BlochVector(1, 0, 0));
  CHECK(plus_x(0, 1).real() == doctest::Approx(0.5));
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(bloch_to_density(BlochVector(1.0, 0.5, 0.0)), InvalidState);
  CHECK_NOTHROW(bloch_to_density(BlochVector(1.0 + 1e-12, 0.0, 0.0)));

  DensityMatrix2 bad_trace = DensityMatrix2::Identity();
  CHECK_THROWS_AS(density_to_bloch(bad_trace), InvalidState);

  DensityMatrix2 non_hermitian = DensityMatrix2::Identity() / 2.0;
  non_hermitian(0, 1) = 0.3;
  CHECK_THROWS_AS(density_to_bloch(non_hermitian), InvalidState);

  DensityMatrix2 negative;
  negative << 1.2, 0, 0, -0.2;
  CHECK_THROWS_AS(validate_density(negative), InvalidState);
  CHECK_NOTHROW(validate_density(negative, kDefaultTolerances, false));
}

TEST_CASE("property: Bloch <-> density round trip") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 1000; ++i) {
    const BlochVector s = random_ball(rng);
    CHECK((density_to_bloch(bloch_to_density(s)) - s).norm() < 1e-14);
  }
}

TEST_CASE("fidelity: trivial values") {
  const BlochVector up(0, 0, 1);
  const BlochVector down(0, 0, -1);
  const BlochVector mixed = BlochVector::Zero();
  CHECK(fidelity_bloch(up, up) == 1.0);
  CHECK(fidelity_bloch(up, down) == 0.0);
  CHECK(fidelity_bloch(mixed, up) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fidelity_bloch(mixed, mixed) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fidelity: hand-computed mixed pair") {
  // rho1 = diag(0.8, 0.2), rho2 = 1/2: (sqrt(0.4) + sqrt(0.1))^2 = 0.9.
  const BlochVector a(0, 0, 0.6);
  CHECK(fidelity_bloch(a, BlochVector(BlochVector::Zero())) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(fidelity_density(bloch_to_density(a), bloch_to_density(BlochVector(BlochVector::Zero()))) ==
        doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("property: Bloch fidelity matches the density-matrix definition") {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 1000; ++i) {
    const BlochVector a = random_ball(rng);
    const BlochVector b = i % 4 == 0 ? BlochVector(random_ball(rng).normalized()) : random_ball(rng);
    const double f = fidelity_bloch(a, b);
    CHECK(std::abs(f - fidelity_density(bloch_to_density(a), bloch_to_density(b))) < 1e-10);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f == doctest::Approx(fidelity_bloch(b, a)).epsilon(1e-15));
  }
}

TEST_CASE("fidelity: pure states snap despite rounding in the norm") {
  const BlochVector n = BlochVector(1, 2, 3).normalized();
  CHECK(purity_deficit(n) == 0.0);
  CHECK(fidelity_bloch(n, n) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fidelity: unphysical vectors are clamped, not rejected") {
  const BlochVector big(0, 0, 1.4);
  const double f = fidelity_bloch(big, BlochVector(0, 0, 1));
  CHECK(f == 1.0);
  CHECK(purity_deficit(big) == 0.0);
  CHECK(fidelity_bloch(big, BlochVector(0, 0, -1)) == 0.0);
}

TEST_CASE("templated on the scalar type") {
  const Bloch<float> a(0.f, 0.f, 0.6f);
  CHECK(fidelity_bloch(a, Bloch<float>(Bloch<float>::Zero())) == doctest::Approx(0.9f).epsilon(1e-6));
  CHECK(bloch_to_density(a)(0, 0).real() == doctest::Approx(0.8f));
}
