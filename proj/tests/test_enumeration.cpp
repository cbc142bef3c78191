#include <doctest.h>

#include <cmath>
#include <vector>

#include "chanest/enumeration.hpp"
#include "chanest/errors.hpp"

using namespace chanest;

namespace {

/// C(n, k) from Pascal's triangle; independent of the lgamma path.
double pascal(int n, int k) {
  std::vector<double> row{1.0};
  for (int i = 1; i <= n; ++i) {
    std::vector<double> next(static_cast<std::size_t>(i + 1), 1.0);
    for (int j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
    row = next;
  }
  return row[static_cast<std::size_t>(k)];
}

}  // namespace

TEST_CASE("multinomial pmf against Pascal counts") {
  Eigen::VectorXd p(2);
  p << 0.7, 0.3;
  for (int n : {1, 5, 17}) {
    double total = 0.0;
    for (int i = 0; i <= n; ++i) {
      const std::vector<int> t{n - i, i};
      const double expect = pascal(n, i) * std::pow(0.3, i) * std::pow(0.7, n - i);
      CHECK(multinomial_pmf(t, p) == doctest::Approx(expect).epsilon(1e-12));
      total += multinomial_pmf(t, p);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
  Eigen::VectorXd q(3);
  q << 0.5, 0.3, 0.2;
  // 4! / (2! 1! 1!) * 0.25 * 0.3 * 0.2 = 0.18.
  CHECK(multinomial_pmf(std::vector<int>{2, 1, 1}, q) == doctest::Approx(0.18).epsilon(1e-14));
  Eigen::VectorXd degenerate(2);
  degenerate << 1.0, 0.0;
  CHECK(multinomial_pmf(std::vector<int>{3, 0}, degenerate) == 1.0);
  CHECK(multinomial_pmf(std::vector<int>{2, 1}, degenerate) == 0.0);
}

TEST_CASE("branch supports drop zero-probability tuples") {
  Branch b{3, Eigen::Vector4d(0.5, 0.5, 0.0, 0.0)};
  const BranchSupport s = branch_support(b);
  CHECK(s.tallies.size() == 4u);
  double total = 0.0;
  for (double w : s.probability) total += w;
  CHECK(total == doctest::Approx(1.0));
  Branch full{3, Eigen::Vector4d(0.25, 0.25, 0.25, 0.25)};
  CHECK(branch_support(full).tallies.size() == 20u);  // C(6, 3)
}

TEST_CASE("outcome tuple counts") {
  OutcomeDistribution d{{2, Eigen::Vector2d(0.5, 0.5)}, {2, Eigen::Vector2d(0.5, 0.5)}, {3, Eigen::Vector4d::Constant(0.25)}};
  CHECK(outcome_tuple_count(d) == 3u * 3u * 20u);
}

TEST_CASE("for_each_outcome visits the product space once, in order") {
  OutcomeDistribution d{{1, Eigen::Vector2d(0.4, 0.6)}, {2, Eigen::Vector2d(0.5, 0.5)}};
  std::vector<std::vector<std::vector<int>>> seen;
  double total = 0.0;
  for_each_outcome(d, [&](const OutcomeCounts& c, double w) {
    seen.push_back(c.tallies);
    total += w;
  });
  REQUIRE(seen.size() == 6u);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(seen.front() == std::vector<std::vector<int>>{{1, 0}, {2, 0}});
  CHECK(seen[1] == std::vector<std::vector<int>>{{1, 0}, {1, 1}});
  CHECK(seen.back() == std::vector<std::vector<int>>{{0, 1}, {0, 2}});
}

TEST_CASE("expectations: binomial moments") {
  for (double p : {0.0, 0.13, 0.5, 1.0}) {
    for (int n : {1, 4, 25}) {
      OutcomeDistribution d{{n, Eigen::Vector2d(1 - p, p)}};
      const double mean = expectation(d, [](const OutcomeCounts& c) { return static_cast<double>(c.tallies[0][1]); });
      const double m2 = expectation(d, [&](const OutcomeCounts& c) {
        const double x = c.tallies[0][1] - n * p;
        return x * x;
      });
      CHECK(mean == doctest::Approx(n * p).epsilon(1e-13));
      CHECK(m2 == doctest::Approx(n * p * (1 - p)).epsilon(1e-12));
    }
  }
  OutcomeDistribution d{{6, Eigen::Vector3d(0.2, 0.3, 0.5)}};
  const Eigen::VectorXd m = expectation(
      d, [](const OutcomeCounts& c) { return Eigen::Vector3d(c.tallies[0][0], c.tallies[0][1], c.tallies[0][2]).eval(); }, 3);
  CHECK((m - Eigen::Vector3d(1.2, 1.8, 3.0)).norm() < 1e-13);
}

TEST_CASE("enumeration limits") {
  const EnumerationLimits lim;
  CHECK_NOTHROW(check_enumerable({ProtocolKind::PauliSeparable, 90, 2}, lim));
  CHECK_THROWS_AS(check_enumerable({ProtocolKind::PauliSeparable, 96, 2}, lim), EnumerationTooLarge);
  CHECK_THROWS_AS(check_enumerable({ProtocolKind::PauliEntangled, 62, 2}, lim), EnumerationTooLarge);
  CHECK_NOTHROW(check_enumerable({ProtocolKind::General12, 36, 2}, lim));
  CHECK_THROWS_AS(check_enumerable({ProtocolKind::General12, 48, 2}, lim), EnumerationTooLarge);
  CHECK_THROWS_AS(check_enumerable({ProtocolKind::QuditPauliEntangled, 4, 3}, lim), UnsupportedMethod);
  CHECK_NOTHROW(check_enumerable({ProtocolKind::QuditPauliEntangled, 4, 2}, lim));
  EnumerationLimits tight;
  tight.max_binomial_n = 10;
  CHECK_THROWS_AS(check_enumerable({ProtocolKind::AmplitudeSingle, 11, 2}, tight), EnumerationTooLarge);
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-10));
}
