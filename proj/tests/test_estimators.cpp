#include <doctest.h>

#include <cmath>

#include "bann/estimators.hpp"

using namespace bann;

TEST_CASE("theory values") {
  CHECK(theory_q(0.25) == 1.0);
  CHECK(theory_q(0.1) == 1.0);
  CHECK(theory_q(0.49) == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
  CHECK(theory_q(1.0) == 0.0);
  CHECK(theory_theta(0.25) == 0.0);
  CHECK(theory_theta(0.49) == doctest::Approx(16.0 / 49.0).epsilon(1e-12));
  for (double p = 0.26; p <= 1.0; p += 0.01) {
    CHECK(theory_theta(p) == doctest::Approx((1 - theory_q(p)) * (1 - theory_q(p))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(theory_q(0.0), Error);
  CHECK_THROWS_AS(theory_theta(1.2), Error);
}

TEST_CASE("q_1 and q_2 equal (1 - p) / 2") {
  for (double p : {0.2, 0.5, 0.7}) {
    for (std::size_t k : {1, 2}) {
      const Estimate e = estimate_qk({p}, k, 20'000, 3);
      CHECK(std::abs(e.value - 0.5 * (1 - p)) <= 4 * e.std_error);
      CHECK(e.n_censored == 0);
      CHECK(e.std_error == doctest::Approx(std::sqrt(e.value * (1 - e.value) / 20'000.0)));
    }
  }
  CHECK_THROWS_AS(estimate_qk({0.5}, 0, 10, 1), Error);
  CHECK_THROWS_AS(estimate_qk({0.5}, 5, 0, 1), Error);
}

TEST_CASE("estimates do not depend on the worker count") {
  const Estimate a = estimate_qk({0.4}, 200, 3000, 9, 1);
  const Estimate b = estimate_qk({0.4}, 200, 3000, 9, 4);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  const ThetaEstimate ta = estimate_theta({0.4}, 100, 2000, 9, 1);
  const ThetaEstimate tb = estimate_theta({0.4}, 100, 2000, 9, 3);
  CHECK(ta.upper.value == tb.upper.value);
  CHECK(ta.lower.value == tb.lower.value);
}

TEST_CASE("r is zero at p = 1") {
  const Estimate r = estimate_r({1.0}, 50, 1000, 1);
  CHECK(r.value == 0.0);
  CHECK(r.n_censored == 0);
  CHECK_THROWS_AS(estimate_r({0.5}, 1, 10, 1), Error);
}

TEST_CASE("r at p = 0.49 brackets p q^2 / 2") {
  const Estimate r = estimate_r({0.49}, 2000, 20'000, 21);
  const double target = 0.5 * 0.49 * (3.0 / 7.0) * (3.0 / 7.0);
  CHECK(target == doctest::Approx(0.045));
  CHECK(r.value - 3 * r.std_error <= target);
  CHECK(r.censored_upper() + 3 * r.std_error >= target);
  CHECK(r.censored_fraction() < 0.05);
}

TEST_CASE("theta at p = 1 and the two-sided cross-check") {
  const ThetaEstimate one = estimate_theta({1.0}, 10, 100, 1);
  CHECK(one.upper.value == 1.0);
  CHECK(one.lower.value == 1.0);

  const ThetaEstimate t = estimate_theta({0.49}, 1000, 4000, 5);
  CHECK(t.lower.value <= t.upper.value);
  CHECK(t.inconsistent == 0);
  const Estimate q = estimate_qk({0.49}, 1000, 4000, 6);
  const double psi = (1 - q.value) * (1 - q.value);
  const double se = std::hypot(t.upper.std_error, 2 * (1 - q.value) * q.std_error);
  CHECK(std::abs(t.upper.value - psi) <= 3 * se);
}

TEST_CASE("side certificate") {
  auto make = [](std::initializer_list<std::pair<double, Speed>> items) {
    Configuration c;
    for (const auto& [x, s] : items) c.particles.push_back({0, x, s});
    c.reindex();
    return c;
  };
  CHECK(side_certified(make({{1, Speed::Still}, {2, Speed::Still}})));
  CHECK_FALSE(side_certified(make({{1, Speed::Left}})));
  CHECK_FALSE(side_certified(make({{1, Speed::Still}, {2, Speed::Right}})));
  // Annihilation at (t, y) = (5, 6) with right edge 7 is not final.
  CHECK_FALSE(side_certified(make({{1, Speed::Right}, {6, Speed::Still}, {6.5, Speed::Still}, {7, Speed::Still}})));
  CHECK(side_certified(make({{1, Speed::Right}, {2, Speed::Still}, {6.5, Speed::Still}, {7, Speed::Still}})));
}

TEST_CASE("left-mover law at p = 1") {
  const LeftmoverDistribution d = leftmover_count_distribution({1.0}, 20, 500, 1);
  CHECK(d.histogram[0] == 500);
  CHECK(d.mean == 0.0);
}

TEST_CASE("left-mover law at p = 0.49") {
  const LeftmoverDistribution d = leftmover_count_distribution({0.49}, 2000, 10'000, 8);
  CHECK(std::abs(d.mean - 0.75) <= 3 * d.mean_stderr);
  const double p0 = static_cast<double>(d.histogram[0]) / 10'000.0;
  CHECK(std::abs(p0 - 4.0 / 7.0) <= 4 * std::sqrt(p0 * (1 - p0) / 10'000.0));
  CHECK_FALSE(d.gof.rejected(0.01));
}

TEST_CASE("identities with theory values") {
  const IdentityReport r = check_identities_exact(0.49);
  CHECK(r.all_pass());
  CHECK(r.q_hat == doctest::Approx(3.0 / 7.0));
  CHECK(r.r_hat == doctest::Approx(0.045));
  CHECK(0.5 * 0.51 * (1 + 3.0 / 7) == doctest::Approx(0.364286).epsilon(1e-5));
  CHECK(check_identities_exact(1.0).all_pass());
  CHECK(check_identities_exact(0.36).all_pass());
}

TEST_CASE("identities by Monte Carlo at p = 0.36") {
  const IdentityReport r = check_identities(0.36, 2000, 10'000, 4);
  CHECK(r.all_pass());
  CHECK(r.checks.size() == 4);
  CHECK(r.censored_fraction < 0.01);
  CHECK_THROWS_AS(check_identities(1.0, 10, 10, 1), Error);
}

TEST_CASE("q_k curve is pathwise monotone") {
  const QkCurve c = qk_schedule({0.2}, {100, 10, 1000}, 500, 3);
  REQUIRE(c.ks == std::vector<std::size_t>{10, 100, 1000});
  CHECK(c.monotonicity_violations == 0);
  for (std::size_t i = 1; i < c.ks.size(); ++i) CHECK(c.estimates[i].value >= c.estimates[i - 1].value);
  CHECK_THROWS_AS(qk_schedule({0.2}, {}, 10, 1), Error);
}
