#include <doctest.h>

#include <cmath>

#include "bann/engine.hpp"
#include "bann/lattice.hpp"

using namespace bann;

TEST_CASE("p = 1: nothing moves") {
  const LatticeStats s = lattice_run(1.0, 20, 200, 1);
  CHECK(s.q_hat.value == 0.0);
  CHECK(s.psi_hat.value == 1.0);
  CHECK(s.psi_direct.value == 1.0);
  CHECK(s.triple_rate == 0.0);
  CHECK(s.pairs_both_defined == 0);
  CHECK(s.d_histogram.empty());
  CHECK(verify_lattice_identity(s).all_pass());
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(lattice_run(0.5, 1, 10, 1), Error);
  CHECK_THROWS_AS(lattice_run(0.0, 10, 10, 1), Error);
}

TEST_CASE("partition of D comparisons and D support") {
  const LatticeStats s = lattice_run(0.5, 300, 3000, 4);
  REQUIRE(s.pairs_both_defined > 0);
  CHECK(s.p_d_gt + s.p_d_lt + s.p_d_eq == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& [d, n] : s.d_histogram) {
    CHECK(d >= 1);
    CHECK(d <= 300);
    CHECK(n > 0);
  }
  CHECK(s.uncensored_fraction() > 0.9);
}

TEST_CASE("triple events are symmetric about the stationary particle") {
  for (std::uint64_t t = 0; t < 2000; ++t) {
    RngStream s = derive_stream(17, t);
    const Configuration c = sample_fullline({0.5, Mode::Lattice}, 20, 20, true, s);
    const Resolution r = resolve(c);
    for (const auto& ev : r.events) {
      if (!ev.is_triple()) continue;
      const auto mid = static_cast<long long>(c[ev.participants[1]].position);
      REQUIRE(c[ev.participants[1]].speed == Speed::Still);
      REQUIRE(mid - static_cast<long long>(c[ev.participants[0]].position) ==
              static_cast<long long>(c[ev.participants[2]].position) - mid);
    }
  }
}

TEST_CASE("identities and inequalities at p = 0.5") {
  const LatticeStats s = lattice_run(0.5, 1000, 20'000, 12, 2);
  const IdentityReport rep = verify_lattice_identity(s);
  for (const auto& c : rep.checks) {
    INFO(c.name << " lhs=" << c.lhs << " rhs=" << c.rhs << " z=" << c.z);
    CHECK(c.pass);
  }
  const LatticeComparison cmp = compare_with_continuous(s);
  CHECK(cmp.theta_continuous == doctest::Approx(0.343146).epsilon(1e-5));
  CHECK(cmp.dichotomy_consistent);
  CHECK(s.psi_hat.value > cmp.theta_continuous);
  CHECK(std::abs(s.psi_hat.value - s.psi_direct.value) <=
        3 * std::hypot(s.psi_hat.std_error, s.psi_direct.std_error));
}

TEST_CASE("D has the same law in both windows") {
  const LatticeStats s = lattice_run(0.5, 200, 8000, 5);
  std::vector<std::uint64_t> a, b;
  for (const auto& [d, n] : s.d_histogram) {
    a.push_back(s.d_window_a.count(d) ? s.d_window_a.at(d) : 0);
    b.push_back(s.d_window_b.count(d) ? s.d_window_b.at(d) : 0);
  }
  CHECK_FALSE(chi_square_two_sample(a, b).rejected(0.01));
}

TEST_CASE("results do not depend on the worker count") {
  const LatticeStats a = lattice_run(0.5, 200, 2000, 5);
  const LatticeStats b = lattice_run(0.5, 200, 2000, 5, 4);
  CHECK(a.moments == b.moments);
  CHECK(a.d_histogram == b.d_histogram);
}
