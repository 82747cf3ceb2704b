#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bann/engine.hpp"
#include "bann/exactpoly.hpp"
#include "bann/explorer.hpp"

using namespace bann;

namespace {

Configuration make(std::initializer_list<Speed> speeds) {
  Configuration c;
  double x = 0;
  for (Speed s : speeds) c.particles.push_back({0, x += 1.0, s});
  c.reindex();
  return c;
}

}  // namespace

TEST_CASE("N on simple blocks") {
  CHECK(compute_N(make({Speed::Still, Speed::Still, Speed::Still}), 1, 3) == 3);
  CHECK(compute_N(make({Speed::Left, Speed::Left, Speed::Left, Speed::Left}), 1, 4) == -4);
  CHECK(compute_N(make({Speed::Right, Speed::Left}), 1, 2) == 0);
  CHECK_THROWS_AS(compute_N(make({Speed::Left}), 1, 2), Error);

  RngStream s = derive_stream(3, 3);
  const Configuration c = sample_halfline({0.4}, 30, s);
  const SurvivorCounts sc = count_survivors(resolve(restrict(c, 1, 12)));
  CHECK(compute_N(c, 1, 12) == static_cast<int>(sc.n_still) - static_cast<int>(sc.n_left));
}

TEST_CASE("superadditivity examples") {
  const Configuration stills = make({Speed::Still, Speed::Still, Speed::Still, Speed::Still});
  CHECK(check_superadditivity(stills, 2, 4) == Verdict::Holds);
  CHECK(compute_N(stills, 1, 4) == compute_N(stills, 1, 2) + compute_N(stills, 3, 4));

  const Configuration rll = make({Speed::Right, Speed::Left, Speed::Left});
  CHECK(compute_N(rll, 1, 3) == -1);
  CHECK(check_superadditivity(rll, 2, 3) == Verdict::Holds);

  const Configuration open = make({Speed::Right, Speed::Still, Speed::Left});
  CHECK(check_superadditivity(open, 1, 3) == Verdict::NotApplicable);
  CHECK_THROWS_AS(check_superadditivity(open, 3, 3), Error);
}

TEST_CASE("superadditivity on sampled instances") {
  std::size_t applicable = 0, violations = 0;
  for (std::uint64_t t = 0; t < 10'000; ++t) {
    RngStream s = derive_stream(44, t);
    const std::size_t l = 2 + t % 30;
    const Configuration c = sample_halfline({0.2 + 0.05 * static_cast<double>(t % 12), t % 2 ? Mode::Lattice : Mode::Continuous}, l, s);
    const std::size_t k = 1 + s.next_u64() % (l - 1);
    const Verdict v = check_superadditivity(c, k, l);
    applicable += v != Verdict::NotApplicable;
    violations += v == Verdict::Violated;
  }
  CHECK(applicable > 1000);
  CHECK(violations == 0);
}

TEST_CASE("exploration with only stationary particles") {
  const ExplorationTrace tr = explore_blocks({1.0}, 3, 2, derive_stream(1, 1));
  CHECK(tr.K == std::vector<std::size_t>{0, 3, 6});
  CHECK(tr.n_tilde == std::vector<int>{3, 3});
  CHECK(tr.extended_by == std::vector<std::size_t>{0, 0});
  CHECK_FALSE(tr.truncated);
  CHECK(tr.first_block_still);
  CHECK(survival_certificate(tr, 3));
  CHECK_THROWS_AS(explore_blocks({1.0}, 0, 2, derive_stream(1, 1)), Error);
}

TEST_CASE("exploration trace invariants") {
  for (std::uint64_t t = 0; t < 300; ++t) {
    ParticleSource src({0.4}, derive_stream(8, t));
    const ExplorationTrace tr = explore_blocks(3, 6, src);
    REQUIRE_FALSE(tr.truncated);
    const Configuration& c = src.config();
    for (std::size_t n = 0; n < tr.iterations(); ++n) {
      REQUIRE(tr.K[n + 1] >= tr.K[n] + 3);
      REQUIRE(tr.K[n + 1] == tr.K[n] + 3 + tr.extended_by[n]);
      REQUIRE(std::abs(tr.n_tilde[n]) <= 3);
      REQUIRE(tr.n_tilde[n] == compute_N(c, tr.K[n] + 1, tr.K[n] + 3));
      // No surviving Right particle in the discovered region, and the region is minimal.
      REQUIRE(count_survivors(resolve(restrict(c, 1, tr.K[n + 1]))).n_right == 0);
      for (std::size_t m = tr.K[n] + 3; m < tr.K[n + 1]; ++m) {
        REQUIRE(count_survivors(resolve(restrict(c, 1, m))).n_right > 0);
      }
    }
  }
}

TEST_CASE("extension budget truncates") {
  // At small p a Right particle often needs more than four extra particles.
  bool saw_truncation = false;
  for (std::uint64_t t = 0; t < 50 && !saw_truncation; ++t) {
    ParticleSource s({0.05}, derive_stream(5, t));
    saw_truncation = explore_blocks(1, 50, s, 4).truncated;
  }
  CHECK(saw_truncation);
  ExplorationTrace tr;
  tr.truncated = true;
  tr.n_tilde = {3};
  CHECK_FALSE(survival_certificate(tr, 3));
}

TEST_CASE("consecutive block statistics are independent copies of N_k") {
  std::vector<std::vector<std::uint64_t>> pairs(7, std::vector<std::uint64_t>(7, 0));
  std::vector<std::uint64_t> second(7, 0), fresh(7, 0);
  for (std::uint64_t t = 0; t < 20'000; ++t) {
    const ExplorationTrace tr = explore_blocks({0.49}, 3, 2, derive_stream(12, t));
    ++pairs[tr.n_tilde[0] + 3][tr.n_tilde[1] + 3];
    ++second[tr.n_tilde[1] + 3];
    RngStream s = derive_stream(13, t);
    ++fresh[compute_N(sample_halfline({0.49}, 3, s), 1, 3) + 3];
  }
  CHECK_FALSE(chi_square_independence(pairs).rejected(0.01));
  CHECK_FALSE(chi_square_two_sample(second, fresh).rejected(0.01));
}

TEST_CASE("certificate soundness within the explored prefix") {
  std::size_t certified = 0;
  for (std::uint64_t t = 0; t < 3000; ++t) {
    ParticleSource src({0.49}, derive_stream(71, t));
    const ExplorationTrace tr = explore_blocks(3, 10, src);
    const bool cert = survival_certificate(tr, 3);
    const bool hit = resolve(restrict(src.config(), 1, tr.K.back())).origin_hit.has_value();
    if (hit) REQUIRE_FALSE(cert);
    certified += cert;
  }
  CHECK(certified > 0);
}

TEST_CASE("a finite certificate says nothing about particles beyond the trace") {
  // Ten blocks give partial sums 3,4,...,9,6,5,6 and N(1,30) = 6, yet particles
  // 31..57 bring enough surviving Left particles to reach the origin.
  ParticleSource src({0.49}, derive_stream(20240610, 15090));
  const ExplorationTrace tr = explore_blocks(3, 10, src);
  REQUIRE(survival_certificate(tr, 3));
  REQUIRE(tr.K.back() == 30);
  CHECK_FALSE(resolve(restrict(src.config(), 1, 30)).origin_hit);
  CHECK(compute_N(src.config(), 1, 30) == 6);
  src.extend_to(300);
  const Resolution r = resolve(src.config());
  REQUIRE(r.origin_hit);
  CHECK(r.origin_hit->slot + 1 == 57);
}

TEST_CASE("partial sums drift upward when E[N_3] > 0") {
  const double en3 = expected_Nk_poly(3).evaluate(0.4);
  CHECK(en3 > 0);
  long long total = 0;
  std::size_t count = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    const ExplorationTrace tr = explore_blocks({0.4}, 3, 20, derive_stream(6, t));
    for (int v : tr.n_tilde) total += v, ++count;
  }
  CHECK(static_cast<double>(total) / static_cast<double>(count) > 0.0);
}

TEST_CASE("Monte Carlo E[N_k] against the exact polynomials") {
  const Estimate e1 = estimate_ENk({0.5}, 1, 40'000, 2);
  CHECK(std::abs(e1.value - 0.25) <= 3 * e1.std_error);
  const Estimate e3 = estimate_ENk({0.5}, 3, 40'000, 2);
  CHECK(std::abs(e3.value - 0.640625) <= 3 * e3.std_error);
  const Estimate t3 = estimate_ENk({1.0 / 3.0}, 3, 40'000, 3);
  CHECK(std::abs(t3.value - 1.0 / 54.0) <= 3 * t3.std_error);
  for (double p : {0.3, 0.4, 0.5}) {
    const Estimate e = estimate_ENk({p}, 4, 20'000, 7);
    CHECK(std::abs(e.value - expected_Nk_poly(4).evaluate(p)) <= 4 * e.std_error);
  }
}

TEST_CASE("trace csv") {
  const ExplorationTrace tr = explore_blocks({1.0}, 2, 2, derive_stream(1, 1));
  std::ostringstream os;
  write_trace_csv(os, tr);
  CHECK(os.str() == "iter,K,N_tilde,extended_by,truncated\n1,2,2,0,0\n2,4,2,0,0\n");
}
