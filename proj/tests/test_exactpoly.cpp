#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bann/cone.hpp"
#include "bann/engine.hpp"
#include "bann/estimators.hpp"
#include "bann/exactpoly.hpp"
#include "bann/rational_poly.hpp"

using namespace bann;

namespace {

const RationalPoly P = RationalPoly::identity();
const RationalPoly PB = RationalPoly::pbar();

RationalPoly c(long a, long b = 1) { return RationalPoly::constant(Rational(a, b)); }

}  // namespace

TEST_CASE("rational polynomial arithmetic") {
  const RationalPoly f = P * P - c(1);  // p^2 - 1
  const auto [q, r] = f.divmod(P - c(1));
  CHECK(q == P + c(1));
  CHECK(r.is_zero());
  CHECK(f(Rational(3)) == 8);
  CHECK(f.derivative() == P * Rational(2));
  CHECK((P - P).degree() == -1);
  CHECK(PB.to_fraction_list() == "[1/2, -1/2]");
  CHECK(PB.evaluate(0.2) == doctest::Approx(0.4));
  CHECK((P * Rational(3, 2) - c(1, 2)).to_latex() == "\\frac{3}{2}p - \\frac{1}{2}");
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-2") == -2);
  CHECK(parse_rational("0.32803") == Rational(32803, 100000));
  CHECK(parse_rational("1e-6") == Rational(1, 1000000));
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("sturm counting and root isolation") {
  const RationalPoly f = (P - c(1, 3)) * (P - c(1, 2)) * (P * P - c(2));  // roots 1/3, 1/2, +-sqrt2
  const SturmSequence s(f);
  CHECK(s.count(0, 1) == 2);
  CHECK(s.count(Rational(1, 3), 1) == 1);  // (a, b]
  CHECK(s.count(-2, 2) == 4);
  const auto r = isolate_smallest_root(f, Rational(1, 4), 1, Rational(1, 1000));
  REQUIRE(r);
  CHECK(r->exact());
  CHECK(r->lo == Rational(1, 3));
  const auto sq = smallest_root(P * P - c(2), 1, 2, Rational(1, 1000000));
  CHECK(sq.width() <= Rational(1, 1000000));
  CHECK(to_double(sq.lo) <= std::sqrt(2.0));
  CHECK(to_double(sq.hi) >= std::sqrt(2.0));
  CHECK_THROWS_AS(smallest_root(P * P + c(1), 0, 1, Rational(1, 10)), Error);
  CHECK_FALSE(isolate_smallest_root(P * P + c(1), 0, 1, Rational(1, 10)));
}

TEST_CASE("gap event probabilities") {
  CHECK(gap_event_probability({2, {{1, -1}}}, 2) == Rational(1, 2));
  CHECK(gap_event_probability({2, {{-1, 2}}}, 2) == Rational(2, 3));  // g1 < 2 g2
  CHECK(gap_event_probability({3, {}}, 3) == 1);
  CHECK(gap_event_probability({2, {{0, 0}}}, 2) == 0);
  CHECK(gap_event_probability({2, {{1, -1}, {-1, 1}}}, 2) == 0);
  // P(g1 > g2 > g3) = 1/6 and symmetric relabelings agree.
  CHECK(gap_event_probability({3, {{1, -1, 0}, {0, 1, -1}}}, 3) == Rational(1, 6));
  CHECK(gap_event_probability({3, {{0, 1, -1}, {-1, 0, 1}}}, 3) == Rational(1, 6));
  // P(g1 + g2 > 3 g3) = E[(1 + 3g) e^{-3g}] = 1/4 + 3/16.
  CHECK(gap_event_probability({3, {{1, 1, -3}}}, 3) == Rational(7, 16));
  CHECK_THROWS_AS(gap_event_probability({6, {}}, 6), Error);
  CHECK_THROWS_AS(gap_event_probability({2, {{1, 1, 1}}}, 2), Error);
}

TEST_CASE("symbolic resolution examples") {
  const std::vector<Speed> rsl{Speed::Right, Speed::Still, Speed::Left};
  const auto cells = symbolic_resolve(rsl);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].probability + cells[1].probability == 1);
  for (const auto& cell : cells) {
    CHECK(cell.probability == Rational(1, 2));
    const bool right_first = cell.fates[0] == FateKind::Annihilated;
    CHECK(cell.fates[2] == (right_first ? FateKind::SurvivesLeft : FateKind::Annihilated));
    CHECK(cell.origin_hit == right_first);
  }

  const std::vector<Speed> stills{Speed::Still, Speed::Still, Speed::Still};
  const auto one = symbolic_resolve(stills);
  REQUIRE(one.size() == 1);
  CHECK(one[0].probability == 1);
  CHECK(one[0].n_value == 3);

  const std::vector<Speed> rl{Speed::Right, Speed::Left};
  const auto pair = symbolic_resolve(rl);
  REQUIRE(pair.size() == 1);
  CHECK(pair[0].n_value == 0);

  const std::vector<Speed> seven(7, Speed::Still);
  CHECK_THROWS_AS(symbolic_resolve(seven), Error);
}

TEST_CASE("cell probabilities sum to one for every speed vector") {
  for (std::size_t k = 1; k <= 5; ++k) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < k; ++i) n *= 3;
    for (std::size_t code = 0; code < n; ++code) {
      std::vector<Speed> sp(k);
      std::size_t x = code;
      for (std::size_t i = 0; i < k; ++i, x /= 3) sp[i] = static_cast<Speed>(static_cast<int>(x % 3) - 1);
      Rational total = 0;
      for (const auto& cell : symbolic_resolve(sp)) total += cell.probability;
      REQUIRE(total == 1);
    }
  }
}

TEST_CASE("cell outcomes agree with the numeric engine") {
  // Sample gaps, find the cell whose inequalities hold, compare fates.
  for (std::uint64_t t = 0; t < 3000; ++t) {
    RngStream s = derive_stream(12, t);
    const Configuration cfg = sample_halfline({0.34}, 2 + t % 4, s);
    std::vector<Speed> sp;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      sp.push_back(cfg[i].speed);
      if (i > 0) gaps.push_back(cfg[i].position - cfg[i - 1].position);
    }
    const Resolution res = resolve(cfg);
    std::size_t matches = 0;
    for (const auto& cell : symbolic_resolve(sp)) {
      bool inside = true;
      for (const auto& form : cell.event.inequalities) {
        double v = 0;
        for (std::size_t j = 0; j < gaps.size(); ++j) v += static_cast<double>(form[j]) * gaps[j];
        inside &= v > 0;
      }
      if (!inside) continue;
      ++matches;
      for (std::size_t i = 0; i < cfg.size(); ++i) REQUIRE(cell.fates[i] == res.fates[i].kind);
      REQUIRE(cell.origin_hit == res.origin_hit.has_value());
    }
    REQUIRE(matches == 1);
  }
}

TEST_CASE("closed forms of E[N_k]") {
  CHECK(expected_Nk_poly(1) == (P * Rational(3) - c(1)) * Rational(1, 2));
  const RationalPoly en2 = expected_Nk_poly(2);
  CHECK(en2 == P * P * Rational(2) + P * PB - PB * PB * Rational(3));
  CHECK(en2(Rational(1, 3)) == 0);
  const RationalPoly en3 = P.pow(3) * Rational(3) + P * P * PB * Rational(7) - P * PB * PB * Rational(3, 2) -
                           PB.pow(3) * Rational(8);
  CHECK(expected_Nk_poly(3) == en3);
  CHECK(expected_Nk_poly(3)(Rational(1, 2)) == Rational(41, 64));
  CHECK(expected_Nk_poly(3)(Rational(1, 3)) == Rational(1, 54));
  CHECK(expected_Nk_poly(4, 2) == expected_Nk_poly(4, 1));
  CHECK_THROWS_AS(expected_Nk_poly(7), Error);
}

TEST_CASE("two-particle enumeration oracle") {
  // N and origin hit for the 9 speed pairs, worked out by hand; gaps play no role.
  const RationalPoly weight[3] = {PB, P, PB};  // Left, Still, Right
  const int n_value[3][3] = {{-2, 0, -1}, {0, 2, 1}, {0, 0, 0}};
  RationalPoly en, q;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const RationalPoly w = weight[a] * weight[b];
      en += w * Rational(n_value[a][b]);
      if (a == 0) q += w;
    }
  }
  CHECK(expected_Nk_poly(2) == en);
  CHECK(qk_poly(2) == q);
  CHECK(qk_poly(1) == (c(1) - P) * Rational(1, 2));
  CHECK(qk_poly(2) == qk_poly(1));
}

TEST_CASE("q_3 matches Monte Carlo") {
  const RationalPoly q3 = qk_poly(3);
  for (double p : {0.3, 0.5, 0.8}) {
    const Estimate e = estimate_qk({p}, 3, 40'000, 5);
    CHECK(std::abs(e.value - q3.evaluate(p)) <= 4 * e.std_error);
  }
}

TEST_CASE("p_c upper bound scan") {
  const auto rows = pc_upper_bound_scan(3, Rational(1, 1000000));
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[0].root);
  CHECK(rows[0].root->exact());
  CHECK(rows[0].root->lo == Rational(1, 3));
  REQUIRE(rows[1].root);
  CHECK(rows[1].root->lo == Rational(1, 3));
  REQUIRE(rows[2].root);
  CHECK(rows[2].root->width() <= Rational(1, 1000000));
  CHECK(std::abs(to_double(rows[2].root->lo) - 0.32803) < 5e-5);
  for (const auto& r : rows) CHECK(r.root->lo >= Rational(1, 4));
  // k = 1 on (1/4, 1/2) through the sign-change entry point.
  const RootInterval r1 = smallest_root(expected_Nk_poly(1), Rational(1, 4), Rational(1, 2), Rational(1, 1000000));
  CHECK(r1.contains(Rational(1, 3)));
}
