#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bann/engine.hpp"

using namespace bann;

namespace {

Configuration make(std::initializer_list<std::pair<double, Speed>> items, Mode mode = Mode::Continuous,
                   Side side = Side::HalfLine) {
  Configuration c;
  c.mode = mode;
  c.side = side;
  for (const auto& [x, s] : items) c.particles.push_back({0, x, s});
  c.reindex();
  return c;
}

bool same_outcome(const Resolution& a, const Resolution& b) {
  if (a.fates != b.fates || a.origin_hit != b.origin_hit || a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    if (a.events[i].participants != b.events[i].participants || a.events[i].count != b.events[i].count) return false;
    if (std::abs(a.events[i].time - b.events[i].time) > 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("single left mover reaches the origin") {
  const Resolution r = resolve(make({{1.0, Speed::Left}}));
  REQUIRE(r.origin_hit);
  CHECK(r.origin_hit->slot == 0);
  CHECK(r.origin_hit->time == 1.0);
  CHECK(r.fates[0].kind == FateKind::SurvivesLeft);
}

TEST_CASE("preemption: a later pair can close first") {
  const Configuration c =
      make({{0.0, Speed::Right}, {10.0, Speed::Still}, {11.0, Speed::Left}}, Mode::Continuous, Side::FullLine);
  const Resolution r = resolve(c);
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].time == 1.0);
  CHECK(r.events[0].position == 10.0);
  CHECK(r.fates[0].kind == FateKind::SurvivesRight);
  CHECK(r.fates[1].annihilated());
  CHECK(r.fates[2].annihilated());
  CHECK(same_outcome(r, resolve_oracle(c)));
}

TEST_CASE("lattice triple collision") {
  const Configuration c = make({{1, Speed::Right}, {2, Speed::Still}, {3, Speed::Left}}, Mode::Lattice);
  const Resolution r = resolve(c);
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].is_triple());
  CHECK(r.events[0].time == 1.0);
  CHECK(r.events[0].position == 2.0);
  for (const Fate& f : r.fates) CHECK(f.annihilated());
  CHECK_FALSE(r.origin_hit);
  CHECK(r.degenerate_tie_count == 0);
  CHECK(same_outcome(r, resolve_oracle(c)));
}

TEST_CASE("continuous exact tie is counted as degenerate") {
  const Configuration c = make({{1, Speed::Right}, {2, Speed::Still}, {3, Speed::Left}});
  const Resolution r = resolve(c);
  CHECK(r.degenerate_tie_count == 1);
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].is_triple());
}

TEST_CASE("right mover hits the still particle first") {
  const Resolution r = resolve(make({{1, Speed::Right}, {3, Speed::Still}, {7, Speed::Left}}));
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].time == 2.0);
  CHECK(r.events[0].position == 3.0);
  CHECK(r.fates[2].kind == FateKind::SurvivesLeft);
  REQUIRE(r.origin_hit);
  CHECK(r.origin_hit->slot == 2);
  CHECK(r.origin_hit->time == 7.0);
  CHECK(r.partners(0) == std::vector<std::uint32_t>{1});
  CHECK(r.partners(2).empty());
}

TEST_CASE("oracle on empty and invalid input") {
  const Resolution r = resolve_oracle(Configuration{});
  CHECK(r.fates.empty());
  CHECK(r.events.empty());
  CHECK_FALSE(r.origin_hit);
  const Configuration bad = make({{2, Speed::Left}, {1, Speed::Left}});
  CHECK_THROWS_AS(resolve(bad), Error);
  CHECK_THROWS_AS(resolve_oracle(bad), Error);
}

TEST_CASE("restrict") {
  RngStream s = derive_stream(1, 1);
  const Configuration c = sample_halfline({0.4}, 10, s);
  CHECK(restrict(c, 1, 10) == c);
  const Configuration one = restrict(c, 2, 2);
  REQUIRE(one.size() == 1);
  CHECK(one[0].position == c[1].position);
  CHECK(one[0].index == 1);
  CHECK_THROWS_AS(restrict(c, 0, 3), Error);
  CHECK_THROWS_AS(restrict(c, 4, 3), Error);
  CHECK_THROWS_AS(restrict(c, 1, 11), Error);
}

TEST_CASE("finality examples") {
  // Two particles meeting at (t, y) = (3, 90) and (15, 90).
  const Configuration near = make({{87, Speed::Right}, {90, Speed::Still}, {100, Speed::Still}});
  CHECK(finality(near, resolve(near), 100)[0] == Finality::Final);
  const Configuration far = make({{75, Speed::Right}, {90, Speed::Still}, {100, Speed::Still}});
  const auto f = finality(far, resolve(far), 100);
  CHECK(f[0] == Finality::Provisional);
  CHECK(f[2] == Finality::Provisional);  // surviving Still

  const Configuration left = make({{1, Speed::Left}});
  CHECK(finality(left, resolve(left), 1)[0] == Finality::Final);
  const Configuration right = make({{1, Speed::Right}});
  CHECK(finality(right, resolve(right), 1)[0] == Finality::Provisional);
}

TEST_CASE("survivor counts") {
  CHECK(count_survivors(resolve(make({{1, Speed::Still}, {2, Speed::Still}, {3, Speed::Still}, {4, Speed::Still},
                                      {5, Speed::Still}}))) == SurvivorCounts{0, 5, 0});
  CHECK(count_survivors(resolve(make({{1, Speed::Right}, {2, Speed::Left}}))) == SurvivorCounts{0, 0, 0});
  CHECK(count_survivors(resolve(make({{1, Speed::Left}, {2, Speed::Left}}))) == SurvivorCounts{2, 0, 0});
}

TEST_CASE("heap engine agrees with the rescanning oracle") {
  std::size_t checked = 0;
  for (double p : {0.2, 0.5, 0.8}) {
    for (Mode mode : {Mode::Continuous, Mode::Lattice}) {
      for (std::uint64_t t = 0; t < 3000; ++t) {
        RngStream s = derive_stream(123, t);
        const Configuration c = sample_halfline({p, mode}, 1 + t % 12, s);
        const Resolution a = resolve(c);
        REQUIRE(same_outcome(a, resolve_oracle(c)));
        if (mode == Mode::Continuous) REQUIRE(a.degenerate_tie_count == 0);
        ++checked;
      }
      for (std::uint64_t t = 0; t < 5; ++t) {
        RngStream s = derive_stream(321, t);
        const Configuration c = sample_halfline({p, mode}, 1000, s);
        REQUIRE(same_outcome(resolve(c), resolve_oracle(c)));
      }
      RngStream s = derive_stream(77, 0);
      const Configuration full = sample_fullline({p, mode}, 30, 30, true, s);
      REQUIRE(same_outcome(resolve(full), resolve_oracle(full)));
    }
  }
  CHECK(checked == 18000);
}

TEST_CASE("resolution invariants on random configurations") {
  for (Mode mode : {Mode::Continuous, Mode::Lattice}) {
    for (std::uint64_t t = 0; t < 2000; ++t) {
      RngStream s = derive_stream(55, t);
      const Configuration c = sample_halfline({0.2 + 0.3 * static_cast<double>(t % 3), mode}, 40, s);
      const Resolution r = resolve(c);
      std::size_t dead = 0, pairs = 0, triples = 0;
      for (std::size_t e = 0; e < r.events.size(); ++e) {
        const CollisionEvent& ev = r.events[e];
        if (e > 0) REQUIRE(r.events[e - 1].time <= ev.time);
        ev.is_triple() ? ++triples : ++pairs;
        for (std::size_t j = 0; j < ev.count; ++j) {
          const std::uint32_t slot = ev.participants[j];
          REQUIRE(r.fates[slot].event == static_cast<std::int32_t>(e));
          // Every participant is at the event position at the event time.
          REQUIRE(std::abs(c[slot].position + velocity(c[slot].speed) * ev.time - ev.position) < 1e-9);
        }
        if (ev.is_triple()) {
          REQUIRE(mode == Mode::Lattice);
          const double mid = c[ev.participants[1]].position;
          REQUIRE(c[ev.participants[1]].speed == Speed::Still);
          REQUIRE(mid - c[ev.participants[0]].position == c[ev.participants[2]].position - mid);
        }
      }
      for (const Fate& f : r.fates) dead += f.annihilated();
      REQUIRE(dead == 2 * pairs + 3 * triples);

      // Surviving Left particles precede surviving Stills, which precede surviving Rights.
      int last = -2;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (r.fates[i].annihilated()) continue;
        const int v = velocity(c[i].speed);
        REQUIRE(v >= last);
        last = v;
        if (r.fates[i].kind == FateKind::SurvivesLeft) REQUIRE(c[i].speed == Speed::Left);
        if (r.fates[i].kind == FateKind::SurvivesStill) REQUIRE(c[i].speed == Speed::Still);
        if (r.fates[i].kind == FateKind::SurvivesRight) REQUIRE(c[i].speed == Speed::Right);
      }
      const bool any_left = std::any_of(r.fates.begin(), r.fates.end(),
                                        [](const Fate& f) { return f.kind == FateKind::SurvivesLeft; });
      REQUIRE(any_left == r.origin_hit.has_value());
    }
  }
}

TEST_CASE("final fates survive extension of the window") {
  for (Mode mode : {Mode::Continuous, Mode::Lattice}) {
    for (std::uint64_t t = 0; t < 10'000; ++t) {
      RngStream s = derive_stream(909, t);
      const Configuration big = sample_halfline({0.3 + 0.1 * static_cast<double>(t % 5), mode}, 60, s);
      const Configuration win = restrict(big, 1, 20);
      const Resolution rw = resolve(win);
      const Resolution rb = resolve(big);
      const auto fin = finality(win, rw, win.particles.back().position);
      for (std::size_t i = 0; i < win.size(); ++i) {
        if (fin[i] != Finality::Final) continue;
        REQUIRE(rw.fates[i].kind == rb.fates[i].kind);
        if (rw.fates[i].annihilated()) {
          REQUIRE(rw.partners(i) == rb.partners(i));
          REQUIRE(rw.events[rw.fates[i].event].time == rb.events[rb.fates[i].event].time);
        }
      }
    }
  }
}

TEST_CASE("origin hit is monotone in the window size") {
  for (std::uint64_t t = 0; t < 300; ++t) {
    RngStream s = derive_stream(31, t);
    const Configuration c = sample_halfline({0.3}, 60, s);
    bool hit = false;
    for (std::size_t k = 1; k <= c.size(); ++k) {
      const bool now = resolve(restrict(c, 1, k)).origin_hit.has_value();
      REQUIRE(!(hit && !now));
      hit = now;
    }
  }
}

TEST_CASE("no degenerate ties in continuous mode") {
  std::size_t ties = 0;
  for (std::uint64_t t = 0; t < 100'000; ++t) {
    RngStream s = derive_stream(2024, t);
    ties += resolve(sample_halfline({0.4}, 10, s)).degenerate_tie_count;
  }
  CHECK(ties == 0);
}
