#include "bann/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <tuple>

namespace bann {

namespace {

struct ContinuousKey {
  double t;
  double x;
  friend auto operator<=>(const ContinuousKey&, const ContinuousKey&) = default;
  double time() const { return t; }
  double position() const { return x; }
};

// Doubled time and position; every lattice collision lands on a half-integer.
struct LatticeKey {
  std::int64_t t2;
  std::int64_t x2;
  friend auto operator<=>(const LatticeKey&, const LatticeKey&) = default;
  double time() const { return 0.5 * static_cast<double>(t2); }
  double position() const { return 0.5 * static_cast<double>(x2); }
};

std::optional<ContinuousKey> collision_key(const Particle& a, const Particle& b,
                                           ContinuousKey*) {
  const double dx = b.position - a.position;
  if (a.speed == Speed::Right) {
    if (b.speed == Speed::Still) return ContinuousKey{dx, b.position};
    if (b.speed == Speed::Left) return ContinuousKey{0.5 * dx, 0.5 * (a.position + b.position)};
  } else if (a.speed == Speed::Still && b.speed == Speed::Left) {
    return ContinuousKey{dx, a.position};
  }
  return std::nullopt;
}

std::optional<LatticeKey> collision_key(const Particle& a, const Particle& b, LatticeKey*) {
  const auto xa = static_cast<std::int64_t>(std::llround(a.position));
  const auto xb = static_cast<std::int64_t>(std::llround(b.position));
  if (a.speed == Speed::Right) {
    if (b.speed == Speed::Still) return LatticeKey{2 * (xb - xa), 2 * xb};
    if (b.speed == Speed::Left) return LatticeKey{xb - xa, xa + xb};
  } else if (a.speed == Speed::Still && b.speed == Speed::Left) {
    return LatticeKey{2 * (xb - xa), 2 * xa};
  }
  return std::nullopt;
}

// Shared state and commit rule; the two engines differ only in how they pick
// the next event.
template <class Key>
class Dynamics {
 public:
  static constexpr std::int32_t kNone = -1;

  explicit Dynamics(const Configuration& config) : config_(config) {
    config.validate();
    if (config.mode == Mode::Lattice) {
      for (const auto& pt : config.particles) {
        if (pt.position != std::round(pt.position)) {
          throw Error("resolve: lattice positions must be integers");
        }
      }
    }
    const auto n = static_cast<std::int32_t>(config.size());
    prev_.resize(n);
    next_.resize(n);
    for (std::int32_t i = 0; i < n; ++i) {
      prev_[i] = i - 1;
      next_[i] = i + 1 < n ? i + 1 : kNone;
    }
    alive_.assign(n, 1);
    head_ = n > 0 ? 0 : kNone;
    res_.fates.assign(n, Fate{});
  }

  std::optional<Key> key(std::int32_t a, std::int32_t b) const {
    return collision_key(config_[a], config_[b], static_cast<Key*>(nullptr));
  }

  bool valid_pair(std::int32_t a, std::int32_t b) const {
    return alive_[a] && alive_[b] && next_[a] == b;
  }

  std::int32_t head() const { return head_; }
  std::int32_t next(std::int32_t a) const { return next_[a]; }

  // Commits the collision of adjacent (a, b) at key k, absorbing a third
  // particle if it arrives at the same point at the same time. Returns the
  // newly adjacent pair (either side may be kNone).
  std::pair<std::int32_t, std::int32_t> commit(std::int32_t a, std::int32_t b, const Key& k) {
    assert(valid_pair(a, b));
    CollisionEvent ev;
    ev.time = k.time();
    ev.position = k.position();
    std::int32_t first = a;
    std::int32_t last = b;
    const Speed sa = config_[a].speed;
    const Speed sb = config_[b].speed;
    if (sa == Speed::Right && sb == Speed::Still) {
      const std::int32_t c = next_[b];
      if (c != kNone && config_[c].speed == Speed::Left && key(b, c) == k) last = c;
    } else if (sa == Speed::Still && sb == Speed::Left) {
      const std::int32_t c = prev_[a];
      if (c != kNone && config_[c].speed == Speed::Right && key(c, a) == k) first = c;
    }
    if (last != b || first != a) {
      if (config_.mode == Mode::Continuous) ++res_.degenerate_tie_count;
      ev.count = 3;
      ev.participants = {static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(next_[first]),
                         static_cast<std::uint32_t>(last)};
    } else {
      ev.count = 2;
      ev.participants = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), 0};
    }
    const auto event_id = static_cast<std::int32_t>(res_.events.size());
    res_.events.push_back(ev);
    for (std::uint8_t i = 0; i < ev.count; ++i) {
      const auto s = ev.participants[i];
      alive_[s] = 0;
      res_.fates[s] = Fate{FateKind::Annihilated, event_id};
    }
    const std::int32_t l = prev_[first];
    const std::int32_t r = next_[last];
    if (l != kNone) next_[l] = r; else head_ = r;
    if (r != kNone) prev_[r] = l;
    return {l, r};
  }

  Resolution finish() {
    for (std::int32_t i = head_; i != kNone; i = next_[i]) {
      switch (config_[i].speed) {
        case Speed::Left: res_.fates[i].kind = FateKind::SurvivesLeft; break;
        case Speed::Still: res_.fates[i].kind = FateKind::SurvivesStill; break;
        case Speed::Right: res_.fates[i].kind = FateKind::SurvivesRight; break;
      }
    }
    if (config_.side == Side::HalfLine && head_ != kNone && config_[head_].speed == Speed::Left) {
      res_.origin_hit = OriginHit{static_cast<std::uint32_t>(head_), config_[head_].position};
    }
    return std::move(res_);
  }

 private:
  const Configuration& config_;
  std::vector<std::int32_t> prev_;
  std::vector<std::int32_t> next_;
  std::vector<char> alive_;
  std::int32_t head_ = kNone;
  Resolution res_;
};

template <class Key>
struct Candidate {
  Key key;
  std::int32_t a;
  std::int32_t b;
  // Min-heap order: earliest time, then leftmost position, then left slot.
  friend bool operator>(const Candidate& l, const Candidate& r) {
    return std::tie(l.key, l.a) > std::tie(r.key, r.a);
  }
};

template <class Key>
Resolution resolve_heap(const Configuration& config) {
  Dynamics<Key> dyn(config);
  std::vector<Candidate<Key>> storage;
  storage.reserve(config.size());
  std::priority_queue<Candidate<Key>, std::vector<Candidate<Key>>, std::greater<>> heap(
      std::greater<>{}, std::move(storage));
  const auto push = [&](std::int32_t a, std::int32_t b) {
    if (a == Dynamics<Key>::kNone || b == Dynamics<Key>::kNone) return;
    if (auto k = dyn.key(a, b)) heap.push({*k, a, b});
  };
  for (std::int32_t i = dyn.head(); i != Dynamics<Key>::kNone && dyn.next(i) != Dynamics<Key>::kNone;
       i = dyn.next(i)) {
    push(i, dyn.next(i));
  }
  while (!heap.empty()) {
    const Candidate<Key> c = heap.top();
    heap.pop();
    if (!dyn.valid_pair(c.a, c.b)) continue;
    const auto [l, r] = dyn.commit(c.a, c.b, c.key);
    push(l, r);
  }
  return dyn.finish();
}

template <class Key>
Resolution resolve_scan(const Configuration& config) {
  Dynamics<Key> dyn(config);
  for (;;) {
    std::optional<Candidate<Key>> best;
    for (std::int32_t i = dyn.head(); i != Dynamics<Key>::kNone; i = dyn.next(i)) {
      const std::int32_t j = dyn.next(i);
      if (j == Dynamics<Key>::kNone) break;
      if (auto k = dyn.key(i, j)) {
        Candidate<Key> c{*k, i, j};
        if (!best || *best > c) best = c;
      }
    }
    if (!best) break;
    dyn.commit(best->a, best->b, best->key);
  }
  return dyn.finish();
}

}  // namespace

std::vector<std::uint32_t> Resolution::partners(std::size_t slot) const {
  std::vector<std::uint32_t> out;
  const Fate& f = fates.at(slot);
  if (!f.annihilated()) return out;
  const CollisionEvent& ev = events[static_cast<std::size_t>(f.event)];
  for (std::uint8_t i = 0; i < ev.count; ++i) {
    if (ev.participants[i] != slot) out.push_back(ev.participants[i]);
  }
  return out;
}

Resolution resolve(const Configuration& config) {
  return config.mode == Mode::Lattice ? resolve_heap<LatticeKey>(config)
                                      : resolve_heap<ContinuousKey>(config);
}

Resolution resolve_oracle(const Configuration& config) {
  if (config.size() > 10000) throw Error("resolve_oracle: configuration too large for the oracle");
  return config.mode == Mode::Lattice ? resolve_scan<LatticeKey>(config)
                                      : resolve_scan<ContinuousKey>(config);
}

Configuration restrict(const Configuration& config, std::size_t i, std::size_t j) {
  if (i < 1 || i > j || j > config.size()) {
    throw Error("restrict: indices must satisfy 1 <= i <= j <= size");
  }
  Configuration out;
  out.mode = config.mode;
  out.side = config.side;
  out.particles.assign(config.particles.begin() + static_cast<std::ptrdiff_t>(i - 1),
                       config.particles.begin() + static_cast<std::ptrdiff_t>(j));
  out.forced_origin = config.forced_origin &&
                      std::any_of(out.particles.begin(), out.particles.end(),
                                  [](const Particle& p) { return p.position == 0.0; });
  out.reindex();
  return out;
}

std::vector<Finality> finality(const Configuration& config, const Resolution& res,
                               double right_edge) {
  std::vector<Finality> out(res.fates.size(), Finality::Provisional);
  for (std::size_t s = 0; s < res.fates.size(); ++s) {
    const Fate& f = res.fates[s];
    if (f.annihilated()) {
      const CollisionEvent& ev = res.events[static_cast<std::size_t>(f.event)];
      if (ev.position + ev.time < right_edge) out[s] = Finality::Final;
    } else if (f.kind == FateKind::SurvivesLeft) {
      if (config[s].position <= right_edge) out[s] = Finality::Final;
    }
  }
  return out;
}

SurvivorCounts count_survivors(const Resolution& res) {
  SurvivorCounts c;
  for (const Fate& f : res.fates) {
    switch (f.kind) {
      case FateKind::SurvivesLeft: ++c.n_left; break;
      case FateKind::SurvivesStill: ++c.n_still; break;
      case FateKind::SurvivesRight: ++c.n_right; break;
      case FateKind::Annihilated: break;
    }
  }
  return c;
}

}  // namespace bann
