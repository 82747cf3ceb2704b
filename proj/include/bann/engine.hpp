// Exact resolution of the annihilation dynamics.
//
// `resolve` is the production engine: alive particles form a doubly linked
// list and candidate collisions between adjacent approaching pairs sit in a
// min-heap keyed by (time, position, left slot). `resolve_oracle` computes the
// same outcome by rescanning every adjacent pair after each commit and is kept
// as the serial reference for equivalence tests.
//
// Lattice configurations are keyed by doubled integer times and positions, so
// simultaneous arrivals are detected exactly and resolved as triple
// annihilations. In continuous mode an exact tie can only come from a
// pathological input; it is resolved the same way and counted.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bann/model.hpp"

namespace bann {

struct CollisionEvent {
  double time = 0.0;
  double position = 0.0;
  // Slots (0-based, in configuration order) of the participants, left to right.
  std::array<std::uint32_t, 3> participants{};
  std::uint8_t count = 0;

  bool is_triple() const { return count == 3; }
  friend bool operator==(const CollisionEvent&, const CollisionEvent&) = default;
};

enum class FateKind : std::uint8_t { Annihilated, SurvivesLeft, SurvivesStill, SurvivesRight };

struct Fate {
  FateKind kind = FateKind::SurvivesStill;
  std::int32_t event = -1;  // index into Resolution::events when Annihilated

  bool annihilated() const { return kind == FateKind::Annihilated; }
  friend bool operator==(const Fate&, const Fate&) = default;
};

struct OriginHit {
  std::uint32_t slot = 0;
  double time = 0.0;
  friend bool operator==(const OriginHit&, const OriginHit&) = default;
};

struct Resolution {
  std::vector<Fate> fates;
  std::vector<CollisionEvent> events;  // commit order, non-decreasing in time
  std::optional<OriginHit> origin_hit;  // half-line only
  std::size_t degenerate_tie_count = 0;

  /// Slots annihilated together with `slot` (empty if it survives).
  std::vector<std::uint32_t> partners(std::size_t slot) const;
};

Resolution resolve(const Configuration& config);
Resolution resolve_oracle(const Configuration& config);

/// Particles i..j (1-based, inclusive) with original positions, reindexed.
Configuration restrict(const Configuration& config, std::size_t i, std::size_t j);

enum class Finality : std::uint8_t { Final, Provisional };

/// Light-cone classification for a window whose rightmost initial position is
/// `right_edge`: particles beyond the window move at speed at most 1, so they
/// cannot influence (t, y) when y + t < right_edge. A surviving Left particle
/// starting at x <= right_edge can never be caught; Still and Right survivors
/// stay Provisional.
std::vector<Finality> finality(const Configuration& config, const Resolution& res,
                               double right_edge);

struct SurvivorCounts {
  std::size_t n_left = 0;
  std::size_t n_still = 0;
  std::size_t n_right = 0;
  friend bool operator==(const SurvivorCounts&, const SurvivorCounts&) = default;
};

SurvivorCounts count_survivors(const Resolution& res);

}  // namespace bann
