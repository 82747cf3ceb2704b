// Interval reversal on half-line configurations.
//
// With x1 the first particle and y1 its annihilation partner, rev() reflects
// every particle inside [x1, y1] through (x1 + y1) / 2 and flips its speed.
// It exchanges {origin hit, first particle Right and destroyed by a Still}
// with {origin hit, first particle Still and hit from the right,
// y1 - x1 < y0 - y1}, which is what the halving identity r = p q^2 / 2 rests on.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bann/engine.hpp"
#include "bann/model.hpp"
#include "bann/stats.hpp"

namespace bann {

struct EventFlags {
  bool first_right_hits_still = false;     // particle 1 Right, pair-annihilated by a Still
  bool first_still_hit_from_right = false;  // particle 1 Still, annihilated
  bool origin_hit = false;
  std::optional<double> y0;  // initial position of the first particle reaching 0
  std::optional<double> y1;  // initial position of particle 1's partner
  bool gap_comparison = false;  // y1 - x1 < y0 - y1 (both defined)
  // False when particle 1's fate is Provisional under the light-cone rule.
  bool determinate = true;
};

EventFlags event_flags(const Configuration& config, const Resolution& res);
EventFlags event_flags(const Configuration& config);

/// Throws Error if particle 1 survives (y1 undefined).
Configuration rev(const Configuration& config);
Configuration rev(const Configuration& config, double y1);

struct BijectionTally {
  std::uint64_t trials = 0;
  std::uint64_t censored = 0;
  std::uint64_t in_a = 0;          // origin hit and particle 1 Right hits a Still
  std::uint64_t in_b = 0;          // origin hit, particle 1 Still hit, y1-x1 < y0-y1
  std::uint64_t forward_fail = 0;  // rev(A) not in B or rev(rev(w)) != w
  std::uint64_t backward_fail = 0; // rev(B) not in A
  Moments moments{2};              // per trial (1_A, 1_B)

  void merge(const BijectionTally& o);
  bool pathwise_ok() const { return forward_fail == 0 && backward_fail == 0; }
};

/// Pathwise mapping checks of rev on one realization; updates the tally.
void check_bijection(const Configuration& config, BijectionTally& tally);

BijectionTally bijection_run(const ModelParams& params, std::size_t k, std::uint64_t trials,
                             std::uint64_t seed, int workers = 1);

struct HalvingReport {
  double p = 0.0;
  std::size_t k = 0;
  Mode mode = Mode::Continuous;
  std::uint64_t trials = 0;
  std::uint64_t censored = 0;
  std::uint64_t conditioned = 0;  // trials in {origin hit, particle 1 Still hit}
  IdentityCheck halving;          // P(y1-x1 < y0-y1 | conditioned) vs 1/2
  IdentityCheck base;             // P(conditioned) vs p q^2 with q from theory
  TestResult distance_test;       // two-sample KS, y1-x1 vs y0-y1
  double strict_margin_z = 0.0;   // (1/2 - freq) / std_error
};

HalvingReport verify_halving(const ModelParams& params, std::size_t k, std::uint64_t trials,
                             std::uint64_t seed, int workers = 1);

}  // namespace bann
