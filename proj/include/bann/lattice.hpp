// Discrete model: one particle per integer site, with triple collisions.
//
// Simultaneous arrival of a Right and a Left particle at a Still particle has
// positive probability on the lattice; all three annihilate. The halving step
// of the continuous model then fails: with D the site of the first particle
// reaching 0 and D' an independent copy, r = P(D > D') p q^2, and
// P(D > D') = (1 - P(D = D')) / 2 < 1/2.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "bann/estimators.hpp"
#include "bann/stats.hpp"

namespace bann {

struct LatticeStats {
  double p = 0.0;
  std::size_t k = 0;
  std::uint64_t trials = 0;  // each trial: two half-line windows and one full line
  std::uint64_t seed = 0;

  Estimate q_hat;
  Estimate r_hat;
  Estimate psi_hat;     // (1 - q)^2
  Estimate psi_direct;  // conditioned origin particle survives on the full line
  std::map<std::int64_t, std::uint64_t> d_histogram;  // both windows
  std::map<std::int64_t, std::uint64_t> d_window_a;
  std::map<std::int64_t, std::uint64_t> d_window_b;

  std::uint64_t pairs_both_defined = 0;
  double p_d_gt = 0.0;       // P(D > D' | both defined)
  double p_d_lt = 0.0;
  double p_d_eq = 0.0;       // P(D = D' | both defined)
  double p_d_eq_joint = 0.0; // P(D = D' < inf)
  double triple_rate = 0.0;  // origin particle dies in a triple collision
  std::uint64_t censored = 0;

  // Per-trial columns (see lattice.cpp) for delta-method standard errors.
  Moments moments;

  double uncensored_fraction() const;
};

LatticeStats lattice_run(double p, std::size_t k, std::uint64_t trials, std::uint64_t seed,
                         int workers = 1);

/// r vs P(D>D') p q^2, triple-involvement rate vs P(D = D' < inf), and
/// P(D>D') vs (1 - P(D=D')) / 2; each at 3 standard errors.
IdentityReport verify_lattice_identity(const LatticeStats& stats);

struct LatticeComparison {
  double r_gap_z = 0.0;       // (p q^2 / 2 - r) / std_error
  double psi_margin_z = 0.0;  // (psi - theta(p)) / std_error
  double theta_continuous = 0.0;
  bool dichotomy_consistent = true;  // q < 1 - 3se implies q < 1/sqrt(p) - 1 + 3se
};

LatticeComparison compare_with_continuous(const LatticeStats& stats);

}  // namespace bann
