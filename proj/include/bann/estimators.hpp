// Monte Carlo estimators of q_k, r, theta, the law of surviving left-movers,
// and the algebraic identity checks, plus the closed-form phase-transition
// values they are compared against.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bann/model.hpp"
#include "bann/stats.hpp"

namespace bann {

/// Probability that the origin is reached from (0, inf): 1 for p <= 1/4,
/// otherwise 1/sqrt(p) - 1. Throws for p outside (0, 1].
double theory_q(double p);
/// Survival probability of a stationary particle at 0 on the full line.
double theory_theta(double p);

struct Estimate {
  std::string estimator;
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t n_censored = 0;
  std::uint64_t master_seed = 0;
  double p = 0.0;
  std::size_t k = 0;

  double censored_fraction() const {
    return n_trials ? static_cast<double>(n_censored) / static_cast<double>(n_trials) : 0.0;
  }
  /// Upper end of the censored interval [value, value + censored fraction].
  double censored_upper() const { return value + censored_fraction(); }
};

Estimate estimate_qk(const ModelParams& params, std::size_t k, std::uint64_t trials,
                     std::uint64_t seed, int workers = 1);

Estimate estimate_r(const ModelParams& params, std::size_t k, std::uint64_t trials,
                    std::uint64_t seed, int workers = 1);

struct ThetaEstimate {
  Estimate upper;  // origin particle survives within the window
  Estimate lower;  // ... and both flanking half-lines certify it
  std::uint64_t inconsistent = 0;  // full-line outcome disagreed with the two half-lines
};

/// Full line with k particles per side and a stationary particle at 0.
ThetaEstimate estimate_theta(const ModelParams& params, std::size_t k, std::uint64_t trials,
                             std::uint64_t seed, int workers = 1);

/// Side certificate used by estimate_theta's lower estimate: on the half-line
/// window the origin is not hit, surviving Stills outnumber surviving Rights,
/// and every annihilation left of the first surviving Still is light-cone Final.
bool side_certified(const Configuration& halfline);

struct LeftmoverDistribution {
  static constexpr std::size_t kBins = 12;  // counts 0..10 and >= 11
  std::vector<std::uint64_t> histogram;
  double mean = 0.0;
  double mean_stderr = 0.0;
  double q_theory = 0.0;
  double mean_theory = 0.0;  // q / (1 - q)
  TestResult gof;
  std::uint64_t trials = 0;
};

LeftmoverDistribution leftmover_count_distribution(const ModelParams& params, std::size_t k,
                                                   std::uint64_t trials, std::uint64_t seed,
                                                   int workers = 1);

struct IdentityReport {
  double p = 0.0;
  std::size_t k = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double q_hat = 0.0;
  double r_hat = 0.0;
  double censored_fraction = 0.0;
  std::vector<IdentityCheck> checks;

  bool all_pass() const;
};

/// Plug-in checks of q = (1-p)/2 (1+q) + r (1-q) + p q^3, r = p q^2 / 2, the
/// factorised residual (1-q)(1-p(1+q)^2) and P(origin hit, particle 1 Still
/// hit) = p q^2, all evaluated on one set of half-line windows.
IdentityReport check_identities(double p, std::size_t k, std::uint64_t trials,
                                std::uint64_t seed, int workers = 1);

/// Same checks with exact theory values substituted (no sampling).
IdentityReport check_identities_exact(double p);

struct QkCurve {
  std::vector<std::size_t> ks;
  std::vector<Estimate> estimates;
  std::uint64_t monotonicity_violations = 0;  // paths where a hit disappears as k grows
};

/// q_k along a k-schedule on shared configurations (each path sampled once at
/// the largest k and restricted).
QkCurve qk_schedule(const ModelParams& params, std::vector<std::size_t> ks,
                    std::uint64_t trials, std::uint64_t seed, int workers = 1);

}  // namespace bann
