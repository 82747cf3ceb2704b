// Finitary characterisation of the surviving phase.
//
// N(i, j) is the number of surviving Still particles minus the number of
// surviving Left particles when only particles i..j are kept. The block
// exploration discovers k particles at a time and then extends the discovered
// region until no Right particle survives in it; the block statistics it
// records are i.i.d. copies of N_k = N(1, k).
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bann/estimators.hpp"
#include "bann/model.hpp"

namespace bann {

/// Half-line particles generated lazily from one stream, so a realization can
/// be extended after the fact.
class ParticleSource {
 public:
  ParticleSource(const ModelParams& params, RngStream stream);

  const Configuration& config() const { return config_; }
  std::size_t size() const { return config_.size(); }
  /// Ensures at least n particles have been discovered.
  void extend_to(std::size_t n);

 private:
  ModelParams params_;
  RngStream stream_;
  Configuration config_;
};

int compute_N(const Configuration& config, std::size_t i, std::size_t j);

enum class Verdict { Holds, Violated, NotApplicable };

/// N(1, l) >= N(1, k) + N(k+1, l), checked when no Right particle survives in
/// the restriction to particles 1..k.
Verdict check_superadditivity(const Configuration& config, std::size_t k, std::size_t l);

struct ExplorationTrace {
  std::size_t k = 0;
  std::vector<std::size_t> K{0};          // K_0 = 0, K_1, ...
  std::vector<int> n_tilde;               // block statistics, one per iteration
  std::vector<std::size_t> extended_by;   // K_{n+1} - (K_n + k)
  bool truncated = false;
  bool first_block_still = false;

  std::size_t iterations() const { return n_tilde.size(); }
};

inline constexpr std::size_t kDefaultExtensionBudget = 1'000'000;

ExplorationTrace explore_blocks(std::size_t k, std::size_t n_iters, ParticleSource& source,
                                std::size_t budget = kDefaultExtensionBudget);
ExplorationTrace explore_blocks(const ModelParams& params, std::size_t k, std::size_t n_iters,
                                RngStream stream, std::size_t budget = kDefaultExtensionBudget);

/// First block all Still and every partial sum of block statistics from the
/// second on strictly above k. Always false on a truncated trace.
bool survival_certificate(const ExplorationTrace& trace, std::size_t k);

Estimate estimate_ENk(const ModelParams& params, std::size_t k, std::uint64_t trials,
                      std::uint64_t seed, int workers = 1);

/// `iter,K,N_tilde,extended_by,truncated`
void write_trace_csv(std::ostream& out, const ExplorationTrace& trace);

}  // namespace bann
