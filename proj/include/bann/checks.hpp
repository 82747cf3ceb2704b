// Sampled and exact invariant checks shared by `selftest` and the acceptance
// driver. Each check reports a verdict plus a one-line detail that depends
// only on the seed and the sizes, never on the worker count.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bann/engine.hpp"

namespace bann {

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Same fates, partners, origin hit and event times (to 1e-9) in both results.
bool same_outcome(const Resolution& a, const Resolution& b);

/// resolve vs resolve_oracle over p in {0.2, 0.5, 0.8}, both modes: `small`
/// configurations of size 1..12 and `large` of size 1000 per p. Continuous
/// configurations must produce no degenerate ties.
CheckOutcome engine_equivalence_check(std::uint64_t small, std::uint64_t large, std::uint64_t seed,
                                      int workers = 1);

/// Final fates of a 20-particle window agree with the 60-particle extension.
CheckOutcome lightcone_check(std::uint64_t trials, std::uint64_t seed, int workers = 1);

/// N(1,l) >= N(1,k) + N(k+1,l) on `instances` sampled instances that satisfy
/// the precondition (each trial resamples until it finds one).
CheckOutcome superadditivity_check(std::uint64_t instances, std::uint64_t seed, int workers = 1);

struct CertificateTally {
  std::uint64_t traces = 0;
  std::uint64_t certified = 0;
  std::uint64_t hit_in_prefix = 0;        // origin hit within the explored region
  std::uint64_t hit_after_extension = 0;  // origin hit once the realization is 10x longer
  void merge(const CertificateTally& o);
  std::string detail() const;
};

/// Exploration traces at p = 0.49, k = 3 with `iters` blocks. A certified
/// trace can never see the origin hit inside its explored prefix; the tenfold
/// extension is an empirical probe only, since a finite trace says nothing
/// about particles beyond it.
CertificateTally certificate_tally(std::uint64_t traces, std::size_t iters, std::uint64_t seed,
                                   int workers = 1);

/// Passes when certificates occur and none is contradicted within its prefix.
CheckOutcome certificate_check(std::uint64_t traces, std::uint64_t seed, int workers = 1);

/// E[N_1], E[N_2] and E[N_3] against their closed forms, root 1/3 of E[N_2].
CheckOutcome exact_polynomials_check();

/// Root table for k <= 3 at tolerance 1e-6.
CheckOutcome pc_scan_check();

/// Algebraic identities with theory values substituted, on a p-grid.
CheckOutcome exact_identities_check();

/// Estimators give identical aggregates for 1 and 4 workers.
CheckOutcome worker_determinism_check(std::uint64_t seed);

/// Pathwise reversal checks at p = 0.49, k = 300.
CheckOutcome bijection_check(std::uint64_t trials, std::uint64_t seed, int workers = 1);

struct SelftestResult {
  std::vector<CheckOutcome> checks;
  bool all_pass() const;
};

SelftestResult run_selftest(std::uint64_t seed, int workers = 1);

}  // namespace bann
