// Exact q_k and E[N_k] as polynomials in p.
//
// For a fixed speed vector the dynamics of k particles depend only on the k-1
// gaps, and every collision time is a gap sum divided by a relative speed of
// 1 or 2. Resolving the event-driven dynamics symbolically, branching on which
// candidate collision comes first, partitions the gap orthant into cones with
// a fixed outcome; their exponential masses are rational. Weighting by
// p^{#Still} pbar^{#moving} and summing gives polynomials with rational
// coefficients.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bann/cone.hpp"
#include "bann/engine.hpp"
#include "bann/model.hpp"
#include "bann/rational_poly.hpp"

namespace bann {

inline constexpr std::size_t kSymbolicCap = 6;

struct OutcomeCell {
  GapEvent event;
  std::vector<FateKind> fates;
  int n_value = 0;  // surviving Still minus surviving Left
  bool origin_hit = false;
  Rational probability;
};

/// Partition of the gap orthant for one speed vector. Cells with zero mass
/// are dropped, so the probabilities sum to exactly 1.
std::vector<OutcomeCell> symbolic_resolve(std::span<const Speed> speeds,
                                          std::size_t cap = kSymbolicCap);

struct ExactTables {
  std::size_t k = 0;
  RationalPoly expected_n;  // E[N_k]
  RationalPoly q;           // q_k
  std::size_t cells = 0;
};

/// E[N_k] and q_k together (one enumeration of the 3^k speed vectors).
ExactTables exact_tables(std::size_t k, int workers = 1);

RationalPoly expected_Nk_poly(std::size_t k, int workers = 1);
RationalPoly qk_poly(std::size_t k, int workers = 1);

struct ScanRow {
  std::size_t k = 0;
  std::optional<RootInterval> root;  // smallest root of E[N_k] in (1/4, 1/3]
};

/// Upper bounds on p_c from the smallest root of E[N_k], k = 1..kmax.
std::vector<ScanRow> pc_upper_bound_scan(std::size_t kmax, const Rational& tol, int workers = 1);

}  // namespace bann
