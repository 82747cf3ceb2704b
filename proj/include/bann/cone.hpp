// Exact probabilities of homogeneous linear events over i.i.d. unit
// exponential gaps.
//
// An event {c_1 . g > 0, ..., c_m . g > 0} with g in (0, inf)^d is a rational
// polyhedral cone. It is split into interior-disjoint simplicial cones by
// repeated edge subdivision against each half-space; a simplicial cone with
// generators v_1..v_d carries mass |det V| / prod_i <1, v_i> under the density
// exp(-<1, g>). Boundaries are null sets, so strict and non-strict
// inequalities give the same value.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bann/rational_poly.hpp"

namespace bann {

using LinearForm = std::vector<std::int64_t>;

struct GapEvent {
  std::size_t dim = 0;
  std::vector<LinearForm> inequalities;  // each means form . g > 0
};

/// A union of interior-disjoint simplicial cones inside the positive orthant.
class ConeSet {
 public:
  using Vec = std::vector<Integer>;
  struct Simplicial {
    std::vector<Vec> generators;  // dim vectors, primitive, non-negative
  };

  static ConeSet orthant(std::size_t dim);

  std::size_t dim() const { return dim_; }
  bool empty() const { return cones_.empty(); }
  std::size_t size() const { return cones_.size(); }
  const std::vector<Simplicial>& cones() const { return cones_; }

  /// Intersection with the half-space {form . g > 0}.
  ConeSet intersect(const LinearForm& form) const;
  ConeSet intersect(const std::vector<LinearForm>& forms) const;

  Rational probability() const;

 private:
  std::size_t dim_ = 0;
  std::vector<Simplicial> cones_;
};

/// Probability of the event under i.i.d. Exp(1) gaps. An empty inequality
/// list is the whole orthant; an all-zero form is unsatisfiable.
Rational gap_event_probability(const GapEvent& event, std::size_t dim);

Rational simplicial_mass(const std::vector<ConeSet::Vec>& generators);

}  // namespace bann
