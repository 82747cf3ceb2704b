#include "bann/exactpoly.hpp"

#include <algorithm>

#include "bann/parallel.hpp"

namespace bann {

namespace {

struct Candidate {
  std::size_t left;   // position in the alive list
  LinearForm time2;   // twice the collision time as a form in the gaps
};

bool approaching(Speed a, Speed b) { return velocity(a) > velocity(b); }

// Twice the collision time of slots a < b: 2 (X_b - X_a) / (v_a - v_b).
LinearForm doubled_time(std::span<const Speed> speeds, std::size_t a, std::size_t b, std::size_t dim) {
  LinearForm f(dim, 0);
  const std::int64_t scale = velocity(speeds[a]) - velocity(speeds[b]) == 2 ? 1 : 2;
  for (std::size_t j = a; j < b; ++j) f[j] = scale;
  return f;
}

struct Node {
  std::vector<std::size_t> alive;
  std::vector<FateKind> fates;
  std::vector<LinearForm> constraints;
  ConeSet cones;
};

void descend(std::span<const Speed> speeds, std::size_t dim, Node node, std::vector<OutcomeCell>& out) {
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i + 1 < node.alive.size(); ++i) {
    const std::size_t a = node.alive[i];
    const std::size_t b = node.alive[i + 1];
    if (approaching(speeds[a], speeds[b])) cands.push_back({i, doubled_time(speeds, a, b, dim)});
  }
  if (cands.empty()) {
    OutcomeCell cell;
    cell.probability = node.cones.probability();
    if (cell.probability == 0) return;
    cell.event = GapEvent{dim, std::move(node.constraints)};
    cell.fates = std::move(node.fates);
    for (std::size_t s : node.alive) {
      switch (speeds[s]) {
        case Speed::Left:
          cell.fates[s] = FateKind::SurvivesLeft;
          --cell.n_value;
          cell.origin_hit = true;
          break;
        case Speed::Still:
          cell.fates[s] = FateKind::SurvivesStill;
          ++cell.n_value;
          break;
        case Speed::Right: cell.fates[s] = FateKind::SurvivesRight; break;
      }
    }
    out.push_back(std::move(cell));
    return;
  }
  for (std::size_t c = 0; c < cands.size(); ++c) {
    // Candidate c strictly precedes every other candidate.
    std::vector<LinearForm> added;
    for (std::size_t d = 0; d < cands.size(); ++d) {
      if (d == c) continue;
      LinearForm diff(dim);
      for (std::size_t j = 0; j < dim; ++j) diff[j] = cands[d].time2[j] - cands[c].time2[j];
      added.push_back(std::move(diff));
    }
    ConeSet cones = node.cones.intersect(added);
    if (cones.empty()) continue;
    Node child;
    child.cones = std::move(cones);
    child.constraints = node.constraints;
    child.constraints.insert(child.constraints.end(), added.begin(), added.end());
    child.fates = node.fates;
    const std::size_t i = cands[c].left;
    child.fates[node.alive[i]] = FateKind::Annihilated;
    child.fates[node.alive[i + 1]] = FateKind::Annihilated;
    child.alive = node.alive;
    child.alive.erase(child.alive.begin() + static_cast<std::ptrdiff_t>(i),
                      child.alive.begin() + static_cast<std::ptrdiff_t>(i + 2));
    descend(speeds, dim, std::move(child), out);
  }
}

std::size_t pow3(std::size_t k) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < k; ++i) n *= 3;
  return n;
}

}  // namespace

std::vector<OutcomeCell> symbolic_resolve(std::span<const Speed> speeds, std::size_t cap) {
  if (speeds.empty()) throw Error("symbolic_resolve: need at least one particle");
  if (speeds.size() > cap) {
    throw Error("symbolic_resolve: " + std::to_string(speeds.size()) + " particles exceed the cap of " +
                std::to_string(cap));
  }
  const std::size_t dim = speeds.size() - 1;
  Node root;
  for (std::size_t i = 0; i < speeds.size(); ++i) root.alive.push_back(i);
  root.fates.assign(speeds.size(), FateKind::Annihilated);
  root.cones = ConeSet::orthant(dim);
  std::vector<OutcomeCell> out;
  descend(speeds, dim, std::move(root), out);
  return out;
}

ExactTables exact_tables(std::size_t k, int workers) {
  if (k == 0 || k > kSymbolicCap) {
    throw Error("exact_tables: k must lie in 1.." + std::to_string(kSymbolicCap));
  }
  struct PerVector {
    std::size_t n_still = 0;
    Rational expected_n;
    Rational hit;
    std::size_t cells = 0;
  };
  const auto rows = map_trials<PerVector>(pow3(k), workers, [k](std::uint64_t code) {
    std::vector<Speed> speeds(k);
    for (std::size_t i = 0; i < k; ++i) {
      speeds[i] = static_cast<Speed>(static_cast<int>(code % 3) - 1);
      code /= 3;
    }
    PerVector row;
    row.n_still = static_cast<std::size_t>(std::count(speeds.begin(), speeds.end(), Speed::Still));
    for (const OutcomeCell& cell : symbolic_resolve(speeds)) {
      row.expected_n += cell.probability * cell.n_value;
      if (cell.origin_hit) row.hit += cell.probability;
      ++row.cells;
    }
    return row;
  });

  std::vector<Rational> by_still_n(k + 1), by_still_q(k + 1);
  ExactTables t;
  t.k = k;
  for (const auto& row : rows) {
    by_still_n[row.n_still] += row.expected_n;
    by_still_q[row.n_still] += row.hit;
    t.cells += row.cells;
  }
  const RationalPoly p = RationalPoly::identity();
  const RationalPoly pbar = RationalPoly::pbar();
  for (std::size_t s = 0; s <= k; ++s) {
    const RationalPoly weight = p.pow(static_cast<unsigned>(s)) * pbar.pow(static_cast<unsigned>(k - s));
    t.expected_n += weight * by_still_n[s];
    t.q += weight * by_still_q[s];
  }
  return t;
}

RationalPoly expected_Nk_poly(std::size_t k, int workers) { return exact_tables(k, workers).expected_n; }

RationalPoly qk_poly(std::size_t k, int workers) { return exact_tables(k, workers).q; }

std::vector<ScanRow> pc_upper_bound_scan(std::size_t kmax, const Rational& tol, int workers) {
  if (kmax == 0 || kmax > kSymbolicCap) {
    throw Error("pc_upper_bound_scan: kmax must lie in 1.." + std::to_string(kSymbolicCap));
  }
  std::vector<ScanRow> rows;
  for (std::size_t k = 1; k <= kmax; ++k) {
    const RationalPoly en = expected_Nk_poly(k, workers);
    rows.push_back({k, isolate_smallest_root(en, Rational(1, 4), Rational(1, 3), tol)});
  }
  return rows;
}

}  // namespace bann
