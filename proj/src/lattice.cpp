#include "bann/lattice.hpp"

#include <array>
#include <cmath>

#include "bann/engine.hpp"
#include "bann/parallel.hpp"
#include "bann/reversal.hpp"

namespace bann {

namespace {

enum Column : std::size_t {
  kHitA, kRA, kHitB, kRB, kGt, kLt, kEq, kBoth, kTriple, kSurvive, kCensA, kCensB, kColumns
};

struct Accumulator {
  Moments moments{kColumns};
  std::map<std::int64_t, std::uint64_t> d_a, d_b;

  void merge(const Accumulator& o) {
    moments.merge(o.moments);
    for (const auto& [d, n] : o.d_a) d_a[d] += n;
    for (const auto& [d, n] : o.d_b) d_b[d] += n;
  }
};

struct HalfOutcome {
  bool hit = false;
  bool r_event = false;
  bool censored = false;
  std::int64_t d = 0;
};

HalfOutcome observe(const Configuration& c) {
  const EventFlags f = event_flags(c);
  HalfOutcome o;
  o.hit = f.origin_hit;
  if (f.origin_hit) o.d = std::llround(*f.y0);
  if (c[0].speed == Speed::Right) {
    if (f.determinate) {
      o.r_event = f.origin_hit && f.first_right_hits_still;
    } else {
      o.censored = true;
    }
  }
  return o;
}

Estimate make_estimate(const char* name, double value, double std_error, const LatticeStats& s,
                       std::uint64_t censored = 0) {
  Estimate e;
  e.estimator = name;
  e.value = value;
  e.std_error = std_error;
  e.n_trials = s.trials;
  e.n_censored = censored;
  e.master_seed = s.seed;
  e.p = s.p;
  e.k = s.k;
  return e;
}

}  // namespace

double LatticeStats::uncensored_fraction() const {
  return trials ? 1.0 - static_cast<double>(censored) / (2.0 * static_cast<double>(trials)) : 0.0;
}

LatticeStats lattice_run(double p, std::size_t k, std::uint64_t trials, std::uint64_t seed,
                         int workers) {
  if (k < 2) throw Error("lattice_run: need k >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw Error("lattice_run: p must lie in (0, 1]");
  const ModelParams half{p, Mode::Lattice, Side::HalfLine};
  const ModelParams full{p, Mode::Lattice, Side::FullLine};
  const Accumulator acc = accumulate_trials(trials, workers, Accumulator{}, [&](std::uint64_t t, Accumulator& a) {
    RngStream s = derive_stream(seed, t);
    const HalfOutcome wa = observe(sample_halfline(half, k, s));
    const HalfOutcome wb = observe(sample_halfline(half, k, s));
    const Configuration fl = sample_fullline(full, k, k, true, s);
    const Resolution res = resolve(fl);
    const Fate& origin = res.fates[origin_slot(fl)];
    const bool triple = origin.annihilated() && res.events[static_cast<std::size_t>(origin.event)].is_triple();
    const bool both = wa.hit && wb.hit;
    std::array<std::int64_t, kColumns> row{};
    row[kHitA] = wa.hit;
    row[kRA] = wa.r_event;
    row[kHitB] = wb.hit;
    row[kRB] = wb.r_event;
    row[kGt] = both && wa.d > wb.d;
    row[kLt] = both && wa.d < wb.d;
    row[kEq] = both && wa.d == wb.d;
    row[kBoth] = both;
    row[kTriple] = triple;
    row[kSurvive] = !origin.annihilated();
    row[kCensA] = wa.censored;
    row[kCensB] = wb.censored;
    a.moments.add(row);
    if (wa.hit) ++a.d_a[wa.d];
    if (wb.hit) ++a.d_b[wb.d];
  });

  LatticeStats s;
  s.p = p;
  s.k = k;
  s.trials = trials;
  s.seed = seed;
  s.moments = acc.moments;
  s.d_window_a = acc.d_a;
  s.d_window_b = acc.d_b;
  s.d_histogram = acc.d_a;
  for (const auto& [d, n] : acc.d_b) s.d_histogram[d] += n;
  const Moments& m = s.moments;
  s.censored = static_cast<std::uint64_t>(m.sum(kCensA) + m.sum(kCensB));

  const double q = 0.5 * (m.mean(kHitA) + m.mean(kHitB));
  std::array<double, kColumns> g{};
  g[kHitA] = g[kHitB] = 0.5;
  s.q_hat = make_estimate("q_hat", q, m.delta_stderr(g), s);

  const double r = 0.5 * (m.mean(kRA) + m.mean(kRB));
  g = {};
  g[kRA] = g[kRB] = 0.5;
  s.r_hat = make_estimate("r_hat", r, m.delta_stderr(g), s, s.censored);

  g = {};
  g[kHitA] = g[kHitB] = -(1.0 - q);
  s.psi_hat = make_estimate("psi_hat", (1.0 - q) * (1.0 - q), m.delta_stderr(g), s);
  s.psi_direct = make_estimate("psi_direct", m.mean(kSurvive),
                               bernoulli_stderr(m.mean(kSurvive), m.n()), s);

  s.pairs_both_defined = static_cast<std::uint64_t>(m.sum(kBoth));
  if (s.pairs_both_defined > 0) {
    const double both = static_cast<double>(s.pairs_both_defined);
    s.p_d_gt = static_cast<double>(m.sum(kGt)) / both;
    s.p_d_lt = static_cast<double>(m.sum(kLt)) / both;
    s.p_d_eq = static_cast<double>(m.sum(kEq)) / both;
  }
  s.p_d_eq_joint = m.mean(kEq);
  s.triple_rate = m.mean(kTriple);
  return s;
}

IdentityReport verify_lattice_identity(const LatticeStats& s) {
  const Moments& m = s.moments;
  IdentityReport rep;
  rep.p = s.p;
  rep.k = s.k;
  rep.trials = s.trials;
  rep.seed = s.seed;
  rep.q_hat = s.q_hat.value;
  rep.r_hat = s.r_hat.value;
  rep.censored_fraction = 1.0 - s.uncensored_fraction();
  const double q = s.q_hat.value;
  const double both = m.mean(kBoth);
  const double gt = m.mean(kGt);
  const double eq = m.mean(kEq);
  const double p = s.p;

  if (both > 0.0) {
    // r - (gt / both) p q^2
    std::array<double, kColumns> g{};
    g[kRA] = g[kRB] = 0.5;
    g[kHitA] = g[kHitB] = -(gt / both) * p * q;
    g[kGt] = -p * q * q / both;
    g[kBoth] = gt * p * q * q / (both * both);
    rep.checks.push_back(make_check("r_vs_PDgt_p_q2", s.r_hat.value, (gt / both) * p * q * q, m.delta_stderr(g)));

    // gt / both - (1 - eq / both) / 2
    g = {};
    g[kGt] = 1.0 / both;
    g[kEq] = 0.5 / both;
    g[kBoth] = -gt / (both * both) - 0.5 * eq / (both * both);
    rep.checks.push_back(make_check("PDgt_vs_half_PDne", gt / both, 0.5 * (1.0 - eq / both), m.delta_stderr(g)));
  } else {
    rep.checks.push_back(make_check("r_vs_PDgt_p_q2", s.r_hat.value, 0.0, s.r_hat.std_error));
  }
  std::array<double, kColumns> g{};
  g[kTriple] = 1.0;
  g[kEq] = -1.0;
  rep.checks.push_back(make_check("triple_rate_vs_PDeq", s.triple_rate, eq, m.delta_stderr(g)));
  return rep;
}

LatticeComparison compare_with_continuous(const LatticeStats& s) {
  const Moments& m = s.moments;
  const double q = s.q_hat.value;
  const double p = s.p;
  LatticeComparison c;
  c.theta_continuous = theory_theta(p);

  std::array<double, kColumns> g{};
  g[kHitA] = g[kHitB] = 0.5 * p * q;
  g[kRA] = g[kRB] = -0.5;
  const double gap_se = m.delta_stderr(g);
  const double gap = 0.5 * p * q * q - s.r_hat.value;
  c.r_gap_z = gap_se > 0.0 ? gap / gap_se : 0.0;

  c.psi_margin_z = s.psi_hat.std_error > 0.0 ? (s.psi_hat.value - c.theta_continuous) / s.psi_hat.std_error : 0.0;

  const double se = s.q_hat.std_error;
  if (q < 1.0 - 3.0 * se) c.dichotomy_consistent = q < 1.0 / std::sqrt(p) - 1.0 + 3.0 * se;
  return c;
}

}  // namespace bann
