#include "bann/checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "bann/estimators.hpp"
#include "bann/exactpoly.hpp"
#include "bann/explorer.hpp"
#include "bann/lattice.hpp"
#include "bann/parallel.hpp"
#include "bann/reversal.hpp"

namespace bann {

namespace {

// Integer counters merged across workers.
struct Counts {
  std::array<std::uint64_t, 4> c{};
  void merge(const Counts& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
  }
};

constexpr double kGridP[3] = {0.2, 0.5, 0.8};
constexpr Mode kModes[2] = {Mode::Continuous, Mode::Lattice};

}  // namespace

bool same_outcome(const Resolution& a, const Resolution& b) {
  if (a.fates != b.fates || a.origin_hit.has_value() != b.origin_hit.has_value() ||
      a.events.size() != b.events.size()) {
    return false;
  }
  if (a.origin_hit && a.origin_hit->slot != b.origin_hit->slot) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    if (a.events[i].participants != b.events[i].participants || a.events[i].count != b.events[i].count) return false;
    if (std::abs(a.events[i].time - b.events[i].time) > 1e-9) return false;
  }
  return true;
}

CheckOutcome engine_equivalence_check(std::uint64_t small, std::uint64_t large, std::uint64_t seed,
                                      int workers) {
  // Trial t picks p, mode and size from its index so the whole grid is covered.
  auto body = [&](std::uint64_t t, Counts& acc, std::size_t size_hint) {
    const double p = kGridP[t % 3];
    const Mode mode = kModes[(t / 3) % 2];
    RngStream s = derive_stream(seed, t);
    const std::size_t size = size_hint ? size_hint : 1 + (t / 6) % 12;
    const Configuration c = sample_halfline({p, mode}, size, s);
    const Resolution a = resolve(c);
    acc.c[0] += 1;
    acc.c[1] += !same_outcome(a, resolve_oracle(c));
    if (mode == Mode::Continuous) acc.c[2] += a.degenerate_tie_count;
  };
  const Counts s = accumulate_trials(small, workers, Counts{},
                                     [&](std::uint64_t t, Counts& acc) { body(t, acc, 0); });
  const Counts l = accumulate_trials(large, workers, Counts{}, [&](std::uint64_t t, Counts& acc) {
    body(t + (std::uint64_t{1} << 40), acc, 1000);
  });
  std::ostringstream d;
  d << "small=" << s.c[0] << " large=" << l.c[0] << " mismatches=" << s.c[1] + l.c[1]
    << " continuous_ties=" << s.c[2] + l.c[2];
  return {"engine_equivalence", s.c[1] + l.c[1] == 0 && s.c[2] + l.c[2] == 0, d.str()};
}

CheckOutcome lightcone_check(std::uint64_t trials, std::uint64_t seed, int workers) {
  const Counts r = accumulate_trials(trials, workers, Counts{}, [&](std::uint64_t t, Counts& acc) {
    RngStream s = derive_stream(seed, t);
    const Configuration big = sample_halfline({0.3 + 0.1 * static_cast<double>(t % 5), kModes[t % 2]}, 60, s);
    const Configuration win = restrict(big, 1, 20);
    const Resolution rw = resolve(win);
    const Resolution rb = resolve(big);
    const auto fin = finality(win, rw, win.particles.back().position);
    for (std::size_t i = 0; i < win.size(); ++i) {
      if (fin[i] != Finality::Final) continue;
      acc.c[0] += 1;
      bool ok = rw.fates[i].kind == rb.fates[i].kind;
      if (ok && rw.fates[i].annihilated()) {
        ok = rw.partners(i) == rb.partners(i) &&
             rw.events[rw.fates[i].event].time == rb.events[rb.fates[i].event].time;
      }
      acc.c[1] += !ok;
    }
  });
  std::ostringstream d;
  d << "windows=" << trials << " final_fates=" << r.c[0] << " contradicted=" << r.c[1];
  return {"lightcone_soundness", r.c[1] == 0 && r.c[0] > 0, d.str()};
}

CheckOutcome superadditivity_check(std::uint64_t instances, std::uint64_t seed, int workers) {
  const Counts r = accumulate_trials(instances, workers, Counts{}, [&](std::uint64_t t, Counts& acc) {
    RngStream s = derive_stream(seed, t);
    const double p = 0.2 + 0.05 * static_cast<double>(t % 12);
    const Mode mode = kModes[t % 2];
    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::size_t l = 2 + s.next_u64() % 30;
      const Configuration c = sample_halfline({p, mode}, l, s);
      const std::size_t k = 1 + s.next_u64() % (l - 1);
      const Verdict v = check_superadditivity(c, k, l);
      if (v == Verdict::NotApplicable) {
        acc.c[2] += 1;
        continue;
      }
      acc.c[0] += 1;
      acc.c[1] += v == Verdict::Violated;
      break;
    }
  });
  std::ostringstream d;
  d << "instances=" << r.c[0] << " violations=" << r.c[1] << " rejected_draws=" << r.c[2];
  return {"superadditivity", r.c[1] == 0 && r.c[0] == instances, d.str()};
}

void CertificateTally::merge(const CertificateTally& o) {
  traces += o.traces;
  certified += o.certified;
  hit_in_prefix += o.hit_in_prefix;
  hit_after_extension += o.hit_after_extension;
}

std::string CertificateTally::detail() const {
  std::ostringstream d;
  d << "traces=" << traces << " certified=" << certified << " hit_in_prefix=" << hit_in_prefix
    << " hit_after_extension=" << hit_after_extension;
  return d.str();
}

CertificateTally certificate_tally(std::uint64_t traces, std::size_t iters, std::uint64_t seed, int workers) {
  return accumulate_trials(traces, workers, CertificateTally{}, [&](std::uint64_t t, CertificateTally& acc) {
    ParticleSource src({0.49}, derive_stream(seed, t));
    const ExplorationTrace tr = explore_blocks(3, iters, src);
    acc.traces += 1;
    if (!survival_certificate(tr, 3)) return;
    acc.certified += 1;
    acc.hit_in_prefix += resolve(restrict(src.config(), 1, tr.K.back())).origin_hit.has_value();
    src.extend_to(10 * tr.K.back());
    acc.hit_after_extension += resolve(src.config()).origin_hit.has_value();
  });
}

CheckOutcome certificate_check(std::uint64_t traces, std::uint64_t seed, int workers) {
  const CertificateTally r = certificate_tally(traces, 10, seed, workers);
  return {"certificate_soundness", r.certified > 0 && r.hit_in_prefix == 0, r.detail()};
}

CheckOutcome exact_polynomials_check() {
  const RationalPoly P = RationalPoly::identity(), PB = RationalPoly::pbar();
  const RationalPoly one = RationalPoly::constant(1);
  const bool en1 = expected_Nk_poly(1) == (P * Rational(3) - one) * Rational(1, 2);
  const RationalPoly en2 = expected_Nk_poly(2);
  const bool root2 = en2(Rational(1, 3)) == 0;
  const RationalPoly closed3 = P.pow(3) * Rational(3) + P * P * PB * Rational(7) -
                               P * PB * PB * Rational(3, 2) - PB.pow(3) * Rational(8);
  const bool en3 = expected_Nk_poly(3) == closed3;
  std::ostringstream d;
  d << "E[N_1]=" << (en1 ? "closed_form" : "MISMATCH") << " E[N_2](1/3)=" << to_string(en2(Rational(1, 3)))
    << " E[N_3]=" << (en3 ? "closed_form" : "MISMATCH");
  return {"exact_polynomials", en1 && root2 && en3, d.str()};
}

CheckOutcome pc_scan_check() {
  const auto rows = pc_upper_bound_scan(3, Rational(1, 1000000));
  bool ok = rows.size() == 3 && std::all_of(rows.begin(), rows.end(), [](const ScanRow& r) { return r.root.has_value(); });
  std::ostringstream d;
  if (ok) {
    ok = rows[0].root->exact() && rows[0].root->lo == Rational(1, 3) && rows[1].root->lo == Rational(1, 3) &&
         rows[2].root->width() <= Rational(1, 1000000) && std::abs(to_double(rows[2].root->lo) - 0.32803) < 5e-5;
    d << "k1=" << to_string(rows[0].root->lo) << " k2=" << to_string(rows[1].root->lo) << " k3=["
      << to_string(rows[2].root->lo) << "," << to_string(rows[2].root->hi) << "]";
  } else {
    d << "missing root";
  }
  return {"pc_scan", ok, d.str()};
}

CheckOutcome exact_identities_check() {
  bool ok = true;
  std::size_t checks = 0;
  for (double p : {0.3, 0.36, 0.49, 0.64, 0.9}) {
    const IdentityReport r = check_identities_exact(p);
    ok = ok && r.all_pass();
    checks += r.checks.size();
  }
  std::ostringstream d;
  d << "points=5 checks=" << checks;
  return {"exact_identities", ok, d.str()};
}

CheckOutcome worker_determinism_check(std::uint64_t seed) {
  const ModelParams mp{0.49};
  const Estimate q1 = estimate_qk(mp, 200, 2000, seed, 1), q4 = estimate_qk(mp, 200, 2000, seed, 4);
  const ThetaEstimate t1 = estimate_theta(mp, 100, 1000, seed, 1), t4 = estimate_theta(mp, 100, 1000, seed, 4);
  const LatticeStats l1 = lattice_run(0.5, 100, 1000, seed, 1), l4 = lattice_run(0.5, 100, 1000, seed, 4);
  const BijectionTally b1 = bijection_run(mp, 100, 1000, seed, 1), b4 = bijection_run(mp, 100, 1000, seed, 4);
  const bool ok = q1.value == q4.value && q1.std_error == q4.std_error && t1.lower.value == t4.lower.value &&
                  t1.upper.value == t4.upper.value && l1.moments == l4.moments && b1.moments == b4.moments &&
                  b1.in_a == b4.in_a;
  return {"worker_determinism", ok, "estimators=q,theta,lattice,bijection workers=1,4"};
}

CheckOutcome bijection_check(std::uint64_t trials, std::uint64_t seed, int workers) {
  const BijectionTally t = bijection_run({0.49}, 300, trials, seed, workers);
  std::ostringstream d;
  d << "trials=" << t.trials << " in_a=" << t.in_a << " in_b=" << t.in_b << " forward_fail=" << t.forward_fail
    << " backward_fail=" << t.backward_fail << " censored=" << t.censored;
  return {"bijection", t.pathwise_ok() && t.in_a > 0 && t.in_b > 0, d.str()};
}

bool SelftestResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.pass; });
}

SelftestResult run_selftest(std::uint64_t seed, int workers) {
  SelftestResult r;
  r.checks.push_back(engine_equivalence_check(6000, 6, seed, workers));
  r.checks.push_back(exact_polynomials_check());
  r.checks.push_back(pc_scan_check());
  r.checks.push_back(exact_identities_check());
  r.checks.push_back(worker_determinism_check(seed));
  r.checks.push_back(lightcone_check(2000, seed, workers));
  r.checks.push_back(superadditivity_check(2000, seed, workers));
  r.checks.push_back(certificate_check(2000, seed, workers));
  r.checks.push_back(bijection_check(2000, seed, workers));
  return r;
}

}  // namespace bann
