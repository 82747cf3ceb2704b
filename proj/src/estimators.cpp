#include "bann/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bann/engine.hpp"
#include "bann/parallel.hpp"
#include "bann/reversal.hpp"

namespace bann {

double theory_q(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error("theory_q: p must lie in (0, 1]");
  return p <= 0.25 ? 1.0 : 1.0 / std::sqrt(p) - 1.0;
}

double theory_theta(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error("theory_theta: p must lie in (0, 1]");
  if (p <= 0.25) return 0.0;
  const double a = 2.0 - 1.0 / std::sqrt(p);
  return a * a;
}

namespace {

ModelParams halfline_params(const ModelParams& params) {
  ModelParams hp = params;
  hp.side = Side::HalfLine;
  return hp;
}

Estimate bernoulli_estimate(std::string name, const Moments& m, std::size_t column,
                            std::uint64_t censored, const ModelParams& params, std::size_t k,
                            std::uint64_t seed) {
  Estimate e;
  e.estimator = std::move(name);
  e.value = m.mean(column);
  e.std_error = bernoulli_stderr(e.value, m.n());
  e.n_trials = m.n();
  e.n_censored = censored;
  e.master_seed = seed;
  e.p = params.p;
  e.k = k;
  return e;
}

// Per-trial outcome of one half-line window used by the q / r / identity runs.
struct WindowOutcome {
  bool hit = false;        // {0 <- .}
  bool r_event = false;    // particle 1 Right destroyed by a Still, origin hit, Final
  bool still_hit = false;  // particle 1 Still hit from the right, origin hit
  bool censored = false;   // particle 1 Right with a Provisional fate
};

WindowOutcome observe_window(const Configuration& c) {
  const Resolution res = resolve(c);
  const EventFlags f = event_flags(c, res);
  WindowOutcome o;
  o.hit = f.origin_hit;
  o.still_hit = f.origin_hit && f.first_still_hit_from_right;
  if (c[0].speed == Speed::Right) {
    if (f.determinate) {
      o.r_event = f.origin_hit && f.first_right_hits_still;
    } else {
      o.censored = true;
    }
  }
  return o;
}

// Reflects slots [0, count) of a full-line configuration into a half-line.
Configuration left_side(const Configuration& full, std::size_t count) {
  Configuration h;
  h.mode = full.mode;
  h.side = Side::HalfLine;
  h.particles.reserve(count);
  for (std::size_t i = count; i-- > 0;) {
    h.particles.push_back({0, -full[i].position, opposite(full[i].speed)});
  }
  h.reindex();
  return h;
}

Configuration right_side(const Configuration& full, std::size_t from) {
  Configuration h;
  h.mode = full.mode;
  h.side = Side::HalfLine;
  h.particles.assign(full.particles.begin() + static_cast<std::ptrdiff_t>(from), full.particles.end());
  h.reindex();
  return h;
}

}  // namespace

Estimate estimate_qk(const ModelParams& params, std::size_t k, std::uint64_t trials,
                     std::uint64_t seed, int workers) {
  if (k == 0 || trials == 0) throw Error("estimate_qk: k and trials must be positive");
  const ModelParams hp = halfline_params(params);
  const Moments m = accumulate_trials(trials, workers, Moments(1), [&](std::uint64_t t, Moments& acc) {
    RngStream s = derive_stream(seed, t);
    const Resolution res = resolve(sample_halfline(hp, k, s));
    const std::int64_t row[1] = {res.origin_hit.has_value()};
    acc.add(row);
  });
  return bernoulli_estimate("q_k", m, 0, 0, params, k, seed);
}

Estimate estimate_r(const ModelParams& params, std::size_t k, std::uint64_t trials,
                    std::uint64_t seed, int workers) {
  if (k < 2 || trials == 0) throw Error("estimate_r: need k >= 2 and trials >= 1");
  const ModelParams hp = halfline_params(params);
  const Moments m = accumulate_trials(trials, workers, Moments(2), [&](std::uint64_t t, Moments& acc) {
    RngStream s = derive_stream(seed, t);
    const WindowOutcome o = observe_window(sample_halfline(hp, k, s));
    const std::int64_t row[2] = {o.r_event, o.censored};
    acc.add(row);
  });
  return bernoulli_estimate("r", m, 0, static_cast<std::uint64_t>(m.sum(1)), params, k, seed);
}

bool side_certified(const Configuration& halfline) {
  const Resolution res = resolve(halfline);
  if (res.origin_hit) return false;
  const SurvivorCounts counts = count_survivors(res);
  if (counts.n_still <= counts.n_right) return false;
  const auto fin = finality(halfline, res, halfline.particles.back().position);
  for (std::size_t s = 0; s < res.fates.size(); ++s) {
    if (res.fates[s].kind == FateKind::SurvivesStill) return true;
    if (res.fates[s].annihilated() && fin[s] != Finality::Final) return false;
  }
  return false;
}

ThetaEstimate estimate_theta(const ModelParams& params, std::size_t k, std::uint64_t trials,
                             std::uint64_t seed, int workers) {
  if (k == 0 || trials == 0) throw Error("estimate_theta: k and trials must be positive");
  ModelParams fp = params;
  fp.side = Side::FullLine;
  const Moments m = accumulate_trials(trials, workers, Moments(3), [&](std::uint64_t t, Moments& acc) {
    RngStream s = derive_stream(seed, t);
    const Configuration full = sample_fullline(fp, k, k, true, s);
    const Resolution res = resolve(full);
    const bool survives = !res.fates[k].annihilated();
    const Configuration left = left_side(full, k);
    const Configuration right = right_side(full, k + 1);
    const bool left_hit = resolve(left).origin_hit.has_value();
    const bool right_hit = resolve(right).origin_hit.has_value();
    const bool certified = survives && side_certified(left) && side_certified(right);
    const std::int64_t row[3] = {survives, certified, survives != (!left_hit && !right_hit)};
    acc.add(row);
  });
  ThetaEstimate out;
  out.upper = bernoulli_estimate("theta_upper", m, 0, 0, params, k, seed);
  out.lower = bernoulli_estimate("theta_lower", m, 1, 0, params, k, seed);
  out.inconsistent = static_cast<std::uint64_t>(m.sum(2));
  return out;
}

LeftmoverDistribution leftmover_count_distribution(const ModelParams& params, std::size_t k,
                                                   std::uint64_t trials, std::uint64_t seed,
                                                   int workers) {
  constexpr std::size_t bins = LeftmoverDistribution::kBins;
  const ModelParams hp = halfline_params(params);
  // Columns: one indicator per bin, then the raw count.
  const Moments m = accumulate_trials(trials, workers, Moments(bins + 1), [&](std::uint64_t t, Moments& acc) {
    RngStream s = derive_stream(seed, t);
    const auto n_left = count_survivors(resolve(sample_halfline(hp, k, s))).n_left;
    std::array<std::int64_t, bins + 1> row{};
    row[std::min(n_left, bins - 1)] = 1;
    row[bins] = static_cast<std::int64_t>(n_left);
    acc.add(row);
  });
  LeftmoverDistribution d;
  d.trials = trials;
  for (std::size_t b = 0; b < bins; ++b) d.histogram.push_back(static_cast<std::uint64_t>(m.sum(b)));
  d.mean = m.mean(bins);
  d.mean_stderr = std::sqrt(m.cov(bins, bins) / static_cast<double>(m.n()));
  d.q_theory = theory_q(params.p);
  const double q = d.q_theory;
  if (q < 1.0) {
    d.mean_theory = q / (1.0 - q);
    std::vector<double> probs;
    for (std::size_t b = 0; b + 1 < bins; ++b) probs.push_back((1.0 - q) * std::pow(q, static_cast<double>(b)));
    probs.push_back(std::pow(q, static_cast<double>(bins - 1)));
    d.gof = chi_square_gof(d.histogram, probs);
  } else {
    d.mean_theory = INFINITY;
  }
  return d;
}

bool IdentityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

namespace {

// Residuals as functions of (q, r, b); b = P(origin hit, particle 1 Still hit).
double q_recursion_rhs(double p, double q, double r) {
  return 0.5 * (1.0 - p) * (1.0 + q) + r * (1.0 - q) + p * q * q * q;
}

double dichotomy(double p, double q) { return (1.0 - q) * (1.0 - p * (1.0 + q) * (1.0 + q)); }

double dichotomy_dq(double p, double q) {
  return -(1.0 - p * (1.0 + q) * (1.0 + q)) - 2.0 * p * (1.0 - q) * (1.0 + q);
}

}  // namespace

IdentityReport check_identities(double p, std::size_t k, std::uint64_t trials,
                                std::uint64_t seed, int workers) {
  if (!(p > 0.0 && p < 1.0)) throw Error("check_identities: p must lie in (0, 1)");
  const ModelParams hp{p, Mode::Continuous, Side::HalfLine};
  // Columns: hit, r_event, still_hit, censored.
  const Moments m = accumulate_trials(trials, workers, Moments(4), [&](std::uint64_t t, Moments& acc) {
    RngStream s = derive_stream(seed, t);
    const WindowOutcome o = observe_window(sample_halfline(hp, k, s));
    const std::int64_t row[4] = {o.hit, o.r_event, o.still_hit, o.censored};
    acc.add(row);
  });
  IdentityReport rep;
  rep.p = p;
  rep.k = k;
  rep.trials = trials;
  rep.seed = seed;
  const double q = m.mean(0);
  const double r = m.mean(1);
  const double b = m.mean(2);
  rep.q_hat = q;
  rep.r_hat = r;
  rep.censored_fraction = m.mean(3);

  {
    const double g[4] = {1.0 - 0.5 * (1.0 - p) + r - 3.0 * p * q * q, -(1.0 - q), 0.0, 0.0};
    rep.checks.push_back(make_check("q_recursion", q, q_recursion_rhs(p, q, r), m.delta_stderr(g)));
  }
  {
    const double g[4] = {-p * q, 1.0, 0.0, 0.0};
    rep.checks.push_back(make_check("r_halving", r, 0.5 * p * q * q, m.delta_stderr(g)));
  }
  {
    const double g[4] = {dichotomy_dq(p, q), 0.0, 0.0, 0.0};
    rep.checks.push_back(make_check("dichotomy_residual", dichotomy(p, q), 0.0, m.delta_stderr(g)));
  }
  {
    const double g[4] = {-2.0 * p * q, 0.0, 1.0, 0.0};
    rep.checks.push_back(make_check("still_hit_base", b, p * q * q, m.delta_stderr(g)));
  }
  return rep;
}

IdentityReport check_identities_exact(double p) {
  IdentityReport rep;
  rep.p = p;
  const double q = theory_q(p);
  const double r = 0.5 * p * q * q;
  rep.q_hat = q;
  rep.r_hat = r;
  constexpr double tol = 1e-12;
  rep.checks.push_back(make_check("q_recursion", q, q_recursion_rhs(p, q, r), tol, 1.0));
  rep.checks.push_back(make_check("r_halving", r, 0.5 * p * q * q, tol, 1.0));
  rep.checks.push_back(make_check("dichotomy_residual", dichotomy(p, q), 0.0, tol, 1.0));
  return rep;
}

QkCurve qk_schedule(const ModelParams& params, std::vector<std::size_t> ks,
                    std::uint64_t trials, std::uint64_t seed, int workers) {
  if (ks.empty()) throw Error("qk_schedule: empty k-schedule");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.front() == 0) throw Error("qk_schedule: k must be positive");
  const ModelParams hp = halfline_params(params);
  const std::size_t n = ks.size();
  const Moments m = accumulate_trials(trials, workers, Moments(n + 1), [&](std::uint64_t t, Moments& acc) {
    RngStream s = derive_stream(seed, t);
    const Configuration c = sample_halfline(hp, ks.back(), s);
    std::vector<std::int64_t> row(n + 1, 0);
    bool seen_hit = false;
    for (std::size_t i = 0; i < n; ++i) {
      const bool hit = resolve(restrict(c, 1, ks[i])).origin_hit.has_value();
      row[i] = hit;
      if (seen_hit && !hit) row[n] = 1;
      seen_hit = seen_hit || hit;
    }
    acc.add(row);
  });
  QkCurve curve;
  curve.ks = ks;
  for (std::size_t i = 0; i < n; ++i) {
    curve.estimates.push_back(bernoulli_estimate("q_k", m, i, 0, params, ks[i], seed));
  }
  curve.monotonicity_violations = static_cast<std::uint64_t>(m.sum(n));
  return curve;
}

}  // namespace bann
