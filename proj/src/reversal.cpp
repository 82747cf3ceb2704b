#include "bann/reversal.hpp"

#include <algorithm>
#include <cmath>

#include "bann/estimators.hpp"
#include "bann/parallel.hpp"

namespace bann {

EventFlags event_flags(const Configuration& config, const Resolution& res) {
  EventFlags f;
  if (config.empty()) return f;
  if (res.origin_hit) {
    f.origin_hit = true;
    f.y0 = config[res.origin_hit->slot].position;
  }
  const Particle& first = config[0];
  const Fate& fate = res.fates[0];
  if (fate.annihilated()) {
    const CollisionEvent& ev = res.events[static_cast<std::size_t>(fate.event)];
    // Particle 1 is leftmost, so it is participants[0] and its partner (or, in
    // a triple, the stationary middle particle) is participants[1].
    f.y1 = config[ev.participants[1]].position;
    if (first.speed == Speed::Right && !ev.is_triple() &&
        config[ev.participants[1]].speed == Speed::Still) {
      f.first_right_hits_still = true;
    }
    if (first.speed == Speed::Still) f.first_still_hit_from_right = true;
  }
  if (f.y0 && f.y1) f.gap_comparison = (*f.y1 - first.position) < (*f.y0 - *f.y1);
  if (first.speed != Speed::Left) {
    const auto fin = finality(config, res, config.particles.back().position);
    f.determinate = fin[0] == Finality::Final;
  }
  return f;
}

EventFlags event_flags(const Configuration& config) { return event_flags(config, resolve(config)); }

Configuration rev(const Configuration& config, double y1) {
  if (config.empty()) throw Error("rev: empty configuration");
  const double x1 = config[0].position;
  Configuration out = config;
  for (auto& pt : out.particles) {
    if (pt.position < x1 || pt.position > y1) continue;
    if (pt.position == x1) {
      pt.position = y1;
    } else if (pt.position == y1) {
      pt.position = x1;
    } else {
      pt.position = (x1 + y1) - pt.position;
    }
    pt.speed = opposite(pt.speed);
  }
  std::stable_sort(out.particles.begin(), out.particles.end(),
                   [](const Particle& a, const Particle& b) { return a.position < b.position; });
  out.reindex();
  return out;
}

Configuration rev(const Configuration& config) {
  const EventFlags f = event_flags(config);
  if (!f.y1) throw Error("rev: first particle survives, reversal interval undefined");
  return rev(config, *f.y1);
}

void BijectionTally::merge(const BijectionTally& o) {
  trials += o.trials;
  censored += o.censored;
  in_a += o.in_a;
  in_b += o.in_b;
  forward_fail += o.forward_fail;
  backward_fail += o.backward_fail;
  moments.merge(o.moments);
}

namespace {

bool in_a(const EventFlags& f) { return f.origin_hit && f.first_right_hits_still; }
bool in_b(const EventFlags& f) {
  return f.origin_hit && f.first_still_hit_from_right && f.gap_comparison;
}

bool same_configuration(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].speed != b[i].speed) return false;
    const double scale = std::max(1.0, std::abs(a[i].position));
    if (std::abs(a[i].position - b[i].position) > 1e-9 * scale) return false;
  }
  return true;
}

}  // namespace

void check_bijection(const Configuration& config, BijectionTally& tally) {
  ++tally.trials;
  const EventFlags f = event_flags(config);
  if (!f.determinate) {
    ++tally.censored;
    const std::int64_t zero[2] = {0, 0};
    tally.moments.add(zero);
    return;
  }
  const bool a = in_a(f);
  const bool b = in_b(f);
  const std::int64_t row[2] = {a, b};
  tally.moments.add(row);
  if (a) {
    ++tally.in_a;
    const Configuration image = rev(config, *f.y1);
    const EventFlags g = event_flags(image);
    const bool ok = g.determinate && in_b(g) && g.y1 && *g.y1 == *f.y1 &&
                    same_configuration(rev(image, *g.y1), config);
    if (!ok) ++tally.forward_fail;
  }
  if (b) {
    ++tally.in_b;
    const Configuration image = rev(config, *f.y1);
    const EventFlags g = event_flags(image);
    if (!(g.determinate && in_a(g))) ++tally.backward_fail;
  }
}

BijectionTally bijection_run(const ModelParams& params, std::size_t k, std::uint64_t trials,
                             std::uint64_t seed, int workers) {
  return accumulate_trials(trials, workers, BijectionTally{},
                           [&](std::uint64_t t, BijectionTally& acc) {
                             RngStream s = derive_stream(seed, t);
                             check_bijection(sample_halfline(params, k, s), acc);
                           });
}

HalvingReport verify_halving(const ModelParams& params, std::size_t k, std::uint64_t trials,
                             std::uint64_t seed, int workers) {
  struct Sample {
    bool censored = false;
    bool conditioned = false;
    bool smaller = false;
    double d1 = 0.0;  // y1 - x1
    double d0 = 0.0;  // y0 - y1
  };
  const auto samples = map_trials<Sample>(trials, workers, [&](std::uint64_t t) {
    RngStream s = derive_stream(seed, t);
    const Configuration c = sample_halfline(params, k, s);
    const EventFlags f = event_flags(c);
    Sample out;
    out.censored = !f.determinate;
    out.conditioned = f.origin_hit && f.first_still_hit_from_right;
    if (out.conditioned) {
      out.d1 = *f.y1 - c[0].position;
      out.d0 = *f.y0 - *f.y1;
      out.smaller = out.d1 < out.d0;
    }
    return out;
  });

  HalvingReport r;
  r.p = params.p;
  r.k = k;
  r.mode = params.mode;
  r.trials = trials;
  std::uint64_t smaller = 0;
  std::vector<double> d1, d0;
  for (const Sample& s : samples) {
    r.censored += s.censored;
    if (!s.conditioned) continue;
    ++r.conditioned;
    smaller += s.smaller;
    d1.push_back(s.d1);
    d0.push_back(s.d0);
  }
  const double freq = r.conditioned ? static_cast<double>(smaller) / static_cast<double>(r.conditioned) : 0.0;
  const double se = bernoulli_stderr(freq, r.conditioned);
  r.halving = make_check("halving", freq, 0.5, se);
  r.strict_margin_z = se > 0.0 ? (0.5 - freq) / se : 0.0;
  const double base = static_cast<double>(r.conditioned) / static_cast<double>(trials);
  const double q = theory_q(params.p);
  r.base = make_check("still_hit_and_origin_hit", base, params.p * q * q,
                      bernoulli_stderr(base, trials));
  r.distance_test = ks_two_sample(std::move(d1), std::move(d0));
  return r;
}

}  // namespace bann
