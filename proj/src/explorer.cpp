#include "bann/explorer.hpp"

#include <cmath>
#include <ostream>

#include "bann/engine.hpp"
#include "bann/parallel.hpp"

namespace bann {

ParticleSource::ParticleSource(const ModelParams& params, RngStream stream)
    : params_(params), stream_(std::move(stream)) {
  params_.validate();
  params_.side = Side::HalfLine;
  config_.mode = params_.mode;
  config_.side = Side::HalfLine;
}

void ParticleSource::extend_to(std::size_t n) {
  double x = config_.empty() ? 0.0 : config_.particles.back().position;
  while (config_.size() < n) {
    const std::size_t index = config_.size() + 1;
    x = params_.mode == Mode::Lattice ? static_cast<double>(index) : x + stream_.exponential();
    config_.particles.push_back({index, x, stream_.speed(params_.p)});
  }
}

int compute_N(const Configuration& config, std::size_t i, std::size_t j) {
  const SurvivorCounts c = count_survivors(resolve(restrict(config, i, j)));
  return static_cast<int>(c.n_still) - static_cast<int>(c.n_left);
}

Verdict check_superadditivity(const Configuration& config, std::size_t k, std::size_t l) {
  if (!(k >= 1 && k < l && l <= config.size())) {
    throw Error("check_superadditivity: need 1 <= k < l <= size");
  }
  const SurvivorCounts prefix = count_survivors(resolve(restrict(config, 1, k)));
  if (prefix.n_right != 0) return Verdict::NotApplicable;
  const int lhs = compute_N(config, 1, l);
  const int rhs = static_cast<int>(prefix.n_still) - static_cast<int>(prefix.n_left) +
                  compute_N(config, k + 1, l);
  return lhs >= rhs ? Verdict::Holds : Verdict::Violated;
}

namespace {

bool no_surviving_right(const Configuration& config, std::size_t m) {
  return count_survivors(resolve(restrict(config, 1, m))).n_right == 0;
}

}  // namespace

ExplorationTrace explore_blocks(std::size_t k, std::size_t n_iters, ParticleSource& source,
                                std::size_t budget) {
  if (k == 0) throw Error("explore_blocks: block size must be positive");
  ExplorationTrace trace;
  trace.k = k;
  std::size_t K = 0;
  for (std::size_t n = 0; n < n_iters; ++n) {
    const std::size_t end = K + k;
    source.extend_to(end);
    const Configuration& c = source.config();
    if (n == 0) {
      trace.first_block_still = true;
      for (std::size_t s = 0; s < k; ++s) trace.first_block_still &= c[s].speed == Speed::Still;
    }
    const int block_n = compute_N(c, K + 1, end);

    // Extend one particle at a time: "no Right survives in 1..m" is not
    // monotone in m (a late Left can free a Right by destroying its partner),
    // so only the first such m is a stopping time and keeps the next block fresh.
    std::size_t next_K = end;
    while (!no_surviving_right(source.config(), next_K)) {
      if (next_K - end >= budget) {
        trace.truncated = true;
        break;
      }
      source.extend_to(++next_K);
    }
    if (trace.truncated) break;
    trace.n_tilde.push_back(block_n);
    trace.extended_by.push_back(next_K - end);
    trace.K.push_back(next_K);
    K = next_K;
  }
  return trace;
}

ExplorationTrace explore_blocks(const ModelParams& params, std::size_t k, std::size_t n_iters,
                                RngStream stream, std::size_t budget) {
  ParticleSource source(params, std::move(stream));
  return explore_blocks(k, n_iters, source, budget);
}

bool survival_certificate(const ExplorationTrace& trace, std::size_t k) {
  if (trace.truncated || trace.n_tilde.empty()) return false;
  if (!trace.first_block_still || trace.n_tilde[0] != static_cast<int>(k)) return false;
  long long sum = trace.n_tilde[0];
  for (std::size_t n = 1; n < trace.n_tilde.size(); ++n) {
    sum += trace.n_tilde[n];
    if (sum <= static_cast<long long>(k)) return false;
  }
  return true;
}

Estimate estimate_ENk(const ModelParams& params, std::size_t k, std::uint64_t trials,
                      std::uint64_t seed, int workers) {
  if (k == 0 || trials == 0) throw Error("estimate_ENk: k and trials must be positive");
  ModelParams hp = params;
  hp.side = Side::HalfLine;
  const Moments m = accumulate_trials(trials, workers, Moments(1), [&](std::uint64_t t, Moments& acc) {
    RngStream s = derive_stream(seed, t);
    const Configuration c = sample_halfline(hp, k, s);
    const std::int64_t row[1] = {compute_N(c, 1, k)};
    acc.add(row);
  });
  Estimate e;
  e.estimator = "E[N_k]";
  e.value = m.mean(0);
  e.std_error = std::sqrt(m.cov(0, 0) / static_cast<double>(m.n()));
  e.n_trials = m.n();
  e.master_seed = seed;
  e.p = params.p;
  e.k = k;
  return e;
}

void write_trace_csv(std::ostream& out, const ExplorationTrace& trace) {
  out << "iter,K,N_tilde,extended_by,truncated\n";
  for (std::size_t n = 0; n < trace.iterations(); ++n) {
    out << n + 1 << ',' << trace.K[n + 1] << ',' << trace.n_tilde[n] << ',' << trace.extended_by[n]
        << ',' << (trace.truncated ? 1 : 0) << '\n';
  }
}

}  // namespace bann
