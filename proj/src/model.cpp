#include "bann/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace bann {

void Configuration::validate() const {
  for (std::size_t i = 0; i < particles.size(); ++i) {
    if (!std::isfinite(particles[i].position)) {
      throw Error("configuration: non-finite position at slot " + std::to_string(i));
    }
    if (i > 0 && !(particles[i - 1].position < particles[i].position)) {
      throw Error("configuration: positions must strictly increase (slot " +
                  std::to_string(i) + ")");
    }
  }
  if (side == Side::HalfLine && !particles.empty() && !(particles.front().position > 0.0)) {
    throw Error("configuration: half-line positions must be positive");
  }
}

void Configuration::reindex() {
  for (std::size_t i = 0; i < particles.size(); ++i) particles[i].index = i + 1;
}

void ModelParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("model: p must lie in [0, 1]");
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t trial_index)
    : master_seed_(master_seed), trial_index_(trial_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(trial_index),
                    static_cast<std::uint32_t>(trial_index >> 32),
                    0x62616e6eu};
  engine_.seed(seq);
}

double RngStream::exponential() {
  // (bits + 1) * 2^-53 lies in (0, 1], so the log is finite.
  const double u = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  return -std::log(u);
}

Speed RngStream::speed(double p) {
  const double u = uniform();
  if (u < p) return Speed::Still;
  if (u < p + 0.5 * (1.0 - p)) return Speed::Left;
  return Speed::Right;
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
  return RngStream(master_seed, trial_index);
}

namespace {

// Fills `out` with k half-line particles; gap and speed are drawn alternately.
void append_halfline(const ModelParams& params, std::size_t k, RngStream& stream,
                     std::vector<Particle>& out) {
  double x = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    if (params.mode == Mode::Lattice) {
      x = static_cast<double>(i);
    } else {
      x += stream.exponential();
    }
    out.push_back({i, x, stream.speed(params.p)});
  }
}

}  // namespace

Configuration sample_halfline(const ModelParams& params, std::size_t k, RngStream& stream) {
  params.validate();
  if (k == 0) throw Error("sample_halfline: empty configuration requested");
  Configuration c;
  c.mode = params.mode;
  c.side = Side::HalfLine;
  c.particles.reserve(k);
  append_halfline(params, k, stream, c.particles);
  return c;
}

Configuration sample_fullline(const ModelParams& params, std::size_t k_left,
                              std::size_t k_right, bool condition_origin,
                              RngStream& stream) {
  params.validate();
  if (k_left == 0 || k_right == 0) throw Error("sample_fullline: both sides need particles");
  std::vector<Particle> left;
  std::vector<Particle> right;
  left.reserve(k_left);
  right.reserve(k_right);
  append_halfline(params, k_left, stream, left);
  append_halfline(params, k_right, stream, right);

  Configuration c;
  c.mode = params.mode;
  c.side = Side::FullLine;
  c.forced_origin = condition_origin;
  c.particles.reserve(k_left + k_right + 1);
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    c.particles.push_back({0, -it->position, opposite(it->speed)});
  }
  if (condition_origin) c.particles.push_back({0, 0.0, Speed::Still});
  c.particles.insert(c.particles.end(), right.begin(), right.end());
  c.reindex();
  return c;
}

std::size_t origin_slot(const Configuration& config) {
  if (!config.forced_origin) throw Error("origin_slot: configuration has no conditioned origin");
  auto it = std::lower_bound(config.particles.begin(), config.particles.end(), 0.0,
                             [](const Particle& a, double x) { return a.position < x; });
  if (it == config.particles.end() || it->position != 0.0) {
    throw Error("origin_slot: no particle at 0");
  }
  return static_cast<std::size_t>(it - config.particles.begin());
}

std::string to_string(Speed s) {
  switch (s) {
    case Speed::Left: return "Left";
    case Speed::Still: return "Still";
    case Speed::Right: return "Right";
  }
  return "?";
}

void write_csv(std::ostream& out, const Configuration& config) {
  out << "index,position,speed\n";
  char buf[64];
  for (const auto& pt : config.particles) {
    std::snprintf(buf, sizeof buf, "%.17g", pt.position);
    out << pt.index << ',' << buf << ',' << velocity(pt.speed) << '\n';
  }
}

Configuration read_csv(std::istream& in, Mode mode, Side side) {
  Configuration c;
  c.mode = mode;
  c.side = side;
  std::string line;
  if (!std::getline(in, line) || line != "index,position,speed") {
    throw Error("read_csv: missing header `index,position,speed`");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, pos, spd;
    if (!std::getline(row, idx, ',') || !std::getline(row, pos, ',') || !std::getline(row, spd)) {
      throw Error("read_csv: malformed row `" + line + "`");
    }
    const int v = std::stoi(spd);
    if (v < -1 || v > 1) throw Error("read_csv: speed must be -1, 0 or 1");
    c.particles.push_back({std::stoul(idx), std::stod(pos), static_cast<Speed>(v)});
  }
  c.forced_origin = side == Side::FullLine &&
                    std::any_of(c.particles.begin(), c.particles.end(), [](const Particle& pt) {
                      return pt.position == 0.0 && pt.speed == Speed::Still;
                    });
  c.validate();
  return c;
}

}  // namespace bann
