// Three-speed ballistic annihilation: domain types and initial-configuration
// sampling.
//
// Particles start at the points of a unit-intensity Poisson process (or at
// every integer site in lattice mode) with i.i.d. speeds drawn from
// (pbar, p, pbar) on {-1, 0, +1}, pbar = (1 - p) / 2.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bann {

/// Raised for invalid inputs anywhere in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Speed : std::int8_t { Left = -1, Still = 0, Right = 1 };

constexpr int velocity(Speed s) { return static_cast<int>(s); }
constexpr Speed opposite(Speed s) { return static_cast<Speed>(-static_cast<int>(s)); }

enum class Mode { Continuous, Lattice };
enum class Side { HalfLine, FullLine };

struct Particle {
  std::size_t index = 0;  // 1-based ordinal within its configuration
  double position = 0.0;
  Speed speed = Speed::Still;

  friend bool operator==(const Particle&, const Particle&) = default;
};

struct Configuration {
  Mode mode = Mode::Continuous;
  Side side = Side::HalfLine;
  std::vector<Particle> particles;
  // Set when a conditioned stationary particle sits at 0 (full line only).
  bool forced_origin = false;

  std::size_t size() const { return particles.size(); }
  bool empty() const { return particles.empty(); }
  const Particle& operator[](std::size_t slot) const { return particles[slot]; }

  /// Throws Error unless positions strictly increase and are finite.
  void validate() const;
  /// Renumbers particle indices 1..n in slot order.
  void reindex();

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct ModelParams {
  double p = 0.5;
  Mode mode = Mode::Continuous;
  Side side = Side::HalfLine;

  double pbar() const { return 0.5 * (1.0 - p); }
  void validate() const;
};

/// Deterministic per-trial random stream.
///
/// A stream is keyed by (master_seed, trial_index); both words feed a
/// std::seed_seq so distinct trial indices give unrelated mt19937_64 states.
/// Variates are produced by explicit bit manipulation rather than the
/// implementation-defined <random> distributions, so sequences are identical
/// across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t trial_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t trial_index() const { return trial_index_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Unit-mean exponential by inverse CDF: -log(u) with u in (0, 1].
  double exponential();
  Speed speed(double p);

 private:
  std::uint64_t master_seed_;
  std::uint64_t trial_index_;
  std::mt19937_64 engine_;
};

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index);

/// k particles on (0, inf): exponential gaps (continuous) or sites 1..k (lattice).
Configuration sample_halfline(const ModelParams& params, std::size_t k, RngStream& stream);

/// Two independent half-lines, the left one reflected through 0 (positions and
/// speeds negated). With condition_origin a stationary particle is put at 0.
Configuration sample_fullline(const ModelParams& params, std::size_t k_left,
                              std::size_t k_right, bool condition_origin,
                              RngStream& stream);

/// Slot of the particle at the origin in a configuration with forced_origin.
std::size_t origin_slot(const Configuration& config);

// CSV: `index,position,speed`, positions with 17 significant digits.
void write_csv(std::ostream& out, const Configuration& config);
Configuration read_csv(std::istream& in, Mode mode = Mode::Continuous,
                       Side side = Side::HalfLine);

std::string to_string(Speed s);

}  // namespace bann
