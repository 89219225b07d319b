#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace maxdist {

namespace detail {

/// SplitMix64 finalizer: a bijective mix with well-tested avalanche behavior.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

/// Counter-based pseudo-random stream (SplitMix64).
///
/// Each stream is a pure function of its derivation key, so replications can
/// draw from disjoint substreams with no shared mutable state. Output for a
/// given (seed, index, purpose) triple is identical across runs and thread
/// schedules.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(detail::mix64(seed + detail::kGolden)) {}

  /// Derives an independent stream for replication `index` of a master seed.
  static RngStream substream(std::uint64_t master, std::uint64_t index, std::uint64_t purpose = 0) {
    std::uint64_t s = detail::mix64(master + detail::kGolden);
    s = detail::mix64(s ^ detail::mix64(index + 0xD1B54A32D192ED03ULL));
    s = detail::mix64(s ^ detail::mix64(purpose + 0x8BB84B93962EACC9ULL));
    RngStream r(0);
    r.state_ = s;
    return r;
  }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform on (0, 1].
  double uniform01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform strictly inside (0, 1); safe for inverse-CDF transforms.
  double uniform_open01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two uniforms per pair of draws.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform01();
    const double v = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * std::numbers::pi * v;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// +1 or -1 with equal probability.
  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace maxdist
