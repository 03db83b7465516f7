#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace twave {

/// Counter-based random stream (Philox4x32-10).
///
/// The output sequence is a pure function of (seed, stream_id, counter), so
/// a stream can be handed to any worker and produce the same numbers
/// regardless of scheduling. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_(stream_id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ >= 2) refill();
    return buffer_[pos_++];
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }
  /// Number of 128-bit blocks consumed so far.
  std::uint64_t counter() const noexcept { return counter_; }

  /// A statistically independent stream keyed by this stream's identity and
  /// the given tags. Does not advance this stream.
  RngStream split(std::uint64_t a, std::uint64_t b = 0) const noexcept;

  /// One Philox block for an explicit counter value.
  static std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                            std::uint64_t stream,
                                            std::uint64_t counter) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int pos_ = 2;
};

/// splitmix64 finaliser; used to derive stream ids from tags.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Samplers. All take the stream by reference and are pure functions of its
// state, so identical streams give bitwise-identical draws.

/// Uniform on the open interval (0, 1).
inline double uniform01(RngStream& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

__extension__ using uint128 = unsigned __int128;

/// Uniform integer in [0, n). Lemire's nearly-divisionless method.
inline std::uint64_t uniform_index(RngStream& rng, std::uint64_t n) noexcept {
  uint128 m = static_cast<uint128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<uint128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

inline double exponential(RngStream& rng, double rate) noexcept {
  return -std::log(uniform01(rng)) / rate;
}

/// Standard Gumbel: P(G <= x) = exp(-exp(-x)).
inline double gumbel(RngStream& rng) noexcept {
  return -std::log(-std::log(uniform01(rng)));
}

double standard_normal(RngStream& rng) noexcept;
std::uint64_t poisson(RngStream& rng, double mean);
double gamma_variate(RngStream& rng, double shape, double rate);

}  // namespace twave
