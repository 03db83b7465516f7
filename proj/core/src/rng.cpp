#include "twave/rng.hpp"

#include <random>

namespace twave {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         const std::array<std::uint32_t, 2>& key) noexcept {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
  ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
         static_cast<std::uint32_t>(p0)};
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::block(std::uint64_t seed,
                                               std::uint64_t stream,
                                               std::uint64_t counter) noexcept {
  std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void RngStream::refill() noexcept {
  const auto b = block(seed_, stream_, counter_++);
  buffer_[0] = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  buffer_[1] = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
  pos_ = 0;
}

RngStream RngStream::split(std::uint64_t a, std::uint64_t b) const noexcept {
  return RngStream(seed_, mix64(stream_ ^ mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL))));
}

double standard_normal(RngStream& rng) noexcept {
  // Marsaglia polar method; the second variate is discarded so the stream
  // carries no hidden state.
  double u, v, s;
  do {
    u = 2.0 * uniform01(rng) - 1.0;
    v = 2.0 * uniform01(rng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

std::uint64_t poisson(RngStream& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(rng);
}

double gamma_variate(RngStream& rng, double shape, double rate) {
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

}  // namespace twave
