#include "sentinet/rng.hpp"

#include <cmath>

namespace sentinet::rng {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;  // golden-ratio increment
constexpr uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3)-1 increment

inline std::array<uint32_t, 4> round_once(const std::array<uint32_t, 4>& x,
                                          const std::array<uint32_t, 2>& k) {
  uint64_t p0 = static_cast<uint64_t>(kMul0) * x[0];
  uint64_t p1 = static_cast<uint64_t>(kMul1) * x[2];
  uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
  uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    ctr = round_once(ctr, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

uint64_t CounterRng::next_u64() {
  if (have_lane_) {
    have_lane_ = false;
    return lane_;
  }
  auto out = philox4x32({block_++, t_, node_, stream_}, key_);
  lane_ = (static_cast<uint64_t>(out[2]) << 32) | out[3];
  have_lane_ = true;
  return (static_cast<uint64_t>(out[0]) << 32) | out[1];
}

double CounterRng::uniform() {
  // 53-bit mantissa, shifted into (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::gaussian() {
  if (have_gauss_) {
    have_gauss_ = false;
    return gauss_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double phi = 2.0 * M_PI * u2;
  gauss_ = r * std::sin(phi);
  have_gauss_ = true;
  return r * std::cos(phi);
}

uint64_t CounterRng::uniform_below(uint64_t n) {
  // Rejection sampling over the largest multiple of n below 2^64.
  uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

}  // namespace sentinet::rng
