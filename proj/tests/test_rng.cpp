#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "sentinet/rng.hpp"

using namespace sentinet::rng;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Published reference vectors for the 10-round 4x32 configuration.
  auto z = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(z == std::array<uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

  auto f = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu});
  CHECK(f == std::array<uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

  auto p = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u});
  CHECK(p == std::array<uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("draws are a pure function of the cell address") {
  CounterRng a(42, Stream::noise, 7, 1234);
  CounterRng b(42, Stream::noise, 7, 1234);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // Changing any coordinate of the address changes the stream.
  CounterRng base(42, Stream::noise, 7, 1234);
  CounterRng seed(43, Stream::noise, 7, 1234);
  CounterRng stream(42, Stream::attack, 7, 1234);
  CounterRng node(42, Stream::noise, 8, 1234);
  CounterRng t(42, Stream::noise, 7, 1235);
  uint64_t v = base.next_u64();
  CHECK(v != seed.next_u64());
  CHECK(v != stream.next_u64());
  CHECK(v != node.next_u64());
  CHECK(v != t.next_u64());
}

TEST_CASE("uniform lands in (0,1] and fills the interval") {
  CounterRng r(1, Stream::generic);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = r.uniform();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 1e-4);
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("gaussian moments match a standard normal") {
  CounterRng r(7, Stream::generic);
  const int n = 200000;
  double sum = 0, sumsq = 0, sum3 = 0;
  for (int i = 0; i < n; ++i) {
    double g = r.gaussian();
    sum += g;
    sumsq += g * g;
    sum3 += g * g * g;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  double skew = sum3 / n;
  // ~9 standard errors of slack at n = 2e5.
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
  CHECK(std::abs(skew) < 0.08);
}

TEST_CASE("uniform_below is exact and in range") {
  CounterRng r(3, Stream::generic);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    uint64_t v = r.uniform_below(7);
    REQUIRE(v < 7);
    counts[v]++;
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);  // ~5 sigma
}

TEST_CASE("copies replay the cell from its origin") {
  CounterRng r(11, Stream::parameter, 3, 9);
  std::vector<uint64_t> first;
  for (int i = 0; i < 8; ++i) first.push_back(r.next_u64());
  CounterRng replay(11, Stream::parameter, 3, 9);
  for (int i = 0; i < 8; ++i) CHECK(replay.next_u64() == first[i]);
}
