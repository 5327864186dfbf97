#pragma once
// Counter-based random numbers (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, node, t, index), so parallel
// and serial execution of the same scenario produce bit-identical streams: no
// shared generator state, no dependence on thread scheduling.

#include <array>
#include <cstdint>

namespace sentinet::rng {

// One 10-round Philox4x32 block: 128-bit counter + 64-bit key -> 128 bits.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key);

// Fixed stream ids keep independent uses of the same (seed, node, t) apart.
enum class Stream : uint32_t {
  positions = 1,  // node placement when generating geometric graphs
  parameter = 2,  // field / parameter draws
  noise = 3,      // measurement noise
  attack = 4,     // adversary randomness (random broadcasts etc.)
  scenario = 5,   // scenario-level choices (e.g. which nodes are compromised)
  generic = 6,    // tests, fuzzing, anything unnamed
};

// A small view over one (seed, stream, node, t) cell of the counter space.
// Successive calls advance the block index; copies restart from the cell
// origin, which is the intended way to replay a cell.
class CounterRng {
 public:
  CounterRng(uint64_t seed, Stream stream, uint32_t node = 0, uint32_t t = 0)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        node_(node), t_(t), stream_(static_cast<uint32_t>(stream)) {}

  uint64_t next_u64();
  // Uniform on (0, 1]; never returns 0 so log() is always safe.
  double uniform();
  // Standard normal via Box-Muller; draws come in cached pairs.
  double gaussian();
  // Uniform integer in [0, n) by rejection (exact, no modulo bias).
  uint64_t uniform_below(uint64_t n);

 private:
  std::array<uint32_t, 2> key_;
  uint32_t node_, t_, stream_;
  uint32_t block_ = 0;
  bool have_lane_ = false;    // second u64 of the current block
  uint64_t lane_ = 0;
  bool have_gauss_ = false;   // second half of the current Box-Muller pair
  double gauss_ = 0.0;
};

}  // namespace sentinet::rng
