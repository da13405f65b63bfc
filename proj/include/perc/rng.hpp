#pragma once

#include <cstdint>

namespace perc {

// 64-bit finalizer (splitmix64). Full-avalanche; one call per mixed word.
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counter-based random field keyed by (master seed, replica id, stream tag).
// Every lattice element owns one uniform: the value is a pure function of the
// key and the element hash, so lazy sampling is order-independent and
// re-querying an element always reproduces the same state. Replicas with
// distinct ids see independent fields.
struct RandomField {
  uint64_t lane = 0;

  RandomField() = default;
  RandomField(uint64_t master_seed, uint64_t replica, uint64_t stream_tag = 0)
      : lane(mix64(mix64(mix64(master_seed) ^ replica) ^ stream_tag)) {}

  double uniform(uint64_t element_hash) const {
    uint64_t h = mix64(element_hash ^ lane);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  }

  bool bernoulli(uint64_t element_hash, double p) const { return uniform(element_hash) < p; }
};

}  // namespace perc
