#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace v2xsim {

// Self-contained splitmix64 stream. The standard <random> distributions are
// implementation-defined, so every draw in the simulator goes through this
// type to keep runs reproducible across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [0, n)
  uint64_t uniform_int(uint64_t n) {
    // rejection sampling to avoid modulo bias
    const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n + 1) % n;
    uint64_t v = next_u64();
    while (v > limit) v = next_u64();
    return v % n;
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  uint64_t state_;
};

// FNV-1a over a tag string, used to derive independent per-concern streams
// (spawning, packet draws, relay policy) from one master seed.
constexpr uint64_t hash_tag(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : tag) {
    h ^= static_cast<uint64_t>(static_cast<unsigned char>(c));
    h *= 0x100000001b3ull;
  }
  return h;
}

inline Rng derive_stream(uint64_t master_seed, std::string_view tag) {
  return Rng(master_seed ^ hash_tag(tag));
}

inline Rng derive_stream(uint64_t master_seed, std::string_view tag, uint64_t index) {
  return Rng((master_seed ^ hash_tag(tag)) + 0x632be59bd9b4e019ull * (index + 1));
}

}  // namespace v2xsim
