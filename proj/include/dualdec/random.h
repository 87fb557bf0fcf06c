#ifndef DUALDEC_RANDOM_H_
#define DUALDEC_RANDOM_H_

#include <cstdint>
#include <initializer_list>

namespace dualdec {

// SplitMix64 finalizer; used both as a stream generator and as a keyed hash.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hashes a tuple of keys into one 64-bit value. Used for counter-keyed
// sampling where draw order must not matter.
constexpr uint64_t HashKeys(std::initializer_list<uint64_t> keys) {
  uint64_t h = 0x243f6a8885a308d3ULL;
  for (uint64_t k : keys) h = Mix64(h ^ Mix64(k));
  return h;
}

// Top 53 bits to [0, 1).
constexpr double UnitDouble(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Small sequential generator with a portable, fully specified output stream
// (std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t NextU64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double Uniform() { return UnitDouble(NextU64()); }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  bool Bernoulli(double p) { return Uniform() < p; }
  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  uint64_t Below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
      r = NextU64();
    } while (r >= limit);
    return r % n;
  }

 private:
  uint64_t state_;
};

}  // namespace dualdec

#endif  // DUALDEC_RANDOM_H_
