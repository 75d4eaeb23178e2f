#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace smoteaudit {

// Deterministic random source. The engine (mt19937_64) is fully specified by
// the standard; the value mappings below are our own so that streams are
// bit-identical across standard library implementations.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t nextBits() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniformReal() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1).
  double uniformOpen() {
    double u;
    do {
      u = uniformReal();
    } while (u == 0.0);
    return u;
  }

  // Uniform integer on [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t uniformIndex(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniformReal();  // (0, 1]
    const double u2 = uniformReal();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    hasSpare_ = true;
    return radius * std::cos(angle);
  }

  // Derives an independent stream seed from a master seed and stream id
  // (splitmix64 finalizer over the combined words).
  static std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // 64-bit FNV-1a, used to fold names into seed derivations.
  static std::uint64_t hashName(const std::string& name) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : name) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
    return h;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

}  // namespace smoteaudit
