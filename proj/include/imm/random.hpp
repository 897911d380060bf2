#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace imm {

// Counter-based stream splitting. Every random object in the library (RR set i,
// Monte Carlo run j, ...) gets its own engine seeded from a hash of
// (master seed, index), so results never depend on generation order or on
// how work is split across threads.

// SplitMix64 finalizer; a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// FNV-1a over the tag, then mixed with the master seed. Used for named
// sub-streams such as the regenerated sequence of the W1 variant.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(mix64(master) ^ h);
}

// A single independent random stream.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  Stream(std::uint64_t master, std::uint64_t index) : engine_(derive_seed(master, index)) {}

  // Uniform on [0, n).
  std::uint32_t below(std::uint32_t n) {
    return std::uniform_int_distribution<std::uint32_t>(0, n - 1)(engine_);
  }

  // True with probability p (p = 1 always fires, p = 0 never does).
  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p;
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace imm
