#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace ctxcache {

// Deterministic random stream. std::mt19937_64 is bit-exact by the standard;
// the distributions are hand-rolled (inverse CDF / Box-Muller) so that sampled
// sequences are reproducible across standard library implementations too.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform integer in [0, n). Multiply-shift keeps the mapping deterministic
  // and avoids modulo bias for the n used here (n << 2^64).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Exponential with the given rate (events per unit). rate must be > 0.
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  // Box-Muller without the cached spare, so each call consumes exactly two
  // engine draws regardless of call history.
  double normal(double mu, double sigma) {
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return mu + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double lognormal(double mu_log, double sigma_log) {
    return std::exp(normal(mu_log, sigma_log));
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

// FNV-1a over a byte string; used for file checksums and seed derivation.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable per-run seed derivation: a run is keyed by the semantic description
// of the run (policy, capacity, ...), not by its position in a batch, so that
// identical run specs always see identical random streams.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view stable_key) {
  return splitmix64(base_seed ^ fnv1a64(stable_key));
}

}  // namespace ctxcache
