#pragma once

#include <cstdint>
#include <random>

namespace penlik {

// Identity of the deterministic random source, recorded in report files.
// mt19937_64 is bit-exact across platforms and the variate transforms live
// here, so streams are pinned by this code alone.
inline constexpr const char* kGeneratorId = "mt19937_64/bm-v1";

std::uint64_t splitmix64(std::uint64_t x);

// Child seed for an independent stream (replicate index, row index, ...).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on (0,1), 53-bit resolution, never exactly 0.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller (pairs cached).
  double normal();
  double normal(double mean, double sd);
  double exponential(double rate);
  // Knuth multiplication for small means, halving for large ones.
  long poisson(double mean);
  int bernoulli(double p);
  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace penlik
