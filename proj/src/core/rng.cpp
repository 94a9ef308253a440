#include "core/rng.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace penlik {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  return splitmix64(master ^ splitmix64(stream_id + 0x1234567890abcdefULL));
}

double Rng::uniform() {
  // 53 most significant bits -> (0,1); re-draw the (unlikely) exact zero.
  for (;;) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

double Rng::exponential(double rate) {
  if (rate <= 0.0) throw InvalidArgument("exponential: rate must be positive");
  return -std::log(uniform()) / rate;
}

long Rng::poisson(double mean) {
  if (mean < 0.0) throw InvalidArgument("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  if (mean > 30.0) {
    // Sum of two independent halves keeps the product method in range.
    const double half = mean / 2.0;
    return poisson(half) + poisson(mean - half);
  }
  const double limit = std::exp(-mean);
  long k = 0;
  double prod = uniform();
  while (prod > limit) {
    ++k;
    prod *= uniform();
  }
  return k;
}

int Rng::bernoulli(double p) { return uniform() < p ? 1 : 0; }

}  // namespace penlik
