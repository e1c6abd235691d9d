#pragma once

#include <cmath>
#include <cstdint>

namespace brw {

// 64-bit finalizer from SplitMix64; bijective, good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ with streams addressed by a key tuple. Every stream is
// derived statelessly from (seed, a, b, c), so trials, individuals and
// reproduction classes get independent substreams without jump-ahead,
// and the derivation does not depend on how much any other stream
// consumed. That keys the whole reproducibility contract: same key,
// same draws, regardless of thread count or evaluation order.
class Rng {
 public:
  Rng() : Rng(0, 0, 0, 0) {}

  Rng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
      std::uint64_t c = 0) {
    std::uint64_t h = seed;
    h = mix64(h ^ 0x8f1bbcdcbfa53e0bull);
    h = mix64(h ^ mix64(a));
    h = mix64(h ^ mix64(b));
    h = mix64(h ^ mix64(c));
    std::uint64_t sm = h;
    for (auto& w : state_) {
      sm += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      w = z ^ (z >> 31);
    }
    state_[0] |= 1;  // all-zero state is absorbing
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never 0, safe under log().
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  // Uniform on (0, 1); both endpoints excluded.
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exp(1) by inverse transform.
  double exponential() { return -std::log(uniform()); }

  // Standard normal (polar rejection; the spare draw is discarded).
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform_open() - 1.0;
      const double v = 2.0 * uniform_open() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

namespace detail {

// Transformed rejection (Hormann's PTRS), exact for large means.
inline long poisson_ptrs(Rng& rng, double mu) {
  const double b = 0.931 + 2.53 * std::sqrt(mu);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mu = std::log(mu);
  for (;;) {
    const double u = rng.uniform_open() - 0.5;
    const double v = rng.uniform_open();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mu - mu - std::lgamma(k + 1.0)) {
      return static_cast<long>(kf);
    }
  }
}

}  // namespace detail

// Poisson(mu). For mu <= 700 this is CDF inversion on a single uniform,
// so for fixed draws the count is non-decreasing in mu; the coupling of
// runs at different speed parameters relies on that monotonicity.
// Above 700 (where exp(-mu) underflows) it switches to PTRS.
inline long poisson(Rng& rng, double mu) {
  if (mu <= 0.0) return 0;
  if (mu > 700.0) return detail::poisson_ptrs(rng, mu);
  const double u = rng.uniform();
  double p = std::exp(-mu);
  double cdf = p;
  long k = 0;
  while (u > cdf) {
    ++k;
    p *= mu / static_cast<double>(k);
    cdf += p;
    if (k > 20000000L) break;  // cdf stagnated in the far tail
  }
  return k;
}

// Gamma(shape, 1), shape >= 1, via Marsaglia-Tsang squeeze.
inline double gamma_shape_ge1(Rng& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace brw
