#include "cppok/common.hpp"

#include <cmath>
#include <stdexcept>

namespace cppok {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng replicate_rng(std::uint64_t master_seed, std::uint64_t replicate) noexcept {
  // Odd multiplier => injective in `replicate` mod 2^64; mix64 is bijective,
  // so stream seeds are pairwise distinct for a fixed master seed.
  const std::uint64_t stream = master_seed + (replicate + 1) * 0x9e3779b97f4a7c15ULL;
  return Rng(mix64(stream));
}

double uniform_open01(Rng& rng) {
  // Rejects the lattice endpoints so callers may take logs and reciprocals.
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u;
  do {
    u = dist(rng);
  } while (u <= 0.0 || u >= 1.0);
  return u;
}

double sample_exponential(Rng& rng, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("sample_exponential: rate must be > 0");
  return -std::log(uniform_open01(rng)) / rate;
}

std::int64_t sample_poisson(Rng& rng, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("sample_poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean > 1099511627776.0) {  // 2^40
    std::normal_distribution<double> gauss(mean, std::sqrt(mean));
    const double draw = gauss(rng);
    return draw <= 0.0 ? 0 : static_cast<std::int64_t>(std::llround(draw));
  }
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("sample_binomial: n must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_binomial: p must lie in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

double sample_gamma(Rng& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("sample_gamma: shape and scale must be > 0");
  std::gamma_distribution<double> dist(shape, scale);
  return dist(rng);
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    comp += (sum - t) + x;
  } else {
    comp += (x - t) + sum;
  }
  sum = t;
}

std::uint64_t fnv1a64(const void* data, std::size_t n) noexcept {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cppok
