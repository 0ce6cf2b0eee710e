#pragma once

#include <cstdint>
#include <random>

namespace cppok {

// All sampling routines take an explicit engine so that every result is a
// pure function of (parameters, seed).  mt19937_64 is the project-wide engine.
using Rng = std::mt19937_64;

// splitmix64 finalizer: a 64-bit bijective mixer with full avalanche.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Per-replicate stream derivation: replicate i draws from
// mt19937_64(mix64(master_seed + (i + 1) * odd_constant)).  The multiplier is
// odd, so distinct replicate indices map to distinct mixer inputs (mod 2^64)
// and therefore to distinct seeds; streams never collide for a fixed master
// seed.  Stream identity depends only on (master_seed, replicate), never on
// thread count or scheduling.
Rng replicate_rng(std::uint64_t master_seed, std::uint64_t replicate) noexcept;

// U(0,1) with both endpoints excluded (safe under log and division).
double uniform_open01(Rng& rng);

// Exponential(rate) via inversion, -log(U)/rate with U in (0,1).
double sample_exponential(Rng& rng, double rate);

// Poisson(mean) as a 64-bit count.  Uses std::poisson_distribution for
// ordinary means and a rounded normal approximation once mean is so large
// (> 2^40) that the relative error of the approximation (~mean^{-1/2}) is far
// below double resolution of the count itself.
std::int64_t sample_poisson(Rng& rng, double mean);

// Binomial(n, p) as a 64-bit count.
std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p);

// Gamma(shape, scale) — sum of `shape` unit exponentials when shape is a
// modest integer would be wasteful; std::gamma_distribution handles all cases.
double sample_gamma(Rng& rng, double shape, double scale);

// Neumaier-compensated accumulator: running sums whose value is independent
// of the magnitude ordering of the inputs to ~1 ulp.  Used everywhere results
// must be bit-stable under a fixed reduction order.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) noexcept;
  double value() const noexcept { return sum + comp; }
};

// FNV-1a over bytes; used to fingerprint configuration text in output headers.
std::uint64_t fnv1a64(const void* data, std::size_t n) noexcept;

}  // namespace cppok
