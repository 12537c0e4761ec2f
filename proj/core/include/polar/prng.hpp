#ifndef POLAR_PRNG_HPP
#define POLAR_PRNG_HPP

#include <cstdint>
#include <random>
#include <vector>

// All stochastic behavior in this library flows through the helpers below so
// that results are reproducible bit-for-bit across platforms and releases.
// The contract, also documented in the README:
//   * engine: std::mt19937_64 (its output sequence is fixed by the standard),
//   * bounded draws take the next engine output modulo n,
//   * shuffles are Fisher-Yates from the top index down,
//   * derived seeds (e.g. per-language sub-splits) use splitmix64.
// std::uniform_int_distribution and std::shuffle are implementation-defined
// and must not be used anywhere results are persisted.

namespace polar {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform-ish draw in [0, n). Modulo bias is irrelevant for the small n used
/// here and keeps the sequence trivial to reproduce in other languages.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  return rng() % n;
}

template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace polar

#endif  // POLAR_PRNG_HPP
