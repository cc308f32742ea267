#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace likertlv {

using Rng = std::mt19937_64;

// Stream tags used when deriving independent generators from a master seed.
// A derived seed is splitmix64 folded over (master, tag, indices...), so a
// stream is identified by its tag plus e.g. (iteration, subject) and does not
// depend on how work is scheduled across threads.
enum class Stream : std::uint64_t {
  simulate = 0x51,
  impute = 0x1a,
  replicate = 0x4e,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream tag,
                                    std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t s = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(tag)));
  for (std::uint64_t i : indices) s = splitmix64(s ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t master, Stream tag,
                    std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(master, tag, indices));
}

/// Uniform draw on the open interval (0, 1) with 53 random bits.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw by inversion; portable across standard libraries.
double standard_normal(Rng& rng);

}  // namespace likertlv
