#pragma once

#include <cstdint>
#include <random>

namespace psbm {

// Master seed for anything random in the library. Sub-streams are derived by
// mixing fixed tags into the seed, so that e.g. the edge draws of a graph do
// not shift when the label stream consumes a different number of variates.
struct Seed {
  std::uint64_t value = 0;
};

// splitmix64 (Steele, Lea, Flood 2014). Used only to derive engine seeds and
// decorrelate sub-streams; the actual variates come from std::mt19937_64.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream tags. Keep these stable: regenerating with the same master seed must
// reproduce old outputs byte for byte.
namespace stream {
inline constexpr std::uint64_t structure = 0x5354525543545552ULL;
inline constexpr std::uint64_t labels = 0x4c4142454c530000ULL;
inline constexpr std::uint64_t reveals = 0x52455645414c5300ULL;
inline constexpr std::uint64_t decisions = 0x4445434953494f4eULL;
inline constexpr std::uint64_t spectral = 0x5350454354524c00ULL;
}  // namespace stream

inline Seed derive(Seed s, std::uint64_t tag) {
  return Seed{splitmix64(s.value ^ splitmix64(tag))};
}

// Per-node sub-streams (recovery runs nodes in any order / on any thread).
inline Seed derive(Seed s, std::uint64_t tag, std::uint64_t index) {
  return derive(derive(s, tag), splitmix64(index + 1));
}

inline std::mt19937_64 make_engine(Seed s) {
  return std::mt19937_64{splitmix64(s.value)};
}

}  // namespace psbm
