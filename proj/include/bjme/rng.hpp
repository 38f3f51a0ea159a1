#pragma once

#include <cstdint>
#include <random>

namespace bjme {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent generator for (seed, stream). Streams never share state, so
// callers running concurrently each derive their own.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(stream + 1))};
  return Rng(seq);
}

// Named stream ids, kept apart so adding a consumer never shifts another.
namespace streams {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kFolds = 2;
inline constexpr std::uint64_t kInit = 3;
inline constexpr std::uint64_t kQMatrix = 4;
inline constexpr std::uint64_t kTruth = 5;
inline constexpr std::uint64_t kResponses = 6;
inline constexpr std::uint64_t kMissing = 7;
}  // namespace streams

}  // namespace bjme
