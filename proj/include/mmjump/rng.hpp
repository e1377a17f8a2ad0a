#pragma once

#include <cstdint>
#include <random>

namespace mmjump {

using Rng = std::mt19937_64;

/// Stream index reserved for limit-process ensembles.
inline constexpr std::uint64_t kLimitStream = 0xFFFF'FFFFULL;
/// Stream index reserved for a second, independent limit ensemble.
inline constexpr std::uint64_t kLimitStreamB = 0xFFFF'FFFEULL;
/// Stream index reserved for bootstrap resampling.
inline constexpr std::uint64_t kBootstrapStream = 0xFFFF'FFFDULL;

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for the RNG stream of path `path_index` within ensemble
/// `ensemble_index` under `master`:
///   s0 = master
///   s1 = splitmix64(s0 + golden * (ensemble_index + 1))
///   s2 = splitmix64(s1 ^ (path_index * 0xD1B54A32D192ED03))
/// Streams are independent of worker count and execution order.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t ensemble_index,
                          std::uint64_t path_index);

inline Rng make_stream(std::uint64_t master, std::uint64_t ensemble_index,
                       std::uint64_t path_index) {
  return Rng(stream_seed(master, ensemble_index, path_index));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double exponential(Rng& rng, double rate) {
  return std::exponential_distribution<double>(rate)(rng);
}

}  // namespace mmjump
