#include <mmjump/rng.hpp>

namespace mmjump {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t ensemble_index,
                          std::uint64_t path_index) {
  std::uint64_t s = master + 0x9E3779B97F4A7C15ULL * (ensemble_index + 1);
  std::uint64_t mixed = splitmix64(s);
  std::uint64_t t = mixed ^ (path_index * 0xD1B54A32D192ED03ULL);
  return splitmix64(t);
}

}  // namespace mmjump
