#include "summlab/random.hpp"

#include <bit>

namespace summlab {

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

std::uint64_t hash_doubles(std::span<const double> values) {
  std::uint64_t h = splitmix64(values.size());
  for (double v : values) {
    // +0.0 and -0.0 hash alike.
    h = hash_combine(h, std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v));
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view operation,
                          std::uint64_t instance_hash) {
  return hash_combine(hash_combine(splitmix64(global_seed), hash_string(operation)),
                      instance_hash);
}

}  // namespace summlab
