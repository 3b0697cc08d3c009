#include "edurank/rng.hpp"

#include "edurank/hashing.hpp"

namespace edurank {

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t a,
                          std::uint64_t b) {
  std::uint64_t h = fnv1a64(tag);
  h ^= base + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h ^= a + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h ^= b + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace edurank
