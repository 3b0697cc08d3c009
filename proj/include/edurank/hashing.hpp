#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace edurank {

/// FNV-1a, 64 bit. Used for all feature hashing so that embeddings are
/// identical across platforms and stdlib versions.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

struct BucketSign {
  int bucket;
  double sign;
};

/// Feature-hash a term into one of `dim` signed buckets.
inline BucketSign bucket_sign(std::string_view term, int dim) {
  std::uint64_t h = fnv1a64(term);
  int bucket = static_cast<int>(h % static_cast<std::uint64_t>(dim));
  double sign = ((h >> 32) & 1ULL) ? 1.0 : -1.0;
  return {bucket, sign};
}

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace edurank
