#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace rmsel::hash {

// FNV-1a 64-bit; used for artifact/input fingerprints in manifests.
inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex(std::uint64_t value);

// Hash of a file's raw bytes; throws rmsel::IoError when unreadable.
std::string file_fingerprint(const std::filesystem::path& path);

inline std::string fingerprint(std::string_view bytes) {
  return hex(fnv1a(bytes));
}

}  // namespace rmsel::hash
