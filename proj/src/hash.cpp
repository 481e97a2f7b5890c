#include "rmsel/hash.hpp"

#include <fstream>
#include <sstream>

#include "rmsel/errors.hpp"

namespace rmsel::hash {

std::string hex(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return hex(fnv1a(buffer.str()));
}

}  // namespace rmsel::hash
