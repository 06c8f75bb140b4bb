#include "mevsim/fingerprint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mevsim {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::string fingerprint_bytes(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

std::string fingerprint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for fingerprinting: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fingerprint_bytes(buffer.str());
}

}  // namespace mevsim
