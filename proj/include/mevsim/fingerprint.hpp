#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace mevsim {

/// FNV-1a over bytes; an integrity label for caches and manifests, not a
/// cryptographic digest.
std::uint64_t fnv1a64(std::string_view bytes);

/// "fnv1a64:<16 hex digits>"
std::string fingerprint_bytes(std::string_view bytes);
std::string fingerprint_file(const std::filesystem::path& path);

}  // namespace mevsim
