#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace admix {

/// FNV-1a 64-bit over bytes.
std::uint64_t fnv1a64(std::string_view bytes);

/// 16-hex-digit digest of a string (canonical config JSON, file contents, ...).
std::string hex_digest(std::string_view bytes);

/// digest of a file's bytes; throws Error if unreadable
std::string file_digest(const std::string& path);

}  // namespace admix
