#pragma once

#include <string>
#include <string_view>

namespace fluency {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

// First 16 hex characters of the SHA-256; used for sentence ids and config
// hashes.
std::string short_digest(std::string_view bytes);

}  // namespace fluency
