#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace coe {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// First 8 digest bytes, big-endian.
std::uint64_t sha256_u64(std::string_view data);

}  // namespace coe
