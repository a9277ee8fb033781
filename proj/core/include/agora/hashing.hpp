#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace agora {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// First 8 bytes of the SHA-256 digest as an integer; used to derive seeds.
std::uint64_t sha256_u64(std::string_view data);

}  // namespace agora
