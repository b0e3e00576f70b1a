#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace permadid {

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(const Bytes& b) { return std::string(b.begin(), b.end()); }

std::string hex_encode(const uint8_t* data, size_t len);
std::string hex_encode(const Bytes& data);
Bytes hex_decode(std::string_view hex);

/// base64url without padding (RFC 4648 §5). A 32-byte digest encodes to
/// exactly 43 characters, the Arweave address length.
std::string base64url_encode(const uint8_t* data, size_t len);
std::string base64url_encode(const Bytes& data);
Bytes base64url_decode(std::string_view text);
bool is_base64url(std::string_view text);

/// Standard base64 with padding, used for proof values in credential JSON.
std::string base64_encode(const Bytes& data);
Bytes base64_decode(std::string_view text);

/// Bitcoin-alphabet base58, used for publicKeyBase58 fields.
std::string base58_encode(const Bytes& data);
Bytes base58_decode(std::string_view text);

}  // namespace permadid
