#include "permadid/bytes.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "permadid/errors.hpp"

namespace permadid {

namespace {

constexpr char kHex[] = "0123456789abcdef";
constexpr char kB64Url[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
constexpr char kB64Std[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr char kB58[] = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

int b64_index(char c, bool url) {
    const char* alphabet = url ? kB64Url : kB64Std;
    for (int i = 0; i < 64; ++i)
        if (alphabet[i] == c) return i;
    return -1;
}

std::string b64_encode(const uint8_t* data, size_t len, bool url, bool pad) {
    const char* alphabet = url ? kB64Url : kB64Std;
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= len; i += 3) {
        uint32_t v = (uint32_t(data[i]) << 16) | (uint32_t(data[i + 1]) << 8) | data[i + 2];
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += alphabet[v & 63];
    }
    size_t rem = len - i;
    if (rem == 1) {
        uint32_t v = uint32_t(data[i]) << 16;
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        if (pad) out += "==";
    } else if (rem == 2) {
        uint32_t v = (uint32_t(data[i]) << 16) | (uint32_t(data[i + 1]) << 8);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        if (pad) out += '=';
    }
    return out;
}

Bytes b64_decode(std::string_view text, bool url) {
    // url form is unpadded; the standard form requires canonical padding
    size_t pad = 0;
    if (!url) {
        while (!text.empty() && text.back() == '=') {
            text.remove_suffix(1);
            ++pad;
        }
        if (pad > 2 || (text.size() + pad) % 4 != 0)
            throw Error(Errc::ParseError, "base64: bad padding");
    }
    if (text.size() % 4 == 1) throw Error(Errc::ParseError, "base64: bad length");
    Bytes out;
    out.reserve(text.size() / 4 * 3 + 2);
    uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        int v = b64_index(c, url);
        if (v < 0) throw Error(Errc::ParseError, "base64: bad character");
        acc = (acc << 6) | uint32_t(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(uint8_t((acc >> bits) & 0xff));
        }
    }
    if (bits > 0 && (acc & ((1u << bits) - 1)) != 0)
        throw Error(Errc::ParseError, "base64: nonzero trailing bits");
    return out;
}

}  // namespace

std::string hex_encode(const uint8_t* data, size_t len) {
    std::string out;
    out.reserve(len * 2);
    for (size_t i = 0; i < len; ++i) {
        out += kHex[data[i] >> 4];
        out += kHex[data[i] & 0xf];
    }
    return out;
}

std::string hex_encode(const Bytes& data) { return hex_encode(data.data(), data.size()); }

Bytes hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) throw Error(Errc::ParseError, "hex: odd length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(Errc::ParseError, "hex: bad character");
    };
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = uint8_t((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

std::string base64url_encode(const uint8_t* data, size_t len) { return b64_encode(data, len, true, false); }
std::string base64url_encode(const Bytes& data) { return b64_encode(data.data(), data.size(), true, false); }
Bytes base64url_decode(std::string_view text) { return b64_decode(text, true); }

bool is_base64url(std::string_view text) {
    if (text.size() % 4 == 1) return false;
    return std::all_of(text.begin(), text.end(), [](char c) { return b64_index(c, true) >= 0; });
}

std::string base64_encode(const Bytes& data) { return b64_encode(data.data(), data.size(), false, true); }
Bytes base64_decode(std::string_view text) { return b64_decode(text, false); }

std::string base58_encode(const Bytes& data) {
    size_t zeros = 0;
    while (zeros < data.size() && data[zeros] == 0) ++zeros;
    // big-endian base-256 to base-58 by repeated division
    std::vector<uint8_t> digits;
    digits.reserve(data.size() * 138 / 100 + 1);
    for (size_t i = zeros; i < data.size(); ++i) {
        uint32_t carry = data[i];
        for (auto& d : digits) {
            uint32_t v = (uint32_t(d) << 8) + carry;
            d = uint8_t(v % 58);
            carry = v / 58;
        }
        while (carry) {
            digits.push_back(uint8_t(carry % 58));
            carry /= 58;
        }
    }
    std::string out(zeros, '1');
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out += kB58[*it];
    return out;
}

Bytes base58_decode(std::string_view text) {
    size_t zeros = 0;
    while (zeros < text.size() && text[zeros] == '1') ++zeros;
    Bytes out;
    for (size_t i = zeros; i < text.size(); ++i) {
        const char* p = std::find(kB58, kB58 + 58, text[i]);
        if (p == kB58 + 58) throw Error(Errc::ParseError, "base58: bad character");
        uint32_t carry = uint32_t(p - kB58);
        for (auto& b : out) {
            uint32_t v = uint32_t(b) * 58 + carry;
            b = uint8_t(v & 0xff);
            carry = v >> 8;
        }
        while (carry) {
            out.push_back(uint8_t(carry & 0xff));
            carry >>= 8;
        }
    }
    out.insert(out.end(), zeros, 0);
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace permadid
