#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace nftlens {

// Chain quantities (wei amounts, token ids) do not fit in 64 bits; all money
// stays integral until report emission.
using BigInt = boost::multiprecision::cpp_int;
using Wei = BigInt;
using SignedWei = BigInt;
using TokenId = BigInt;

using Bytes = std::vector<uint8_t>;
using Selector = std::array<uint8_t, 4>;

namespace detail {

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline constexpr char kHexDigits[] = "0123456789abcdef";

}  // namespace detail

inline std::string to_hex(std::span<const uint8_t> bytes, bool prefixed = true) {
    std::string out;
    out.reserve(bytes.size() * 2 + 2);
    if (prefixed) out += "0x";
    for (uint8_t b : bytes) {
        out += detail::kHexDigits[b >> 4];
        out += detail::kHexDigits[b & 0x0f];
    }
    return out;
}

inline std::optional<Bytes> bytes_from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.size() % 2 != 0) return std::nullopt;
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = detail::hex_nibble(hex[i]);
        int lo = detail::hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return out;
}

/// Fixed-width byte string with a canonical 0x-prefixed lowercase-hex form.
template <size_t N>
struct FixedBytes {
    std::array<uint8_t, N> bytes{};

    auto operator<=>(const FixedBytes&) const = default;

    [[nodiscard]] bool is_zero() const {
        for (uint8_t b : bytes)
            if (b != 0) return false;
        return true;
    }

    [[nodiscard]] std::string hex() const { return to_hex(bytes); }

    static std::optional<FixedBytes> from_hex(std::string_view hex) {
        auto raw = bytes_from_hex(hex);
        if (!raw || raw->size() != N) return std::nullopt;
        FixedBytes out;
        std::copy(raw->begin(), raw->end(), out.bytes.begin());
        return out;
    }

    /// Builds a value whose trailing bytes hold `seed` big-endian. Handy for
    /// synthetic fixtures and probe senders.
    static FixedBytes from_seed(uint64_t seed) {
        FixedBytes out;
        for (size_t i = 0; i < 8 && i < N; ++i)
            out.bytes[N - 1 - i] = static_cast<uint8_t>(seed >> (8 * i));
        return out;
    }
};

using Address = FixedBytes<20>;
using Hash32 = FixedBytes<32>;

inline const Address kNullAddress{};
inline const Address kBurnAddress = *Address::from_hex("0x000000000000000000000000000000000000dead");

// Event signature topics. ERC-721 and ERC-20 share the Transfer signature;
// the shapes differ in the number of indexed arguments.
inline const Hash32 kTransferTopic =
    *Hash32::from_hex("0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef");
inline const Hash32 kTransferSingleTopic =
    *Hash32::from_hex("0xc3d58168c5ae7397731d063d5bbf3d657854427343f4c083240f7aacaa2d0f62");
inline const Hash32 kTransferBatchTopic =
    *Hash32::from_hex("0x4a39dc06d4c0dbc64b70af90fd698a233a518aa5d07e595d983b8c0526c8f7fb");

inline BigInt uint_from_be(std::span<const uint8_t> word) {
    BigInt v = 0;
    for (uint8_t b : word) v = (v << 8) | b;
    return v;
}

/// Interprets a 32-byte ABI word as an address (low-order 20 bytes).
inline Address address_from_word(const Hash32& word) {
    Address out;
    std::copy(word.bytes.begin() + 12, word.bytes.end(), out.bytes.begin());
    return out;
}

inline BigInt uint_from_word(const Hash32& word) { return uint_from_be(word.bytes); }

inline Hash32 word_from_uint(const BigInt& v) {
    Hash32 out;
    BigInt x = v;
    for (size_t i = 0; i < 32 && x != 0; ++i) {
        out.bytes[31 - i] = static_cast<uint8_t>(x & 0xff);
        x >>= 8;
    }
    return out;
}

inline Hash32 word_from_address(const Address& a) {
    Hash32 out;
    std::copy(a.bytes.begin(), a.bytes.end(), out.bytes.begin() + 12);
    return out;
}

inline std::optional<BigInt> bigint_from_dec(std::string_view s) {
    if (s.empty()) return std::nullopt;
    size_t i = 0;
    bool neg = false;
    if (s[0] == '-') {
        neg = true;
        i = 1;
        if (s.size() == 1) return std::nullopt;
    }
    BigInt v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
}

inline std::string to_dec(const BigInt& v) { return v.str(); }

inline constexpr uint64_t kWeiPerEthExp = 18;

/// Display-only wei→ETH conversion; all computation stays in wei.
inline std::string format_eth(const SignedWei& wei) {
    BigInt v = wei < 0 ? BigInt(-wei) : wei;
    static const BigInt kOne = []() {
        BigInt e = 1;
        for (uint64_t i = 0; i < kWeiPerEthExp; ++i) e *= 10;
        return e;
    }();
    BigInt whole = v / kOne;
    BigInt frac = v % kOne;
    std::string out = (wei < 0 ? "-" : "") + whole.str();
    if (frac != 0) {
        std::string f = frac.str();
        f.insert(f.begin(), kWeiPerEthExp - f.size(), '0');
        while (!f.empty() && f.back() == '0') f.pop_back();
        out += "." + f;
    }
    return out;
}

inline std::optional<Selector> selector_from_hex(std::string_view hex) {
    auto raw = bytes_from_hex(hex);
    if (!raw || raw->size() != 4) return std::nullopt;
    Selector s;
    std::copy(raw->begin(), raw->end(), s.begin());
    return s;
}

inline std::string selector_hex(const Selector& s) { return to_hex(s); }

/// Non-fatal events (skipped txns, ambiguous emitters, unresolved methods)
/// are reported through a sink the caller may ignore.
struct Diagnostic {
    std::string code;
    std::string message;
};

using DiagnosticSink = std::vector<Diagnostic>;

inline void report(DiagnosticSink* sink, std::string code, std::string message) {
    if (sink) sink->push_back({std::move(code), std::move(message)});
}

}  // namespace nftlens

template <size_t N>
struct std::hash<nftlens::FixedBytes<N>> {
    size_t operator()(const nftlens::FixedBytes<N>& v) const noexcept {
        return std::hash<std::string_view>{}(
            std::string_view(reinterpret_cast<const char*>(v.bytes.data()), N));
    }
};
