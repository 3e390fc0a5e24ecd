#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pathlab {

inline constexpr std::size_t address_bytes = 20;
inline constexpr std::size_t key_nibbles = 2 * address_bytes;

/// Thrown by parse_address. position() is the offset into the original text
/// of the offending character, or npos for a length mismatch.
class parse_error : public std::invalid_argument {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    parse_error(const std::string& what, std::size_t position)
        : std::invalid_argument(what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// 20-byte account identifier; the trie key.
struct Address {
    std::array<std::uint8_t, address_bytes> bytes{};

    friend constexpr auto operator<=>(const Address&, const Address&) = default;
};

/// Fixed-capacity sequence of 4-bit symbols, at most one full key long.
class NibblePath {
public:
    static constexpr std::size_t capacity = key_nibbles;

    constexpr NibblePath() = default;

    constexpr std::size_t size() const noexcept { return size_; }
    constexpr bool empty() const noexcept { return size_ == 0; }
    constexpr std::uint8_t operator[](std::size_t i) const noexcept { return data_[i]; }
    constexpr const std::uint8_t* begin() const noexcept { return data_.data(); }
    constexpr const std::uint8_t* end() const noexcept { return data_.data() + size_; }

    void push_back(std::uint8_t nibble) {
        if (size_ == capacity)
            throw std::length_error("NibblePath: capacity exceeded");
        if (nibble > 0xf)
            throw std::out_of_range("NibblePath: nibble out of range");
        data_[size_++] = nibble;
    }

    void append(const NibblePath& other) {
        for (auto n : other)
            push_back(n);
    }

    /// Nibbles [from, from + count), clamped to the path length.
    NibblePath slice(std::size_t from, std::size_t count = capacity) const {
        NibblePath out;
        if (from >= size_)
            return out;
        if (count > size_ - from)
            count = size_ - from;
        for (std::size_t i = 0; i < count; ++i)
            out.data_[i] = data_[from + i];
        out.size_ = static_cast<std::uint8_t>(count);
        return out;
    }

    NibblePath drop_front(std::size_t count) const { return slice(count); }

    friend bool operator==(const NibblePath& a, const NibblePath& b) noexcept {
        if (a.size_ != b.size_)
            return false;
        for (std::size_t i = 0; i < a.size_; ++i)
            if (a.data_[i] != b.data_[i])
                return false;
        return true;
    }

private:
    std::array<std::uint8_t, capacity> data_{};
    std::uint8_t size_ = 0;
};

namespace detail {

constexpr int hex_value(char c) noexcept {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

} // namespace detail

/// Parses 40 hex digits, optionally prefixed by "0x"/"0X". Case-insensitive;
/// mixed-case checksum spellings are accepted without validation.
inline Address parse_address(std::string_view text) {
    std::size_t offset = 0;
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
        offset = 2;
    const std::string_view digits = text.substr(offset);
    if (digits.size() != key_nibbles)
        throw parse_error("address must have 40 hex digits, got " + std::to_string(digits.size()),
                          parse_error::npos);

    Address a;
    for (std::size_t i = 0; i < key_nibbles; ++i) {
        const int v = detail::hex_value(digits[i]);
        if (v < 0)
            throw parse_error("invalid hex character '" + std::string(1, digits[i]) +
                                  "' at position " + std::to_string(offset + i),
                              offset + i);
        if (i % 2 == 0)
            a.bytes[i / 2] = static_cast<std::uint8_t>(v << 4);
        else
            a.bytes[i / 2] |= static_cast<std::uint8_t>(v);
    }
    return a;
}

/// Canonical rendering: "0x" followed by 40 lowercase hex digits.
inline std::string to_hex(const Address& a) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + key_nibbles);
    for (auto b : a.bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

/// High nibble of each octet first, matching hex rendering order.
inline NibblePath to_nibbles(const Address& a) {
    NibblePath p;
    for (auto b : a.bytes) {
        p.push_back(static_cast<std::uint8_t>(b >> 4));
        p.push_back(static_cast<std::uint8_t>(b & 0xf));
    }
    return p;
}

inline Address from_nibbles(const NibblePath& p) {
    if (p.size() != key_nibbles)
        throw std::invalid_argument("from_nibbles: path must hold exactly 40 nibbles");
    Address a;
    for (std::size_t i = 0; i < address_bytes; ++i)
        a.bytes[i] = static_cast<std::uint8_t>((p[2 * i] << 4) | p[2 * i + 1]);
    return a;
}

inline std::size_t longest_common_prefix(const NibblePath& a, const NibblePath& b) noexcept {
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    std::size_t i = 0;
    while (i < n && a[i] == b[i])
        ++i;
    return i;
}

} // namespace pathlab
