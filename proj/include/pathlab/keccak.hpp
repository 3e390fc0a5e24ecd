#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace pathlab {

namespace detail {

inline constexpr std::array<std::uint64_t, 24> keccak_round_constants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// Rotation offsets and lane permutation for the combined rho/pi step,
// following the lane visiting order starting at (1, 0).
inline constexpr std::array<int, 24> keccak_rotations = {
    1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 2, 14, 27, 41, 56, 8, 25, 43, 62, 18, 39, 61, 20, 44,
};
inline constexpr std::array<int, 24> keccak_pi_lanes = {
    10, 7, 11, 17, 18, 3, 5, 16, 8, 21, 24, 4, 15, 23, 19, 13, 12, 2, 20, 14, 22, 9, 6, 1,
};

constexpr std::uint64_t rotl64(std::uint64_t x, int s) noexcept {
    return (x << s) | (x >> (64 - s));
}

inline void keccak_f1600(std::array<std::uint64_t, 25>& a) noexcept {
    for (std::uint64_t rc : keccak_round_constants) {
        std::uint64_t c[5];
        for (int x = 0; x < 5; ++x)
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        for (int x = 0; x < 5; ++x) {
            const std::uint64_t d = c[(x + 4) % 5] ^ rotl64(c[(x + 1) % 5], 1);
            for (int y = 0; y < 25; y += 5)
                a[y + x] ^= d;
        }

        std::uint64_t carry = a[1];
        for (int i = 0; i < 24; ++i) {
            const int j = keccak_pi_lanes[i];
            const std::uint64_t tmp = a[j];
            a[j] = rotl64(carry, keccak_rotations[i]);
            carry = tmp;
        }

        for (int y = 0; y < 25; y += 5) {
            std::uint64_t row[5];
            for (int x = 0; x < 5; ++x)
                row[x] = a[y + x];
            for (int x = 0; x < 5; ++x)
                a[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
        }

        a[0] ^= rc;
    }
}

} // namespace detail

using Hash256 = std::array<std::uint8_t, 32>;

/// Original Keccak-256 (0x01 domain padding, as used by Ethereum), not
/// FIPS-202 SHA3-256.
inline Hash256 keccak256(std::span<const std::uint8_t> data) noexcept {
    constexpr std::size_t rate = 136;
    std::array<std::uint64_t, 25> state{};

    auto absorb = [&state](const std::uint8_t* block) {
        for (std::size_t i = 0; i < rate / 8; ++i) {
            std::uint64_t lane = 0;
            for (int b = 0; b < 8; ++b)
                lane |= static_cast<std::uint64_t>(block[8 * i + b]) << (8 * b);
            state[i] ^= lane;
        }
        detail::keccak_f1600(state);
    };

    std::size_t offset = 0;
    for (; offset + rate <= data.size(); offset += rate)
        absorb(data.data() + offset);

    std::array<std::uint8_t, rate> last{};
    const std::size_t tail = data.size() - offset;
    for (std::size_t i = 0; i < tail; ++i)
        last[i] = data[offset + i];
    last[tail] ^= 0x01;
    last[rate - 1] ^= 0x80;
    absorb(last.data());

    Hash256 out;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(state[i / 8] >> (8 * (i % 8)));
    return out;
}

} // namespace pathlab
