#pragma once

#include <pathlab/keccak.hpp>
#include <pathlab/keyspace.hpp>

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathlab {

enum class GeneratorMode { uniform, crypto };

inline std::string_view to_string(GeneratorMode m) noexcept {
    return m == GeneratorMode::uniform ? "uniform" : "crypto";
}

inline GeneratorMode parse_generator_mode(std::string_view s) {
    if (s == "uniform")
        return GeneratorMode::uniform;
    if (s == "crypto")
        return GeneratorMode::crypto;
    throw std::invalid_argument("unknown generator mode '" + std::string(s) + "'");
}

struct GeneratorConfig {
    GeneratorMode mode = GeneratorMode::uniform;
    std::uint64_t seed = 0;
    std::size_t count = 0;
};

class invalid_key_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using PrivateKey = std::array<std::uint8_t, 32>;

/// SplitMix64 output function. Used for every seed derivation in the project.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic byte source: mt19937_64 (19937-bit state) seeded through
/// std::seed_seq from eight SplitMix64-expanded words. Bytes are taken from
/// each 64-bit output little-endian first. Every step is fully specified by
/// the standard, so streams are identical across platforms.
class ByteStream {
public:
    explicit ByteStream(std::uint64_t seed) {
        const auto words = seed_words(seed);
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    std::uint8_t next() {
        if (available_ == 0) {
            buffer_ = engine_();
            available_ = 8;
        }
        const auto b = static_cast<std::uint8_t>(buffer_);
        buffer_ >>= 8;
        --available_;
        return b;
    }

    template <std::size_t N>
    void fill(std::array<std::uint8_t, N>& out) {
        for (auto& b : out)
            b = next();
    }

private:
    static std::array<std::uint32_t, 8> seed_words(std::uint64_t seed) {
        std::array<std::uint32_t, 8> words{};
        std::uint64_t s = seed;
        for (std::size_t i = 0; i < words.size(); i += 2) {
            s = mix64(s);
            words[i] = static_cast<std::uint32_t>(s);
            words[i + 1] = static_cast<std::uint32_t>(s >> 32);
        }
        return words;
    }

    std::mt19937_64 engine_;
    std::uint64_t buffer_ = 0;
    int available_ = 0;
};

/// secp256k1 public-key derivation followed by Keccak-256. Holds the curve
/// group and a scratch context; not thread-safe, create one per thread.
class AddressDeriver {
public:
    AddressDeriver()
        : group_(EC_GROUP_new_by_curve_name(NID_secp256k1)), ctx_(BN_CTX_new()) {
        if (!group_ || !ctx_)
            throw std::runtime_error("secp256k1 group unavailable in libcrypto");
    }

    bool valid(const PrivateKey& key) const {
        BignumPtr k(BN_bin2bn(key.data(), static_cast<int>(key.size()), nullptr));
        return !BN_is_zero(k.get()) && BN_cmp(k.get(), EC_GROUP_get0_order(group_.get())) < 0;
    }

    /// Last 20 bytes of Keccak-256 over the 64-byte X||Y public key
    /// (uncompressed encoding without the 0x04 tag).
    Address derive(const PrivateKey& key) {
        BignumPtr k(BN_bin2bn(key.data(), static_cast<int>(key.size()), nullptr));
        if (!k)
            throw std::runtime_error("BN_bin2bn failed");
        if (BN_is_zero(k.get()) || BN_cmp(k.get(), EC_GROUP_get0_order(group_.get())) >= 0)
            throw invalid_key_error("private key must lie in [1, n-1] for the secp256k1 order n");

        PointPtr pub(EC_POINT_new(group_.get()));
        if (!pub || !EC_POINT_mul(group_.get(), pub.get(), k.get(), nullptr, nullptr, ctx_.get()))
            throw std::runtime_error("EC_POINT_mul failed");

        std::array<std::uint8_t, 65> encoded{};
        const std::size_t len = EC_POINT_point2oct(group_.get(), pub.get(), POINT_CONVERSION_UNCOMPRESSED,
                                                   encoded.data(), encoded.size(), ctx_.get());
        if (len != encoded.size() || encoded[0] != 0x04)
            throw std::runtime_error("unexpected public key encoding");

        const Hash256 digest = keccak256(std::span<const std::uint8_t>(encoded).subspan(1));
        Address a;
        for (std::size_t i = 0; i < address_bytes; ++i)
            a.bytes[i] = digest[digest.size() - address_bytes + i];
        return a;
    }

private:
    struct GroupFree {
        void operator()(EC_GROUP* g) const noexcept { EC_GROUP_free(g); }
    };
    struct CtxFree {
        void operator()(BN_CTX* c) const noexcept { BN_CTX_free(c); }
    };
    struct BignumFree {
        void operator()(BIGNUM* b) const noexcept { BN_clear_free(b); }
    };
    struct PointFree {
        void operator()(EC_POINT* p) const noexcept { EC_POINT_free(p); }
    };
    using BignumPtr = std::unique_ptr<BIGNUM, BignumFree>;
    using PointPtr = std::unique_ptr<EC_POINT, PointFree>;

    std::unique_ptr<EC_GROUP, GroupFree> group_;
    std::unique_ptr<BN_CTX, CtxFree> ctx_;
};

inline Address crypto_derive(const PrivateKey& key) {
    AddressDeriver deriver;
    return deriver.derive(key);
}

/// Pure function of cfg. Duplicates are not filtered.
inline std::vector<Address> generate(const GeneratorConfig& cfg) {
    std::vector<Address> out;
    out.reserve(cfg.count);
    ByteStream bytes(cfg.seed);
    if (cfg.mode == GeneratorMode::uniform) {
        for (std::size_t i = 0; i < cfg.count; ++i) {
            Address a;
            bytes.fill(a.bytes);
            out.push_back(a);
        }
        return out;
    }

    AddressDeriver deriver;
    PrivateKey key;
    for (std::size_t i = 0; i < cfg.count; ++i) {
        do {
            bytes.fill(key);
        } while (!deriver.valid(key));
        out.push_back(deriver.derive(key));
    }
    return out;
}

/// Birthday bound 1 - exp(-n^2 / 2^161) for n uniformly drawn 160-bit values.
inline double collision_probability(double n) {
    if (!(n >= 0.0))
        throw std::domain_error("collision_probability: n must be non-negative");
    const double exponent = std::ldexp(n * n, -161);
    return -std::expm1(-exponent);
}

} // namespace pathlab
