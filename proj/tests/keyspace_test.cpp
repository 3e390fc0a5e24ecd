#include <pathlab/keyspace.hpp>

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

namespace {

using namespace pathlab;

TEST(ParseAddress, ChecksumCasedInput) {
    const Address a = parse_address("0x742d35Cc6634C0532925a3b844Bc454e4438f44e");
    EXPECT_EQ(a.bytes[0], 0x74);
    EXPECT_EQ(a.bytes[1], 0x2d);
    EXPECT_EQ(a.bytes[19], 0x4e);
    EXPECT_EQ(to_hex(a), "0x742d35cc6634c0532925a3b844bc454e4438f44e");
}

TEST(ParseAddress, ZeroAddressWithAndWithoutPrefix) {
    const std::string zeros(40, '0');
    EXPECT_EQ(parse_address("0x" + zeros), Address{});
    EXPECT_EQ(parse_address(zeros), Address{});
    EXPECT_EQ(parse_address("0X" + zeros), Address{});
}

TEST(ParseAddress, WrongLength) {
    try {
        parse_address("0x1234");
        FAIL() << "expected parse_error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.position(), parse_error::npos);
        EXPECT_NE(std::string(e.what()).find("40 hex digits"), std::string::npos);
    }
    EXPECT_THROW(parse_address(""), parse_error);
    EXPECT_THROW(parse_address(std::string(41, 'a')), parse_error);
}

TEST(ParseAddress, ReportsOffendingPosition) {
    std::string text = "0x" + std::string(40, 'a');
    text[2 + 17] = 'g';
    try {
        parse_address(text);
        FAIL() << "expected parse_error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.position(), 19u);
    }

    std::string bare(40, 'f');
    bare[0] = ' ';
    try {
        parse_address(bare);
        FAIL() << "expected parse_error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.position(), 0u);
    }
}

TEST(ParseAddress, RenderParseRoundTrip) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Address a = testkit::random_address(rng);
        const std::string hex = to_hex(a);
        ASSERT_EQ(hex.size(), 42u);
        EXPECT_EQ(parse_address(hex), a);
        EXPECT_EQ(to_hex(parse_address(hex)), hex);
    }
}

TEST(ToNibbles, HighNibbleFirst) {
    const auto p = to_nibbles(parse_address("0x742d35cc6634c0532925a3b844bc454e4438f44e"));
    ASSERT_EQ(p.size(), 40u);
    EXPECT_EQ(p[0], 7);
    EXPECT_EQ(p[1], 4);
    EXPECT_EQ(p[2], 2);
    EXPECT_EQ(p[3], 13);
    EXPECT_EQ(p[39], 0xe);
}

TEST(ToNibbles, ZeroAddress) {
    const auto p = to_nibbles(Address{});
    ASSERT_EQ(p.size(), 40u);
    for (auto n : p)
        EXPECT_EQ(n, 0);
}

TEST(ToNibbles, InverseOfFromNibbles) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Address a = testkit::random_address(rng);
        EXPECT_EQ(from_nibbles(to_nibbles(a)), a);
    }
    EXPECT_THROW(from_nibbles(NibblePath{}), std::invalid_argument);
}

TEST(NibblePath, RejectsOutOfRangeAndOverflow) {
    NibblePath p;
    EXPECT_THROW(p.push_back(16), std::out_of_range);
    for (int i = 0; i < 40; ++i)
        p.push_back(1);
    EXPECT_THROW(p.push_back(1), std::length_error);
}

TEST(NibblePath, SliceClamps) {
    const auto p = to_nibbles(testkit::address_with_prefix({1, 2, 3}));
    EXPECT_EQ(p.slice(0, 3).size(), 3u);
    EXPECT_EQ(p.slice(38).size(), 2u);
    EXPECT_TRUE(p.slice(40).empty());
    EXPECT_TRUE(p.slice(45, 2).empty());
    EXPECT_EQ(p.drop_front(1)[0], 2);
}

TEST(LongestCommonPrefix, HandCases) {
    const auto a = to_nibbles(testkit::address_with_prefix({0xa, 0xa}));
    const auto b = to_nibbles(testkit::address_with_prefix({0xa, 0xb}));
    const auto c = to_nibbles(testkit::address_with_prefix({0xc, 0xc}));
    EXPECT_EQ(longest_common_prefix(a, a), 40u);
    EXPECT_EQ(longest_common_prefix(a, c), 0u);
    EXPECT_EQ(longest_common_prefix(a, b), 1u);
    EXPECT_EQ(longest_common_prefix(NibblePath{}, a), 0u);
}

TEST(LongestCommonPrefix, SymmetricAndMatchesBruteForce) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto keys = testkit::clustered_keys(rng, 2);
        const auto pa = to_nibbles(keys[0]);
        const auto pb = to_nibbles(keys[1]);
        EXPECT_EQ(longest_common_prefix(pa, pb), longest_common_prefix(pb, pa));
        EXPECT_EQ(longest_common_prefix(pa, pb), testkit::brute_lcp(keys[0], keys[1]));
        EXPECT_EQ(longest_common_prefix(pa, pa), pa.size());
    }
}

} // namespace
