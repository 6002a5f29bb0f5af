#include "nsbench/date.hpp"
#include "nsbench/error.hpp"
#include "nsbench/hash.hpp"
#include "nsbench/parallel.hpp"
#include "nsbench/rng.hpp"
#include "nsbench/text.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace nsbench;

TEST(Date, ParsesAndFormatsIso) {
    const auto d = Date::parse("2015-01-01");
    EXPECT_EQ(d.year(), 2015);
    EXPECT_EQ(d.month(), 1u);
    EXPECT_EQ(d.day(), 1u);
    EXPECT_EQ(d.to_string(), "2015-01-01");
    EXPECT_EQ(Date::parse("2024-02-29").to_string(), "2024-02-29");
}

TEST(Date, RejectsMalformedText) {
    for (const char* bad : {"2015-1-01", "2015/01/01", "2015-02-30", "2023-02-29", "20150101", "", "2015-01-01x",
                            "abcd-ef-gh", "2015-13-01"})
        EXPECT_THROW(Date::parse(bad), ParseError) << bad;
}

TEST(Date, MinusYearsClampsLeapDay) {
    EXPECT_EQ(Date(2025, 1, 1).minus_years(10), Date(2015, 1, 1));
    EXPECT_EQ(Date(2024, 2, 29).minus_years(10), Date(2014, 2, 28));
    EXPECT_EQ(Date(2024, 2, 29).minus_years(4), Date(2020, 2, 29));
}

TEST(Date, OrderingAndDayArithmetic) {
    EXPECT_LT(Date(2014, 12, 31), Date(2015, 1, 1));
    EXPECT_EQ(Date(2014, 12, 31).plus_days(1), Date(2015, 1, 1));
    EXPECT_EQ(Date(2020, 3, 1).plus_days(-1), Date(2020, 2, 29));
}

TEST(Hash, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Text, Utf8RoundTrip) {
    const std::string s = "a\xC3\xA9\xE4\xB8\xAD\xF0\x9F\x98\x80";
    const auto cps = text::decode_utf8(s);
    ASSERT_EQ(cps.size(), 4u);
    EXPECT_EQ(cps[2], U'中');
    EXPECT_EQ(text::encode_utf8(cps), s);
    EXPECT_EQ(text::code_point_length(s), 4u);
}

TEST(Text, InvalidUtf8DecodesToReplacement) {
    const auto cps = text::decode_utf8("a\xFF" "b");
    ASSERT_EQ(cps.size(), 3u);
    EXPECT_EQ(cps[1], U'�');
}

// Expected bytes come from Python's unicodedata.normalize("NFC", ...).
TEST(Text, NfcMatchesIndependentNormalizer) {
    const std::string input = "Model \xEF\xBC\x91\xEF\xBC\x92" "3 cafe\xCC\x81 A\xCC\x8A \xEF\xBE\x8A\xEF\xBE\x9F";
    const std::string expected = "Model \xEF\xBC\x91\xEF\xBC\x92" "3 caf\xC3\xA9 \xC3\x85 \xEF\xBE\x8A\xEF\xBE\x9F";
    EXPECT_EQ(text::normalize_nfc(input), expected);
}

TEST(Text, Classification) {
    EXPECT_TRUE(text::is_cjk(U'中'));
    EXPECT_TRUE(text::is_cjk(U'カ'));
    EXPECT_FALSE(text::is_cjk(U'a'));
    EXPECT_TRUE(text::is_alnum(U'é'));
    EXPECT_FALSE(text::is_alnum(U'-'));
    EXPECT_TRUE(text::is_whitespace(U'　'));
    EXPECT_TRUE(text::is_control(U'\u0007'));
    EXPECT_FALSE(text::is_control(U'\n'));
    EXPECT_EQ(text::to_lower(U'É'), U'é');
    EXPECT_EQ(text::trim("  x y \n"), "x y");
    EXPECT_EQ(text::ascii_upper("cn1a"), "CN1A");
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
    auto a = make_stream(7, 1);
    auto b = make_stream(7, 1);
    auto c = make_stream(7, 2);
    std::set<std::uint64_t> differing;
    for (int i = 0; i < 16; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        if (x != c())
            differing.insert(x);
    }
    EXPECT_FALSE(differing.empty());
}

TEST(Rng, UniformIndexStaysInRange) {
    auto e = make_stream(1, 0);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = uniform_index(e, 7);
        ASSERT_LT(v, 7u);
        ++seen[v];
    }
    for (int n : seen)
        EXPECT_GT(n, 800);
}

TEST(Parallel, EverySlotVisitedOnce) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 8, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits)
        EXPECT_EQ(h, 1);
}

TEST(Parallel, RethrowsWorkerException) {
    EXPECT_THROW(parallel_for(100, 4,
                              [](std::size_t i) {
                                  if (i == 57)
                                      throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
}
