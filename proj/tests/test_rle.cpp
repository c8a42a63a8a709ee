#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bdmm/rle.hpp"
#include "support.hpp"

using namespace bdmm;
using namespace bdmm_tests;

namespace {
const SymbolAlphabet kBinary{"01"};
}

TEST_CASE("encode produces the 13-run shorthand of the worked example") {
  const auto runs = encode(sample_error_sequence(), kBinary);
  REQUIRE(runs.runs.size() == 13);
  const std::vector<std::pair<char, long long>> expected = {
      {'0', 3}, {'1', 2}, {'0', 6}, {'1', 5}, {'0', 1}, {'1', 2}, {'0', 2},
      {'1', 1}, {'0', 5}, {'1', 2}, {'0', 2}, {'1', 1}, {'0', 3}};
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(runs.runs[i].symbol == expected[i].first);
    CHECK(runs.runs[i].count == expected[i].second);
  }
  CHECK(runs.total_length() == 35);
}

TEST_CASE("encode edge cases") {
  CHECK(encode("0", kBinary).runs.size() == 1);
  const auto ones = encode("111", kBinary);
  CHECK(ones.runs.size() == 1);
  CHECK(ones.runs[0].count == 3);
  CHECK_THROWS_AS(encode("0012", kBinary), UnknownSymbol);
  try {
    encode("0012", kBinary);
  } catch (const UnknownSymbol& ex) {
    CHECK(ex.position == 3);
  }
}

TEST_CASE("decode expands runs") {
  RunLengthSequence r;
  r.runs = {{'0', 3}, {'1', 2}};
  CHECK(decode(r) == "00011");
  RunLengthSequence one;
  one.runs = {{'1', 1}};
  CHECK(decode(one) == "1");
  CHECK(decode(encode(sample_error_sequence(), kBinary)) ==
        sample_error_sequence());
}

TEST_CASE("round-trip identity on random sequences") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> len(1, 100000);
  for (int i = 0; i < 30; ++i) {
    const std::string s = random_sequence(rng, len(rng));
    CHECK(decode(encode(s, kBinary)) == s);
  }
}

TEST_CASE("error probability") {
  CHECK(error_probability(encode(sample_error_sequence(), kBinary)) ==
        doctest::Approx(13.0 / 35.0).epsilon(1e-15));
  CHECK(error_probability(encode("0000", kBinary)) == 0.0);
  CHECK(error_probability(encode("0101", kBinary)) == 0.5);
  RunLengthSequence bad;
  bad.runs = {{'a', 3}};
  CHECK_THROWS_AS(error_probability(bad), NonBinaryAlphabet);
}

TEST_CASE("error probability is invariant under decode/encode") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 10; ++i) {
    const auto runs = encode(random_sequence(rng, 5000), kBinary);
    CHECK(error_probability(runs) ==
          error_probability(encode(decode(runs), kBinary)));
  }
}

TEST_CASE("efrd on '1010': both errors are followed by exactly one zero") {
  const auto table = efrd(encode("1010", kBinary));
  CHECK(table.sample_count == 2);
  CHECK(table.at(0) == 1.0);
  CHECK(table.at(1) == 1.0);
  CHECK(table.at(2) == 0.0);
}

TEST_CASE("efrd on '1100': gaps 0 and 2") {
  const auto table = efrd(encode("1100", kBinary));
  CHECK(table.sample_count == 2);
  CHECK(table.at(0) == 1.0);
  CHECK(table.at(1) == 0.5);
  CHECK(table.at(2) == 0.5);
  CHECK(table.at(3) == 0.0);
}

TEST_CASE("efrd of the worked example matches the counting oracle") {
  const std::string seq = sample_error_sequence();
  const auto table = efrd(encode(seq, kBinary));
  const auto oracle = efrd_by_counting(seq);
  REQUIRE(table.m_max() == oracle.m_max());
  CHECK(table.sample_count == oracle.sample_count);
  for (int m = 0; m <= table.m_max(); ++m)
    CHECK(table.at(m) == doctest::Approx(oracle.at(m)).epsilon(1e-15));
  // spot value: 1s immediately followed by a 0 over all interior 1s
  int followed_by_zero = 0;
  for (size_t t = 0; t + 1 < seq.size(); ++t)
    if (seq[t] == '1' && seq[t + 1] == '0') ++followed_by_zero;
  CHECK(table.sample_count == 13);
  CHECK(table.at(1) == doctest::Approx(static_cast<double>(followed_by_zero) /
                                       static_cast<double>(table.sample_count)));
}

TEST_CASE("efrd equals the counting oracle on random sequences, exactly") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 25; ++i) {
    const std::string s = random_sequence(rng, 2000, 0.2);
    const auto runs = encode(s, kBinary);
    bool has_interior_one = false;
    for (size_t t = 0; t + 1 < s.size(); ++t)
      if (s[t] == '1') has_interior_one = true;
    if (!has_interior_one) {
      CHECK_THROWS_AS(efrd(runs), NoConditioningEvents);
      continue;
    }
    const auto table = efrd(runs);
    const auto oracle = efrd_by_counting(s);
    REQUIRE(table.m_max() == oracle.m_max());
    for (int m = 0; m <= table.m_max(); ++m)
      CHECK(table.at(m) == oracle.at(m));
    for (int m = 0; m < table.m_max(); ++m)
      CHECK(table.at(m + 1) <= table.at(m));
    CHECK(table.at(0) == 1.0);
  }
}

TEST_CASE("efrd requires a conditioning event") {
  CHECK_THROWS_AS(efrd(encode("0000", kBinary)), NoConditioningEvents);
  CHECK_THROWS_AS(efrd(encode("0001", kBinary)), NoConditioningEvents);
}

TEST_CASE("rle text form parses and formats") {
  const auto runs = encode(sample_error_sequence(), kBinary);
  const std::string text = format_rle_text(runs);
  CHECK(text.substr(0, 11) == "0^3 1^2 0^6");
  const auto back = parse_rle_text(text, kBinary);
  CHECK(decode(back) == sample_error_sequence());
  CHECK_THROWS_AS(parse_rle_text("0^x", kBinary), IoError);
  CHECK_THROWS_AS(parse_rle_text("2^3", kBinary), UnknownSymbol);
}

TEST_CASE("efrd_max_deviation pads past each table's support") {
  const auto a = efrd(encode("1100", kBinary));   // 1, .5, .5
  const auto b = efrd(encode("1010", kBinary));   // 1, 1
  CHECK(efrd_max_deviation(a, b, 30) == doctest::Approx(0.5));
}
