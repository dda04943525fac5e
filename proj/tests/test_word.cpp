#include <gtest/gtest.h>

#include <set>

#include "freeshift/word.hpp"
#include "oracles.hpp"

using namespace freeshift;

TEST(Alphabet, RankBounds) {
  EXPECT_THROW(Alphabet(1), ValidationError);
  EXPECT_THROW(Alphabet(65), ValidationError);
  const Alphabet a(3);
  EXPECT_EQ(a.size(), 6);
  EXPECT_EQ(a.branching(), 5);
  EXPECT_EQ(inverse_letter(4), 5);
  EXPECT_EQ(inverse_letter(5), 4);
}

TEST(ReducedWord, RejectsBacktracking) {
  const Alphabet a(2);
  EXPECT_THROW(ReducedWord(a, {0, 1}), ValidationError);
  EXPECT_THROW(ReducedWord(a, {0, 7}), ValidationError);
  EXPECT_NO_THROW(ReducedWord(a, {0, 0, 2, 1}));
}

TEST(ReducedWord, ParseAndPrint) {
  const Alphabet a(2);
  const auto w = parse_word(a, "abAB");
  EXPECT_EQ(std::vector<Letter>(w.begin(), w.end()), (std::vector<Letter>{0, 2, 1, 3}));
  EXPECT_EQ(to_string(w), "abAB");
  EXPECT_EQ(to_string(parse_word(a, "1")), "1");
  EXPECT_THROW(parse_word(a, "aA"), ValidationError);
  EXPECT_THROW(parse_word(a, "c"), ValidationError);
}

TEST(ReducedWord, ConcatReducesAndInverts) {
  const Alphabet a(2);
  const auto w = parse_word(a, "abA");
  EXPECT_EQ(to_string(concat_reduce(w, inverse_word(w))), "1");
  EXPECT_EQ(to_string(concat_reduce(parse_word(a, "ab"), parse_word(a, "Ba"))), "aa");
  EXPECT_EQ(to_string(inverse_word(w)), "aBA");
}

TEST(Counting, MatchesClosedForm) {
  for (int d = 2; d <= 5; ++d) {
    const Alphabet a(d);
    EXPECT_EQ(count_words(a, 0), 1);
    for (int n = 1; n <= 6; ++n) {
      boost::multiprecision::cpp_int expect = 2 * d;
      for (int i = 1; i < n; ++i) expect *= 2 * d - 1;
      EXPECT_EQ(count_words(a, n), expect);
    }
  }
  // Exact beyond 64 bits.
  EXPECT_EQ(count_words(Alphabet(2), 60).str(), boost::multiprecision::cpp_int(4 * boost::multiprecision::pow(boost::multiprecision::cpp_int(3), 59)).str());
  EXPECT_THROW(count_words_checked(Alphabet(2), 60), ValidationError);
}

class Enumeration : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(Enumeration, MatchesRecursiveOracleInOrder) {
  const auto [d, n] = GetParam();
  const Alphabet a(d);
  const auto expect = oracle::words(d, n);
  std::vector<oracle::Word> got;
  for (const auto& w : enumerate_words(a, n)) got.emplace_back(w.begin(), w.end());
  EXPECT_EQ(got, expect);
  EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
}

INSTANTIATE_TEST_SUITE_P(Small, Enumeration,
                         ::testing::Values(std::pair{2, 1}, std::pair{2, 4}, std::pair{2, 7}, std::pair{3, 3}, std::pair{4, 2}));

TEST(Enumeration, LengthZeroYieldsIdentity) {
  int count = 0;
  for (const auto& w : enumerate_words(Alphabet(2), 0)) {
    EXPECT_TRUE(w.empty());
    ++count;
  }
  EXPECT_EQ(count, 1);
}

TEST(WordIndexer, RoundTripAndOrder) {
  for (int d : {2, 3}) {
    const Alphabet a(d);
    for (int k = 1; k <= 4; ++k) {
      const WordIndexer idx(a, k);
      std::size_t expect = 0;
      for (const auto& w : enumerate_words(a, k)) {
        EXPECT_EQ(idx.encode(w.letters()), expect);
        EXPECT_EQ(idx.decode(expect), std::vector<Letter>(w.begin(), w.end()));
        ++expect;
      }
      EXPECT_EQ(expect, idx.count());
    }
  }
}
