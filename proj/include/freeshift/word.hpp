#pragma once

// Alphabet of a free group F_d, reduced (backtracking-free) words and the
// Markov shift of such words.
//
// Letters are integers 0..2d-1. Letter 2k is the generator g_{k+1}, letter
// 2k+1 its inverse, so inversion is XOR with 1.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "freeshift/error.hpp"

namespace freeshift {

using Letter = std::int32_t;

constexpr Letter inverse_letter(Letter x) noexcept { return x ^ 1; }

class Alphabet {
 public:
  explicit Alphabet(int rank) : rank_(rank) {
    if (rank < 2) throw ValidationError("free group rank d must be >= 2, got " + std::to_string(rank));
    if (rank > 64) throw ValidationError("free group rank d must be <= 64, got " + std::to_string(rank));
  }

  int rank() const noexcept { return rank_; }
  int size() const noexcept { return 2 * rank_; }
  /// Number of admissible successors of any letter.
  int branching() const noexcept { return 2 * rank_ - 1; }

  bool contains(Letter x) const noexcept { return x >= 0 && x < size(); }

  Letter generator(int k) const {
    if (k < 0 || k >= rank_) throw ValidationError("generator index out of range");
    return 2 * k;
  }

  void check(Letter x) const {
    if (!contains(x))
      throw ValidationError("letter " + std::to_string(x) + " out of range for d=" + std::to_string(rank_));
  }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  int rank_;
};

inline bool is_reduced(const Alphabet& alphabet, std::span<const Letter> letters) {
  for (Letter x : letters) alphabet.check(x);
  for (std::size_t i = 1; i < letters.size(); ++i)
    if (letters[i] == inverse_letter(letters[i - 1])) return false;
  return true;
}

/// Element of F_d written as a reduced word. The empty word is the identity.
class ReducedWord {
 public:
  ReducedWord() = default;

  ReducedWord(const Alphabet& alphabet, std::vector<Letter> letters) : letters_(std::move(letters)) {
    if (!is_reduced(alphabet, letters_)) throw ValidationError("word is not reduced");
  }

  /// Caller guarantees the letters form a reduced word.
  static ReducedWord trusted(std::vector<Letter> letters) {
    ReducedWord w;
    w.letters_ = std::move(letters);
    return w;
  }

  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }
  std::span<const Letter> letters() const noexcept { return letters_; }
  auto begin() const noexcept { return letters_.begin(); }
  auto end() const noexcept { return letters_.end(); }

  ReducedWord prefix(std::size_t n) const {
    return trusted(std::vector<Letter>(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(n)));
  }

  friend bool operator==(const ReducedWord&, const ReducedWord&) = default;
  friend auto operator<=>(const ReducedWord&, const ReducedWord&) = default;

 private:
  std::vector<Letter> letters_;
};

inline ReducedWord concat_reduce(const ReducedWord& lhs, const ReducedWord& rhs) {
  std::vector<Letter> out(lhs.begin(), lhs.end());
  std::size_t j = 0;
  while (!out.empty() && j < rhs.size() && rhs[j] == inverse_letter(out.back())) {
    out.pop_back();
    ++j;
  }
  out.insert(out.end(), rhs.begin() + static_cast<std::ptrdiff_t>(j), rhs.end());
  return ReducedWord::trusted(std::move(out));
}

inline ReducedWord inverse_word(const ReducedWord& w) {
  std::vector<Letter> out(w.size());
  std::transform(w.begin(), w.end(), out.rbegin(), inverse_letter);
  return ReducedWord::trusted(std::move(out));
}

/// Letters written as 'a','b',... for generators and 'A','B',... for their
/// inverses; "1" or "" is the identity.
inline ReducedWord parse_word(const Alphabet& alphabet, std::string_view text) {
  std::vector<Letter> letters;
  for (char c : text) {
    if (c == ' ' || c == ',' || c == '1') continue;
    if (c >= 'a' && c <= 'z') {
      letters.push_back(alphabet.generator(c - 'a'));
    } else if (c >= 'A' && c <= 'Z') {
      letters.push_back(inverse_letter(alphabet.generator(c - 'A')));
    } else {
      throw ValidationError(std::string("unexpected character '") + c + "' in word");
    }
  }
  return ReducedWord(alphabet, std::move(letters));
}

inline std::string to_string(const ReducedWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (Letter x : w) {
    const char base = (x & 1) ? 'A' : 'a';
    s.push_back(static_cast<char>(base + x / 2));
  }
  return s;
}

/// |Σⁿ|: 1 for n = 0, otherwise 2d(2d-1)^{n-1}. Exact for any n.
inline boost::multiprecision::cpp_int count_words(const Alphabet& alphabet, int n) {
  if (n < 0) throw ValidationError("word length must be non-negative");
  if (n == 0) return 1;
  boost::multiprecision::cpp_int count = alphabet.size();
  for (int i = 1; i < n; ++i) count *= alphabet.branching();
  return count;
}

/// Same count as a machine integer; throws when it does not fit.
inline std::size_t count_words_checked(const Alphabet& alphabet, int n) {
  const auto exact = count_words(alphabet, n);
  if (exact > std::numeric_limits<std::int64_t>::max())
    throw ValidationError("|Σ^" + std::to_string(n) + "| exceeds 2^63");
  return exact.convert_to<std::size_t>();
}

/// Dense indexing of Σᵏ compatible with lexicographic order: the first letter
/// is a digit in base 2d, each later letter a digit in base 2d-1 (its rank
/// among the letters that are not the inverse of its predecessor).
class WordIndexer {
 public:
  WordIndexer(const Alphabet& alphabet, int length)
      : alphabet_(alphabet), length_(length), count_(count_words_checked(alphabet, length)) {}

  int length() const noexcept { return length_; }
  std::size_t count() const noexcept { return count_; }

  std::size_t encode(std::span<const Letter> w) const {
    if (static_cast<int>(w.size()) != length_) throw ValidationError("word length does not match indexer");
    if (length_ == 0) return 0;
    std::size_t index = static_cast<std::size_t>(w[0]);
    for (std::size_t i = 1; i < w.size(); ++i) {
      const Letter forbidden = inverse_letter(w[i - 1]);
      const Letter digit = w[i] > forbidden ? w[i] - 1 : w[i];
      index = index * static_cast<std::size_t>(alphabet_.branching()) + static_cast<std::size_t>(digit);
    }
    return index;
  }

  std::vector<Letter> decode(std::size_t index) const {
    std::vector<Letter> digits(static_cast<std::size_t>(length_));
    for (int i = length_ - 1; i >= 1; --i) {
      digits[static_cast<std::size_t>(i)] = static_cast<Letter>(index % static_cast<std::size_t>(alphabet_.branching()));
      index /= static_cast<std::size_t>(alphabet_.branching());
    }
    if (length_ > 0) digits[0] = static_cast<Letter>(index);
    for (int i = 1; i < length_; ++i) {
      const Letter forbidden = inverse_letter(digits[static_cast<std::size_t>(i - 1)]);
      Letter& x = digits[static_cast<std::size_t>(i)];
      if (x >= forbidden) ++x;
    }
    return digits;
  }

 private:
  Alphabet alphabet_;
  int length_;
  std::size_t count_;
};

/// Streaming lexicographic enumeration of Σⁿ; never materializes the set.
class WordRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = ReducedWord;
    using difference_type = std::ptrdiff_t;
    using pointer = const ReducedWord*;
    using reference = const ReducedWord&;

    iterator() = default;
    iterator(const Alphabet* alphabet, int n) : alphabet_(alphabet), done_(false) {
      current_ = ReducedWord::trusted(std::vector<Letter>(static_cast<std::size_t>(n), 0));
    }

    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }

    iterator& operator++() {
      advance();
      return *this;
    }
    void operator++(int) { advance(); }

    friend bool operator==(const iterator& it, std::default_sentinel_t) { return it.done_; }

   private:
    void advance() {
      std::vector<Letter> w(current_.begin(), current_.end());
      const Letter top = static_cast<Letter>(alphabet_->size());
      // Odometer over admissible words: bump the rightmost position that
      // still has a larger admissible letter, then refill to the right with
      // the smallest admissible letters.
      int pos = static_cast<int>(w.size()) - 1;
      while (pos >= 0) {
        Letter next = w[static_cast<std::size_t>(pos)] + 1;
        if (pos > 0 && next == inverse_letter(w[static_cast<std::size_t>(pos - 1)])) ++next;
        if (next < top) {
          w[static_cast<std::size_t>(pos)] = next;
          break;
        }
        --pos;
      }
      if (pos < 0) {
        done_ = true;
        return;
      }
      for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < w.size(); ++i)
        w[i] = (w[i - 1] == 1) ? 1 : 0;
      current_ = ReducedWord::trusted(std::move(w));
    }

    const Alphabet* alphabet_ = nullptr;
    ReducedWord current_;
    bool done_ = true;
  };

  WordRange(const Alphabet& alphabet, int n) : alphabet_(alphabet), n_(n) {
    if (n < 0) throw ValidationError("word length must be non-negative");
  }

  iterator begin() const { return iterator(&alphabet_, n_); }
  std::default_sentinel_t end() const noexcept { return {}; }

 private:
  Alphabet alphabet_;
  int n_;
};

inline WordRange enumerate_words(const Alphabet& alphabet, int n) { return WordRange(alphabet, n); }

}  // namespace freeshift
