#pragma once

// Explicit models of quotients G = F_d/N together with the homomorphism
// Ψ_N : F_d -> G. Three models are supported:
//
//   finite group   multiplication table + images of the generators
//   free abelian   Z^k with integer image vectors
//   free kill      F_d modulo the normal closure of a subset of generators,
//                  i.e. the free group on the surviving generators
//
// Elements are carried as a small integer vector whose meaning depends on
// the model (table index, lattice coordinates, or reduced word over the
// surviving generators).

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

#include "freeshift/error.hpp"
#include "freeshift/word.hpp"

namespace freeshift {

struct GroupElement {
  std::vector<std::int64_t> repr;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : g.repr) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Multiplication table of a finite group: entry [i*order + j] is i·j.
struct GroupTable {
  int order = 0;
  int identity = 0;
  std::vector<std::int32_t> product;

  int mul(int i, int j) const { return product[static_cast<std::size_t>(i) * static_cast<std::size_t>(order) + static_cast<std::size_t>(j)]; }
};

enum class QuotientKind { finite_group, free_abelian, free_kill };

class Quotient {
 public:
  /// `generator_images` has d entries (images of g_1..g_d) or 2d entries
  /// (one per letter, inverses included and checked).
  static Quotient finite_group(const Alphabet& alphabet, GroupTable table, std::vector<int> generator_images) {
    validate_table(table);
    const auto n = static_cast<std::size_t>(alphabet.rank());
    std::vector<int> inverse(static_cast<std::size_t>(table.order), -1);
    for (int i = 0; i < table.order; ++i)
      for (int j = 0; j < table.order; ++j)
        if (table.mul(i, j) == table.identity) inverse[static_cast<std::size_t>(i)] = j;

    std::vector<int> letters(2 * n);
    if (generator_images.size() == n) {
      for (std::size_t k = 0; k < n; ++k) {
        letters[2 * k] = generator_images[k];
        check_index(table, letters[2 * k]);
        letters[2 * k + 1] = inverse[static_cast<std::size_t>(letters[2 * k])];
      }
    } else if (generator_images.size() == 2 * n) {
      letters = std::move(generator_images);
      for (std::size_t k = 0; k < n; ++k) {
        check_index(table, letters[2 * k]);
        check_index(table, letters[2 * k + 1]);
        if (inverse[static_cast<std::size_t>(letters[2 * k])] != letters[2 * k + 1])
          throw ValidationError("image of letter " + std::to_string(2 * k + 1) +
                                " is not the inverse of the image of letter " + std::to_string(2 * k));
      }
    } else {
      throw ValidationError("finite-group quotient needs d or 2d generator images");
    }
    if (table.order <= 10000) check_associative_on(table, letters);

    // Surjectivity: the images must generate the whole table.
    std::vector<bool> seen(static_cast<std::size_t>(table.order), false);
    std::deque<int> queue{table.identity};
    seen[static_cast<std::size_t>(table.identity)] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const int g = queue.front();
      queue.pop_front();
      for (int s : letters) {
        const int h = table.mul(g, s);
        if (!seen[static_cast<std::size_t>(h)]) {
          seen[static_cast<std::size_t>(h)] = true;
          ++reached;
          queue.push_back(h);
        }
      }
    }
    if (reached != static_cast<std::size_t>(table.order))
      throw ValidationError("generator images generate only " + std::to_string(reached) + " of " +
                            std::to_string(table.order) + " group elements");

    return Quotient(alphabet, FiniteModel{std::move(table), std::move(letters), std::move(inverse)});
  }

  /// `images` holds d vectors (one per generator) or 2d vectors (one per
  /// letter, with negation checked), each of length `lattice_rank`.
  static Quotient free_abelian(const Alphabet& alphabet, int lattice_rank,
                               std::vector<std::vector<std::int64_t>> images) {
    if (lattice_rank < 1) throw ValidationError("free abelian rank must be >= 1");
    const auto n = static_cast<std::size_t>(alphabet.rank());
    for (const auto& v : images)
      if (static_cast<int>(v.size()) != lattice_rank)
        throw ValidationError("free abelian image vector has wrong length");
    std::vector<std::vector<std::int64_t>> letters(2 * n);
    if (images.size() == n) {
      for (std::size_t k = 0; k < n; ++k) {
        letters[2 * k] = images[k];
        letters[2 * k + 1] = images[k];
        for (auto& x : letters[2 * k + 1]) x = -x;
      }
    } else if (images.size() == 2 * n) {
      for (std::size_t k = 0; k < n; ++k)
        for (int i = 0; i < lattice_rank; ++i)
          if (images[2 * k][static_cast<std::size_t>(i)] != -images[2 * k + 1][static_cast<std::size_t>(i)])
            throw ValidationError("image of an inverse letter must be the negated vector");
      letters = std::move(images);
    } else {
      throw ValidationError("free abelian quotient needs d or 2d image vectors");
    }
    return Quotient(alphabet, AbelianModel{lattice_rank, std::move(letters)});
  }

  /// Standard projection onto Z^k: g_i ↦ e_i for i ≤ k, g_i ↦ 0 otherwise.
  static Quotient standard_lattice(const Alphabet& alphabet, int lattice_rank) {
    std::vector<std::vector<std::int64_t>> images;
    for (int k = 0; k < alphabet.rank(); ++k) {
      std::vector<std::int64_t> v(static_cast<std::size_t>(lattice_rank), 0);
      if (k < lattice_rank) v[static_cast<std::size_t>(k)] = 1;
      images.push_back(std::move(v));
    }
    return free_abelian(alphabet, lattice_rank, std::move(images));
  }

  /// `killed` lists 0-based generator indices sent to the identity.
  static Quotient free_kill(const Alphabet& alphabet, const std::vector<int>& killed) {
    std::vector<bool> dead(static_cast<std::size_t>(alphabet.rank()), false);
    for (int k : killed) {
      if (k < 0 || k >= alphabet.rank()) throw ValidationError("killed generator index out of range");
      dead[static_cast<std::size_t>(k)] = true;
    }
    std::vector<Letter> image(static_cast<std::size_t>(alphabet.size()), -1);
    Letter next = 0;
    for (int k = 0; k < alphabet.rank(); ++k) {
      if (dead[static_cast<std::size_t>(k)]) continue;
      image[2 * static_cast<std::size_t>(k)] = next;
      image[2 * static_cast<std::size_t>(k) + 1] = next + 1;
      next += 2;
    }
    return Quotient(alphabet, KillModel{std::move(dead), std::move(image), next / 2});
  }

  /// Z/2 with every generator mapped to the non-trivial element.
  static Quotient cyclic2(const Alphabet& alphabet) {
    GroupTable t{2, 0, {0, 1, 1, 0}};
    return finite_group(alphabet, std::move(t), std::vector<int>(static_cast<std::size_t>(alphabet.rank()), 1));
  }

  /// S_3 on F_2 with a ↦ (12), b ↦ (123).
  static Quotient symmetric3(const Alphabet& alphabet) {
    // Elements as permutations of {0,1,2}, composed as (p·q)(x) = q(p(x))
    // so that words act left to right.
    const std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}};
    auto find = [&](const std::array<int, 3>& p) {
      for (std::size_t i = 0; i < perms.size(); ++i)
        if (perms[i] == p) return static_cast<int>(i);
      return -1;
    };
    GroupTable t{6, 0, std::vector<std::int32_t>(36)};
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        std::array<int, 3> c{};
        for (std::size_t x = 0; x < 3; ++x) c[x] = perms[j][static_cast<std::size_t>(perms[i][x])];
        t.product[i * 6 + j] = find(c);
      }
    std::vector<int> images(static_cast<std::size_t>(alphabet.rank()), 0);
    images[0] = 1;  // (12)
    if (alphabet.rank() > 1) images[1] = 2;  // (123)
    return finite_group(alphabet, std::move(t), std::move(images));
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }

  QuotientKind kind() const noexcept {
    if (std::holds_alternative<FiniteModel>(model_)) return QuotientKind::finite_group;
    if (std::holds_alternative<AbelianModel>(model_)) return QuotientKind::free_abelian;
    return QuotientKind::free_kill;
  }

  bool is_finite() const noexcept { return kind() == QuotientKind::finite_group; }

  /// Order of a finite-group model.
  int order() const {
    const auto* f = std::get_if<FiniteModel>(&model_);
    if (!f) throw ValidationError("order() needs a finite-group quotient");
    return f->table.order;
  }

  const GroupTable& table() const {
    const auto* f = std::get_if<FiniteModel>(&model_);
    if (!f) throw ValidationError("table() needs a finite-group quotient");
    return f->table;
  }

  /// Table index of the image of a letter (finite-group models only).
  int letter_index(Letter x) const {
    const auto* f = std::get_if<FiniteModel>(&model_);
    if (!f) throw ValidationError("letter_index() needs a finite-group quotient");
    return f->letters[static_cast<std::size_t>(x)];
  }

  GroupElement identity() const {
    return std::visit(
        [](const auto& m) -> GroupElement {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, FiniteModel>) return {{m.table.identity}};
          else if constexpr (std::is_same_v<M, AbelianModel>) return {std::vector<std::int64_t>(static_cast<std::size_t>(m.rank), 0)};
          else return {};
        },
        model_);
  }

  bool is_identity(const GroupElement& g) const { return g == identity(); }

  /// g · Ψ_N(x)
  GroupElement multiply_letter(const GroupElement& g, Letter x) const {
    return std::visit(
        [&](const auto& m) -> GroupElement {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, FiniteModel>) {
            return {{m.table.mul(static_cast<int>(g.repr[0]), m.letters[static_cast<std::size_t>(x)])}};
          } else if constexpr (std::is_same_v<M, AbelianModel>) {
            GroupElement h = g;
            const auto& v = m.letters[static_cast<std::size_t>(x)];
            for (std::size_t i = 0; i < v.size(); ++i) h.repr[i] += v[i];
            return h;
          } else {
            const Letter y = m.image[static_cast<std::size_t>(x)];
            GroupElement h = g;
            if (y < 0) return h;
            if (!h.repr.empty() && h.repr.back() == inverse_letter(y)) h.repr.pop_back();
            else h.repr.push_back(y);
            return h;
          }
        },
        model_);
  }

  GroupElement multiply(const GroupElement& g, const GroupElement& h) const {
    return std::visit(
        [&](const auto& m) -> GroupElement {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, FiniteModel>) {
            return {{m.table.mul(static_cast<int>(g.repr[0]), static_cast<int>(h.repr[0]))}};
          } else if constexpr (std::is_same_v<M, AbelianModel>) {
            GroupElement r = g;
            for (std::size_t i = 0; i < r.repr.size(); ++i) r.repr[i] += h.repr[i];
            return r;
          } else {
            GroupElement r = g;
            for (auto y : h.repr) {
              if (!r.repr.empty() && r.repr.back() == inverse_letter(static_cast<Letter>(y))) r.repr.pop_back();
              else r.repr.push_back(y);
            }
            return r;
          }
        },
        model_);
  }

  GroupElement inverse(const GroupElement& g) const {
    return std::visit(
        [&](const auto& m) -> GroupElement {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, FiniteModel>) {
            return {{m.inverse[static_cast<std::size_t>(g.repr[0])]}};
          } else if constexpr (std::is_same_v<M, AbelianModel>) {
            GroupElement r = g;
            for (auto& x : r.repr) x = -x;
            return r;
          } else {
            GroupElement r;
            for (auto it = g.repr.rbegin(); it != g.repr.rend(); ++it)
              r.repr.push_back(inverse_letter(static_cast<Letter>(*it)));
            return r;
          }
        },
        model_);
  }

  /// Crude upper bound on the number of elements within distance R, used to
  /// report the size of an over-budget ball.
  double ball_size_bound(int radius) const {
    const double branching = alphabet_.branching();
    double total = 1.0, layer = alphabet_.size();
    for (int r = 1; r <= radius; ++r) {
      total += layer;
      layer *= branching;
    }
    if (kind() == QuotientKind::finite_group) total = std::min(total, static_cast<double>(order()));
    return total;
  }

  std::string describe() const {
    return std::visit(
        [&](const auto& m) -> std::string {
          using M = std::decay_t<decltype(m)>;
          const std::string on = " on F_" + std::to_string(alphabet_.rank());
          if constexpr (std::is_same_v<M, FiniteModel>) {
            return "finite group of order " + std::to_string(m.table.order) + on;
          } else if constexpr (std::is_same_v<M, AbelianModel>) {
            return "free abelian Z^" + std::to_string(m.rank) + on;
          } else {
            std::string s = "free kill {";
            bool first = true;
            for (std::size_t k = 0; k < m.dead.size(); ++k)
              if (m.dead[k]) {
                s += (first ? "g" : ",g") + std::to_string(k + 1);
                first = false;
              }
            return s + "}" + on;
          }
        },
        model_);
  }

 private:
  struct FiniteModel {
    GroupTable table;
    std::vector<int> letters;
    std::vector<int> inverse;
  };
  struct AbelianModel {
    int rank;
    std::vector<std::vector<std::int64_t>> letters;
  };
  struct KillModel {
    std::vector<bool> dead;
    std::vector<Letter> image;
    int survivors;
  };

  Quotient(const Alphabet& alphabet, std::variant<FiniteModel, AbelianModel, KillModel> model)
      : alphabet_(alphabet), model_(std::move(model)) {}

  static void check_index(const GroupTable& t, int g) {
    if (g < 0 || g >= t.order) throw ValidationError("group element index " + std::to_string(g) + " out of range");
  }

  static void validate_table(const GroupTable& t) {
    if (t.order < 1) throw ValidationError("group order must be >= 1");
    if (t.product.size() != static_cast<std::size_t>(t.order) * static_cast<std::size_t>(t.order))
      throw ValidationError("multiplication table must have order^2 entries");
    check_index(t, t.identity);
    for (auto v : t.product) check_index(t, v);
    for (int i = 0; i < t.order; ++i)
      if (t.mul(t.identity, i) != i || t.mul(i, t.identity) != i)
        throw ValidationError("declared identity is not a two-sided identity");
    // Latin square: every row and column is a permutation, which gives
    // two-sided inverses once associativity holds.
    std::vector<int> seen_row(static_cast<std::size_t>(t.order)), seen_col(static_cast<std::size_t>(t.order));
    for (int i = 0; i < t.order; ++i) {
      for (int j = 0; j < t.order; ++j) {
        if (seen_row[static_cast<std::size_t>(t.mul(i, j))] == i + 1 || seen_col[static_cast<std::size_t>(t.mul(j, i))] == i + 1)
          throw ValidationError("multiplication table is not a Latin square");
        seen_row[static_cast<std::size_t>(t.mul(i, j))] = i + 1;
        seen_col[static_cast<std::size_t>(t.mul(j, i))] = i + 1;
      }
    }
  }

  // Light's test: (xy)s = x(ys) for all x, y and every s in a generating set
  // implies associativity, since the passing s are closed under products.
  static void check_associative_on(const GroupTable& t, const std::vector<int>& generators) {
    for (int s : generators)
      for (int x = 0; x < t.order; ++x)
        for (int y = 0; y < t.order; ++y)
          if (t.mul(t.mul(x, y), s) != t.mul(x, t.mul(y, s)))
            throw ValidationError("multiplication table is not associative");
  }

  Alphabet alphabet_;
  std::variant<FiniteModel, AbelianModel, KillModel> model_;
};

inline GroupElement eval_word(const Quotient& q, const ReducedWord& w) {
  GroupElement g = q.identity();
  for (Letter x : w) g = q.multiply_letter(g, x);
  return g;
}

inline bool is_in_N(const Quotient& q, const ReducedWord& w) { return q.is_identity(eval_word(q, w)); }

/// Memory cap shared by the truncated-group computations.
struct Budget {
  std::size_t max_bytes = std::size_t{1} << 30;
};

/// Elements of G within Cayley distance `radius` of the identity (distance
/// taken w.r.t. the images of the 2d letters), with a right-multiplication
/// table by letters. Index 0 is the identity.
class Ball {
 public:
  static constexpr std::int32_t outside = -1;

  Ball(const Quotient& q, int radius, Budget budget = {}) : radius_(radius), letters_(q.alphabet().size()) {
    if (radius < 0) throw ValidationError("ball radius must be non-negative");
    const std::size_t per_element = 96 + sizeof(std::int64_t) * q.identity().repr.size() +
                                    static_cast<std::size_t>(letters_) * sizeof(std::int32_t);
    const std::size_t cap = budget.max_bytes / per_element;

    auto over_budget = [&] {
      const double bound = q.ball_size_bound(radius);
      throw ResourceError("ball of radius " + std::to_string(radius) + " in " + q.describe() +
                              " exceeds memory budget; reduce n_max",
                          static_cast<std::size_t>(std::min(bound * static_cast<double>(per_element), 1e18)),
                          budget.max_bytes);
    };

    add(q.identity(), 0);
    for (std::size_t head = 0; head < elements_.size(); ++head) {
      if (distance_[head] == radius_) continue;
      for (Letter x = 0; x < letters_; ++x) {
        GroupElement h = q.multiply_letter(elements_[head], x);
        if (index_.find(h) == index_.end()) {
          if (elements_.size() >= cap) over_budget();
          add(std::move(h), distance_[head] + 1);
        }
      }
    }
    neighbour_.assign(elements_.size() * static_cast<std::size_t>(letters_), outside);
    for (std::size_t i = 0; i < elements_.size(); ++i)
      for (Letter x = 0; x < letters_; ++x) {
        const auto it = index_.find(q.multiply_letter(elements_[i], x));
        if (it != index_.end()) neighbour_[i * static_cast<std::size_t>(letters_) + static_cast<std::size_t>(x)] = it->second;
      }
  }

  std::size_t size() const noexcept { return elements_.size(); }
  int radius() const noexcept { return radius_; }
  const GroupElement& element(std::size_t i) const { return elements_[i]; }
  int distance(std::size_t i) const { return distance_[i]; }

  std::optional<std::int32_t> find(const GroupElement& g) const {
    const auto it = index_.find(g);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Index of element(i)·Ψ(x), or `outside`.
  std::int32_t step(std::size_t i, Letter x) const {
    return neighbour_[i * static_cast<std::size_t>(letters_) + static_cast<std::size_t>(x)];
  }

 private:
  void add(GroupElement g, int dist) {
    index_.emplace(g, static_cast<std::int32_t>(elements_.size()));
    elements_.push_back(std::move(g));
    distance_.push_back(dist);
  }

  int radius_;
  int letters_;
  std::vector<GroupElement> elements_;
  std::vector<int> distance_;
  std::unordered_map<GroupElement, std::int32_t, GroupElementHash> index_;
  std::vector<std::int32_t> neighbour_;
};

inline Ball ball(const Quotient& q, int radius, Budget budget = {}) { return Ball(q, radius, budget); }

struct PeriodResult {
  int period = 0;
  /// The gcd did not change over the last n_search/2 lengths.
  bool stabilized = false;
  int n_search = 0;
  /// Lengths n ≤ n_search admitting a cyclically admissible word in N.
  std::vector<int> lengths;
};

/// gcd of the lengths n ≤ n_search of words ω ∈ Σⁿ ∩ N whose last and first
/// letters form an admissible pair.
inline PeriodResult period(const Quotient& q, int n_search = 24, Budget budget = {}) {
  if (n_search < 1) throw ValidationError("period search bound must be >= 1");
  const int L = q.alphabet().size();
  PeriodResult result;
  result.n_search = n_search;
  std::vector<bool> found(static_cast<std::size_t>(n_search) + 1, false);

  // A word of length n in N stays within distance n/2 of the identity, so
  // the search runs in stages over growing balls and stops once the gcd is 1.
  for (int radius = 1; 2 * (radius - 1) < n_search; ++radius) {
    const Ball b(q, radius, budget);
    const std::size_t B = b.size();
    const int n_stage = std::min(2 * radius, n_search);
    // reach[(first * L + last) * B + g]
    const std::size_t stride = static_cast<std::size_t>(L) * B;
    std::vector<char> reach(static_cast<std::size_t>(L) * stride, 0), next(reach.size());
    for (Letter x = 0; x < L; ++x) {
      const auto g = b.step(0, x);
      if (g != Ball::outside) reach[static_cast<std::size_t>(x) * stride + static_cast<std::size_t>(x) * B + static_cast<std::size_t>(g)] = 1;
    }
    for (int n = 1; n <= n_stage; ++n) {
      if (n > 1) {
        std::fill(next.begin(), next.end(), 0);
        for (Letter first = 0; first < L; ++first)
          for (Letter last = 0; last < L; ++last) {
            const char* row = &reach[static_cast<std::size_t>(first) * stride + static_cast<std::size_t>(last) * B];
            for (std::size_t g = 0; g < B; ++g) {
              if (!row[g]) continue;
              for (Letter y = 0; y < L; ++y) {
                if (y == inverse_letter(last)) continue;
                const auto h = b.step(g, y);
                if (h != Ball::outside)
                  next[static_cast<std::size_t>(first) * stride + static_cast<std::size_t>(y) * B + static_cast<std::size_t>(h)] = 1;
              }
            }
          }
        reach.swap(next);
      }
      for (Letter first = 0; first < L; ++first)
        for (Letter last = 0; last < L; ++last)
          if (last != inverse_letter(first) && reach[static_cast<std::size_t>(first) * stride + static_cast<std::size_t>(last) * B])
            found[static_cast<std::size_t>(n)] = true;
    }
    int g = 0;
    for (int n = 1; n <= n_stage; ++n)
      if (found[static_cast<std::size_t>(n)]) g = std::gcd(g, n);
    if (g == 1) break;
  }

  int g = 0, last_change = 0;
  for (int n = 1; n <= n_search; ++n) {
    if (!found[static_cast<std::size_t>(n)]) continue;
    result.lengths.push_back(n);
    const int next_g = std::gcd(g, n);
    if (next_g != g) last_change = n;
    g = next_g;
  }
  if (g == 0) throw UndeterminedPeriodError(n_search);
  result.period = g;
  result.stabilized = (g == 1) || (last_change <= n_search - n_search / 2);
  return result;
}

/// Edges of the N-induced system: words of length ≤ max_len in N none of
/// whose proper non-empty prefixes lies in N. Sorted by (length, letters).
inline std::vector<ReducedWord> first_return_words(const Quotient& q, int max_len, Budget budget = {}) {
  if (max_len < 1) throw ValidationError("first-return length bound must be >= 1");
  const Alphabet& alpha = q.alphabet();
  // A first-return word of length ≤ L never leaves the radius-L/2 ball.
  const Ball b(q, max_len / 2, budget);
  std::vector<std::vector<ReducedWord>> by_length(static_cast<std::size_t>(max_len) + 1);
  std::size_t bytes = 0;

  std::vector<Letter> word;
  std::vector<std::int32_t> trail{0};
  auto dfs = [&](auto&& self) -> void {
    const int len = static_cast<int>(word.size());
    if (len == max_len) return;
    for (Letter x = 0; x < alpha.size(); ++x) {
      if (!word.empty() && x == inverse_letter(word.back())) continue;
      const auto g = b.step(static_cast<std::size_t>(trail.back()), x);
      if (g == Ball::outside) continue;
      word.push_back(x);
      if (g == 0) {
        bytes += sizeof(ReducedWord) + word.size() * sizeof(Letter);
        if (bytes > budget.max_bytes) throw ResourceError("first-return word list exceeds memory budget", bytes, budget.max_bytes);
        by_length[word.size()].push_back(ReducedWord::trusted(word));
      } else {
        trail.push_back(g);
        self(self);
        trail.pop_back();
      }
      word.pop_back();
    }
  };
  dfs(dfs);

  std::vector<ReducedWord> out;
  for (auto& bucket : by_length) {
    std::sort(bucket.begin(), bucket.end());
    for (auto& w : bucket) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace freeshift
