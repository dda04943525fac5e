#pragma once

// Brute-force reference implementations used by the tests. They share no
// code with the library beyond plain integer letters (0..2d-1, x^1 inverse).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Word = std::vector<int>;

inline int inv(int x) { return x ^ 1; }

/// All reduced words of length n over 2d letters, by recursion.
inline std::vector<Word> words(int d, int n) {
  std::vector<Word> out;
  Word w;
  std::function<void()> rec = [&] {
    if (static_cast<int>(w.size()) == n) {
      out.push_back(w);
      return;
    }
    for (int x = 0; x < 2 * d; ++x) {
      if (!w.empty() && x == inv(w.back())) continue;
      w.push_back(x);
      rec();
      w.pop_back();
    }
  };
  rec();
  return out;
}

/// Membership in N = ker Ψ for the bundled quotients.
struct Group {
  std::string name;
  int d;
  std::function<bool(const Word&)> in_kernel;
};

inline Group cyclic2(int d) {
  return {"Z/2", d, [](const Word& w) { return w.size() % 2 == 0; }};
}

/// a -> (0 1), b -> (x -> [1,2,0][x]) acting on {0,1,2}.
inline Group symmetric3() {
  return {"S3", 2, [](const Word& w) {
            std::array<int, 3> p{0, 1, 2};
            const std::array<int, 3> a{1, 0, 2}, b{1, 2, 0};
            std::array<int, 3> b_inv{};
            for (int i = 0; i < 3; ++i) b_inv[static_cast<std::size_t>(b[static_cast<std::size_t>(i)])] = i;
            for (int x : w) {
              const auto& s = (x < 2) ? a : (x == 2 ? b : b_inv);
              for (auto& v : p) v = s[static_cast<std::size_t>(v)];
            }
            return p == std::array<int, 3>{0, 1, 2};
          }};
}

/// g_i -> e_i for i < k, others -> 0.
inline Group lattice(int d, int k) {
  return {"Z^" + std::to_string(k), d, [k](const Word& w) {
            std::vector<long> v(static_cast<std::size_t>(k), 0);
            for (int x : w)
              if (x / 2 < k) v[static_cast<std::size_t>(x / 2)] += (x % 2 == 0) ? 1 : -1;
            return std::all_of(v.begin(), v.end(), [](long c) { return c == 0; });
          }};
}

/// Erase killed generators, then free-reduce with a stack.
inline Group free_kill(int d, std::vector<int> killed) {
  return {"FreeKill", d, [killed](const Word& w) {
            std::vector<int> stack;
            for (int x : w) {
              if (std::find(killed.begin(), killed.end(), x / 2) != killed.end()) continue;
              if (!stack.empty() && stack.back() == inv(x)) stack.pop_back();
              else stack.push_back(x);
            }
            return stack.empty();
          }};
}

/// Index of a window in lexicographic order among all reduced windows.
inline std::map<Word, std::size_t> window_index(int d, int k) {
  std::map<Word, std::size_t> idx;
  for (const auto& w : words(d, k)) idx.emplace(w, idx.size());
  return idx;
}

/// S_ω f: exact interior windows plus the best completion of the trailing
/// windows, found by trying every reduced extension of length k-1.
inline double sup_sum(int d, int k, const std::vector<double>& table, const Word& w) {
  if (w.empty()) return 0.0;
  const auto idx = window_index(d, k);
  const int n = static_cast<int>(w.size());
  double best = -INFINITY;
  for (const auto& ext : words(d, k - 1)) {
    if (k > 1 && ext.front() == inv(w.back())) continue;
    Word full = w;
    full.insert(full.end(), ext.begin(), ext.end());
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += table[idx.at(Word(full.begin() + i, full.begin() + i + k))];
    best = std::max(best, s);
  }
  return best;
}

/// Σ_{ω ∈ Σⁿ ∩ N} exp(S_ω f) by enumeration.
inline double fiber_sum(const Group& g, int k, const std::vector<double>& table, int n) {
  double s = 0.0;
  for (const auto& w : words(g.d, n))
    if (g.in_kernel(w)) s += std::exp(sup_sum(g.d, k, table, w));
  return s;
}

/// Words in N of length ≤ L with no proper non-empty prefix in N.
inline std::vector<Word> first_returns(const Group& g, int L) {
  std::vector<Word> out;
  for (int n = 1; n <= L; ++n)
    for (const auto& w : words(g.d, n)) {
      if (!g.in_kernel(w)) continue;
      bool first = true;
      for (int m = 1; m < n && first; ++m) first = !g.in_kernel(Word(w.begin(), w.begin() + m));
      if (first) out.push_back(w);
    }
  return out;
}

/// Dense transfer matrix over windows of length k (k ≥ 1): entry (u, v) is
/// exp f(v) when v is u shifted by one letter.
inline Eigen::MatrixXd dense_transfer(int d, int k, const std::vector<double>& table) {
  const auto idx = window_index(d, k);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (const auto& [u, i] : idx)
    for (int x = 0; x < 2 * d; ++x) {
      if (x == inv(u.back())) continue;
      Word v(u.begin() + 1, u.end());
      v.push_back(x);
      const std::size_t j = idx.at(v);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(table[j]);
    }
  return m;
}

inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double r = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

inline double dense_pressure(int d, int k, const std::vector<double>& table) {
  return std::log(spectral_radius(dense_transfer(d, k, table)));
}

/// Random table over Σᵏ; `symmetric` makes it invariant under inversion.
inline std::vector<double> random_table(int d, int k, std::uint64_t seed, double lo, double hi, bool symmetric = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  const auto idx = window_index(d, k);
  std::vector<double> t(idx.size());
  for (auto& v : t) v = u(rng);
  if (symmetric)
    for (const auto& [w, i] : idx) {
      Word r(w.rbegin(), w.rend());
      for (int& x : r) x = inv(x);
      const std::size_t j = idx.at(r);
      if (j < i) t[i] = t[j];
    }
  return t;
}

/// Identity-fiber counts a_n for F_3 -> F_2 killing g_3 (letters 4,5), by a
/// map-based DP over (reduced image word in F_2, last letter). Images that
/// cannot return to the identity within n_max letters are dropped.
inline std::vector<double> freekill_counts(int n_max) {
  std::map<std::pair<std::string, int>, double> cur, next;
  auto step = [](const std::string& g, int x) {
    if (x >= 4) return g;
    const char c = static_cast<char>('0' + x);
    const char ci = static_cast<char>('0' + inv(x));
    if (!g.empty() && g.back() == ci) return g.substr(0, g.size() - 1);
    return g + c;
  };
  for (int x = 0; x < 6; ++x) cur[{step("", x), x}] += 1.0;
  std::vector<double> a(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    for (const auto& [key, c] : cur)
      if (key.first.empty()) a[static_cast<std::size_t>(n)] += c;
    if (n == n_max) break;
    next.clear();
    for (const auto& [key, c] : cur)
      for (int x = 0; x < 6; ++x) {
        if (x == inv(key.second)) continue;
        auto g = step(key.first, x);
        if (static_cast<int>(g.size()) > n_max - n - 1) continue;
        next[{std::move(g), x}] += c;
      }
    cur.swap(next);
  }
  return a;
}

}  // namespace oracle
