#pragma once

// Weighted transfer matrices of the free shift, optionally lifted to a skew
// product with a finite group, and the Perron root by power iteration.

#include <cmath>
#include <deque>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "freeshift/error.hpp"
#include "freeshift/potential.hpp"
#include "freeshift/quotient.hpp"
#include "freeshift/word.hpp"

namespace freeshift {

struct EigenOptions {
  double tolerance = 1e-13;
  int max_iterations = 100000;
};

/// Sparse matrix with a fixed number of successors per state. States are
/// windows in Σ^m (m = max(depth, 1)) times, for lifted matrices, elements of
/// a finite group: state = window * group_order + g.
///
/// Row s holds the transitions s -> t with weight exp(f(window of t)); only
/// interior windows carry weight, so boundary windows of a word are dropped.
class TransferMatrix {
 public:
  static TransferMatrix build(const DepthKPotential& f) { return TransferMatrix(f, nullptr); }

  static TransferMatrix lifted(const DepthKPotential& f, const Quotient& q) {
    if (!q.is_finite()) throw ValidationError("lifted transfer matrix needs a finite-group quotient");
    if (!(q.alphabet() == f.alphabet())) throw ValidationError("quotient and potential over different alphabets");
    return TransferMatrix(f, &q);
  }

  std::size_t states() const noexcept { return states_; }
  int degree() const noexcept { return degree_; }
  int window_length() const noexcept { return window_; }
  int group_order() const noexcept { return group_order_; }
  std::size_t windows() const noexcept { return states_ / static_cast<std::size_t>(group_order_); }

  std::span<const std::uint32_t> successors(std::size_t s) const {
    return std::span<const std::uint32_t>(succ_).subspan(s * static_cast<std::size_t>(degree_), static_cast<std::size_t>(degree_));
  }
  std::span<const double> weights(std::size_t s) const {
    return std::span<const double>(weight_).subspan(s * static_cast<std::size_t>(degree_), static_cast<std::size_t>(degree_));
  }

  /// out = M v
  void apply(std::span<const double> v, std::span<double> out) const {
    for (std::size_t s = 0; s < states_; ++s) {
      double acc = 0.0;
      const std::size_t base = s * static_cast<std::size_t>(degree_);
      for (int j = 0; j < degree_; ++j) acc += weight_[base + static_cast<std::size_t>(j)] * v[succ_[base + static_cast<std::size_t>(j)]];
      out[s] = acc;
    }
  }

  /// out = Mᵀ v
  void apply_transpose(std::span<const double> v, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t s = 0; s < states_; ++s) {
      const std::size_t base = s * static_cast<std::size_t>(degree_);
      for (int j = 0; j < degree_; ++j) out[succ_[base + static_cast<std::size_t>(j)]] += weight_[base + static_cast<std::size_t>(j)] * v[s];
    }
  }

  bool is_irreducible() const {
    auto sweep = [&](bool forward) {
      std::vector<std::vector<std::uint32_t>> rev;
      if (!forward) {
        rev.resize(states_);
        for (std::size_t s = 0; s < states_; ++s)
          for (auto t : successors(s)) rev[t].push_back(static_cast<std::uint32_t>(s));
      }
      std::vector<bool> seen(states_, false);
      std::deque<std::size_t> queue{0};
      seen[0] = true;
      std::size_t count = 1;
      while (!queue.empty()) {
        const std::size_t s = queue.front();
        queue.pop_front();
        auto visit = [&](std::size_t t) {
          if (!seen[t]) {
            seen[t] = true;
            ++count;
            queue.push_back(t);
          }
        };
        if (forward) for (auto t : successors(s)) visit(t);
        else for (auto t : rev[s]) visit(t);
      }
      return count == states_;
    };
    return sweep(true) && sweep(false);
  }

  /// gcd of cycle lengths of the (irreducible) transition graph.
  int period() const {
    std::vector<long> level(states_, -1);
    std::deque<std::size_t> queue{0};
    level[0] = 0;
    long g = 0;
    while (!queue.empty()) {
      const std::size_t s = queue.front();
      queue.pop_front();
      for (auto t : successors(s)) {
        if (level[t] < 0) {
          level[t] = level[s] + 1;
          queue.push_back(t);
        } else {
          g = std::gcd(g, std::labs(level[s] + 1 - level[t]));
        }
      }
    }
    return static_cast<int>(g == 0 ? 1 : g);
  }

 private:
  TransferMatrix(const DepthKPotential& f, const Quotient* q)
      : window_(std::max(f.depth(), 1)), degree_(f.alphabet().branching()), group_order_(q ? q->order() : 1) {
    const Alphabet& alpha = f.alphabet();
    const WordIndexer idx(alpha, window_);
    const std::size_t W = idx.count();
    const auto G = static_cast<std::size_t>(group_order_);
    states_ = W * G;
    succ_.resize(states_ * static_cast<std::size_t>(degree_));
    weight_.resize(succ_.size());
    for (std::size_t w = 0; w < W; ++w) {
      const auto letters = idx.decode(w);
      int j = 0;
      for (Letter x = 0; x < alpha.size(); ++x) {
        if (x == inverse_letter(letters.back())) continue;
        std::vector<Letter> next(letters.begin() + 1, letters.end());
        next.push_back(x);
        const std::size_t t = idx.encode(next);
        const double weight = std::exp(f.value_at(t));
        for (std::size_t g = 0; g < G; ++g) {
          const std::size_t s = w * G + g;
          const std::size_t h = q ? static_cast<std::size_t>(q->table().mul(static_cast<int>(g), q->letter_index(x))) : 0;
          succ_[s * static_cast<std::size_t>(degree_) + static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(t * G + h);
          weight_[s * static_cast<std::size_t>(degree_) + static_cast<std::size_t>(j)] = weight;
        }
        ++j;
      }
    }
  }

  int window_;
  int degree_;
  int group_order_;
  std::size_t states_ = 0;
  std::vector<std::uint32_t> succ_;
  std::vector<double> weight_;
};

struct PerronResult {
  /// Perron root of M^power.
  double eigenvalue = 0.0;
  /// Relative Collatz–Wielandt gap (upper - lower) / eigenvalue at exit.
  double residual = 0.0;
  int iterations = 0;
  /// Positive eigenvector normalized to unit sum.
  std::vector<double> vector;
};

/// Power iteration on M^power (or its transpose) from the all-ones vector.
/// The Collatz–Wielandt bounds min (Av)_i/v_i ≤ ρ ≤ max (Av)_i/v_i bracket
/// the root at every step and give the stopping rule.
inline PerronResult perron_root(const TransferMatrix& m, int power = 1, EigenOptions opt = {}, bool transpose = false) {
  if (power < 1) throw ValidationError("matrix power must be >= 1");
  const std::size_t n = m.states();
  std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n), tmp(n);
  PerronResult r;
  double lower = 0.0, upper = 0.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    std::copy(v.begin(), v.end(), w.begin());
    for (int k = 0; k < power; ++k) {
      if (transpose) m.apply_transpose(w, tmp);
      else m.apply(w, tmp);
      w.swap(tmp);
    }
    lower = std::numeric_limits<double>::infinity();
    upper = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(v[i] > 0.0)) throw NumericError("power iteration lost positivity; matrix is not irreducible");
      const double ratio = w[i] / v[i];
      lower = std::min(lower, ratio);
      upper = std::max(upper, ratio);
      total += w[i];
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / total;
    r.iterations = it;
    r.eigenvalue = 0.5 * (lower + upper);
    r.residual = (upper - lower) / r.eigenvalue;
    if (r.residual <= opt.tolerance) {
      r.vector = std::move(v);
      return r;
    }
  }
  throw NumericError("power iteration did not converge after " + std::to_string(opt.max_iterations) +
                         " iterations (residual " + std::to_string(r.residual) + ")",
                     r.residual);
}

}  // namespace freeshift
