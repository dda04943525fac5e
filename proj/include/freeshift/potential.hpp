#pragma once

// Locally constant potentials on the shift: f(τ) depends on τ_1..τ_k only,
// stored as a table over Σᵏ.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "freeshift/error.hpp"
#include "freeshift/word.hpp"

namespace freeshift {

/// Largest table a potential may carry.
inline constexpr std::size_t max_potential_table = std::size_t{1} << 24;

class DepthKPotential {
 public:
  DepthKPotential(const Alphabet& alphabet, int depth, std::vector<double> table, std::string label = {})
      : alphabet_(alphabet), depth_(depth), label_(std::move(label)) {
    if (depth < 1) throw ValidationError("potential depth must be >= 1");
    const auto count = count_words(alphabet, depth);
    if (count > max_potential_table) throw ValidationError("potential table over Σ^" + std::to_string(depth) + " is too large");
    if (table.size() != count.convert_to<std::size_t>())
      throw ValidationError("potential table has " + std::to_string(table.size()) + " entries, Σ^" +
                            std::to_string(depth) + " has " + count.str());
    for (double v : table)
      if (!std::isfinite(v)) throw ValidationError("potential values must be finite");
    table_ = std::move(table);
  }

  static DepthKPotential constant(const Alphabet& alphabet, double value, std::string label = {}) {
    return DepthKPotential(alphabet, 1, std::vector<double>(static_cast<std::size_t>(alphabet.size()), value), std::move(label));
  }

  /// Depth-1 potential from one value per letter, or one value per generator
  /// (shared with its inverse).
  static DepthKPotential per_letter(const Alphabet& alphabet, std::span<const double> values, std::string label = {}) {
    std::vector<double> table(static_cast<std::size_t>(alphabet.size()));
    if (values.size() == table.size()) {
      std::copy(values.begin(), values.end(), table.begin());
    } else if (values.size() == static_cast<std::size_t>(alphabet.rank())) {
      for (std::size_t k = 0; k < values.size(); ++k) table[2 * k] = table[2 * k + 1] = values[k];
    } else if (values.size() == 1) {
      std::fill(table.begin(), table.end(), values[0]);
    } else {
      throw ValidationError("per-letter potential needs 1, d or 2d values");
    }
    return DepthKPotential(alphabet, 1, std::move(table), std::move(label));
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int depth() const noexcept { return depth_; }
  const std::string& label() const noexcept { return label_; }
  std::span<const double> values() const noexcept { return table_; }

  double value(std::span<const Letter> window) const { return table_[WordIndexer(alphabet_, depth_).encode(window)]; }
  double value_at(std::size_t index) const { return table_[index]; }

  double min() const { return *std::min_element(table_.begin(), table_.end()); }
  double max() const { return *std::max_element(table_.begin(), table_.end()); }
  double mean() const {
    double s = 0;
    for (double v : table_) s += v;
    return s / static_cast<double>(table_.size());
  }
  bool is_constant() const { return min() == max(); }

  /// The same function viewed as a depth-`depth` table (reads its first k letters).
  DepthKPotential lifted(int depth) const {
    if (depth < depth_) throw ValidationError("cannot lower the depth of a potential");
    if (depth == depth_) return *this;
    const WordIndexer big(alphabet_, depth), small(alphabet_, depth_);
    std::vector<double> table(big.count());
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto w = big.decode(i);
      table[i] = table_[small.encode(std::span<const Letter>(w).first(static_cast<std::size_t>(depth_)))];
    }
    return DepthKPotential(alphabet_, depth, std::move(table), label_);
  }

  /// Invariant under ω ↦ ω⁻¹ on windows (reverse and invert every letter).
  bool is_inverse_symmetric(double tolerance = 0.0) const {
    const WordIndexer idx(alphabet_, depth_);
    for (std::size_t i = 0; i < table_.size(); ++i) {
      const auto w = idx.decode(i);
      std::vector<Letter> inv(w.size());
      std::transform(w.rbegin(), w.rend(), inv.begin(), inverse_letter);
      if (std::abs(table_[idx.encode(inv)] - table_[i]) > tolerance) return false;
    }
    return true;
  }

 private:
  Alphabet alphabet_;
  int depth_;
  std::vector<double> table_;
  std::string label_;
};

/// βψ + uζ as one table at depth max(k_ψ, k_ζ).
inline DepthKPotential combine(double beta, const DepthKPotential& psi, double u, const DepthKPotential& zeta) {
  if (!(psi.alphabet() == zeta.alphabet())) throw ValidationError("potentials over different alphabets");
  const int depth = std::max(psi.depth(), zeta.depth());
  const DepthKPotential p = psi.lifted(depth), z = zeta.lifted(depth);
  std::vector<double> table(p.values().size());
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = beta * p.value_at(i) + u * z.value_at(i);
  return DepthKPotential(psi.alphabet(), depth, std::move(table));
}

inline DepthKPotential scaled(const DepthKPotential& f, double factor) {
  std::vector<double> table(f.values().begin(), f.values().end());
  for (double& v : table) v *= factor;
  return DepthKPotential(f.alphabet(), f.depth(), std::move(table), f.label());
}

/// S_w f: the supremum over the cylinder [w] of the first |w| terms of the
/// ergodic sum. Windows inside w contribute exactly; the k-1 windows that run
/// past the end of w are maximized jointly over admissible continuations by
/// dynamic programming on the trailing k-1 letters. S_∅ f = 0.
inline double birkhoff_sup_sum(const DepthKPotential& f, const ReducedWord& w) {
  const int k = f.depth();
  const int n = static_cast<int>(w.size());
  if (n == 0) return 0.0;
  const Alphabet& alpha = f.alphabet();
  const WordIndexer idx(alpha, k);
  const auto letters = w.letters();

  double inner = 0.0;
  for (int i = 0; i + k <= n; ++i) inner += f.value_at(idx.encode(letters.subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(k))));
  if (k == 1) return inner;

  // State: the last min(len, k-1) letters of the extended word.
  const int keep = k - 1;
  const int first_open = std::max(0, n - k + 1);  // 0-based start of the first incomplete window
  std::map<std::vector<Letter>, double> best;
  {
    const int from = std::max(0, n - keep);
    best.emplace(std::vector<Letter>(letters.begin() + from, letters.end()), 0.0);
  }
  for (int step = 1; step <= keep; ++step) {
    const int end = n + step;  // length of the extended word after this step
    std::map<std::vector<Letter>, double> next;
    for (const auto& [state, acc] : best) {
      for (Letter x = 0; x < alpha.size(); ++x) {
        if (!state.empty() && x == inverse_letter(state.back())) continue;
        std::vector<Letter> window = state;
        window.push_back(x);
        double gain = 0.0;
        const int start = end - k;  // window ending at the new letter
        if (start >= first_open && start < n && static_cast<int>(window.size()) == k) gain = f.value_at(idx.encode(window));
        std::vector<Letter> key(window.size() > static_cast<std::size_t>(keep) ? window.begin() + 1 : window.begin(), window.end());
        auto [it, inserted] = next.emplace(std::move(key), acc + gain);
        if (!inserted) it->second = std::max(it->second, acc + gain);
      }
    }
    best.swap(next);
  }
  double tail = -std::numeric_limits<double>::infinity();
  for (const auto& [state, acc] : best) tail = std::max(tail, acc);
  return inner + tail;
}

/// (k-1)(max f - min f): bounds |S_n f(τ) - S_n f(τ')| for τ, τ' in a common
/// n-cylinder.
inline double distortion_constant(const DepthKPotential& f) {
  return static_cast<double>(f.depth() - 1) * (f.max() - f.min());
}

/// Logarithms of contraction ratios. Every value is ≤ log s < 0.
class GeometricPotential {
 public:
  explicit GeometricPotential(DepthKPotential log_ratios) : log_ratios_(std::move(log_ratios)) {
    if (!(log_ratios_.max() < 0.0)) throw ValidationError("geometric potential must be strictly negative");
    contraction_bound_ = std::exp(log_ratios_.max());
  }

  const DepthKPotential& potential() const noexcept { return log_ratios_; }
  double contraction_bound() const noexcept { return contraction_bound_; }
  const Alphabet& alphabet() const noexcept { return log_ratios_.alphabet(); }

 private:
  DepthKPotential log_ratios_;
  double contraction_bound_;
};

/// Similarity ratios, one shared value, one per generator or one per letter.
inline GeometricPotential geometric_from_ratios(const Alphabet& alphabet, std::span<const double> ratios) {
  std::vector<double> logs;
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("contraction ratio " + std::to_string(r) + " is not in (0,1)");
    logs.push_back(std::log(r));
  }
  return GeometricPotential(DepthKPotential::per_letter(alphabet, logs, "zeta"));
}

/// Per-cylinder ratios given as a depth-k table.
inline GeometricPotential geometric_from_ratio_table(const Alphabet& alphabet, int depth, std::span<const double> ratios) {
  std::vector<double> logs;
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("contraction ratio " + std::to_string(r) + " is not in (0,1)");
    logs.push_back(std::log(r));
  }
  return GeometricPotential(DepthKPotential(alphabet, depth, std::move(logs), "zeta"));
}

/// Constant geometric potential ζ ≡ log_value (< 0).
inline GeometricPotential constant_geometric(const Alphabet& alphabet, double log_value) {
  return GeometricPotential(DepthKPotential::constant(alphabet, log_value, "zeta"));
}

}  // namespace freeshift
