#pragma once

// Topological pressure P(f) of the free shift and the restricted pressure
// P(f, N∖{id}) of the identity fiber of a quotient.
//
// Finite quotients are handled exactly through the lifted transfer matrix.
// Infinite quotients go through exact fiber partition sums
//     a_n = Σ_{ω ∈ Σⁿ, Ψ(ω) = id} exp(S_ω f)
// computed by dynamic programming over (last window, group element), followed
// by a tail regression for the exponential growth rate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freeshift/error.hpp"
#include "freeshift/potential.hpp"
#include "freeshift/quotient.hpp"
#include "freeshift/transfer.hpp"
#include "freeshift/word.hpp"

namespace freeshift {

enum class Method { exact_eigenvalue, extrapolated };

inline const char* to_string(Method m) { return m == Method::exact_eigenvalue ? "exact" : "extrapolated"; }

/// A number together with how it was obtained.
struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
  Method method = Method::exact_eigenvalue;
};

/// P(f) = log ρ(M_f).
inline double full_pressure(const DepthKPotential& f, EigenOptions opt = {}) {
  const auto m = TransferMatrix::build(f);
  return std::log(perron_root(m, 1, opt).eigenvalue);
}

/// Growth rate of the identity-fiber sums for a finite quotient:
/// (1/p) log ρ(M_lifted^p), p the period of the lifted graph.
inline double restricted_pressure_exact(const DepthKPotential& f, const Quotient& q, EigenOptions opt = {}) {
  const auto m = TransferMatrix::lifted(f, q);
  if (!m.is_irreducible()) throw NumericError("lifted transfer matrix is not irreducible");
  const int p = m.period();
  return std::log(perron_root(m, p, opt).eigenvalue) / p;
}

struct FiberOptions {
  int n_max = 24;
  Budget budget{};
};

/// Exact fiber partition sums, stored as logarithms (−inf for empty fibers).
struct GrowthSeries {
  /// gcd of the lengths with a non-empty fiber.
  int period = 1;
  /// log_terms[n] = log a_n for n = 0..n_max; entry 0 is unused (−inf).
  std::vector<double> log_terms;

  int n_max() const noexcept { return static_cast<int>(log_terms.size()) - 1; }
  double term(int n) const { return std::exp(log_terms[static_cast<std::size_t>(n)]); }
  std::size_t nonzero_count() const {
    std::size_t c = 0;
    for (std::size_t n = 1; n < log_terms.size(); ++n)
      if (std::isfinite(log_terms[n])) ++c;
    return c;
  }
};

/// Fiber sums towards several target elements at once. Row i of the result
/// holds log Σ_{ω ∈ Σⁿ, Ψ(ω) = target_i} exp(S_ω f) for n = 0..n_max. Every
/// target must lie within Cayley distance `target_radius` of the identity.
///
/// Group coordinates are truncated to the ball of radius
/// ⌊(n_max + target_radius)/2⌋, which loses no word that ends on a target.
inline std::vector<std::vector<double>> fiber_sums(const DepthKPotential& f, const Quotient& q,
                                                   const std::vector<GroupElement>& targets, int target_radius,
                                                   FiberOptions opt = {}) {
  if (!(q.alphabet() == f.alphabet())) throw ValidationError("quotient and potential over different alphabets");
  if (opt.n_max < 1) throw ValidationError("n_max must be >= 1");
  const Alphabet& alpha = f.alphabet();
  const int k = f.depth();
  const int n_max = opt.n_max;
  const double ninf = -std::numeric_limits<double>::infinity();

  const Ball b(q, (n_max + target_radius) / 2, opt.budget);
  const std::size_t B = b.size();
  std::vector<std::int32_t> target_index;
  for (const auto& t : targets) {
    const auto i = b.find(t);
    target_index.push_back(i ? *i : Ball::outside);
  }
  std::vector<std::vector<double>> out(targets.size(), std::vector<double>(static_cast<std::size_t>(n_max) + 1, ninf));

  // Words shorter than the window are summed directly.
  for (int n = 1; n < k && n <= n_max; ++n) {
    std::vector<double> acc(targets.size(), 0.0);
    for (const auto& w : enumerate_words(alpha, n)) {
      const auto g = eval_word(q, w);
      for (std::size_t i = 0; i < targets.size(); ++i)
        if (g == targets[i]) acc[i] += std::exp(birkhoff_sup_sum(f, w));
    }
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (acc[i] > 0) out[i][static_cast<std::size_t>(n)] = std::log(acc[i]);
  }
  if (n_max < k) return out;

  const WordIndexer idx(alpha, k);
  const std::size_t W = idx.count();
  const std::size_t states = W * B;
  const std::size_t bytes = 2 * states * sizeof(double);
  if (bytes > opt.budget.max_bytes)
    throw ResourceError("fiber partition state space at n_max=" + std::to_string(n_max) + " exceeds memory budget; reduce n_max",
                        bytes, opt.budget.max_bytes);

  // Successor windows, consumed letter and weight for each window; the tail
  // term is the sup over continuations of the k-1 windows past the end.
  const int deg = alpha.branching();
  std::vector<std::uint32_t> succ(W * static_cast<std::size_t>(deg));
  std::vector<Letter> consumed(succ.size());
  std::vector<double> weight(succ.size()), tail(W, 1.0);
  for (std::size_t w = 0; w < W; ++w) {
    const auto letters = idx.decode(w);
    int j = 0;
    for (Letter x = 0; x < alpha.size(); ++x) {
      if (x == inverse_letter(letters.back())) continue;
      std::vector<Letter> next(letters.begin() + 1, letters.end());
      next.push_back(x);
      const std::size_t t = idx.encode(next);
      const std::size_t e = w * static_cast<std::size_t>(deg) + static_cast<std::size_t>(j++);
      succ[e] = static_cast<std::uint32_t>(t);
      consumed[e] = x;
      weight[e] = std::exp(f.value_at(t));
    }
    if (k > 1) tail[w] = std::exp(birkhoff_sup_sum(f, ReducedWord::trusted(std::vector<Letter>(letters.begin() + 1, letters.end()))));
  }

  // dp[w * B + g], rescaled after every step; log_scale tracks the factor.
  std::vector<double> dp(states, 0.0), next(states, 0.0);
  double log_scale = 0.0;
  for (std::size_t w = 0; w < W; ++w) {
    const auto letters = idx.decode(w);
    std::int32_t g = 0;
    for (Letter x : letters) {
      g = b.step(static_cast<std::size_t>(g), x);
      if (g == Ball::outside) break;
    }
    if (g != Ball::outside) dp[w * B + static_cast<std::size_t>(g)] = std::exp(f.value_at(w));
  }

  auto record = [&](int n) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (target_index[i] == Ball::outside) continue;
      double s = 0.0;
      for (std::size_t w = 0; w < W; ++w) s += dp[w * B + static_cast<std::size_t>(target_index[i])] * tail[w];
      if (s > 0.0) out[i][static_cast<std::size_t>(n)] = std::log(s) + log_scale;
    }
  };
  record(k);

  for (int n = k + 1; n <= n_max; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t w = 0; w < W; ++w) {
      const double* row = &dp[w * B];
      for (int j = 0; j < deg; ++j) {
        const std::size_t e = w * static_cast<std::size_t>(deg) + static_cast<std::size_t>(j);
        const Letter x = consumed[e];
        const double wt = weight[e];
        double* dst = &next[static_cast<std::size_t>(succ[e]) * B];
        for (std::size_t g = 0; g < B; ++g) {
          if (row[g] == 0.0) continue;
          const auto h = b.step(g, x);
          if (h != Ball::outside) dst[static_cast<std::size_t>(h)] += row[g] * wt;
        }
      }
    }
    const double peak = *std::max_element(next.begin(), next.end());
    if (peak > 0.0) {
      for (double& v : next) v /= peak;
      log_scale += std::log(peak);
    }
    dp.swap(next);
    record(n);
  }
  return out;
}

/// a_n for n ≤ n_max over the identity fiber.
inline GrowthSeries fiber_partition(const DepthKPotential& f, const Quotient& q, FiberOptions opt = {}) {
  GrowthSeries s;
  s.log_terms = std::move(fiber_sums(f, q, {q.identity()}, 0, opt).front());
  int g = 0;
  for (int n = 1; n <= s.n_max(); ++n)
    if (std::isfinite(s.log_terms[static_cast<std::size_t>(n)])) g = std::gcd(g, n);
  s.period = g == 0 ? 1 : g;
  return s;
}

struct GrowthRate {
  double rate = 0.0;
  /// Standard error of the slope combined with the shift between the full
  /// model and the model without the 1/n term.
  double sigma = 0.0;
  /// Polynomial exponent γ in a_n ≈ C e^{λn} n^{-γ}, when fitted.
  std::optional<double> gamma;
  double gamma_sigma = 0.0;
  /// The last terms of the fitted tail increase.
  bool monotone_tail = true;
  int terms_used = 0;
};

namespace detail {

/// Least-squares solve via normal equations with column scaling; returns the
/// coefficients and their standard errors (zero when there is no residual
/// degree of freedom).
inline std::pair<std::vector<double>, std::vector<double>> least_squares(const std::vector<std::vector<double>>& columns,
                                                                         const std::vector<double>& y) {
  const std::size_t q = columns.size(), m = y.size();
  std::vector<double> scale(q);
  for (std::size_t j = 0; j < q; ++j) {
    double s = 0;
    for (double v : columns[j]) s = std::max(s, std::abs(v));
    scale[j] = s > 0 ? s : 1.0;
  }
  // A = XᵀX, rhs = Xᵀy on scaled columns.
  std::vector<double> a(q * q, 0.0), rhs(q, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      const double xj = columns[j][i] / scale[j];
      rhs[j] += xj * y[i];
      for (std::size_t l = 0; l < q; ++l) a[j * q + l] += xj * columns[l][i] / scale[l];
    }
  // Invert A by Gauss–Jordan with partial pivoting.
  std::vector<double> inv(q * q, 0.0);
  for (std::size_t j = 0; j < q; ++j) inv[j * q + j] = 1.0;
  for (std::size_t c = 0; c < q; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < q; ++r)
      if (std::abs(a[r * q + c]) > std::abs(a[piv * q + c])) piv = r;
    if (std::abs(a[piv * q + c]) < 1e-300) throw NumericError("singular regression design");
    for (std::size_t l = 0; l < q; ++l) {
      std::swap(a[c * q + l], a[piv * q + l]);
      std::swap(inv[c * q + l], inv[piv * q + l]);
    }
    const double d = a[c * q + c];
    for (std::size_t l = 0; l < q; ++l) {
      a[c * q + l] /= d;
      inv[c * q + l] /= d;
    }
    for (std::size_t r = 0; r < q; ++r) {
      if (r == c) continue;
      const double factor = a[r * q + c];
      if (factor == 0.0) continue;
      for (std::size_t l = 0; l < q; ++l) {
        a[r * q + l] -= factor * a[c * q + l];
        inv[r * q + l] -= factor * inv[c * q + l];
      }
    }
  }
  std::vector<double> coef(q, 0.0);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t l = 0; l < q; ++l) coef[j] += inv[j * q + l] * rhs[l];
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < q; ++j) fit += coef[j] * columns[j][i] / scale[j];
    rss += (y[i] - fit) * (y[i] - fit);
  }
  std::vector<double> se(q, 0.0);
  if (m > q) {
    const double s2 = rss / static_cast<double>(m - q);
    for (std::size_t j = 0; j < q; ++j) se[j] = std::sqrt(std::max(0.0, s2 * inv[j * q + j])) / scale[j];
  }
  for (std::size_t j = 0; j < q; ++j) coef[j] /= scale[j];
  return {coef, se};
}

}  // namespace detail

/// Exponential growth rate of a series from its tail.
///
/// Regresses log a_n on n over the second half of the non-zero terms at
/// multiples of the period, with log n and 1/n as extra regressors so that a
/// polynomial prefactor n^{-γ}(1 + O(1/n)) does not bias the slope. Regressors
/// are dropped when the tail is too short to carry them.
inline GrowthRate growth_rate(std::span<const double> log_terms, int period = 1) {
  std::vector<double> ns, ys;
  for (std::size_t n = 1; n < log_terms.size(); ++n)
    if (static_cast<int>(n) % period == 0 && std::isfinite(log_terms[n])) {
      ns.push_back(static_cast<double>(n));
      ys.push_back(log_terms[n]);
    }
  if (ns.size() < 4) throw InsufficientDataError("growth rate needs at least 4 non-zero terms, got " + std::to_string(ns.size()));
  std::size_t start = ns.size() / 2;
  start = std::min(start, ns.size() - std::min<std::size_t>(ns.size(), 8));
  const std::vector<double> n_tail(ns.begin() + static_cast<std::ptrdiff_t>(start), ns.end());
  const std::vector<double> y_tail(ys.begin() + static_cast<std::ptrdiff_t>(start), ys.end());
  const std::size_t m = n_tail.size();

  auto fit = [&](std::size_t q) {
    std::vector<std::vector<double>> cols(q, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
      cols[0][i] = 1.0;
      cols[1][i] = n_tail[i];
      if (q > 2) cols[2][i] = std::log(n_tail[i]);
      if (q > 3) cols[3][i] = 1.0 / n_tail[i];
    }
    return detail::least_squares(cols, y_tail);
  };

  const std::size_t q = std::min<std::size_t>(4, m - 1);
  GrowthRate r;
  r.terms_used = static_cast<int>(m);
  const auto [coef, se] = fit(q);
  r.rate = coef[1];
  double drift = 0.0;
  if (q > 2) {
    r.gamma = -coef[2];
    r.gamma_sigma = se[2];
    const auto [coef_small, se_small] = fit(q - 1);
    drift = std::abs(coef_small[1] - coef[1]);
    if (q > 3) r.gamma_sigma = std::hypot(se[2], std::abs(coef_small[2] - coef[2]));
  }
  r.sigma = std::hypot(se[1], drift);
  for (std::size_t i = 1; i < m; ++i)
    if (y_tail[i] < y_tail[i - 1]) r.monotone_tail = false;
  return r;
}

inline GrowthRate growth_rate(const GrowthSeries& s) { return growth_rate(s.log_terms, s.period); }

/// P(f, N∖{id}): exact for finite quotients, extrapolated otherwise.
inline Estimate restricted_pressure(const DepthKPotential& f, const Quotient& q, FiberOptions fiber = {}, EigenOptions eigen = {}) {
  if (q.is_finite()) return {restricted_pressure_exact(f, q, eigen), 0.0, Method::exact_eigenvalue};
  const auto rate = growth_rate(fiber_partition(f, q, fiber));
  return {rate.rate, rate.sigma, Method::extrapolated};
}

}  // namespace freeshift
