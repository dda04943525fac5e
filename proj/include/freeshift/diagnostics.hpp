#pragma once

// Verdict reports comparing full-shift and quotient quantities. Every
// classification is derived from stored slacks and tolerances, so a report
// can be re-checked with classify().

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "freeshift/error.hpp"
#include "freeshift/potential.hpp"
#include "freeshift/pressure.hpp"
#include "freeshift/quotient.hpp"
#include "freeshift/spectra.hpp"
#include "freeshift/transfer.hpp"
#include "freeshift/word.hpp"

namespace freeshift {

enum class ReportKind { amenability, half_bound, pressure_inequality, divergence, gibbs };

inline const char* to_string(ReportKind k) {
  switch (k) {
    case ReportKind::amenability: return "amenability";
    case ReportKind::half_bound: return "half_bound";
    case ReportKind::pressure_inequality: return "pressure_inequality";
    case ReportKind::divergence: return "divergence";
    case ReportKind::gibbs: return "gibbs";
  }
  return "unknown";
}

/// Thresholds used to turn slacks into verdicts.
struct DecisionRule {
  double sigma_factor = 3.0;
  /// Extra absolute margin required for strict claims.
  double strict_margin = 1e-3;
  /// Agreement floor for numbers that are exact up to rounding.
  double exact_floor = 1e-8;
  /// Width of the boundary band around γ = 1 in the divergence probe.
  double gamma_band = 0.15;
};

struct ReportQuantity {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;
  Method method = Method::exact_eigenvalue;
};

struct ReportCheck {
  std::string name;
  double slack = 0.0;
  double sigma = 0.0;
  std::string verdict;
};

struct VerdictReport {
  ReportKind kind = ReportKind::amenability;
  std::string scope;
  DecisionRule rule{};
  std::vector<ReportQuantity> quantities;
  std::vector<ReportCheck> checks;
  std::string classification;
  std::vector<std::string> notes;

  const ReportQuantity* quantity(const std::string& name) const {
    for (const auto& q : quantities)
      if (q.name == name) return &q;
    return nullptr;
  }

  double min_slack() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) m = std::min(m, c.slack);
    return m;
  }
};

/// Verdict of one check under the report's rule.
inline std::string check_verdict(ReportKind kind, const ReportCheck& c, const DecisionRule& r) {
  const double noise = r.sigma_factor * c.sigma + r.exact_floor;
  switch (kind) {
    case ReportKind::amenability:
      // slack = t(β) - t_N(β) ≥ 0
      if (c.slack <= noise) return "within noise";
      if (c.slack > r.sigma_factor * c.sigma + r.strict_margin) return "gap";
      return "marginal";
    case ReportKind::half_bound:
    case ReportKind::pressure_inequality:
      if (c.slack < -noise) return "violated";
      if (c.slack > r.sigma_factor * c.sigma + r.strict_margin) return "strict";
      return "holds";
    case ReportKind::divergence:
      // slack = 1 - γ
      return c.slack >= -r.gamma_band ? "divergence-type" : "convergence-type";
    case ReportKind::gibbs:
      return c.slack >= 0.0 ? "pass" : "fail";
  }
  return "unknown";
}

inline std::string classify(const VerdictReport& report) {
  const auto& r = report.rule;
  bool all_a = true, any_b = false, all_strict = true;
  for (const auto& c : report.checks) {
    const auto v = check_verdict(report.kind, c, r);
    switch (report.kind) {
      case ReportKind::amenability:
        all_a = all_a && v == "within noise";
        any_b = any_b || v == "gap";
        break;
      case ReportKind::half_bound:
      case ReportKind::pressure_inequality:
        any_b = any_b || v == "violated";
        all_strict = all_strict && v == "strict";
        break;
      case ReportKind::divergence:
        any_b = any_b || v == "convergence-type";
        break;
      case ReportKind::gibbs:
        any_b = any_b || v == "fail";
        break;
    }
  }
  switch (report.kind) {
    case ReportKind::amenability:
      if (all_a) return "consistent with amenable";
      if (any_b) return "non-amenable detected";
      return "inconclusive";
    case ReportKind::half_bound:
      if (any_b) return "half bound violated";
      return all_strict ? "half bound holds strictly" : "half bound holds";
    case ReportKind::pressure_inequality:
      if (any_b) return "inequality violated";
      return all_strict ? "inequality holds strictly" : "inequality holds";
    case ReportKind::divergence:
      return any_b ? "convergence-type (heuristic)" : "divergence-type (heuristic)";
    case ReportKind::gibbs:
      return any_b ? "Gibbs check failed" : "Gibbs property consistent";
  }
  return "unknown";
}

namespace detail {

inline void finalize(VerdictReport& report) {
  for (auto& c : report.checks) c.verdict = check_verdict(report.kind, c, report.rule);
  report.classification = classify(report);
}

inline std::string beta_label(const char* prefix, double beta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(beta=%.6g)", prefix, beta);
  return buf;
}

}  // namespace detail

/// Compares t_N(β) with t(β) on the given β values.
inline VerdictReport amenability_report(const Quotient& q, const DepthKPotential& psi, const GeometricPotential& zeta,
                                        const std::vector<double>& betas, FiberOptions fiber = {}, DecisionRule rule = {}) {
  VerdictReport rep;
  rep.kind = ReportKind::amenability;
  rep.scope = q.describe();
  rep.rule = rule;
  const Scope full = Scope::full(), sub = Scope::restricted(q, fiber);
  for (double beta : betas) {
    const Estimate t = free_energy(beta, psi, zeta, full);
    const Estimate tn = free_energy(beta, psi, zeta, sub);
    rep.quantities.push_back({detail::beta_label("t", beta), t.value, t.sigma, t.method});
    rep.quantities.push_back({detail::beta_label("t_N", beta), tn.value, tn.sigma, tn.method});
    rep.checks.push_back({detail::beta_label("gap", beta), t.value - tn.value, std::hypot(t.sigma, tn.sigma), {}});
  }
  rep.notes.push_back("finite-n statistic; amenability itself is not decided");
  detail::finalize(rep);
  return rep;
}

/// δ_N ≥ δ/2 and b_N(α) ≥ b(α)/2 on the common interior α grid.
inline VerdictReport half_bound_check(const Quotient& q, const DepthKPotential& psi, const GeometricPotential& zeta,
                                      const BetaGrid& grid = {}, std::size_t alpha_points = 41, FiberOptions fiber = {},
                                      DecisionRule rule = {}, unsigned threads = 0) {
  VerdictReport rep;
  rep.kind = ReportKind::half_bound;
  rep.scope = q.describe();
  rep.rule = rule;
  const Scope full = Scope::full(), sub = Scope::restricted(q, fiber);
  const Estimate d = delta(full, zeta), dn = delta(sub, zeta);
  rep.quantities.push_back({"delta", d.value, d.sigma, d.method});
  rep.quantities.push_back({"delta_N", dn.value, dn.sigma, dn.method});
  rep.checks.push_back({"delta_N - delta/2", dn.value - 0.5 * d.value, std::hypot(dn.sigma, 0.5 * d.sigma), {}});

  const auto tc = free_energy_curve(psi, zeta, full, grid, threads);
  const auto tnc = free_energy_curve(psi, zeta, sub, grid, threads);
  const auto probe = legendre(tc);
  const auto probe_n = legendre(tnc);
  const double lo = std::max(probe.alpha_minus, probe_n.alpha_minus);
  const double hi = std::min(probe.alpha_plus, probe_n.alpha_plus);
  std::vector<double> alphas;
  if (probe.degenerate || probe_n.degenerate || alpha_points < 2 || !(hi > lo)) {
    if (lo <= hi + 1e-9) alphas.push_back(0.5 * (lo + hi));
  } else {
    for (std::size_t i = 1; i + 1 < alpha_points; ++i)
      alphas.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(alpha_points - 1));
  }
  double sigma_n = 0.0;
  for (double s : tnc.sigma) sigma_n = std::max(sigma_n, s);
  for (double a : alphas) {
    const auto b = level_set_dimension(a, tc);
    const auto bn = level_set_dimension(a, tnc);
    if (!b || !bn) continue;
    char name[64];
    std::snprintf(name, sizeof name, "b_N - b/2 (alpha=%.6g)", a);
    rep.checks.push_back({name, *bn - 0.5 * *b, sigma_n, {}});
  }
  detail::finalize(rep);
  return rep;
}

/// 2 P(f, N∖{id}) ≥ P(2f) for an inversion-symmetric potential.
inline VerdictReport pressure_inequality_check(const Quotient& q, const DepthKPotential& f, FiberOptions fiber = {},
                                               DecisionRule rule = {}) {
  if (!f.is_inverse_symmetric(1e-12))
    throw ValidationError("pressure inequality check needs an inversion-symmetric potential");
  VerdictReport rep;
  rep.kind = ReportKind::pressure_inequality;
  rep.scope = q.describe();
  rep.rule = rule;
  const Estimate pn = restricted_pressure(f, q, fiber);
  const double p2 = full_pressure(scaled(f, 2.0));
  rep.quantities.push_back({"P(f,N)", pn.value, pn.sigma, pn.method});
  rep.quantities.push_back({"P(2f)", p2, 0.0, Method::exact_eigenvalue});
  rep.checks.push_back({"2P(f,N) - P(2f)", 2.0 * pn.value - p2, 2.0 * pn.sigma, {}});
  rep.notes.push_back("symmetry verified as table invariance under inversion (stronger than asymptotic symmetry)");
  detail::finalize(rep);
  return rep;
}

/// Fits a_n e^{-nλ̂} ≈ C n^{-γ} on the tail of the fiber series. γ ≤ 1
/// suggests a divergent Poincaré series at the critical exponent. Heuristic:
/// finitely many terms cannot decide divergence.
inline VerdictReport divergence_probe(const Quotient& q, const DepthKPotential& f, FiberOptions fiber = {},
                                      DecisionRule rule = {}) {
  const auto series = fiber_partition(f, q, fiber);
  if (series.nonzero_count() < 6)
    throw InsufficientDataError("divergence probe needs at least 6 non-zero fiber terms");
  const auto rate = growth_rate(series);

  std::vector<double> ns, ys;
  for (int n = 1; n <= series.n_max(); ++n) {
    const double lt = series.log_terms[static_cast<std::size_t>(n)];
    if (n % series.period == 0 && std::isfinite(lt)) {
      ns.push_back(n);
      ys.push_back(lt - n * rate.rate);
    }
  }
  const std::size_t start = std::min(ns.size() / 2, ns.size() - std::min<std::size_t>(ns.size(), 8));
  const std::size_t m = ns.size() - start;
  auto fit = [&](bool with_inverse) {
    std::vector<std::vector<double>> cols(with_inverse ? 3 : 2, std::vector<double>(m));
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      cols[0][i] = 1.0;
      cols[1][i] = std::log(ns[start + i]);
      if (with_inverse) cols[2][i] = 1.0 / ns[start + i];
      y[i] = ys[start + i];
    }
    return detail::least_squares(cols, y);
  };
  const bool full_model = m >= 4;
  const auto [coef, se] = fit(full_model);
  const double gamma = -coef[1];
  double gamma_sigma = se[1];
  if (full_model) gamma_sigma = std::hypot(gamma_sigma, std::abs(-fit(false).first[1] - gamma));

  VerdictReport rep;
  rep.kind = ReportKind::divergence;
  rep.scope = q.describe();
  rep.rule = rule;
  rep.quantities.push_back({"lambda", rate.rate, rate.sigma, Method::extrapolated});
  rep.quantities.push_back({"gamma", gamma, gamma_sigma, Method::extrapolated});
  rep.checks.push_back({"1 - gamma", 1.0 - gamma, gamma_sigma, {}});
  rep.notes.push_back("heuristic probe from finitely many terms, not a proof of divergence type");
  if (std::abs(gamma - 1.0) <= rule.gamma_band) rep.notes.push_back("boundary case: gamma within the band around 1");
  detail::finalize(rep);
  return rep;
}

struct SymmetricAverage {
  double max_ratio = 0.0;
  struct Entry {
    std::string g;
    double ratio;
  };
  std::vector<Entry> per_g;
};

/// max over the supplied g of Σ_{|ω| ≤ n, ω ∈ Ng} e^{S_ω f} / Σ_{|ω| ≤ n, ω ∈ Ng⁻¹} e^{S_ω f}.
inline SymmetricAverage symmetric_on_average_statistic(const Quotient& q, const DepthKPotential& f,
                                                       const std::vector<ReducedWord>& reps, int n, Budget budget = {}) {
  if (reps.empty()) throw ValidationError("symmetric-on-average statistic needs at least one coset representative");
  std::vector<GroupElement> targets;
  int radius = 0;
  for (const auto& g : reps) {
    const auto h = eval_word(q, g);
    targets.push_back(h);
    targets.push_back(q.inverse(h));
    radius = std::max(radius, static_cast<int>(g.size()));
  }
  const auto sums = fiber_sums(f, q, targets, radius, FiberOptions{n, budget});
  auto cumulative = [&](const std::vector<double>& logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < logs.size(); ++i) m = std::max(m, logs[i]);
    if (!std::isfinite(m)) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 1; i < logs.size(); ++i)
      if (std::isfinite(logs[i])) s += std::exp(logs[i] - m);
    return m + std::log(s);
  };
  SymmetricAverage out;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const double num = cumulative(sums[2 * i]), den = cumulative(sums[2 * i + 1]);
    if (!std::isfinite(den)) throw NumericError("undefined ratio: no word of length <= " + std::to_string(n) + " in N g^-1 for g=" + to_string(reps[i]));
    const double ratio = std::isfinite(num) ? std::exp(num - den) : 0.0;
    out.per_g.push_back({to_string(reps[i]), ratio});
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

struct GibbsData {
  double eigenvalue = 0.0;
  double pressure = 0.0;
  std::vector<double> left;
  std::vector<double> right;
  /// constant[n] = Ĉ_μ over cylinders of length ≤ n (index 0 unused).
  std::vector<double> constant;
  /// max_n |Σ_{Σⁿ} μ - 1| for n ≤ L.
  double level_sum_error = 0.0;
  /// max |Σ_x μ[ωx] - μ[ω]| over |ω| ≤ min(L, 6).
  double compatibility_error = 0.0;
  /// max |Σ_x μ[xω] - μ[ω]| over |ω| ≤ min(L, 6).
  double shift_invariance_error = 0.0;
  std::vector<double> potential;

  /// μ[ω] = ℓ_{ω1} h_{ωn} e^{f(ω2)+…+f(ωn)} / λ^{n-1} with ℓ·h = 1.
  double measure(const ReducedWord& w) const {
    if (w.empty()) return 1.0;
    double log_mass = std::log(left[static_cast<std::size_t>(w.front())]) + std::log(right[static_cast<std::size_t>(w.back())]);
    for (std::size_t i = 1; i < w.size(); ++i) log_mass += potential[static_cast<std::size_t>(w[i])] - std::log(eigenvalue);
    return std::exp(log_mass);
  }
};

struct GibbsResult {
  GibbsData data;
  VerdictReport report;
};

/// Builds the Gibbs measure of a depth-1 potential from Perron eigendata and
/// measures its Gibbs constant over cylinders of length ≤ L.
inline GibbsResult gibbs_verify(const DepthKPotential& f, int max_length, EigenOptions opt = {}) {
  if (f.depth() != 1) throw ValidationError("Gibbs verification needs a depth-1 potential");
  if (max_length < 2) throw ValidationError("Gibbs verification needs L >= 2");
  const Alphabet& alpha = f.alphabet();
  const auto m = TransferMatrix::build(f);
  const auto right = perron_root(m, 1, opt);
  const auto left = perron_root(m, 1, opt, true);
  GibbsResult res;
  GibbsData& g = res.data;
  g.eigenvalue = right.eigenvalue;
  g.pressure = std::log(right.eigenvalue);
  g.right = right.vector;
  g.left = left.vector;
  g.potential.assign(f.values().begin(), f.values().end());
  double dot = 0.0;
  for (std::size_t i = 0; i < g.left.size(); ++i) dot += g.left[i] * g.right[i];
  for (double& v : g.left) v /= dot;

  const auto L = static_cast<std::size_t>(alpha.size());
  // ratio μ[ω] / e^{S_ω f - |ω| P} depends on (ω1, ωn) only.
  auto ratio = [&](std::size_t first, std::size_t last) {
    return g.left[first] * g.right[last] * g.eigenvalue * std::exp(-g.potential[first]);
  };
  std::vector<char> reach(L * L, 0), next(L * L);
  for (std::size_t x = 0; x < L; ++x) reach[x * L + x] = 1;
  g.constant.assign(static_cast<std::size_t>(max_length) + 1, 0.0);
  double running = 0.0;
  std::vector<double> mass(g.left), tmp(L);
  for (int n = 1; n <= max_length; ++n) {
    if (n > 1) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = 0; b < L; ++b)
          if (reach[a * L + b])
            for (std::size_t c = 0; c < L; ++c)
              if (c != static_cast<std::size_t>(inverse_letter(static_cast<Letter>(b)))) next[a * L + c] = 1;
      reach.swap(next);
      // mass ← mass · M / λ
      m.apply_transpose(mass, tmp);
      for (std::size_t i = 0; i < L; ++i) mass[i] = tmp[i] / g.eigenvalue;
    }
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t b = 0; b < L; ++b)
        if (reach[a * L + b]) {
          const double r = ratio(a, b);
          running = std::max(running, std::max(r, 1.0 / r));
        }
    g.constant[static_cast<std::size_t>(n)] = running;
    double level = 0.0;
    for (std::size_t i = 0; i < L; ++i) level += mass[i] * g.right[i];
    g.level_sum_error = std::max(g.level_sum_error, std::abs(level - 1.0));
  }

  const int cyl = std::min(max_length, 6);
  for (int n = 1; n < cyl; ++n)
    for (const auto& w : enumerate_words(alpha, n)) {
      const double mw = g.measure(w);
      double right_ext = 0.0, left_ext = 0.0;
      for (Letter x = 0; x < alpha.size(); ++x) {
        if (x != inverse_letter(w.back())) {
          std::vector<Letter> v(w.begin(), w.end());
          v.push_back(x);
          right_ext += g.measure(ReducedWord::trusted(std::move(v)));
        }
        if (x != inverse_letter(w.front())) {
          std::vector<Letter> v{x};
          v.insert(v.end(), w.begin(), w.end());
          left_ext += g.measure(ReducedWord::trusted(std::move(v)));
        }
      }
      g.compatibility_error = std::max(g.compatibility_error, std::abs(right_ext - mw));
      g.shift_invariance_error = std::max(g.shift_invariance_error, std::abs(left_ext - mw));
    }

  VerdictReport& rep = res.report;
  rep.kind = ReportKind::gibbs;
  rep.scope = "full shift";
  rep.quantities.push_back({"pressure", g.pressure, 0.0, Method::exact_eigenvalue});
  const int half = std::max(1, max_length / 2);
  rep.quantities.push_back({"C_mu(L/2)", g.constant[static_cast<std::size_t>(half)], 0.0, Method::exact_eigenvalue});
  rep.quantities.push_back({"C_mu(L)", g.constant.back(), 0.0, Method::exact_eigenvalue});
  rep.checks.push_back({"1.05 - C_mu(L)/C_mu(L/2)", 1.05 - g.constant.back() / g.constant[static_cast<std::size_t>(half)], 0.0, {}});
  rep.checks.push_back({"1e-10 - level sum error", 1e-10 - g.level_sum_error, 0.0, {}});
  rep.checks.push_back({"1e-10 - compatibility error", 1e-10 - g.compatibility_error, 0.0, {}});
  rep.checks.push_back({"1e-10 - shift invariance error", 1e-10 - g.shift_invariance_error, 0.0, {}});
  detail::finalize(rep);
  return res;
}

}  // namespace freeshift
