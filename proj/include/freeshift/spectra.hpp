#pragma once

// Free energy t(β) = root in u of P(βψ + uζ, C) = 0, its Legendre conjugate
// and the quantities derived from them: exponents of convergence, cogrowth,
// multifractal spectra and Bowen dimension.

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "freeshift/error.hpp"
#include "freeshift/potential.hpp"
#include "freeshift/pressure.hpp"
#include "freeshift/quotient.hpp"

namespace freeshift {

/// Which words the pressure is taken over: all of Σ* or the identity fiber
/// of a quotient.
struct Scope {
  std::optional<Quotient> quotient;
  FiberOptions fiber{};
  EigenOptions eigen{};

  static Scope full(EigenOptions eigen = {}) { return Scope{std::nullopt, {}, eigen}; }
  static Scope restricted(Quotient q, FiberOptions fiber = {}, EigenOptions eigen = {}) {
    return Scope{std::move(q), fiber, eigen};
  }

  bool exact() const { return !quotient || quotient->is_finite(); }
  std::string label() const { return quotient ? quotient->describe() : "full shift"; }
};

inline Estimate scope_pressure(const DepthKPotential& f, const Scope& scope) {
  if (!scope.quotient) return {full_pressure(f, scope.eigen), 0.0, Method::exact_eigenvalue};
  return restricted_pressure(f, *scope.quotient, scope.fiber, scope.eigen);
}

struct RootOptions {
  /// Bracket width at which bisection stops, exact scopes.
  double tolerance = 1e-10;
  /// Same for extrapolated scopes, whose pressure is itself uncertain.
  double extrapolated_tolerance = 1e-7;
  double u_max = 1e6;
};

/// t(β): the unique u with P(βψ + uζ, C) = 0.
///
/// The pressure is strictly decreasing in u because ζ < 0, so bisection on a
/// bracket grown by doubling from u = 0 always succeeds. When both ψ and ζ
/// are constant the pressure is affine in u and the root is read off one
/// evaluation. For extrapolated scopes the root uncertainty is the pressure
/// uncertainty over |mean ζ|.
inline Estimate free_energy(double beta, const DepthKPotential& psi, const GeometricPotential& zeta, const Scope& scope,
                            RootOptions opt = {}) {
  const DepthKPotential& z = zeta.potential();
  const double zeta_mean = std::abs(z.mean());
  auto pressure_at = [&](double u) { return scope_pressure(combine(beta, psi, u, z), scope); };

  if (psi.is_constant() && z.is_constant()) {
    const Estimate p0 = scope_pressure(combine(beta, psi, 0.0, z), scope);
    const double c = z.values()[0];
    return {p0.value / -c, p0.sigma / zeta_mean, p0.method};
  }

  const double tol = scope.exact() ? opt.tolerance : opt.extrapolated_tolerance;
  double lo = 0.0, hi = 0.0;
  Estimate p_lo = pressure_at(0.0);
  Estimate p_hi = p_lo;
  if (p_lo.value > 0.0) {
    double step = 1.0;
    hi = step;
    p_hi = pressure_at(hi);
    while (p_hi.value > 0.0) {
      lo = hi;
      p_lo = p_hi;
      step *= 2.0;
      hi = step;
      if (hi > opt.u_max) throw NumericError("free energy bracketing failed: pressure positive up to u=" + std::to_string(opt.u_max));
      p_hi = pressure_at(hi);
    }
  } else if (p_lo.value < 0.0) {
    double step = 1.0;
    lo = -step;
    p_lo = pressure_at(lo);
    while (p_lo.value < 0.0) {
      hi = lo;
      p_hi = p_lo;
      step *= 2.0;
      lo = -step;
      if (-lo > opt.u_max) throw NumericError("free energy bracketing failed: pressure negative down to u=" + std::to_string(-opt.u_max));
      p_lo = pressure_at(lo);
    }
  } else {
    return {0.0, p_lo.sigma / zeta_mean, p_lo.method};
  }
  if (!(p_lo.value > p_hi.value)) throw NumericError("pressure is not decreasing in u on the bracket");

  Estimate p_mid = p_lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    p_mid = pressure_at(mid);
    if (p_mid.value > 0.0) lo = mid;
    else hi = mid;
  }
  const double root = 0.5 * (lo + hi);
  return {root, p_mid.sigma / zeta_mean, p_mid.method};
}

/// δ_C = t_C(0).
inline Estimate delta(const Scope& scope, const GeometricPotential& zeta, RootOptions opt = {}) {
  return free_energy(0.0, DepthKPotential::constant(zeta.alphabet(), 0.0), zeta, scope, opt);
}

/// η = δ_N / δ for ζ ≡ -1, i.e. the fiber growth rate over log(2d-1).
inline Estimate cogrowth(const Quotient& q, FiberOptions fiber = {}, EigenOptions eigen = {}) {
  const auto zeta = constant_geometric(q.alphabet(), -1.0);
  const Estimate dn = delta(Scope::restricted(q, fiber, eigen), zeta);
  const Estimate d = delta(Scope::full(eigen), zeta);
  return {dn.value / d.value, dn.sigma / d.value, dn.method};
}

struct BetaGrid {
  double min = -4.0;
  double max = 4.0;
  double step = 0.05;

  std::vector<double> points() const {
    if (!(step > 0.0) || !(max >= min)) throw ValidationError("invalid β grid");
    const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = min + step * static_cast<double>(i);
    return pts;
  }
};

struct FreeEnergyCurve {
  std::vector<double> beta;
  std::vector<double> t;
  std::vector<double> sigma;
  std::vector<Method> method;
  std::string scope;
};

/// Runs `task(i)` for i in [0, n) on up to `threads` workers. The first
/// exception by index is rethrown.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&](unsigned id) {
    for (std::size_t i = id; i < n; i += threads) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(worker, id);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline FreeEnergyCurve free_energy_curve(const DepthKPotential& psi, const GeometricPotential& zeta, const Scope& scope,
                                         const BetaGrid& grid = {}, unsigned threads = 0, RootOptions opt = {}) {
  FreeEnergyCurve c;
  c.beta = grid.points();
  c.t.resize(c.beta.size());
  c.sigma.resize(c.beta.size());
  c.method.resize(c.beta.size());
  c.scope = scope.label();
  parallel_for(c.beta.size(), threads, [&](std::size_t i) {
    const Estimate e = free_energy(c.beta[i], psi, zeta, scope, opt);
    c.t[i] = e.value;
    c.sigma[i] = e.sigma;
    c.method[i] = e.method;
  });
  return c;
}

/// Slopes t'(β) by central differences, one-sided at the ends.
inline std::vector<double> slopes(const FreeEnergyCurve& c) {
  const std::size_t n = c.beta.size();
  std::vector<double> s(n, 0.0);
  if (n < 2) return s;
  s[0] = (c.t[1] - c.t[0]) / (c.beta[1] - c.beta[0]);
  s[n - 1] = (c.t[n - 1] - c.t[n - 2]) / (c.beta[n - 1] - c.beta[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) s[i] = (c.t[i + 1] - c.t[i - 1]) / (c.beta[i + 1] - c.beta[i - 1]);
  return s;
}

/// t at β by linear interpolation on the grid.
inline double curve_value(const FreeEnergyCurve& c, double beta) {
  if (c.beta.empty()) throw ValidationError("empty free energy curve");
  if (beta <= c.beta.front()) return c.t.front();
  if (beta >= c.beta.back()) return c.t.back();
  std::size_t i = 1;
  while (c.beta[i] < beta) ++i;
  const double w = (beta - c.beta[i - 1]) / (c.beta[i] - c.beta[i - 1]);
  return (1 - w) * c.t[i - 1] + w * c.t[i];
}

struct SpectrumCurve {
  std::vector<double> alpha;
  /// b(α) = -t*(-α); NaN outside [α₋, α₊].
  std::vector<double> b;
  /// The infimum over the β grid was attained at a grid endpoint.
  std::vector<bool> at_grid_edge;
  /// Estimated from the extreme sampled slopes, not extrapolated to β → ±∞.
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  bool degenerate = false;
  std::string scope;
};

/// Uniform α grid over the sampled slope range.
inline std::vector<double> default_alpha_grid(const FreeEnergyCurve& c, std::size_t points = 101) {
  const auto s = slopes(c);
  const double a_minus = -*std::max_element(s.begin(), s.end());
  const double a_plus = -*std::min_element(s.begin(), s.end());
  if (points < 2 || a_plus - a_minus <= 1e-9 * (1.0 + std::abs(a_plus))) return {0.5 * (a_minus + a_plus)};
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = a_minus + (a_plus - a_minus) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

/// b(α) = inf_β { t(β) + βα } over the sampled β grid.
inline SpectrumCurve legendre(const FreeEnergyCurve& c, std::span<const double> alpha_grid, double convexity_tolerance = 1e-8) {
  const std::size_t n = c.beta.size();
  if (n < 3) throw ValidationError("free energy curve needs at least 3 points");
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double second = c.t[i + 1] - 2.0 * c.t[i] + c.t[i - 1];
    const double allowance = convexity_tolerance + 3.0 * (c.sigma[i - 1] + 2.0 * c.sigma[i] + c.sigma[i + 1]);
    if (second < -allowance)
      throw ValidationError("free energy curve is not convex at β=" + std::to_string(c.beta[i]) +
                            " (second difference " + std::to_string(second) + ")");
  }
  SpectrumCurve out;
  out.scope = c.scope;
  const auto s = slopes(c);
  out.alpha_minus = -*std::max_element(s.begin(), s.end());
  out.alpha_plus = -*std::min_element(s.begin(), s.end());
  const double span = out.alpha_plus - out.alpha_minus;
  if (span <= 1e-9 * (1.0 + std::abs(out.alpha_plus))) {
    out.degenerate = true;
    const double a = 0.5 * (out.alpha_minus + out.alpha_plus);
    out.alpha_minus = out.alpha_plus = a;
    out.alpha = {a};
    out.b = {curve_value(c, 0.0)};
    out.at_grid_edge = {false};
    return out;
  }
  for (double a : alpha_grid) {
    out.alpha.push_back(a);
    if (a < out.alpha_minus - 1e-12 || a > out.alpha_plus + 1e-12) {
      out.b.push_back(std::numeric_limits<double>::quiet_NaN());
      out.at_grid_edge.push_back(true);
      continue;
    }
    std::size_t arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = c.t[i] + c.beta[i] * a;
      if (v < best) {
        best = v;
        arg = i;
      }
    }
    out.b.push_back(best);
    out.at_grid_edge.push_back(arg == 0 || arg == n - 1);
  }
  return out;
}

inline SpectrumCurve legendre(const FreeEnergyCurve& c, double convexity_tolerance = 1e-8) {
  const auto grid = default_alpha_grid(c);
  return legendre(c, grid, convexity_tolerance);
}

/// Dimension of the level set of α: b(α), or nullopt (empty level set) when
/// α lies outside [α₋, α₊].
inline std::optional<double> level_set_dimension(double alpha, const FreeEnergyCurve& c) {
  const double grid[] = {alpha};
  const auto sc = legendre(c, grid);
  if (sc.degenerate) {
    if (std::abs(alpha - sc.alpha_minus) <= 1e-9 * (1.0 + std::abs(alpha))) return sc.b.front();
    return std::nullopt;
  }
  if (std::isnan(sc.b.front())) return std::nullopt;
  return sc.b.front();
}

inline std::optional<double> level_set_dimension(double alpha, const Scope& scope, const DepthKPotential& psi,
                                                 const GeometricPotential& zeta, const BetaGrid& grid = {}, unsigned threads = 0) {
  return level_set_dimension(alpha, free_energy_curve(psi, zeta, scope, grid, threads));
}

struct BowenResult {
  double dimension = 0.0;
  /// The symbolic value exceeds the dimension of the ambient space.
  bool exceeds_ambient = false;
};

/// dim_H J(Φ) = root s of P(sζ) = 0.
inline BowenResult bowen_dimension(const GeometricPotential& zeta, double ambient_dimension = 1.0, RootOptions opt = {}) {
  const Estimate e = delta(Scope::full(), zeta, opt);
  return {e.value, e.value > ambient_dimension + 1e-12};
}

}  // namespace freeshift
