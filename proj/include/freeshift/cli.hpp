#pragma once

// Subcommand dispatch for the freeshift tool. Each subcommand writes its
// artifacts into the output directory and prints a JSON summary to `out`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <string>
#include <vector>

#include "freeshift/diagnostics.hpp"
#include "freeshift/error.hpp"
#include "freeshift/io.hpp"
#include "freeshift/pressure.hpp"
#include "freeshift/quotient.hpp"
#include "freeshift/spectra.hpp"

namespace freeshift::cli {

namespace fs = std::filesystem;
using io::json;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"pressure",      "delta",     "cogrowth", "spectrum", "dimension",
                                             "induced-edges", "partition", "diagnose"};
  return s;
}

struct Context {
  const io::RunConfig& config;
  Alphabet alphabet;
  std::optional<Quotient> quotient;
  GeometricPotential zeta;
  DepthKPotential psi;
  FiberOptions fiber;
  EigenOptions eigen;
  RootOptions root;
  DecisionRule rule;
  fs::path out_dir;

  explicit Context(const io::RunConfig& c)
      : config(c),
        alphabet(c.d),
        quotient(io::make_quotient(c)),
        zeta(io::make_zeta(c)),
        psi(io::make_psi(c)),
        fiber{c.n_max, Budget{c.memory_mb << 20}},
        eigen{c.eigen_tolerance, EigenOptions{}.max_iterations},
        out_dir(c.out_dir) {
    root.tolerance = c.bisection_tolerance;
    root.extrapolated_tolerance = std::max(c.bisection_tolerance, RootOptions{}.extrapolated_tolerance);
    rule.sigma_factor = c.sigma_factor;
    if (!(psi.alphabet() == zeta.alphabet())) throw ValidationError("psi and zeta over different alphabets");
  }

  const Quotient& require_quotient(const std::string& what) const {
    if (!quotient) throw ValidationError(what + " needs a quotient ([quotient] type other than none)");
    return *quotient;
  }

  Scope full() const { return Scope::full(eigen); }
  Scope restricted() const { return Scope::restricted(*quotient, fiber, eigen); }

  json envelope(const std::string& sub) const {
    return json{{"subcommand", sub}, {"config_hash", config.hash}, {"scope", quotient ? quotient->describe() : "full shift"}};
  }

  void write(const std::string& name, const std::string& text) const {
    fs::create_directories(out_dir);
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + (out_dir / name).string());
    f << text;
  }
};

inline json cmd_pressure(const Context& ctx) {
  json j = ctx.envelope("pressure");
  j["quantities"] = json::array();
  const std::pair<const char*, const DepthKPotential*> fs_[] = {{"psi", &ctx.psi}, {"zeta", &ctx.zeta.potential()}};
  for (const auto& [name, f] : fs_) {
    j["quantities"].push_back(io::quantity_json(std::string("P(") + name + ")", {full_pressure(*f, ctx.eigen), 0.0, Method::exact_eigenvalue}));
    if (ctx.quotient)
      j["quantities"].push_back(io::quantity_json(std::string("P(") + name + ",N)", restricted_pressure(*f, *ctx.quotient, ctx.fiber, ctx.eigen)));
  }
  if (ctx.quotient) {
    const auto p = period(*ctx.quotient, ctx.config.n_search, ctx.fiber.budget);
    j["period"] = {{"value", p.period}, {"stabilized", p.stabilized}, {"n_search", p.n_search}};
  }
  return j;
}

inline json cmd_delta(const Context& ctx) {
  json j = ctx.envelope("delta");
  j["quantities"] = json::array();
  j["quantities"].push_back(io::quantity_json("delta", delta(ctx.full(), ctx.zeta, ctx.root)));
  if (ctx.quotient) j["quantities"].push_back(io::quantity_json("delta_N", delta(ctx.restricted(), ctx.zeta, ctx.root)));
  return j;
}

inline json cmd_cogrowth(const Context& ctx) {
  const Quotient& q = ctx.require_quotient("cogrowth");
  json j = ctx.envelope("cogrowth");
  const auto zeta = constant_geometric(ctx.alphabet, -1.0);
  j["quantities"] = json::array();
  j["quantities"].push_back(io::quantity_json("eta", cogrowth(q, ctx.fiber, ctx.eigen)));
  j["quantities"].push_back(io::quantity_json("delta_N", delta(ctx.restricted(), zeta, ctx.root)));
  j["quantities"].push_back(io::quantity_json("delta", delta(ctx.full(), zeta, ctx.root)));
  return j;
}

inline json spectrum_summary(const FreeEnergyCurve& c, const SpectrumCurve& s) {
  double peak = -std::numeric_limits<double>::infinity(), at = 0.0, sigma = 0.0;
  for (std::size_t i = 0; i < s.alpha.size(); ++i)
    if (!std::isnan(s.b[i]) && s.b[i] > peak) {
      peak = s.b[i];
      at = s.alpha[i];
    }
  for (double v : c.sigma) sigma = std::max(sigma, v);
  const char* method = sigma > 0 ? "extrapolated" : "exact";
  return json{{"scope", s.scope},
              {"alpha_minus", {{"value", s.alpha_minus}, {"sigma", sigma}, {"method", method}, {"grid_estimate", true}}},
              {"alpha_plus", {{"value", s.alpha_plus}, {"sigma", sigma}, {"method", method}, {"grid_estimate", true}}},
              {"peak", {{"value", peak}, {"sigma", sigma}, {"method", method}, {"alpha", at}}},
              {"degenerate", s.degenerate}};
}

inline json cmd_spectrum(const Context& ctx) {
  json j = ctx.envelope("spectrum");
  const BetaGrid& grid = ctx.config.beta;
  const auto full = free_energy_curve(ctx.psi, ctx.zeta, ctx.full(), grid, ctx.config.threads, ctx.root);
  const auto alphas = default_alpha_grid(full, ctx.config.alpha_points);
  const auto sf = legendre(full, alphas);
  ctx.write("free_energy_full.csv", io::curve_csv(full));
  ctx.write("spectrum_full.csv", io::spectrum_csv(sf, 0.0));
  j["curves"] = json::array();
  j["curves"].push_back(spectrum_summary(full, sf));
  j["files"] = {"free_energy_full.csv", "spectrum_full.csv"};
  if (ctx.quotient) {
    const auto sub = free_energy_curve(ctx.psi, ctx.zeta, ctx.restricted(), grid, ctx.config.threads, ctx.root);
    const auto sq = legendre(sub, alphas);
    double sigma = 0.0;
    for (double v : sub.sigma) sigma = std::max(sigma, v);
    ctx.write("free_energy_quotient.csv", io::curve_csv(sub));
    ctx.write("spectrum_quotient.csv", io::spectrum_csv(sq, sigma));
    j["curves"].push_back(spectrum_summary(sub, sq));
    j["files"].push_back("free_energy_quotient.csv");
    j["files"].push_back("spectrum_quotient.csv");
  }
  return j;
}

inline json cmd_dimension(const Context& ctx) {
  json j = ctx.envelope("dimension");
  const auto b = bowen_dimension(ctx.zeta, ctx.config.ambient_dimension, ctx.root);
  j["quantities"] = json::array({io::quantity_json("dim_H", {b.dimension, 0.0, Method::exact_eigenvalue})});
  j["exceeds_ambient"] = b.exceeds_ambient;
  if (b.exceeds_ambient) j["note"] = "symbolic root exceeds the ambient dimension; the contraction data is not a valid conformal system";
  return j;
}

inline json cmd_induced_edges(const Context& ctx) {
  const Quotient& q = ctx.require_quotient("induced-edges");
  const int L = ctx.config.induced_len;
  const auto words = first_return_words(q, L, ctx.fiber.budget);
  io::CsvWriter w({"length [letters]", "word", "letters"});
  std::vector<std::size_t> per_length(static_cast<std::size_t>(L) + 1, 0);
  for (const auto& word : words) {
    std::string letters;
    for (Letter x : word) letters += (letters.empty() ? "" : " ") + std::to_string(x);
    w.row({std::to_string(word.size()), to_string(word), letters});
    ++per_length[word.size()];
  }
  ctx.write("induced_edges.csv", w.str());
  json j = ctx.envelope("induced-edges");
  j["max_length"] = L;
  j["count"] = {{"value", words.size()}, {"sigma", 0.0}, {"method", "exact"}};
  j["per_length"] = per_length;
  j["files"] = {"induced_edges.csv"};
  return j;
}

inline json cmd_partition(const Context& ctx) {
  const Quotient& q = ctx.require_quotient("partition");
  const auto f = DepthKPotential::constant(ctx.alphabet, 0.0);
  const auto s = fiber_partition(f, q, ctx.fiber);
  io::CsvWriter w({"n [letters]", "a_n [count]", "log_a_n [nats]", "method", "sigma [count]"});
  for (int n = 1; n <= s.n_max(); ++n) {
    const double lt = s.log_terms[static_cast<std::size_t>(n)];
    w.row({std::to_string(n), io::format_double(std::isfinite(lt) ? std::exp(lt) : 0.0), io::format_double(lt), "exact", "0"});
  }
  ctx.write("partition.csv", w.str());
  json j = ctx.envelope("partition");
  j["n_max"] = s.n_max();
  j["period"] = s.period;
  if (q.is_finite() || s.nonzero_count() >= 4)
    j["quantities"] = json::array({io::quantity_json("growth_rate", restricted_pressure(f, q, ctx.fiber, ctx.eigen))});
  j["files"] = {"partition.csv"};
  return j;
}

inline json cmd_diagnose(const Context& ctx) {
  const Quotient& q = ctx.require_quotient("diagnose");
  json j = ctx.envelope("diagnose");
  j["reports"] = json::array();
  j["skipped"] = json::array();
  j["reports"].push_back(io::to_json(amenability_report(q, ctx.psi, ctx.zeta, ctx.config.diagnose_betas, ctx.fiber, ctx.rule)));
  j["reports"].push_back(io::to_json(half_bound_check(q, ctx.psi, ctx.zeta, ctx.config.beta, 21, ctx.fiber, ctx.rule, ctx.config.threads)));
  j["reports"].push_back(io::to_json(pressure_inequality_check(q, DepthKPotential::constant(ctx.alphabet, 0.0), ctx.fiber, ctx.rule)));
  if (ctx.psi.is_inverse_symmetric(1e-12))
    j["reports"].push_back(io::to_json(pressure_inequality_check(q, ctx.psi, ctx.fiber, ctx.rule)));
  else
    j["skipped"].push_back("pressure inequality for psi: psi is not inversion-symmetric");
  if (!q.is_finite())
    j["reports"].push_back(io::to_json(divergence_probe(q, DepthKPotential::constant(ctx.alphabet, 0.0), ctx.fiber, ctx.rule)));
  else
    j["skipped"].push_back("divergence probe: finite quotient, fiber sums grow without a polynomial prefactor");
  if (ctx.psi.depth() == 1)
    j["reports"].push_back(io::to_json(gibbs_verify(ctx.psi, ctx.config.gibbs_length, ctx.eigen).report));
  else
    j["skipped"].push_back("gibbs verification: psi has depth > 1");
  if (!ctx.config.cosets.empty()) {
    std::vector<ReducedWord> reps;
    for (const auto& s : io::detail::split_fields(ctx.config.cosets, ",; \t")) reps.push_back(parse_word(ctx.alphabet, s));
    const auto sym = symmetric_on_average_statistic(q, ctx.psi, reps, ctx.config.n_max, ctx.fiber.budget);
    json entries = json::array();
    for (const auto& e : sym.per_g) entries.push_back({{"g", e.g}, {"value", e.ratio}, {"sigma", 0.0}, {"method", "exact"}});
    j["symmetric_on_average"] = {{"quantity", "max ratio over supplied representatives"},
                                 {"value", sym.max_ratio},
                                 {"sigma", 0.0},
                                 {"method", "exact"},
                                 {"n", ctx.config.n_max},
                                 {"per_g", entries},
                                 {"note", "finite surrogate over user-supplied coset representatives"}};
  }
  return j;
}

inline json error_json(const std::string& kind, const std::string& message, int code) {
  return json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
}

/// Runs one subcommand. Returns the process exit code.
inline int run(const std::string& sub, const io::RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Context ctx(config);
    json j;
    if (sub == "pressure") j = cmd_pressure(ctx);
    else if (sub == "delta") j = cmd_delta(ctx);
    else if (sub == "cogrowth") j = cmd_cogrowth(ctx);
    else if (sub == "spectrum") j = cmd_spectrum(ctx);
    else if (sub == "dimension") j = cmd_dimension(ctx);
    else if (sub == "induced-edges") j = cmd_induced_edges(ctx);
    else if (sub == "partition") j = cmd_partition(ctx);
    else if (sub == "diagnose") j = cmd_diagnose(ctx);
    else throw ValidationError("unknown subcommand '" + sub + "'");
    const std::string text = j.dump(2) + "\n";
    std::string file = sub;
    std::replace(file.begin(), file.end(), '-', '_');
    ctx.write(file + ".json", text);
    out << text;
    return 0;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    json j = error_json(e.kind_name(), e.what(), e.exit_code());
    j["error"]["required_bytes"] = e.required_bytes();
    j["error"]["budget_bytes"] = e.budget_bytes();
    out << j.dump(2) << "\n";
    return e.exit_code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    out << error_json(e.kind_name(), e.what(), e.exit_code()).dump(2) << "\n";
    return e.exit_code();
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    out << error_json("resource", "out of memory", 3).dump(2) << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    out << error_json("validation", e.what(), 2).dump(2) << "\n";
    return 2;
  }
}

}  // namespace freeshift::cli
