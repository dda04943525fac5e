#pragma once

// File formats: potential CSVs, finite-group tables, the INI run config,
// CSV output with 12 significant digits and JSON report serialization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

#include "freeshift/diagnostics.hpp"
#include "freeshift/error.hpp"
#include "freeshift/potential.hpp"
#include "freeshift/quotient.hpp"
#include "freeshift/spectra.hpp"
#include "freeshift/word.hpp"

namespace freeshift::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line, const char* seps = ", \t") {
  std::vector<std::string> out;
  boost::split(out, line, boost::is_any_of(seps), boost::token_compress_on);
  out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& s) { return s.empty(); }), out.end());
  return out;
}

inline double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(where + ": '" + s + "' is not a number");
  }
}

inline long long to_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(where + ": '" + s + "' is not an integer");
  }
}

/// Non-empty lines with '#' comments stripped.
inline std::vector<std::pair<int, std::string>> content_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    boost::trim(line);
    if (!line.empty()) out.emplace_back(no, line);
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& where) {
  std::vector<double> out;
  for (const auto& f : split_fields(text)) out.push_back(to_double(f, where));
  return out;
}

}  // namespace detail

/// Depth-k table from CSV rows `l_1,...,l_k,value` (letters 0..2d-1, x^1 the
/// inverse of x). Every reduced word of length k must appear once. An
/// optional non-numeric header row and '#' comments are skipped.
inline DepthKPotential parse_potential_csv(const Alphabet& alpha, const std::string& text, const std::string& name = "table") {
  auto lines = detail::content_lines(text);
  if (!lines.empty()) {
    const auto first = detail::split_fields(lines.front().second);
    if (!first.empty() && !std::isdigit(static_cast<unsigned char>(first.front()[0])) && first.front()[0] != '-')
      lines.erase(lines.begin());
  }
  if (lines.empty()) throw ValidationError(name + ": no rows");
  const int depth = static_cast<int>(detail::split_fields(lines.front().second).size()) - 1;
  if (depth < 1) throw ValidationError(name + ": rows need at least one letter and a value");
  const WordIndexer idx(alpha, depth);
  std::vector<double> table(idx.count(), 0.0);
  std::vector<bool> seen(idx.count(), false);
  for (const auto& [no, line] : lines) {
    const std::string where = name + ":" + std::to_string(no);
    const auto f = detail::split_fields(line);
    if (static_cast<int>(f.size()) != depth + 1) throw ValidationError(where + ": expected " + std::to_string(depth + 1) + " fields");
    std::vector<Letter> w;
    for (int i = 0; i < depth; ++i) {
      const auto x = detail::to_int(f[static_cast<std::size_t>(i)], where);
      if (x < 0 || x >= alpha.size()) throw ValidationError(where + ": letter " + std::to_string(x) + " out of range");
      w.push_back(static_cast<Letter>(x));
    }
    if (!is_reduced(alpha, w)) throw ValidationError(where + ": window is not a reduced word");
    const std::size_t i = idx.encode(w);
    if (seen[i]) throw ValidationError(where + ": duplicate window");
    seen[i] = true;
    table[i] = detail::to_double(f.back(), where);
  }
  const auto missing = std::count(seen.begin(), seen.end(), false);
  if (missing > 0) throw ValidationError(name + ": " + std::to_string(missing) + " windows of length " + std::to_string(depth) + " missing");
  return DepthKPotential(alpha, depth, std::move(table), name);
}

inline DepthKPotential load_potential_csv(const Alphabet& alpha, const fs::path& path) {
  return parse_potential_csv(alpha, read_text(path), path.filename().string());
}

/// The same CSV layout with contraction ratios in (0,1) as values.
inline GeometricPotential load_ratio_csv(const Alphabet& alpha, const fs::path& path) {
  const auto t = load_potential_csv(alpha, path);
  return geometric_from_ratio_table(alpha, t.depth(), t.values());
}

/// First line `order identity`, then `order` rows of `order` entries; entry
/// (i, j) is the index of g_i g_j.
inline GroupTable parse_group_table(const std::string& text, const std::string& name = "group table") {
  const auto lines = detail::content_lines(text);
  if (lines.empty()) throw ValidationError(name + ": empty");
  const auto head = detail::split_fields(lines.front().second);
  if (head.size() != 2) throw ValidationError(name + ": first line must be 'order identity'");
  GroupTable t;
  t.order = static_cast<int>(detail::to_int(head[0], name));
  t.identity = static_cast<int>(detail::to_int(head[1], name));
  if (t.order < 1) throw ValidationError(name + ": order must be >= 1");
  if (lines.size() != static_cast<std::size_t>(t.order) + 1)
    throw ValidationError(name + ": expected " + std::to_string(t.order) + " rows, got " + std::to_string(lines.size() - 1));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto f = detail::split_fields(lines[r].second);
    const std::string where = name + ":" + std::to_string(lines[r].first);
    if (f.size() != static_cast<std::size_t>(t.order)) throw ValidationError(where + ": row has wrong length");
    for (const auto& s : f) t.product.push_back(static_cast<std::int32_t>(detail::to_int(s, where)));
  }
  return t;
}

inline GroupTable load_group_table(const fs::path& path) { return parse_group_table(read_text(path), path.filename().string()); }

/// CSV text built row by row; floats use 12 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { line(header); }

  CsvWriter& row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("CSV row width mismatch");
    line(cells);
    return *this;
  }

  const std::string& str() const noexcept { return text_; }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  std::size_t columns_;
  std::string text_;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Parsed and validated run configuration.
struct RunConfig {
  int d = 0;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  double ambient_dimension = 1.0;

  std::string quotient_type = "none";
  std::string quotient_table;
  std::string quotient_images;
  int quotient_rank = 0;
  std::string quotient_kill;

  std::vector<double> zeta_ratios;
  std::optional<double> zeta_log_value;
  std::string zeta_table;

  double psi_constant = -1.0;
  std::string psi_table;

  BetaGrid beta{};
  std::size_t alpha_points = 101;

  double eigen_tolerance = 1e-13;
  double bisection_tolerance = 1e-10;
  double sigma_factor = 3.0;

  int n_max = 24;
  std::size_t memory_mb = 1024;
  int n_search = 24;
  int induced_len = 8;

  std::string cosets;
  int gibbs_length = 8;
  std::vector<double> diagnose_betas{-1.0, 0.0, 1.0};

  std::string out_dir = "out";
  /// Directory relative paths in the config are resolved against.
  fs::path base_dir = ".";
  /// Hash of the effective key/value set, output.dir excluded.
  std::string hash;

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
};

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"run", {"d", "threads", "seed", "ambient_dimension"}},
      {"quotient", {"type", "table", "images", "rank", "kill"}},
      {"zeta", {"ratios", "log_value", "table"}},
      {"psi", {"constant", "table"}},
      {"grid", {"beta_min", "beta_max", "beta_step", "alpha_points"}},
      {"tolerance", {"eigen", "bisection", "sigma_factor"}},
      {"budget", {"n_max", "memory_mb", "n_search", "induced_len"}},
      {"diagnose", {"cosets", "gibbs_length", "betas"}},
      {"output", {"dir"}},
  };
  return keys;
}

}  // namespace detail

/// Builds a RunConfig from INI text plus `section.key=value` overrides that
/// take precedence over the file.
inline RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                              const fs::path& base_dir = ".") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  std::map<std::string, std::string> kv;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ValidationError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) kv[section + "." + key] = boost::trim_copy(value.data());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || o.find('.') > eq) throw ValidationError("override '" + o + "' is not section.key=value");
    kv[boost::trim_copy(o.substr(0, eq))] = boost::trim_copy(o.substr(eq + 1));
  }
  for (const auto& [full, value] : kv) {
    const auto dot = full.find('.');
    const auto section = full.substr(0, dot), key = full.substr(dot + 1);
    const auto& keys = detail::known_keys();
    const auto it = keys.find(section);
    if (it == keys.end()) throw ValidationError("config: unknown section [" + section + "]");
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
      throw ValidationError("config: unknown key '" + key + "' in [" + section + "]");
  }

  // The output location does not change any result, so it stays out of the hash.
  std::string canonical;
  for (const auto& [k, v] : kv)
    if (k != "output.dir") canonical += k + "=" + v + "\n";

  auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = kv.find(k);
    if (it == kv.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  auto get_int = [&](const std::string& k, long long dflt) {
    const auto v = get(k);
    return v ? detail::to_int(*v, "config " + k) : dflt;
  };
  auto get_double = [&](const std::string& k, double dflt) {
    const auto v = get(k);
    return v ? detail::to_double(*v, "config " + k) : dflt;
  };

  RunConfig c;
  c.base_dir = base_dir;
  c.hash = fnv1a_hex(canonical);
  if (!get("run.d")) throw ValidationError("config: [run] d is required");
  c.d = static_cast<int>(get_int("run.d", 0));
  if (c.d < 2 || c.d > 64) throw ValidationError("config: d must be in [2, 64]");
  const auto threads = get_int("run.threads", 0);
  if (threads < 0) throw ValidationError("config: threads must be >= 0");
  c.threads = static_cast<unsigned>(threads);
  c.seed = static_cast<std::uint64_t>(get_int("run.seed", 1));
  c.ambient_dimension = get_double("run.ambient_dimension", 1.0);

  c.quotient_type = get("quotient.type").value_or("none");
  c.quotient_table = get("quotient.table").value_or("");
  c.quotient_images = get("quotient.images").value_or("");
  c.quotient_rank = static_cast<int>(get_int("quotient.rank", 0));
  c.quotient_kill = get("quotient.kill").value_or("");
  static const std::vector<std::string> types = {"none", "finite", "abelian", "lattice", "kill", "z2", "s3"};
  if (std::find(types.begin(), types.end(), c.quotient_type) == types.end())
    throw ValidationError("config: unknown quotient type '" + c.quotient_type + "'");

  if (auto r = get("zeta.ratios")) c.zeta_ratios = detail::parse_list(*r, "config zeta.ratios");
  if (auto l = get("zeta.log_value")) c.zeta_log_value = detail::to_double(*l, "config zeta.log_value");
  c.zeta_table = get("zeta.table").value_or("");
  const int zeta_sources = !c.zeta_ratios.empty() + c.zeta_log_value.has_value() + !c.zeta_table.empty();
  if (zeta_sources != 1) throw ValidationError("config: [zeta] needs exactly one of ratios, log_value, table");

  c.psi_constant = get_double("psi.constant", -1.0);
  c.psi_table = get("psi.table").value_or("");

  c.beta.min = get_double("grid.beta_min", c.beta.min);
  c.beta.max = get_double("grid.beta_max", c.beta.max);
  c.beta.step = get_double("grid.beta_step", c.beta.step);
  c.beta.points();
  const auto ap = get_int("grid.alpha_points", 101);
  if (ap < 2) throw ValidationError("config: alpha_points must be >= 2");
  c.alpha_points = static_cast<std::size_t>(ap);

  c.eigen_tolerance = get_double("tolerance.eigen", c.eigen_tolerance);
  c.bisection_tolerance = get_double("tolerance.bisection", c.bisection_tolerance);
  c.sigma_factor = get_double("tolerance.sigma_factor", c.sigma_factor);
  if (!(c.eigen_tolerance > 0) || !(c.bisection_tolerance > 0) || !(c.sigma_factor > 0))
    throw ValidationError("config: tolerances must be positive");

  c.n_max = static_cast<int>(get_int("budget.n_max", c.n_max));
  const auto mem = get_int("budget.memory_mb", static_cast<long long>(c.memory_mb));
  c.n_search = static_cast<int>(get_int("budget.n_search", c.n_search));
  c.induced_len = static_cast<int>(get_int("budget.induced_len", c.induced_len));
  if (c.n_max < 1 || mem < 1 || c.n_search < 1 || c.induced_len < 1) throw ValidationError("config: budgets must be >= 1");
  c.memory_mb = static_cast<std::size_t>(mem);

  c.cosets = get("diagnose.cosets").value_or("");
  c.gibbs_length = static_cast<int>(get_int("diagnose.gibbs_length", c.gibbs_length));
  if (auto b = get("diagnose.betas")) c.diagnose_betas = detail::parse_list(*b, "config diagnose.betas");

  c.out_dir = get("output.dir").value_or(c.out_dir);
  return c;
}

inline RunConfig load_config(const fs::path& path, const std::vector<std::string>& overrides = {}) {
  return parse_config(read_text(path), overrides, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

/// The quotient named by the config, or nullopt for `none`.
inline std::optional<Quotient> make_quotient(const RunConfig& c) {
  const Alphabet alpha(c.d);
  const auto& t = c.quotient_type;
  if (t == "none") return std::nullopt;
  if (t == "z2") return Quotient::cyclic2(alpha);
  if (t == "s3") {
    if (c.d != 2) throw ValidationError("s3 quotient is defined on F_2");
    return Quotient::symmetric3(alpha);
  }
  if (t == "lattice") {
    if (c.quotient_rank < 1 || c.quotient_rank > c.d) throw ValidationError("lattice rank must be in [1, d]");
    return Quotient::standard_lattice(alpha, c.quotient_rank);
  }
  if (t == "kill") {
    std::vector<int> killed;
    for (const auto& s : detail::split_fields(c.quotient_kill)) killed.push_back(static_cast<int>(detail::to_int(s, "quotient.kill")) - 1);
    if (killed.empty()) throw ValidationError("kill quotient needs [quotient] kill = generator numbers (1-based)");
    return Quotient::free_kill(alpha, killed);
  }
  if (t == "abelian") {
    std::vector<std::vector<std::int64_t>> images;
    for (const auto& part : detail::split_fields(c.quotient_images, ";")) {
      std::vector<std::int64_t> v;
      for (const auto& s : detail::split_fields(part)) v.push_back(detail::to_int(s, "quotient.images"));
      images.push_back(std::move(v));
    }
    const int rank = c.quotient_rank > 0 ? c.quotient_rank : (images.empty() ? 0 : static_cast<int>(images.front().size()));
    return Quotient::free_abelian(alpha, rank, std::move(images));
  }
  // finite
  if (c.quotient_table.empty()) throw ValidationError("finite quotient needs [quotient] table");
  std::vector<int> images;
  for (const auto& s : detail::split_fields(c.quotient_images)) images.push_back(static_cast<int>(detail::to_int(s, "quotient.images")));
  return Quotient::finite_group(alpha, load_group_table(c.resolve(c.quotient_table)), std::move(images));
}

inline GeometricPotential make_zeta(const RunConfig& c) {
  const Alphabet alpha(c.d);
  if (!c.zeta_ratios.empty()) return geometric_from_ratios(alpha, c.zeta_ratios);
  if (c.zeta_log_value) return constant_geometric(alpha, *c.zeta_log_value);
  return load_ratio_csv(alpha, c.resolve(c.zeta_table));
}

inline DepthKPotential make_psi(const RunConfig& c) {
  const Alphabet alpha(c.d);
  if (!c.psi_table.empty()) return load_potential_csv(alpha, c.resolve(c.psi_table));
  return DepthKPotential::constant(alpha, c.psi_constant, "psi");
}

inline json to_json(const Estimate& e) { return json{{"value", e.value}, {"sigma", e.sigma}, {"method", to_string(e.method)}}; }

inline json quantity_json(const std::string& name, const Estimate& e) {
  return json{{"quantity", name}, {"value", e.value}, {"sigma", e.sigma}, {"method", to_string(e.method)}};
}

inline json to_json(const VerdictReport& r) {
  json j;
  j["report"] = to_string(r.kind);
  j["scope"] = r.scope;
  j["rule"] = {{"sigma_factor", r.rule.sigma_factor},
               {"strict_margin", r.rule.strict_margin},
               {"exact_floor", r.rule.exact_floor},
               {"gamma_band", r.rule.gamma_band}};
  j["quantities"] = json::array();
  for (const auto& q : r.quantities) j["quantities"].push_back(quantity_json(q.name, {q.value, q.sigma, q.method}));
  j["checks"] = json::array();
  for (const auto& c : r.checks) j["checks"].push_back({{"quantity", c.name}, {"slack", c.slack}, {"sigma", c.sigma}, {"verdict", c.verdict}});
  j["classification"] = r.classification;
  j["notes"] = r.notes;
  return j;
}

/// Inverse of to_json for reports, so saved reports can be re-verified.
inline VerdictReport report_from_json(const json& j) {
  static const std::map<std::string, ReportKind> kinds = {{"amenability", ReportKind::amenability},
                                                          {"half_bound", ReportKind::half_bound},
                                                          {"pressure_inequality", ReportKind::pressure_inequality},
                                                          {"divergence", ReportKind::divergence},
                                                          {"gibbs", ReportKind::gibbs}};
  VerdictReport r;
  r.kind = kinds.at(j.at("report").get<std::string>());
  r.scope = j.at("scope").get<std::string>();
  const auto& rule = j.at("rule");
  r.rule = {rule.at("sigma_factor").get<double>(), rule.at("strict_margin").get<double>(), rule.at("exact_floor").get<double>(),
            rule.at("gamma_band").get<double>()};
  for (const auto& q : j.at("quantities"))
    r.quantities.push_back({q.at("quantity").get<std::string>(), q.at("value").get<double>(), q.at("sigma").get<double>(),
                            q.at("method").get<std::string>() == "exact" ? Method::exact_eigenvalue : Method::extrapolated});
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("quantity").get<std::string>(), c.at("slack").get<double>(), c.at("sigma").get<double>(),
                        c.at("verdict").get<std::string>()});
  r.classification = j.at("classification").get<std::string>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

inline std::string curve_csv(const FreeEnergyCurve& c) {
  CsvWriter w({"beta [1]", "t [dimension]", "method", "sigma [dimension]"});
  for (std::size_t i = 0; i < c.beta.size(); ++i)
    w.row({format_double(c.beta[i]), format_double(c.t[i]), to_string(c.method[i]), format_double(c.sigma[i])});
  return w.str();
}

inline std::string spectrum_csv(const SpectrumCurve& s, double sigma) {
  CsvWriter w({"alpha [1]", "b [dimension]", "flag", "method", "sigma [dimension]"});
  for (std::size_t i = 0; i < s.alpha.size(); ++i) {
    std::string flag = std::isnan(s.b[i]) ? "outside" : (s.at_grid_edge[i] ? "grid_edge" : "interior");
    if (s.degenerate) flag = "point";
    w.row({format_double(s.alpha[i]), format_double(s.b[i]), flag, sigma > 0 ? "extrapolated" : "exact", format_double(sigma)});
  }
  return w.str();
}

}  // namespace freeshift::io
