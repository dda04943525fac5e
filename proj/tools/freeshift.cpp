#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "freeshift/cli.hpp"

namespace {

// "min:max:step" or "min:max"
std::vector<std::string> beta_range_overrides(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(":,"));
  if (parts.size() < 2 || parts.size() > 3) throw freeshift::ValidationError("--beta-range expects min:max[:step]");
  std::vector<std::string> out = {"grid.beta_min=" + parts[0], "grid.beta_max=" + parts[1]};
  if (parts.size() == 3) out.push_back("grid.beta_step=" + parts[2]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism for free-group shifts and their quotients"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir, beta_range;
  std::vector<std::string> sets;
  int threads = -1, n_max = -1;
  double tolerance = -1.0;
  app.add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--n-max", n_max, "fiber partition length cap")->check(CLI::PositiveNumber);
  app.add_option("--beta-range", beta_range, "beta grid as min:max[:step]");
  app.add_option("--tolerance", tolerance, "bisection tolerance")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "override a config entry, section.key=value");
  app.fallthrough();
  const std::map<std::string, std::string> help{
      {"pressure", "P(psi), P(zeta) on the full shift and the fiber, plus the period"},
      {"delta", "critical exponent t with P(-t zeta) = 0"},
      {"cogrowth", "fiber critical exponent and the amenability gap"},
      {"spectrum", "free energy curves and multifractal spectra"},
      {"dimension", "Bowen dimension of the limit set"},
      {"induced-edges", "first-return edge counts for the induced system"},
      {"partition", "fiber partition counts a_n and their growth rate"},
      {"diagnose", "verdict reports for the fiber against the full shift"}};
  for (const auto& name : freeshift::cli::subcommands()) app.add_subcommand(name, help.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc == 0) return 0;
    std::cout << freeshift::cli::error_json("validation", e.what(), 2).dump(2) << "\n";
    return 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    if (!out_dir.empty()) sets.push_back("output.dir=" + out_dir);
    if (threads >= 0) sets.push_back("run.threads=" + std::to_string(threads));
    if (n_max > 0) sets.push_back("budget.n_max=" + std::to_string(n_max));
    if (tolerance > 0) sets.push_back("tolerance.bisection=" + freeshift::io::format_double(tolerance));
    if (!beta_range.empty())
      for (auto& s : beta_range_overrides(beta_range)) sets.push_back(s);
    const auto config = freeshift::io::load_config(config_path, sets);
    return freeshift::cli::run(sub, config, std::cout, std::cerr);
  } catch (const freeshift::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << freeshift::cli::error_json(e.kind_name(), e.what(), e.exit_code()).dump(2) << "\n";
    return e.exit_code();
  }
}
