#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "granular/dynamics.hpp"
#include "granular/measure.hpp"
#include "granular/potentials.hpp"

namespace granular {

/// Flat key = value config with [section] headers and # comments; one
/// scenario per file. All values are kept as strings; typed getters throw on
/// missing required keys or malformed numbers.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key) const;
  double get_real_or(const std::string& section, const std::string& key, double fallback) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class Experiment { converge, contract_pair, wj_probe, counterexample, stationary_only };

/// One initial datum: gaussian(mean,sigma) | uniform(a,b) | bimodal(c,sigma).
struct InitialSpec {
  std::string label;
  std::string kind;
  std::vector<double> params;

  static InitialSpec parse(const std::string& text);
  GridMeasure build(double lo, double hi, int m) const;
};

/// A fully parsed experiment description. Experiment-specific extras stay in
/// `raw` and are read back by run_scenario with documented defaults (see the
/// config schema in the README).
struct Scenario {
  std::string id;
  Experiment experiment = Experiment::converge;
  PotentialSpec v;
  PotentialSpec w;
  SolverConfig solver;
  std::vector<InitialSpec> initial;
  std::vector<std::uint64_t> seeds;
  ConfigFile raw;

  static Scenario from_config(const ConfigFile& cfg);
};

struct ScenarioResult {
  bool envelopes_ok = true;
  /// summary.csv content, header included, also written to out_dir.
  std::vector<std::string> summary;
};

/// Runs the configured experiment end to end, writing trajectory/table CSVs,
/// SVG charts and summary.csv into out_dir (created if needed). Outputs are
/// byte-identical across runs for identical config and seeds. Every summary
/// row citing a theoretical reference value names the bound it came from in
/// the provenance column.
ScenarioResult run_scenario(const Scenario& s, const std::string& out_dir);

}  // namespace granular
