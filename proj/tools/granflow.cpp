#include <omp.h>

#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "granular/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"granular-media gradient-flow laboratory"};
  app.require_subcommand(1);

  std::string config, out = "out";
  unsigned long long seed = 0;
  bool seed_set = false;
  int threads = 0;
  const std::map<std::string, std::string> subs = {
      {"simulate", "run the configured experiment as-is"},
      {"stationary", "solve the self-consistent steady state"},
      {"contract", "two-solution contraction experiment"},
      {"converge", "multi-datum convergence-to-equilibrium experiment"},
      {"wj-probe", "Monte-Carlo lower bound on J/W2^2"},
      {"counterexample", "translation-probe decay table"},
      {"report", "run any experiment and print the summary table"},
  };
  for (const auto& [name, help] : subs) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("--config", config, "scenario config file")->required();
    sc->add_option("--out", out, "output directory (default: out)");
    sc->add_option("--seed", seed, "override the config seed list")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    sc->add_option("--threads", threads, "OpenMP thread count (default: runtime choice)");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) omp_set_num_threads(threads);
    const std::string sub = app.get_subcommands().front()->get_name();
    granular::Scenario s = granular::Scenario::from_config(granular::ConfigFile::parse_file(config));
    if (seed_set) s.seeds = {seed};

    const std::map<std::string, granular::Experiment> wants = {
        {"stationary", granular::Experiment::stationary_only},
        {"contract", granular::Experiment::contract_pair},
        {"converge", granular::Experiment::converge},
        {"wj-probe", granular::Experiment::wj_probe},
        {"counterexample", granular::Experiment::counterexample},
    };
    const auto want = wants.find(sub);
    if (want != wants.end() && s.experiment != want->second)
      throw std::invalid_argument("config experiment does not match the '" + sub +
                                  "' subcommand");

    const granular::ScenarioResult res = granular::run_scenario(s, out);
    if (sub == "report")
      for (const auto& row : res.summary) std::printf("%s\n", row.c_str());
    else
      std::printf("%s: %s (outputs in %s)\n", s.id.c_str(),
                  res.envelopes_ok ? "all envelopes hold" : "ENVELOPE VIOLATED", out.c_str());
    return res.envelopes_ok ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
