// Command-line front end. Talks to the library exclusively through the C
// interface, so it doubles as a smoke test of the shared-library boundary.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "foliashadow.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitConfigError = 2;

struct ScenarioDeleter {
  void operator()(fs_scenario* s) const { fs_scenario_free(s); }
};
using ScenarioPtr = std::unique_ptr<fs_scenario, ScenarioDeleter>;

int run_pipeline(const std::string& pipeline, const std::string& config,
                 const std::string& builtin, const std::string& out_dir,
                 uint64_t seed, bool seed_set, bool print_report) {
  fs_scenario* raw = nullptr;
  fs_status st;
  if (!config.empty())
    st = fs_scenario_from_file(config.c_str(), &raw);
  else if (!builtin.empty())
    st = fs_scenario_builtin(builtin.c_str(), &raw);
  else {
    std::fprintf(stderr, "error: provide --config or --builtin\n");
    return kExitConfigError;
  }
  if (st != FS_OK) {
    std::fprintf(stderr, "error: %s\n", fs_last_error());
    return kExitConfigError;
  }
  ScenarioPtr scenario(raw);

  if (seed_set) fs_scenario_set_seed(scenario.get(), seed);
  if (!out_dir.empty()) fs_scenario_set_output_dir(scenario.get(), out_dir.c_str());

  st = fs_scenario_run(scenario.get(), pipeline.c_str());
  const char* report = fs_scenario_report(scenario.get());
  if (print_report && report) std::fputs(report, stdout);

  if (st == FS_OK) return kExitPass;
  if (st == FS_ERR_VERIFICATION_FAILED) {
    std::fprintf(stderr, "verification failed: %s\n", fs_last_error());
    return kExitVerificationFailed;
  }
  std::fprintf(stderr, "error: %s\n", fs_last_error());
  return kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("foliashadow ") + fs_version() +
               " - foliation-relative dynamics experiments on flat tori"};
  app.require_subcommand(1);

  std::string config, builtin, out_dir;
  uint64_t seed = 0;
  bool print_report = false;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "scenario config file (JSON or key=value)");
    cmd->add_option("--builtin", builtin, "built-in scenario name");
    cmd->add_option("--out", out_dir, "output directory for reports");
    cmd->add_option("--seed", seed, "seed for randomized sampling");
    cmd->add_option("--threads", threads, "worker threads (reserved)");
    cmd->add_flag("--print-report", print_report, "echo the JSON report to stdout");
  };

  const char* pipelines[] = {"cr-set",           "shadow",   "semiconj",
                             "expansivity-scan", "quotient", "all"};
  const char* descriptions[] = {
      "chain-recurrent cell set (and optional periodic-leaf certificates)",
      "shadow randomized pseudo-orbits and re-validate the solutions",
      "build the set-valued conjugation and verify the stability contract",
      "search for pairs of nearby orbits that refuse to separate",
      "quotient dynamics on the leaf space and shadowing transfer",
      "every applicable pipeline in sequence"};
  for (int i = 0; i < 6; ++i) add_common(app.add_subcommand(pipelines[i], descriptions[i]));

  app.add_subcommand("list", "list built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  if (sub->get_name() == "list") {
    std::fputs(fs_list_builtin_scenarios(), stdout);
    return kExitPass;
  }
  bool seed_set = sub->count("--seed") > 0;
  return run_pipeline(sub->get_name(), config, builtin, out_dir, seed, seed_set,
                      print_report);
}
