// loghe: spectral Galerkin simulator and verification suite for the
// stochastic heat equation with logarithmic drift on an interval.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "loghe/config.hpp"
#include "loghe/errors.hpp"
#include "loghe/experiments.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int workers = 0;
  bool no_assert = false;
};

int run(const std::string& experiment, const CliArgs& args) {
  loghe::ExperimentSpec spec = loghe::parse_config(args.config_path);
  if (spec.experiment != experiment)
    throw loghe::ConfigError("config declares experiment '" + spec.experiment +
                             "' but the '" + experiment + "' subcommand was invoked");

  // seed precedence: flag beats LOGHE_SEED beats config
  if (const char* env = std::getenv("LOGHE_SEED"); env && *env)
    spec.sim.seed = std::strtoull(env, nullptr, 10);
  if (args.seed >= 0) spec.sim.seed = static_cast<std::uint64_t>(args.seed);

  loghe::RunOptions opt;
  opt.out_dir = args.out_dir;
  opt.workers = args.workers;
  opt.no_assert = args.no_assert;

  const loghe::ExperimentReport report = loghe::run_experiment(spec, opt);
  const std::string dir = args.out_dir.empty() ? spec.out_dir : args.out_dir;
  std::printf("%s: %s (outputs in %s)\n", experiment.c_str(),
              report.passed ? "pass" : "FAIL", dir.c_str());
  for (const auto& f : report.failures) std::printf("  assertion failed: %s\n", f.c_str());
  if (args.no_assert) return 0;
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loghe: stochastic heat equation with logarithmic drift"};
  app.require_subcommand(1);

  static const char* kExperiments[] = {"simulate", "verify",   "uniqueness", "moments",
                                       "lyapunov", "converge", "schedule"};
  CliArgs args;
  for (const char* name : kExperiments) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config_path, "experiment config file")->required();
    sub->add_option("--seed", args.seed, "master seed (beats LOGHE_SEED and config)");
    sub->add_option("--workers", args.workers, "worker threads (0 = all)");
    sub->add_option("--out", args.out_dir, "output directory (beats config)");
    sub->add_flag("--no-assert", args.no_assert, "report-only mode, always exit 0");
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return run(app.get_subcommands().front()->get_name(), args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
