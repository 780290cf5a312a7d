// Command line runner: executes configured experiment suites on discretized
// rough domains and consolidates their reports.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "roughbv/config.hpp"
#include "roughbv/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rough-boundary value problem experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, baseline;
  long long seed = -1;
  int jobs = 0;
  std::vector<std::string> report_dirs;

  auto* run = app.add_subcommand("run", "execute the experiments listed in a config file");
  run->add_option("config", config_path, "path to a key=value config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");
  run->add_option("--seed", seed, "seed override");
  run->add_option("--jobs", jobs, "worker pool size override");

  auto* rep = app.add_subcommand("report", "consolidate one or more run directories");
  rep->add_option("dirs", report_dirs, "artifact directories produced by run")->required();
  rep->add_option("--baseline", baseline, "baseline file: 'experiment domain key value' lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      roughbv::RunConfig cfg = roughbv::load_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
      if (jobs > 0) cfg.jobs = jobs;
      return roughbv::cmd_run(cfg);
    }
    return roughbv::cmd_report(report_dirs, baseline);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
