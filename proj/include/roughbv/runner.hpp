#pragma once

#include <string>
#include <vector>

#include "roughbv/config.hpp"
#include "roughbv/experiments.hpp"

namespace roughbv {

// Executes the configured experiments over a worker pool and writes the
// artifact directory: summary.csv, report.txt, records/*.txt, plots/*.svg.
// Returns 0 iff every experiment passed its declared checks.
int cmd_run(const RunConfig& cfg);

// Merges one or more artifact directories into a consolidated table; with
// two or more runs, stability columns (max/min ratio per constant) are
// added. A baseline file ("experiment key value" per line) flags regressions
// (a worsened constant). Returns 0 on success, 2 if regressions were found.
int cmd_report(const std::vector<std::string>& dirs, const std::string& baseline_path,
               std::string* out_text = nullptr);

// single-experiment dispatch used by cmd_run (exposed for tests)
ExperimentReport run_experiment(const std::string& name, const RunConfig& cfg);

}  // namespace roughbv
