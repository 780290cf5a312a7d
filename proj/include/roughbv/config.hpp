#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "roughbv/elliptic.hpp"

namespace roughbv {

// Flat key=value configuration with dotted sections. Schema-validated on
// parse: unknown keys are rejected with a line-anchored message. Every key
// can be overridden through the environment as ROUGHBV_<KEY> with dots
// replaced by underscores (e.g. ROUGHBV_SOLVER_TOL).
struct RunConfig {
  std::map<std::string, std::string> kv;

  uint64_t seed = 1;
  std::string out_dir = "out";
  int jobs = 1;
  SolverOptions solver;
  std::vector<std::string> experiments;
  std::string domain_spec = "kind=disk,h=0.03125";

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key, const std::string& dflt) const;
  double get_num(const std::string& key, double dflt) const;
};

// the experiment names cmd_run understands
const std::vector<std::string>& known_experiments();

RunConfig parse_config(const std::string& text, const std::string& filename);
RunConfig load_config(const std::string& path);  // file + environment overrides

}  // namespace roughbv
