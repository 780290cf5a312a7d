#include "roughbv/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "roughbv/io.hpp"

namespace roughbv {

namespace {

const std::vector<std::string> kExperiments = {
    "regularity",     "localization",        "atom_extrapolation",
    "weak_ainfty",    "aux_llogl",           "aux_nt_reverse_holder",
    "aux_reverse_regularity", "aux_decay",   "poisson_regularity",
    "tent_decomposition"};

const std::vector<std::string> kGlobalKeys = {"experiments", "seed", "out",
                                              "jobs",        "domain", "solver.tol",
                                              "solver.maxiter"};

const std::vector<std::string> kExperimentParams = {"p", "r", "count", "balls", "domain", "seed"};

bool key_known(const std::string& key) {
  for (const auto& k : kGlobalKeys)
    if (k == key) return true;
  for (const auto& e : kExperiments)
    for (const auto& p : kExperimentParams)
      if (key == e + "." + p) return true;
  return false;
}

std::string env_name(const std::string& key) {
  std::string out = "ROUGHBV_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(c));
  return out;
}

void apply_derived(RunConfig& cfg) {
  if (cfg.has("seed")) cfg.seed = static_cast<uint64_t>(std::stoull(cfg.kv.at("seed")));
  if (cfg.has("out")) cfg.out_dir = cfg.kv.at("out");
  if (cfg.has("jobs")) cfg.jobs = std::max(1, std::stoi(cfg.kv.at("jobs")));
  if (cfg.has("domain")) cfg.domain_spec = cfg.kv.at("domain");
  cfg.solver.tol = cfg.get_num("solver.tol", 1e-10);
  cfg.solver.maxiter = static_cast<int>(cfg.get_num("solver.maxiter", 100000));
  cfg.experiments.clear();
  if (cfg.has("experiments")) {
    std::string list = cfg.kv.at("experiments");
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream is(list);
    std::string name;
    while (is >> name) {
      if (std::find(kExperiments.begin(), kExperiments.end(), name) == kExperiments.end())
        throw std::runtime_error("unknown experiment '" + name + "' in experiments list");
      cfg.experiments.push_back(name);
    }
  }
}

}  // namespace

const std::vector<std::string>& known_experiments() { return kExperiments; }

std::string RunConfig::get(const std::string& key, const std::string& dflt) const {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

double RunConfig::get_num(const std::string& key, double dflt) const {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : std::stod(it->second);
}

RunConfig parse_config(const std::string& text, const std::string& filename) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string trimmed;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty()) trimmed += c;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (trimmed.empty()) continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(filename + ":" + std::to_string(lineno) +
                               ": expected key=value, got '" + trimmed + "'");
    std::string key = trimmed.substr(0, eq), val = trimmed.substr(eq + 1);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    size_t start = val.find_first_not_of(" \t");
    val = start == std::string::npos ? "" : val.substr(start);
    if (!key_known(key))
      throw std::runtime_error(filename + ":" + std::to_string(lineno) + ": unknown key '" + key +
                               "'");
    if (cfg.kv.count(key))
      throw std::runtime_error(filename + ":" + std::to_string(lineno) + ": duplicate key '" +
                               key + "'");
    cfg.kv[key] = val;
  }
  apply_derived(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg = parse_config(read_text_file(path), path);
  // environment overrides for every known key
  auto try_env = [&cfg](const std::string& key) {
    const char* v = std::getenv(env_name(key).c_str());
    if (v) cfg.kv[key] = v;
  };
  for (const auto& k : kGlobalKeys) try_env(k);
  for (const auto& e : kExperiments)
    for (const auto& p : kExperimentParams) try_env(e + "." + p);
  apply_derived(cfg);
  return cfg;
}

}  // namespace roughbv
