#include "roughbv/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "roughbv/io.hpp"
#include "roughbv/rng.hpp"
#include "roughbv/svg.hpp"
#include "roughbv/tent.hpp"

namespace roughbv {

namespace fs = std::filesystem;

namespace {

uint64_t experiment_seed(const RunConfig& cfg, const std::string& name) {
  if (cfg.has(name + ".seed"))
    return static_cast<uint64_t>(std::stoull(cfg.kv.at(name + ".seed")));
  Rng rng(cfg.seed);
  return rng.fork(name).next();
}

GridDomain experiment_domain(const RunConfig& cfg, const std::string& name) {
  return build_domain_from_spec(cfg.get(name + ".domain", cfg.domain_spec));
}

void write_plots(const fs::path& dir, const ExperimentReport& rep) {
  if (rep.experiment == "weak_ainfty") {
    std::vector<double> xs, ys;
    for (const auto& c : rep.cases)
      if (c.values.count("rh2")) {
        xs.push_back(static_cast<double>(xs.size() + 1));
        ys.push_back(c.values.at("rh2"));
      }
    SvgPlot plot("weak reverse Holder (p=2) per ball");
    plot.add_series("RH2 ratio", xs, ys);
    plot.save((dir / "rh_scatter.svg").string());
  } else if (rep.experiment == "atom_extrapolation") {
    std::vector<double> xs, ys;
    for (const auto& c : rep.cases)
      if (c.values.count("annulus_slope") && c.values.count("R")) {
        xs.push_back(c.values.at("R"));
        ys.push_back(c.values.at("annulus_slope"));
      }
    SvgPlot plot("annulus decay slope vs atom scale");
    plot.add_series("slope", xs, ys);
    plot.save((dir / "decay_slopes.svg").string());
  }
}

ExperimentReport tent_decomposition_experiment(const GridDomain& dom, double p, int count,
                                               uint64_t seed) {
  ExperimentReport rep;
  rep.experiment = "tent_decomposition";
  rep.domain = dom.kind;
  rep.seed = seed;
  Rng rng(seed);
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
  double recon = 0.0;
  int overlap = 0;
  for (int k = 0; k < count; ++k) {
    // boundary-anchored compactly supported data
    int s0 = static_cast<int>(std::lround(rng.uniform() * (dom.bsample.size() - 1)));
    const Pt xi = dom.bsample[s0];
    double width = rng.uniform(0.08, 0.12) * dom.diameter;
    double amp = rng.uniform(-1.0, 1.0);
    int c = -1;
    double bestd = 1e300;
    for (int i = 0; i < dom.ncells(); ++i) {
      if (dom.delta[i] < 3.0 * dom.h) continue;
      Pt q = dom.center(i);
      double d = std::hypot(q[0] - xi[0], q[1] - xi[1]);
      if (d < bestd) { bestd = d; c = i; }
    }
    Pt pc = dom.center(c);
    DiscreteField f;
    f.v.assign(dom.ncells(), 0.0);
    for (int i = 0; i < dom.ncells(); ++i) {
      Pt q = dom.center(i);
      f.v[i] = amp * std::max(0.0, 1.0 - std::hypot(q[0] - pc[0], q[1] - pc[1]) / width);
    }
    TentDecomposition dec = tent_atomic_decompose(dom, f, p);
    CaseRecord rec;
    rec.id = "f" + std::to_string(k);
    rec.values["atoms"] = static_cast<double>(dec.atoms.size());
    rec.values["recon_error"] = dec.recon_error;
    recon = std::max(recon, dec.recon_error);
    overlap = std::max(overlap, dec.max_overlap);
    if (dec.area_norm_p > 0) {
      double ratio = dec.coeff_sum_p / dec.area_norm_p;
      rec.values["coeff_ratio"] = ratio;
      ratio_min = std::min(ratio_min, ratio);
      ratio_max = std::max(ratio_max, ratio);
    }
    rep.cases.push_back(rec);
  }
  rep.put("p", p);
  rep.put("recon_error_max", recon);
  rep.put("coeff_ratio_max", ratio_max);
  rep.put("coeff_ratio_min", ratio_min);
  rep.put("max_overlap", overlap);
  rep.pass = recon <= 1e-10 && std::isfinite(ratio_max);
  return rep;
}

}  // namespace

ExperimentReport run_experiment(const std::string& name, const RunConfig& cfg) {
  GridDomain dom = experiment_domain(cfg, name);
  CoefficientField coeff = CoefficientField::identity(dom);
  uint64_t seed = experiment_seed(cfg, name);
  const SolverOptions& opts = cfg.solver;

  if (name == "regularity") {
    double p = cfg.get_num(name + ".p", 2.0);
    int count = static_cast<int>(cfg.get_num(name + ".count", 8));
    auto dataset = random_boundary_dataset(boundary_space(dom), count, seed);
    auto rep = regularity_constant(dom, coeff, p, dataset, opts);
    rep.seed = seed;
    return rep;
  }
  if (name == "localization") {
    double p = cfg.get_num(name + ".p", 2.0);
    int nballs = static_cast<int>(cfg.get_num(name + ".balls", 5));
    Rng rng(seed);
    std::vector<BoundaryBall> balls;
    for (int k = 0; k < nballs; ++k)
      balls.push_back({static_cast<int>(rng.index(dom.bsample.size())),
                       dom.diameter * std::pow(0.5, 2.0 + static_cast<double>(rng.index(4)))});
    return localization_check(dom, coeff, p, balls, seed, opts);
  }
  if (name == "atom_extrapolation")
    return atom_extrapolation_check(dom, coeff, cfg.get_num(name + ".r", 1.0), seed, opts);
  if (name == "weak_ainfty") return weak_ainfty_check(dom, coeff, seed, opts);
  if (name == "aux_llogl") return aux_inequality_checks("llogl", dom, coeff, 1.0, seed, opts);
  if (name == "aux_nt_reverse_holder")
    return aux_inequality_checks("nt_reverse_holder", dom, coeff, cfg.get_num(name + ".p", 1.5),
                                 seed, opts);
  if (name == "aux_reverse_regularity")
    return aux_inequality_checks("reverse_regularity", dom, coeff, 1.0, seed, opts);
  if (name == "aux_decay") return aux_inequality_checks("decay", dom, coeff, 1.0, seed, opts);
  if (name == "poisson_regularity")
    return poisson_regularity_experiment(dom, coeff, cfg.get_num(name + ".p", 2.0), seed, opts);
  if (name == "tent_decomposition")
    return tent_decomposition_experiment(dom, cfg.get_num(name + ".p", 1.0),
                                         static_cast<int>(cfg.get_num(name + ".count", 4)), seed);
  throw std::runtime_error("unknown experiment: " + name);
}

int cmd_run(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  fs::create_directories(fs::path(cfg.out_dir) / "records");
  fs::create_directories(fs::path(cfg.out_dir) / "plots");

  const int n = static_cast<int>(cfg.experiments.size());
  std::vector<ExperimentReport> reports(n);
  std::vector<std::string> errors(n);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int k = next.fetch_add(1);
      if (k >= n) return;
      try {
        reports[k] = run_experiment(cfg.experiments[k], cfg);
        reports[k].experiment = cfg.experiments[k];  // records keyed by the configured name
      } catch (const std::exception& e) {
        // a failed case is recorded and the run continues
        reports[k].experiment = cfg.experiments[k];
        reports[k].pass = false;
        errors[k] = e.what();
      }
    }
  };
  int jobs = std::min(cfg.jobs, std::max(1, n));
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool all_pass = true;
  std::ostringstream csv, report;
  csv << "experiment,domain,key,value,pass\n";
  report << "run summary\nseed " << cfg.seed << "\ndomain " << cfg.domain_spec << "\n\n";
  for (int k = 0; k < n; ++k) {
    const auto& rep = reports[k];
    all_pass = all_pass && rep.pass;
    std::string rec_text = rep.to_text();
    if (!errors[k].empty()) rec_text += "error " + errors[k] + "\n";
    write_text_file((fs::path(cfg.out_dir) / "records" / (cfg.experiments[k] + ".txt")).string(),
                    rec_text);
    write_plots(fs::path(cfg.out_dir) / "plots", rep);
    for (const auto& [key, v] : rep.summary)
      csv << cfg.experiments[k] << ',' << rep.domain << ',' << key << ',' << fmt(v) << ','
          << (rep.pass ? 1 : 0) << "\n";
    report << cfg.experiments[k] << ": " << (rep.pass ? "pass" : "FAIL");
    if (!errors[k].empty()) report << " (" << errors[k] << ")";
    report << "\n";
  }
  write_text_file((fs::path(cfg.out_dir) / "summary.csv").string(), csv.str());
  report << "\noverall " << (all_pass ? "pass" : "FAIL") << "\n";
  write_text_file((fs::path(cfg.out_dir) / "report.txt").string(), report.str());
  return all_pass ? 0 : 1;
}

namespace {

struct Merged {
  // (experiment, domain, key) -> per-run values
  std::map<std::string, std::vector<double>> values;
  std::vector<std::string> errors;
};

void read_run(const std::string& dir, int run, int nruns, Merged& merged) {
  fs::path records = fs::path(dir) / "records";
  if (!fs::is_directory(records)) {
    merged.errors.push_back(dir + ": missing records directory");
    return;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(records)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      std::istringstream is(read_text_file(f.string()));
      std::string line, experiment = "?", domain = "?";
      while (std::getline(is, line)) {
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "experiment" && toks.size() > 1) experiment = toks[1];
        if (toks[0] == "domain" && toks.size() > 1) domain = toks[1];
        if (toks[0] == "summary" && toks.size() == 3) {
          auto& vec = merged.values[experiment + "," + domain + "," + toks[1]];
          vec.resize(nruns, std::numeric_limits<double>::quiet_NaN());
          vec[run] = std::stod(toks[2]);
        }
      }
    } catch (const std::exception& e) {
      merged.errors.push_back(f.string() + ": " + e.what());
    }
  }
}

}  // namespace

int cmd_report(const std::vector<std::string>& dirs, const std::string& baseline_path,
               std::string* out_text) {
  Merged merged;
  const int nruns = static_cast<int>(dirs.size());
  for (int r = 0; r < nruns; ++r) read_run(dirs[r], r, nruns, merged);

  std::map<std::string, double> baseline;
  if (!baseline_path.empty()) {
    std::istringstream is(read_text_file(baseline_path));
    std::string line;
    while (std::getline(is, line)) {
      auto toks = split_ws(line);
      if (toks.size() == 3) baseline[toks[0] + "," + toks[1]] = std::stod(toks[2]);
      if (toks.size() == 4) baseline[toks[0] + "," + toks[1] + "," + toks[2]] = std::stod(toks[3]);
    }
  }

  std::ostringstream out;
  out << "experiment,domain,key";
  for (int r = 0; r < nruns; ++r) out << ",run" << r;
  if (nruns > 1) out << ",stability";
  if (!baseline.empty()) out << ",baseline,regression";
  out << "\n";
  int regressions = 0;
  for (const auto& [key, vals] : merged.values) {
    out << key;
    double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
    for (double v : vals) {
      out << ',' << (std::isnan(v) ? "" : fmt(v));
      if (!std::isnan(v)) {
        vmin = std::min(vmin, std::abs(v));
        vmax = std::max(vmax, std::abs(v));
      }
    }
    if (nruns > 1) out << ',' << (vmin > 0 ? fmt(vmax / vmin, 6) : "");
    if (!baseline.empty()) {
      auto it = baseline.find(key);
      if (it == baseline.end()) {
        out << ",,";
      } else {
        double latest = vals.back();
        bool regressed = !std::isnan(latest) && latest > it->second * (1.0 + 1e-12);
        if (regressed) ++regressions;
        out << ',' << fmt(it->second) << ',' << (regressed ? "REGRESSION" : "ok");
      }
    }
    out << "\n";
  }
  if (!merged.errors.empty()) {
    out << "\nerrors:\n";
    for (const auto& e : merged.errors) out << "  " << e << "\n";
  }
  if (out_text)
    *out_text = out.str();
  else
    std::cout << out.str();
  return regressions > 0 ? 2 : 0;
}

}  // namespace roughbv
