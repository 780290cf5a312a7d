#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "roughbv/domain2d.hpp"
#include "roughbv/elliptic.hpp"
#include "roughbv/sobolev.hpp"
#include "roughbv/tent.hpp"

namespace roughbv {

struct CaseRecord {
  std::string id;
  std::map<std::string, double> values;
  bool excluded = false;  // e.g. constant data with a 0/0 ratio
  std::string note;
};

struct ExperimentReport {
  std::string experiment;
  std::string domain;
  uint64_t seed = 0;
  std::vector<CaseRecord> cases;
  std::map<std::string, double> summary;
  bool pass = true;
  double runtime_sec = 0.0;

  void put(const std::string& key, double v) { summary[key] = v; }
  double get(const std::string& key) const;
  std::string to_text() const;
};

// boundary ball for experiment suites: center given as a boundary sample id
struct BoundaryBall {
  int center = 0;
  double radius = 0.0;
};

// measured C_{R_p}: ||modified N(grad u)||_p / ||f||_{M^{1,p}} over a dataset
// of certified boundary pairs
ExperimentReport regularity_constant(const GridDomain& dom, const CoefficientField& coeff,
                                     double p, const std::vector<GradientPair>& dataset,
                                     const SolverOptions& opts = {});

// localization ratios: data vanishing on 2B, and the solvability-augmented
// variant for general Lipschitz data
ExperimentReport localization_check(const GridDomain& dom, const CoefficientField& coeff,
                                    double p, const std::vector<BoundaryBall>& balls,
                                    uint64_t seed, const SolverOptions& opts = {});

// per-atom bound int |N(grad u)|^r over Hajlasz atoms at several scales, the
// annulus decay fit, and the good-lambda aperture check
ExperimentReport atom_extrapolation_check(const GridDomain& dom, const CoefficientField& coeff,
                                          double r, uint64_t seed,
                                          const SolverOptions& opts = {});

// (a) weak-A-infinity (C, theta) fit, (b) weak RH_2 constant, (c) the
// (eta, c0) criterion with extremal Borel sets, (d) the truncated maximal
// integral over Delta_x
ExperimentReport weak_ainfty_check(const GridDomain& dom, const CoefficientField& coeff,
                                   uint64_t seed, const SolverOptions& opts = {});

// targets: llogl | nt_reverse_holder | reverse_regularity | decay
ExperimentReport aux_inequality_checks(const std::string& target, const GridDomain& dom,
                                       const CoefficientField& coeff, double p, uint64_t seed,
                                       const SolverOptions& opts = {});

// (a) modified Poisson regularity constant, (b) tent-atom data suite,
// (c) Poisson localization, (d) the tent-Dirichlet estimate
ExperimentReport poisson_regularity_experiment(const GridDomain& dom,
                                               const CoefficientField& coeff, double p,
                                               uint64_t seed, const SolverOptions& opts = {});

// helpers shared by the suites and the acceptance tests
std::vector<GradientPair> random_boundary_dataset(const MetricMeasureSpace& bspace, int count,
                                                  uint64_t seed);
GradientPair hajlasz_atom_pair(const MetricMeasureSpace& bspace, int center, double radius,
                               double r);
// AGMT decay exponent: slope fit of sup |u| over distance annuli for bounded
// boundary data supported in one ball
double decay_exponent(const GridDomain& dom, const CoefficientField& coeff, int center_sample,
                      double radius, const SolverOptions& opts = {});

}  // namespace roughbv
