#include "roughbv/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "roughbv/io.hpp"
#include "roughbv/rng.hpp"
#include "roughbv/tent.hpp"

namespace roughbv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Timer {
public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

private:
  std::chrono::steady_clock::time_point t0_;
};

double boundary_lp(const GridDomain& dom, const BoundaryFunction& f, double p) {
  double s = 0.0;
  for (size_t k = 0; k < f.size(); ++k) s += dom.bweight[k] * std::pow(std::abs(f[k]), p);
  return std::pow(s, 1.0 / p);
}

// mean of |grad| over the cells of an annulus A(x0, r_in, r_out)
double annulus_grad_mean(const GridDomain& dom, const VectorField& g, const Pt& x0, double r_in,
                         double r_out, int* count = nullptr) {
  double acc = 0.0;
  int cnt = 0;
  for (int c = 0; c < dom.ncells(); ++c) {
    Pt p = dom.center(c);
    double d = std::hypot(p[0] - x0[0], p[1] - x0[1]);
    if (d > r_in && d <= r_out) {
      acc += std::hypot(g.x[c], g.y[c]);
      ++cnt;
    }
  }
  if (count) *count = cnt;
  return cnt > 0 ? acc / cnt : 0.0;
}

// boundary mean of v^p over B(x0, r)
double boundary_ball_mean(const GridDomain& dom, const BoundaryFunction& v, const Pt& x0,
                          double r, double p) {
  double acc = 0.0, mass = 0.0;
  for (size_t s = 0; s < dom.bsample.size(); ++s) {
    double d = std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]);
    if (d <= r + 1e-12) {
      acc += dom.bweight[s] * std::pow(v[s], p);
      mass += dom.bweight[s];
    }
  }
  return mass > 0 ? acc / mass : 0.0;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}


}  // namespace

double ExperimentReport::get(const std::string& key) const {
  auto it = summary.find(key);
  return it == summary.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

std::string ExperimentReport::to_text() const {
  std::ostringstream ss;
  ss << "experiment " << experiment << "\n";
  ss << "domain " << domain << "\n";
  ss << "seed " << seed << "\n";
  ss << "pass " << (pass ? 1 : 0) << "\n";
  ss << "runtime_sec " << fmt(runtime_sec, 4) << "\n";
  for (const auto& [k, v] : summary) ss << "summary " << k << " " << fmt(v) << "\n";
  for (const auto& c : cases) {
    ss << "case " << c.id;
    if (c.excluded) ss << " excluded";
    for (const auto& [k, v] : c.values) ss << " " << k << "=" << fmt(v);
    if (!c.note.empty()) ss << " # " << c.note;
    ss << "\n";
  }
  return ss.str();
}

std::vector<GradientPair> random_boundary_dataset(const MetricMeasureSpace& bspace, int count,
                                                  uint64_t seed) {
  Rng rng(seed);
  std::vector<GradientPair> out;
  const int m = bspace.n();
  const double diam = bspace.diameter();
  for (int k = 0; k < count; ++k) {
    BoundaryFunction f(m, 0.0);
    int bumps = 2 + static_cast<int>(rng.index(3));
    for (int b = 0; b < bumps; ++b) {
      // positions drawn as fractions of the sample ordering so that refined
      // grids see the same geometry under the same seed
      int c = static_cast<int>(std::lround(rng.uniform() * (m - 1)));
      double amp = rng.uniform(-1.0, 1.0);
      double width = rng.uniform(0.1, 0.5) * diam;
      for (int i = 0; i < m; ++i)
        f[i] += amp * std::max(0.0, 1.0 - bspace.dist(c, i) / width);
    }
    out.push_back(hajlasz_gradient(bspace, f, 1.0, GradMethod::kSharpSurrogate));
  }
  return out;
}

GradientPair hajlasz_atom_pair(const MetricMeasureSpace& bspace, int center, double radius,
                               double r) {
  const int m = bspace.n();
  double sb = 0.0;
  for (int i = 0; i < m; ++i)
    if (bspace.dist(center, i) <= radius + kTieTol) sb += bspace.weight[i];
  const double s = 2.0 * radius * std::pow(sb, -1.0 / r);
  GradientPair pair;
  pair.f.assign(m, 0.0);
  for (int i = 0; i < m; ++i)
    pair.f[i] = s * std::max(0.0, 1.0 - bspace.dist(center, i) / radius);
  pair.grad.assign(m, s / (2.0 * radius));  // = sigma(B)^{-1/r}
  pair.certified = hajlasz_certified(bspace, pair.f, pair.grad);
  return pair;
}

ExperimentReport regularity_constant(const GridDomain& dom, const CoefficientField& coeff,
                                     double p, const std::vector<GradientPair>& dataset,
                                     const SolverOptions& opts) {
  Timer timer;
  ExperimentReport rep;
  rep.experiment = "regularity_constant";
  rep.domain = dom.kind;
  double crp = 0.0, cdp = 0.0;
  int id = 0;
  for (const auto& pair : dataset) {
    ++id;
    CaseRecord rec;
    rec.id = "f" + std::to_string(id);
    double denom = 0.0;
    for (size_t i = 0; i < pair.grad.size(); ++i)
      denom += dom.bweight[i] * std::pow(pair.grad[i], p);
    denom = std::pow(denom, 1.0 / p);
    if (denom <= 0) {
      rec.excluded = true;
      rec.note = "constant data: 0/0 ratio excluded";
      rep.cases.push_back(rec);
      continue;
    }
    DiscreteField u = solve_dirichlet(dom, coeff, pair.f, opts);
    VectorField g = gradient(dom, u);
    BoundaryFunction nt = ntmax_grad(dom, g, 1.0);
    double num = boundary_lp(dom, nt, p);
    rec.values["ratio"] = num / denom;
    crp = std::max(crp, num / denom);
    // companion Dirichlet-problem constant ||N(u)||_p / ||f||_p
    double fnorm = boundary_lp(dom, pair.f, p);
    if (fnorm > 0) {
      BoundaryFunction nu = ntmax(dom, u, 1.0, NtVariant::kPlain);
      double dir = boundary_lp(dom, nu, p) / fnorm;
      rec.values["dirichlet_ratio"] = dir;
      cdp = std::max(cdp, dir);
    }
    rep.cases.push_back(rec);
  }
  rep.put("C_Rp", crp);
  rep.put("C_Dp", cdp);
  rep.put("p", p);
  rep.pass = std::isfinite(crp);
  rep.runtime_sec = timer.sec();
  return rep;
}

ExperimentReport localization_check(const GridDomain& dom, const CoefficientField& coeff,
                                    double p, const std::vector<BoundaryBall>& balls,
                                    uint64_t seed, const SolverOptions& opts) {
  Timer timer;
  ExperimentReport rep;
  rep.experiment = "localization_check";
  rep.domain = dom.kind;
  rep.seed = seed;
  MetricMeasureSpace bspace = boundary_space(dom);
  Rng rng(seed);

  double sup_vanishing = 0.0, sup_augmented = 0.0, sup_poincare = 0.0;
  int id = 0;
  for (const auto& ball : balls) {
    ++id;
    const Pt x0 = dom.bsample[ball.center];
    const double R = ball.radius;
    CaseRecord rec;
    rec.id = "ball" + std::to_string(id);
    rec.values["R"] = R;
    if (2.0 * R > dom.diameter) {
      rec.excluded = true;
      rec.note = "ball exceeds the domain diameter";
      rep.cases.push_back(rec);
      continue;
    }

    // variant A: data vanishing on 2B
    BoundaryFunction f(dom.bsample.size());
    for (size_t s = 0; s < dom.bsample.size(); ++s) {
      double d = std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]);
      f[s] = std::clamp((d - 2.0 * R) / R, 0.0, 1.0);
    }
    {
      DiscreteField u = solve_dirichlet(dom, coeff, f, opts);
      VectorField g = gradient(dom, u);
      BoundaryFunction nt = ntmax_grad(dom, g, 1.0, R / 2.0);
      double lhs = boundary_ball_mean(dom, nt, x0, R / 2.0, p);
      double rhs = std::pow(annulus_grad_mean(dom, g, x0, R, 2.0 * R), p);
      double ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0);
      rec.values["vanishing_ratio"] = ratio;
      sup_vanishing = std::max(sup_vanishing, ratio);

      // interior Poincare for the solution vanishing on 2B cap dOmega:
      // int_B |u| <= C r int_B |grad u|, the engine behind the localization
      double iu = 0.0, ig = 0.0;
      for (int c = 0; c < dom.ncells(); ++c) {
        Pt q = dom.center(c);
        if (std::hypot(q[0] - x0[0], q[1] - x0[1]) <= R) {
          iu += std::abs(u.v[c]);
          ig += std::hypot(g.x[c], g.y[c]);
        }
      }
      if (ig > 0) {
        rec.values["interior_poincare"] = iu / (R * ig);
        sup_poincare = std::max(sup_poincare, iu / (R * ig));
      }
    }

    // variant B: general Lipschitz data, augmented right-hand side
    {
      BoundaryFunction fr(dom.bsample.size(), 0.0);
      for (int b = 0; b < 3; ++b) {
        int c = static_cast<int>(std::lround(rng.uniform() * (bspace.n() - 1)));
        double amp = rng.uniform(-1.0, 1.0);
        double width = rng.uniform(0.1, 0.4) * dom.diameter;
        for (int i = 0; i < bspace.n(); ++i)
          fr[i] += amp * std::max(0.0, 1.0 - bspace.dist(c, i) / width);
      }
      GradientPair pair = hajlasz_gradient(bspace, fr, 1.0, GradMethod::kSharpSurrogate);
      DiscreteField u = solve_dirichlet(dom, coeff, pair.f, opts);
      VectorField g = gradient(dom, u);
      BoundaryFunction nt = ntmax_grad(dom, g, 1.0, R / 2.0);
      double lhs = boundary_ball_mean(dom, nt, x0, R / 2.0, p);
      double gradterm = boundary_ball_mean(dom, pair.grad, x0, 3.0 * R, p);
      double rhs = std::pow(annulus_grad_mean(dom, g, x0, R, 2.0 * R), p) + gradterm;
      double ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0);
      rec.values["augmented_ratio"] = ratio;
      sup_augmented = std::max(sup_augmented, ratio);
    }
    rep.cases.push_back(rec);
  }
  rep.put("p", p);
  rep.put("sup_vanishing", sup_vanishing);
  rep.put("sup_augmented", sup_augmented);
  rep.put("interior_poincare_sup", sup_poincare);
  rep.pass = std::isfinite(sup_vanishing) && std::isfinite(sup_augmented);
  rep.runtime_sec = timer.sec();
  return rep;
}

double decay_exponent(const GridDomain& dom, const CoefficientField& coeff, int center_sample,
                      double radius, const SolverOptions& opts) {
  const Pt x0 = dom.bsample[center_sample];
  BoundaryFunction f(dom.bsample.size());
  for (size_t s = 0; s < dom.bsample.size(); ++s) {
    double d = std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]);
    f[s] = std::clamp(2.0 - 2.0 * d / radius, 0.0, 1.0);  // bump supported in B
  }
  DiscreteField u = solve_dirichlet(dom, coeff, f, opts);
  // sup |u| over half-octave annuli; the fit stops before the opposite
  // boundary forces its own vanishing rate
  std::vector<double> xs, ys;
  const double root2 = std::sqrt(2.0);
  for (int k = 1; k < 32; ++k) {
    double rin = radius * std::pow(root2, k), rout = rin * root2;
    if (rout > 0.6 * dom.diameter) break;
    double sup = 0.0;
    int cnt = 0;
    for (int c = 0; c < dom.ncells(); ++c) {
      Pt p = dom.center(c);
      double d = std::hypot(p[0] - x0[0], p[1] - x0[1]);
      if (d > rin && d <= rout) {
        sup = std::max(sup, std::abs(u.v[c]));
        ++cnt;
      }
    }
    if (cnt == 0 || sup <= 0) continue;
    xs.push_back(std::log(rin + radius));
    ys.push_back(std::log(sup));
  }
  return -least_squares_slope(xs, ys);
}

ExperimentReport atom_extrapolation_check(const GridDomain& dom, const CoefficientField& coeff,
                                          double r, uint64_t seed, const SolverOptions& opts) {
  Timer timer;
  ExperimentReport rep;
  rep.experiment = "atom_extrapolation_check";
  rep.domain = dom.kind;
  rep.seed = seed;
  MetricMeasureSpace bspace = boundary_space(dom);
  Rng rng(seed);

  // AGMT exponent measured on this domain
  double alpha_hat = decay_exponent(dom, coeff, static_cast<int>(rng.index(dom.bsample.size())),
                                    dom.diameter / 16.0, opts);
  double eps_hat = 1.0 / (1.0 + alpha_hat);  // n = 1
  rep.put("alpha_hat", alpha_hat);
  rep.put("eps_hat", eps_hat);
  rep.put("r", r);
  const bool r_admissible = r > 1.0 - eps_hat && r <= 1.0;
  rep.put("r_admissible", r_admissible ? 1.0 : 0.0);

  double total_max = 0.0;
  std::vector<double> slopes, agreements;
  double goodlambda_eta = kInf;
  bool goodlambda_trivial = false;
  const int scales = 3, per_scale = 4;
  for (int sc = 0; sc < scales; ++sc) {
    double R = dom.diameter / (24.0 * std::pow(std::sqrt(2.0), sc));
    for (int j = 0; j < per_scale; ++j) {
      int center = static_cast<int>(std::lround(rng.uniform() * (dom.bsample.size() - 1)));
      GradientPair atom = hajlasz_atom_pair(bspace, center, R, r);
      CaseRecord rec;
      rec.id = "atom_s" + std::to_string(sc) + "_" + std::to_string(j);
      rec.values["R"] = R;
      if (!atom.certified) {
        rec.excluded = true;
        rec.note = "atom rejected: certification failed";
        rep.cases.push_back(rec);
        continue;
      }
      DiscreteField u = solve_dirichlet(dom, coeff, atom.f, opts);
      VectorField g = gradient(dom, u);
      BoundaryFunction nt = ntmax_grad(dom, g, 1.0);
      const Pt x0 = dom.bsample[center];

      double total = 0.0, near = 0.0;
      for (size_t s = 0; s < dom.bsample.size(); ++s) {
        double term = dom.bweight[s] * std::pow(nt[s], r);
        total += term;
        double d = std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]);
        if (d <= 8.0 * R) near += term;
      }
      rec.values["total"] = total;
      rec.values["near_8B"] = near;
      total_max = std::max(total_max, total);

      // annulus contributions through the truncated operator N_{2^{k-2} R},
      // which carries the local decay; the untruncated cone saturates at the
      // domain-center floor. The AGMT exponent of this very solution is
      // fitted over the same annuli for a like-for-like comparison.
      std::vector<double> xs, ys, yu;
      for (int k = 2; k < 20; ++k) {
        double rin = std::ldexp(R, k), rout = std::ldexp(R, k + 1);
        if (rout > 0.8 * dom.diameter) break;
        BoundaryFunction ntk = ntmax_grad(dom, g, 1.0, std::ldexp(R, k - 2));
        double annk = 0.0;
        int cnt = 0;
        for (size_t s = 0; s < dom.bsample.size(); ++s) {
          double d = std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]);
          if (d > rin && d <= rout) {
            annk += dom.bweight[s] * std::pow(ntk[s], r);
            ++cnt;
          }
        }
        double sigk = 0.0;
        for (size_t s = 0; s < dom.bsample.size(); ++s) {
          double d = std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]);
          if (d > rin && d <= rout) sigk += dom.bweight[s];
        }
        double usup = 0.0;
        for (int c = 0; c < dom.ncells(); ++c) {
          Pt q = dom.center(c);
          double d = std::hypot(q[0] - x0[0], q[1] - x0[1]);
          if (d > rin && d <= rout) usup = std::max(usup, std::abs(u.v[c]));
        }
        if (cnt > 0 && annk > 0 && usup > 0 && sigk > 0) {
          xs.push_back(static_cast<double>(k));
          ys.push_back(std::log2(annk / sigk));  // annulus mean: rate (n + alpha) r
          yu.push_back(std::log2(usup));         // solution sup:  rate (n - 1 + alpha)
        }
      }
      if (xs.size() >= 3) {
        double slope = least_squares_slope(xs, ys);
        double alpha_case = -least_squares_slope(xs, yu);
        rec.values["annulus_slope"] = slope;
        rec.values["alpha_case"] = alpha_case;
        slopes.push_back(slope);
        if (alpha_case > 0) agreements.push_back(std::abs(slope) / (r * (1.0 + alpha_case)));
      }

      // good-lambda aperture family: the implied prefactor decays in the
      // aperture used for the threshold condition
      if (sc == 0 && j < 2) {
        MetricMeasureSpace bs = bspace;
        BoundaryFunction mgrad = hl_maximal(bs, atom.grad, MaxVariant::kUncentered);
        double rho = 4.0 * R;
        std::vector<double> lx, ly;
        for (double ap : {1.0, 2.0, 4.0}) {
          BoundaryFunction nta = ntmax_grad(dom, g, ap);
          double inf_m = kInf, inf_n = kInf;
          for (size_t s = 0; s < dom.bsample.size(); ++s) {
            double d = std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]);
            if (d <= rho) inf_m = std::min(inf_m, mgrad[s]);
            if (d > rho && d <= 2.0 * rho) inf_n = std::min(inf_n, nta[s]);
          }
          double lam = std::max(std::isfinite(inf_m) ? inf_m : 0.0,
                                std::isfinite(inf_n) ? inf_n : 0.0);
          double lhs = boundary_ball_mean(dom, nt, x0, rho, 1.0);
          double mid = boundary_ball_mean(dom, nt, x0, 3.0 * rho, 1.0);
          double excess = std::max(lhs - lam, 0.0);
          if (mid > 0 && excess > 0) {
            lx.push_back(std::log(ap));
            ly.push_back(std::log(excess / mid));
          }
        }
        if (lx.size() >= 2) {
          double eta = -least_squares_slope(lx, ly);
          rec.values["goodlambda_eta"] = eta;
          goodlambda_eta = std::min(goodlambda_eta, eta);
        } else if (lx.empty()) {
          // no aperture produced a positive excess: the lambda term alone
          // carries the display
          rec.values["goodlambda_trivial"] = 1.0;
          goodlambda_trivial = true;
        }
      }
      rep.cases.push_back(rec);
    }
  }
  rep.put("total_max", total_max);
  double slope_med = 0.0;
  if (!slopes.empty()) {
    std::sort(slopes.begin(), slopes.end());
    slope_med = slopes[slopes.size() / 2];
  }
  rep.put("annulus_slope_median", slope_med);
  double agree_med = 0.0;
  if (!agreements.empty()) {
    std::sort(agreements.begin(), agreements.end());
    agree_med = agreements[agreements.size() / 2];
  }
  rep.put("slope_alpha_agreement", agree_med);
  if (std::isfinite(goodlambda_eta)) rep.put("goodlambda_eta", goodlambda_eta);
  if (goodlambda_trivial) rep.put("goodlambda_trivial", 1.0);
  // the annulus integral behaves like 2^{k (1 + slope)}: divergence of the
  // annulus sum is the expected failure mode below the epsilon threshold
  rep.put("divergent", (slope_med + 1.0 >= 0) ? 1.0 : 0.0);
  rep.pass = std::isfinite(total_max) && (!r_admissible || slopes.empty() || slope_med < 0);
  rep.runtime_sec = timer.sec();
  return rep;
}

ExperimentReport weak_ainfty_check(const GridDomain& dom, const CoefficientField& coeff,
                                   uint64_t seed, const SolverOptions& opts) {
  Timer timer;
  ExperimentReport rep;
  rep.experiment = "weak_ainfty_check";
  rep.domain = dom.kind;
  rep.seed = seed;
  Rng rng(seed);
  const int ns = static_cast<int>(dom.bsample.size());

  // sampled boundary balls with poles well separated from them
  struct BallPole {
    int center;
    double radius;
    int pole;
  };
  std::vector<BallPole> cases;
  for (int k = 0; k < 6; ++k) {
    int center = static_cast<int>(std::lround(rng.uniform() * (ns - 1)));
    double radius = dom.diameter * std::pow(0.5, 3.0 + static_cast<double>(rng.index(3)));
    // pole outside 4B
    const Pt x0 = dom.bsample[center];
    int pole = -1;
    double best = 0.0;
    for (int c = 0; c < dom.ncells(); ++c) {
      Pt p = dom.center(c);
      double d = std::hypot(p[0] - x0[0], p[1] - x0[1]);
      if (d > 4.0 * radius && dom.delta[c] > best) {
        best = dom.delta[c];
        pole = c;
      }
    }
    if (pole >= 0) cases.push_back({center, radius, pole});
  }

  double rh2 = 0.0;
  std::vector<double> log_s, log_t;
  int id = 0;
  for (const auto& bp : cases) {
    ++id;
    MeasureEstimate est = elliptic_measure(dom, coeff, bp.pole, opts);
    const Pt x0 = dom.bsample[bp.center];
    auto in_ball = [&](int s, double mult) {
      return std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]) <=
             mult * bp.radius + 1e-12;
    };
    double s1 = 0, s2 = 0, w1sq = 0, w2 = 0;
    std::vector<int> delta_samples;
    for (int s = 0; s < ns; ++s) {
      if (in_ball(s, 1.0)) {
        delta_samples.push_back(s);
        s1 += dom.bweight[s];
        double dens = est.masses[s] / dom.bweight[s];
        w1sq += dom.bweight[s] * dens * dens;
      }
      if (in_ball(s, 2.0)) {
        s2 += dom.bweight[s];
        w2 += est.masses[s];
      }
    }
    CaseRecord rec;
    rec.id = "ball" + std::to_string(id);
    if (s1 <= 0 || w2 <= 0) {
      rec.excluded = true;
      rep.cases.push_back(rec);
      continue;
    }
    double lhs = std::sqrt(w1sq / s1);
    double rhs = w2 / s2;
    rec.values["rh2"] = lhs / rhs;
    rh2 = std::max(rh2, lhs / rhs);

    // weak-A-infinity scatter: random dyadic unions and threshold sets
    double om_2d = w2;
    double sigma_d = s1;
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<int> F;
      if (trial % 2 == 0) {
        for (int s : delta_samples)
          if (rng.uniform() < 0.4) F.push_back(s);
      } else {
        // threshold set: top fraction by measure density
        std::vector<int> sorted = delta_samples;
        std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
          return est.masses[a] / dom.bweight[a] > est.masses[b] / dom.bweight[b];
        });
        size_t keep = 1 + rng.index(sorted.size());
        F.assign(sorted.begin(), sorted.begin() + keep);
      }
      double sf = 0, omf = 0;
      for (int s : F) {
        sf += dom.bweight[s];
        omf += est.masses[s];
      }
      if (sf <= 0 || omf <= 0) continue;
      double srel = sf / sigma_d, trel = omf / om_2d;
      if (srel < 1.0) {
        log_s.push_back(std::log(srel));
        log_t.push_back(std::log(trel));
      }
    }
    rep.cases.push_back(rec);
  }
  double theta = least_squares_slope(log_s, log_t);
  double bigc = 0.0;
  for (size_t k = 0; k < log_s.size(); ++k)
    bigc = std::max(bigc, std::exp(log_t[k] - theta * log_s[k]));
  rep.put("rh2_constant", rh2);
  rep.put("weak_ainfty_theta", theta);
  rep.put("weak_ainfty_C", bigc);

  // (eta, c0) criterion and the truncated maximal integral over 20 poles
  const double eta = 0.1;
  double c0 = kInf, max_integral = 0.0;
  SampleIndex idx(dom);
  for (int k = 0; k < 20; ++k) {
    int pole = static_cast<int>(rng.index(dom.ncells()));
    if (dom.delta[pole] >= dom.diameter) continue;
    MeasureEstimate est = elliptic_measure(dom, coeff, pole, opts);
    Pt xp = dom.center(pole);
    int hat = idx.nearest(xp);
    const Pt xh = dom.bsample[hat];
    double rx = 10.0 * dom.delta[pole];
    std::vector<int> in_dx;
    double sdx = 0.0;
    for (int s = 0; s < ns; ++s)
      if (std::hypot(dom.bsample[s][0] - xh[0], dom.bsample[s][1] - xh[1]) <= rx + 1e-12) {
        in_dx.push_back(s);
        sdx += dom.bweight[s];
      }
    if (in_dx.empty()) continue;

    // extremal F: drop the largest-density part of total mass eta sigma
    std::vector<int> sorted = in_dx;
    std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
      return est.masses[a] / dom.bweight[a] > est.masses[b] / dom.bweight[b];
    });
    double removed = 0.0, om_f = 0.0;
    std::vector<char> dropped(ns, 0);
    for (int s : sorted) {
      if (removed + dom.bweight[s] <= eta * sdx) {
        removed += dom.bweight[s];
        dropped[s] = 1;
      }
    }
    for (int s : in_dx)
      if (!dropped[s]) om_f += est.masses[s];
    c0 = std::min(c0, om_f);

    // truncated centered maximal of the measure over Delta_x
    const double trunc = dom.delta[pole] / 4.0;
    double integral = 0.0;
    for (int s : in_dx) {
      // sup over r < trunc of omega(B(xi, r)) / sigma(B(xi, r))
      std::vector<std::pair<double, int>> by_dist;
      for (int s2 = 0; s2 < ns; ++s2) {
        double d = std::hypot(dom.bsample[s2][0] - dom.bsample[s][0],
                              dom.bsample[s2][1] - dom.bsample[s][1]);
        if (d < trunc) by_dist.push_back({d, s2});
      }
      std::sort(by_dist.begin(), by_dist.end());
      double acc_m = 0, acc_s = 0, sup = 0;
      for (size_t q = 0; q < by_dist.size(); ++q) {
        acc_m += est.masses[by_dist[q].second];
        acc_s += dom.bweight[by_dist[q].second];
        bool last_of_radius =
            q + 1 == by_dist.size() || by_dist[q + 1].first > by_dist[q].first + 1e-12;
        if (last_of_radius && acc_s > 0) sup = std::max(sup, acc_m / acc_s);
      }
      integral += dom.bweight[s] * sup;
    }
    max_integral = std::max(max_integral, integral);

    CaseRecord rec;
    rec.id = "pole" + std::to_string(k);
    rec.values["omega_F"] = om_f;
    rec.values["maximal_integral"] = integral;
    rep.cases.push_back(rec);
  }
  rep.put("eta", eta);
  rep.put("c0", std::isfinite(c0) ? c0 : 0.0);
  rep.put("maximal_integral_max", max_integral);
  // joint consistency: the RH2 fit and the weak-A-infinity fit pass together
  bool rh_ok = std::isfinite(rh2) && rh2 > 0;
  bool fit_ok = theta > 0 && std::isfinite(bigc);
  rep.put("cross_consistent", rh_ok == fit_ok ? 1.0 : 0.0);
  rep.pass = rh_ok && fit_ok && c0 > 0 && std::isfinite(max_integral);
  rep.runtime_sec = timer.sec();
  return rep;
}

ExperimentReport aux_inequality_checks(const std::string& target, const GridDomain& dom,
                                       const CoefficientField& coeff, double p, uint64_t seed,
                                       const SolverOptions& opts) {
  Timer timer;
  ExperimentReport rep;
  rep.experiment = "aux_" + target;
  rep.domain = dom.kind;
  rep.seed = seed;
  Rng rng(seed);
  MetricMeasureSpace bspace = boundary_space(dom);
  const int m = bspace.n();

  if (target == "llogl") {
    double best = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      BoundaryFunction f(m, 0.0);
      for (int b = 0; b < 3; ++b) {
        int c = static_cast<int>(rng.index(m));
        double width = rng.uniform(0.05, 0.4) * bspace.diameter();
        for (int i = 0; i < m; ++i)
          f[i] += std::max(0.0, 1.0 - bspace.dist(c, i) / width);
      }
      int center = static_cast<int>(rng.index(m));
      double radius = rng.uniform(0.1, 0.45) * bspace.diameter();
      std::vector<int> ball;
      double sigma_b = 0.0;
      for (int i = 0; i < m; ++i)
        if (bspace.dist(center, i) <= radius + kTieTol) {
          ball.push_back(i);
          sigma_b += bspace.weight[i];
        }
      if (ball.empty()) continue;
      BoundaryFunction fb(m, 0.0);
      for (int i : ball) fb[i] = f[i];
      BoundaryFunction M = hl_maximal(bspace, fb, MaxVariant::kCentered);
      double rhs = 0.0;
      for (int i : ball) rhs += bspace.weight[i] * M[i];
      // E: random sub-union and the full ball (log 2 trivial case)
      for (int variant = 0; variant < 2; ++variant) {
        double se = 0.0, inte = 0.0;
        for (int i : ball) {
          bool in_e = variant == 0 || rng.uniform() < 0.3;
          if (in_e) {
            se += bspace.weight[i];
            inte += bspace.weight[i] * f[i];
          }
        }
        if (se <= 0 || rhs <= 0) continue;
        double lhs = inte * std::log(1.0 + sigma_b / se);
        best = std::max(best, lhs / rhs);
      }
    }
    rep.put("constant", best);
    rep.pass = std::isfinite(best);
  } else if (target == "nt_reverse_holder") {
    if (!(p >= 1.0 && p < 2.0))
      throw std::invalid_argument("nt_reverse_holder requires p in [1, 2) at n = 1");
    std::map<double, double> sup_by_aperture;
    for (int trial = 0; trial < 20; ++trial) {
      DiscreteField v;
      v.v.assign(dom.ncells(), 0.0);
      for (int b = 0; b < 3; ++b) {
        // geometric bump placement, stable under grid refinement
        Pt target = {dom.x0 + rng.uniform() * dom.nx * dom.h,
                     dom.y0 + rng.uniform() * dom.ny * dom.h};
        int c = 0;
        double bd = 1e300;
        for (int i = 0; i < dom.ncells(); ++i) {
          Pt q = dom.center(i);
          double d = std::hypot(q[0] - target[0], q[1] - target[1]);
          if (d < bd) { bd = d; c = i; }
        }
        Pt pc = dom.center(c);
        double width = rng.uniform(0.05, 0.3) * dom.diameter;
        double amp = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < dom.ncells(); ++i) {
          Pt q = dom.center(i);
          v.v[i] += amp * std::max(0.0, 1.0 - std::hypot(q[0] - pc[0], q[1] - pc[1]) / width);
        }
      }
      int center = static_cast<int>(std::lround(rng.uniform() * (dom.bsample.size() - 1)));
      double radius = rng.uniform(0.1, 0.3) * dom.diameter;
      const Pt x0 = dom.bsample[center];
      double lhs = 0.0;
      int cnt = 0;
      for (int c = 0; c < dom.ncells(); ++c) {
        Pt q = dom.center(c);
        if (std::hypot(q[0] - x0[0], q[1] - x0[1]) <= radius) {
          lhs += std::pow(std::abs(v.v[c]), p);
          ++cnt;
        }
      }
      if (cnt == 0) continue;
      lhs /= cnt;
      for (double ap : {1.0, 2.0, 4.0}) {
        BoundaryFunction nt = ntmax(dom, v, ap, NtVariant::kModified);
        double rhs = std::pow(boundary_ball_mean(dom, nt, x0, 2.0 * radius, 1.0), p);
        if (rhs > 0) {
          double q = lhs / rhs;
          sup_by_aperture[ap] = std::max(sup_by_aperture[ap], q);
        }
      }
    }
    double smallest_passing = 0.0;
    double ref = sup_by_aperture.count(4.0) ? sup_by_aperture[4.0] : kInf;
    for (auto& [ap, v] : sup_by_aperture) {
      rep.put("sup_ratio_aperture_" + fmt(ap, 3), v);
      if (smallest_passing == 0.0 && v <= 2.0 * ref) smallest_passing = ap;
    }
    rep.put("smallest_passing_aperture", smallest_passing);
    rep.pass = !sup_by_aperture.empty();
  } else if (target == "reverse_regularity") {
    double best = 0.0;
    int usable = 0;
    for (int trial = 0; trial < 10; ++trial) {
      BoundaryFunction f(m, 0.0);
      for (int b = 0; b < 2; ++b) {
        int c = static_cast<int>(rng.index(m));
        double amp = rng.uniform(-1.0, 1.0);
        double width = rng.uniform(0.2, 0.5) * bspace.diameter();
        for (int i = 0; i < m; ++i)
          f[i] += amp * std::max(0.0, 1.0 - bspace.dist(c, i) / width);
      }
      GradientPair pair = m <= kLpMaxPoints
                              ? hajlasz_gradient(bspace, f, 1.0, GradMethod::kLpExact)
                              : hajlasz_gradient(bspace, f, 1.0, GradMethod::kSharpSurrogate);
      double num = lp_norm(bspace, pair.grad, 1.0);
      DiscreteField u = solve_dirichlet(dom, coeff, pair.f, opts);
      BoundaryFunction nt = ntmax_grad(dom, gradient(dom, u), 1.0);
      double den = boundary_lp(dom, nt, 1.0);
      if (den > 0) {
        best = std::max(best, num / den);
        ++usable;
      }
    }
    rep.put("constant", best);
    rep.put("cases_used", usable);
    rep.pass = std::isfinite(best) && usable > 0;
  } else if (target == "decay") {
    double a1 = decay_exponent(dom, coeff, static_cast<int>(rng.index(dom.bsample.size())),
                               dom.diameter / 12.0, opts);
    rep.put("alpha_hat", a1);
    rep.pass = a1 > 0;
  } else {
    throw std::invalid_argument("unknown aux target: " + target);
  }
  rep.put("p", p);
  rep.runtime_sec = timer.sec();
  return rep;
}

ExperimentReport poisson_regularity_experiment(const GridDomain& dom,
                                               const CoefficientField& coeff, double p,
                                               uint64_t seed, const SolverOptions& opts) {
  if (!(p > 0 && p <= 2.0))
    throw std::invalid_argument("poisson regularity experiment requires 0 < p <= 2");
  Timer timer;
  ExperimentReport rep;
  rep.experiment = "poisson_regularity";
  rep.domain = dom.kind;
  rep.seed = seed;
  Rng rng(seed);
  const int n = dom.ncells();

  auto random_bump_field = [&](double support_frac) {
    DiscreteField H;
    H.v.assign(n, 0.0);
    // geometric draw, retried until the data sits away from the band
    int c = 0;
    for (int tries = 0; tries < 64; ++tries) {
      Pt target = {dom.x0 + rng.uniform() * dom.nx * dom.h,
                   dom.y0 + rng.uniform() * dom.ny * dom.h};
      double best = 1e300;
      for (int i = 0; i < n; ++i) {
        Pt q = dom.center(i);
        double d = std::hypot(q[0] - target[0], q[1] - target[1]);
        if (d < best) {
          best = d;
          c = i;
        }
      }
      if (dom.delta[c] >= 4.0 * dom.h) break;
    }
    Pt pc = dom.center(c);
    double width = std::min(support_frac * dom.diameter, 0.5 * dom.delta[c]);
    double amp = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
      Pt q = dom.center(i);
      H.v[i] = amp * std::max(0.0, 1.0 - std::hypot(q[0] - pc[0], q[1] - pc[1]) / width);
    }
    return H;
  };

  // (a) measured modified Poisson regularity constant over random data
  double prp = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    DiscreteField H = random_bump_field(0.2);
    DiscreteField xw = random_bump_field(0.2);
    VectorField Xi;
    Xi.x = xw.v;
    Xi.y.assign(n, 0.0);
    DiscreteField v = solve_poisson(dom, coeff, H, Xi, opts);
    BoundaryFunction nt = ntmax_grad(dom, gradient(dom, v), 1.0);
    double lhs = boundary_lp(dom, nt, p);
    DiscreteField dH;
    dH.v.resize(n);
    for (int c = 0; c < n; ++c) dH.v[c] = dom.delta[c] * H.v[c];
    double rhs = tent_norm(dom, dH, p) + tent_norm_vec(dom, Xi, p);
    CaseRecord rec;
    rec.id = "data" + std::to_string(trial);
    if (rhs > 0) {
      rec.values["ratio"] = lhs / rhs;
      prp = std::max(prp, lhs / rhs);
    } else {
      rec.excluded = true;
    }
    rep.cases.push_back(rec);
  }
  rep.put("PRp_constant", prp);

  // (b) tent-atom data: delta H and Xi are T^r_2 atoms at three scales, r = 1
  const double r_at = 1.0;
  double atom_max = 0.0;
  for (int sc = 0; sc < 3; ++sc) {
    double R = dom.diameter / (8.0 * std::pow(2.0, sc));
    int center = static_cast<int>(std::lround(rng.uniform() * (dom.bsample.size() - 1)));
    const Pt x0 = dom.bsample[center];
    double sb = 0.0;
    for (size_t s = 0; s < dom.bsample.size(); ++s)
      if (std::hypot(dom.bsample[s][0] - x0[0], dom.bsample[s][1] - x0[1]) <= R) {
        sb += dom.bweight[s];
      }
    if (sb <= 0) continue;
    // indicator profile normalized to int a^2 / delta = sigma(B)^{1 - 2/r}
    DiscreteField a;
    a.v.assign(n, 0.0);
    double integ = 0.0;
    for (int c = 0; c < n; ++c) {
      Pt q = dom.center(c);
      if (std::hypot(q[0] - x0[0], q[1] - x0[1]) < R)
        integ += dom.h * dom.h / dom.delta[c];
    }
    if (integ <= 0) continue;
    double scale = std::sqrt(std::pow(sb, 1.0 - 2.0 / r_at) / integ);
    for (int c = 0; c < n; ++c) {
      Pt q = dom.center(c);
      if (std::hypot(q[0] - x0[0], q[1] - x0[1]) < R) a.v[c] = scale;
    }
    DiscreteField H;
    H.v.resize(n);
    for (int c = 0; c < n; ++c) H.v[c] = a.v[c] / dom.delta[c];
    VectorField Xi;
    Xi.x = a.v;
    Xi.y.assign(n, 0.0);
    DiscreteField v = solve_poisson(dom, coeff, H, Xi, opts);
    BoundaryFunction nt = ntmax_grad(dom, gradient(dom, v), 1.0);
    double total = 0.0;
    for (size_t s = 0; s < dom.bsample.size(); ++s)
      total += dom.bweight[s] * std::pow(nt[s], r_at);
    atom_max = std::max(atom_max, total);
    CaseRecord rec;
    rec.id = "tent_atom_s" + std::to_string(sc);
    rec.values["total_r1"] = total;
    rep.cases.push_back(rec);
  }
  rep.put("tent_atom_max", atom_max);

  // (c) Poisson localization: data supported outside 2B
  double loc_sup = 0.0;
  for (int k = 0; k < 3; ++k) {
    int center = static_cast<int>(std::lround(rng.uniform() * (dom.bsample.size() - 1)));
    double R = dom.diameter / 8.0;
    const Pt x0 = dom.bsample[center];
    DiscreteField H = random_bump_field(0.15);
    for (int c = 0; c < n; ++c) {
      Pt q = dom.center(c);
      if (std::hypot(q[0] - x0[0], q[1] - x0[1]) <= 2.0 * R) H.v[c] = 0.0;
    }
    VectorField Xi;
    Xi.x.assign(n, 0.0);
    Xi.y.assign(n, 0.0);
    DiscreteField v = solve_poisson(dom, coeff, H, Xi, opts);
    VectorField g = gradient(dom, v);
    BoundaryFunction nt = ntmax_grad(dom, g, 1.0, R / 2.0);
    double lhs = boundary_ball_mean(dom, nt, x0, R / 2.0, 1.0);
    double rhs = annulus_grad_mean(dom, g, x0, R, 2.0 * R);
    if (rhs > 0) loc_sup = std::max(loc_sup, lhs / rhs);
    CaseRecord rec;
    rec.id = "loc" + std::to_string(k);
    rec.values["ratio"] = rhs > 0 ? lhs / rhs : 0.0;
    rep.cases.push_back(rec);
  }
  rep.put("localization_sup", loc_sup);

  // (d) tent-Dirichlet: ||delta grad u||_{T^{p'}_2} <= C ||f||_{p'}
  const double pp = p > 1.0 ? p / (p - 1.0) : 2.0;
  MetricMeasureSpace bspace = boundary_space(dom);
  auto dataset = random_boundary_dataset(bspace, 4, seed ^ 0x9e3779b9ULL);
  double tdir = 0.0;
  for (size_t k = 0; k < dataset.size(); ++k) {
    DiscreteField u = solve_dirichlet(dom, coeff, dataset[k].f, opts);
    VectorField g = gradient(dom, u);
    for (int c = 0; c < n; ++c) {
      g.x[c] *= dom.delta[c];
      g.y[c] *= dom.delta[c];
    }
    double lhs = tent_norm_vec(dom, g, pp);
    double rhs = boundary_lp(dom, dataset[k].f, pp);
    if (rhs > 0) tdir = std::max(tdir, lhs / rhs);
  }
  rep.put("tent_dirichlet_constant", tdir);
  rep.put("p", p);
  rep.put("p_prime", pp);
  rep.pass = std::isfinite(prp) && std::isfinite(atom_max) && std::isfinite(loc_sup) &&
             std::isfinite(tdir);
  rep.runtime_sec = timer.sec();
  return rep;
}

}  // namespace roughbv
