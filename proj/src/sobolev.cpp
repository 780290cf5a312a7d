#include "roughbv/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "roughbv/io.hpp"

namespace roughbv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double powp(double v, double p) {
  if (p == 1.0) return v;
  if (p == 2.0) return v * v;
  return std::pow(v, p);
}

// tau^-q |f|^q + |grad|^q with the 1/inf = 0 convention
BoundaryFunction height_function(const GradientPair& pair, double q, double tau) {
  const size_t m = pair.f.size();
  BoundaryFunction F(m, 0.0);
  const bool finite_tau = !std::isinf(tau);
  for (size_t i = 0; i < m; ++i) {
    double v = powp(pair.grad[i], q);
    if (finite_tau) v += powp(std::abs(pair.f[i]) / tau, q);
    F[i] = v;
  }
  return F;
}

double lip_seminorm(const MetricMeasureSpace& X, const BoundaryFunction& f) {
  double lip = 0.0;
  for (int i = 0; i < X.n(); ++i)
    for (int j = i + 1; j < X.n(); ++j) {
      double d = X.dist(i, j);
      if (d > 0) lip = std::max(lip, std::abs(f[i] - f[j]) / d);
    }
  return lip;
}

// half the pointwise Lipschitz quotient: a certified Hajlasz gradient that
// localizes where f actually varies
BoundaryFunction half_pointwise_lip(const MetricMeasureSpace& X, const BoundaryFunction& f) {
  const int m = X.n();
  BoundaryFunction g(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      double d = X.dist(i, j);
      if (d > 0) s = std::max(s, std::abs(f[i] - f[j]) / d);
    }
    g[i] = 0.5 * s;
  }
  return g;
}

}  // namespace

CZDecomposition cz_decompose(const MetricMeasureSpace& X, const GradientPair& pair, double alpha,
                             double q, double p, double tau) {
  if (!(q > 0) || !(p >= q)) throw std::invalid_argument("cz_decompose requires 0 < q <= p");
  if (!(alpha > 0)) throw std::invalid_argument("cz_decompose requires alpha > 0");
  if (!pair.certified) throw std::invalid_argument("cz_decompose requires a certified gradient pair");
  const int m = X.n();

  CZDecomposition cz;
  cz.alpha = alpha;
  cz.q = q;
  cz.p = p;
  cz.tau = tau;

  BoundaryFunction F = height_function(pair, q, tau);
  BoundaryFunction MF = hl_maximal(X, F, MaxVariant::kUncentered);
  const double aq = powp(alpha, q);
  double mf_min = kInf;
  for (int i = 0; i < m; ++i) {
    if (MF[i] > aq) cz.u_alpha.push_back(i);
    mf_min = std::min(mf_min, MF[i]);
  }
  if (static_cast<int>(cz.u_alpha.size()) == m)
    throw std::invalid_argument(
        "cz height too low: U_alpha = X; the decomposition requires "
        "alpha^p > C_X^p avg_X(tau^-p |f|^p + |grad f|^p)");
  cz.near_threshold = mf_min > 0 && alpha < 1.1 * std::pow(mf_min, 1.0 / q);

  if (cz.u_alpha.empty()) {
    cz.degenerate = true;
    cz.good = pair.f;
    return cz;
  }

  cz.cover = whitney_decompose(X, cz.u_alpha);
  std::vector<bool> in_u(m, false);
  for (int x : cz.u_alpha) in_u[x] = true;

  const double lam = X.lambda;
  cz.good.assign(m, 0.0);
  for (int i = 0; i < m; ++i)
    if (!in_u[i]) cz.good[i] = pair.f[i];

  double int_p = 0.0;  // int tau^-p |f|^p + |grad|^p
  const bool finite_tau = !std::isinf(tau);
  for (int i = 0; i < m; ++i) {
    double v = powp(pair.grad[i], p);
    if (finite_tau) v += powp(std::abs(pair.f[i]) / tau, p);
    int_p += X.weight[i] * v;
  }

  for (size_t bi = 0; bi < cz.cover.balls.size(); ++bi) {
    const auto& wb = cz.cover.balls[bi];
    // anchor in lambda B_i \ U_alpha; every such point already satisfies
    // F <= alpha^q, and the nearest one keeps the good part flat across
    // neighboring balls, so distance is the primary key
    int anchor = -1;
    double best_d = kInf, best_f = kInf;
    for (int y = 0; y < m; ++y) {
      if (in_u[y]) continue;
      double d = X.dist(wb.center, y);
      if (d > lam * wb.radius + kTieTol) continue;
      if (d < best_d - kTieTol || (d <= best_d + kTieTol && F[y] < best_f)) {
        best_d = d;
        best_f = F[y];
        anchor = y;
      }
    }
    if (anchor < 0)
      throw std::runtime_error("whitney ball misses the complement (internal error)");

    CZBadPart part;
    part.ball = static_cast<int>(bi);
    part.anchor = anchor;
    part.b.assign(m, 0.0);
    part.grad.assign(m, 0.0);
    const double fxi = pair.f[anchor];
    for (size_t k = 0; k < wb.support.size(); ++k) {
      int y = wb.support[k];
      part.b[y] = (pair.f[y] - fxi) * wb.pou[k];
      part.grad[y] = pair.grad[y] + wb.pou_lip * std::abs(pair.f[y] - fxi);
      cz.good[y] += fxi * wb.pou[k];
    }
    cz.bad.push_back(std::move(part));
  }

  // measured constants of the lemma displays
  double sum_sigma_b = 0.0;
  for (size_t bi = 0; bi < cz.cover.balls.size(); ++bi) {
    const auto& wb = cz.cover.balls[bi];
    double sigma_b = 0.0;
    for (int y = 0; y < m; ++y)
      if (X.dist(wb.center, y) <= wb.radius + kTieTol) sigma_b += X.weight[y];
    sum_sigma_b += sigma_b;
    const auto& part = cz.bad[bi];
    double nb = 0.0, ng = 0.0;
    for (int y = 0; y < m; ++y) {
      nb += X.weight[y] * powp(std::abs(part.b[y]), q);
      ng += X.weight[y] * powp(part.grad[y], q);
    }
    nb = std::pow(nb, 1.0 / q);
    ng = std::pow(ng, 1.0 / q);
    double denom = alpha * std::pow(sigma_b, 1.0 / q);
    if (finite_tau)
      cz.bad_norm_constant = std::max(cz.bad_norm_constant, nb / (tau * denom));
    cz.bad_grad_constant = std::max(cz.bad_grad_constant, ng / denom);
  }
  cz.mass_constant = int_p > 0 ? sum_sigma_b * powp(alpha, p) / int_p : 0.0;
  cz.good_lip_over_alpha = lip_seminorm(X, cz.good) / alpha;
  return cz;
}

BoundaryFunction cz_good_via_extension(const MetricMeasureSpace& X, const GradientPair& pair,
                                       const CZDecomposition& cz, int rule) {
  const int m = X.n();
  std::vector<bool> in_u(m, false);
  for (int x : cz.u_alpha) in_u[x] = true;
  const double L = 2.0 * cz.alpha;
  BoundaryFunction ext(m, 0.0);
  for (int x = 0; x < m; ++x) {
    double v = rule == 0 ? kInf : -kInf;
    for (int z = 0; z < m; ++z) {
      if (in_u[z]) continue;
      double cand = rule == 0 ? pair.f[z] + L * X.dist(x, z) : pair.f[z] - L * X.dist(x, z);
      v = rule == 0 ? std::min(v, cand) : std::max(v, cand);
    }
    ext[x] = v;
  }
  BoundaryFunction g(m, 0.0);
  for (int x = 0; x < m; ++x) {
    double s = ext[x];
    for (size_t bi = 0; bi < cz.cover.balls.size(); ++bi) {
      double phi = cz.cover.pou_at(static_cast<int>(bi), x);
      if (phi > 0) s += (ext[cz.bad[bi].anchor] - ext[x]) * phi;
    }
    g[x] = s;
  }
  return g;
}

AtomicDecomposition atomic_decompose(const MetricMeasureSpace& X, const GradientPair& pair,
                                     double p, double tau) {
  if (!(p > 0) || p > 1.0) throw std::invalid_argument("atomic_decompose requires 0 < p <= 1");
  if (!pair.certified) throw std::invalid_argument("atomic_decompose requires a certified pair");
  const int m = X.n();
  const double q = 0.5 * p;  // the telescoping argument wants q < p

  AtomicDecomposition dec;
  dec.p = p;
  dec.tau = tau;
  const bool finite_tau = !std::isinf(tau);

  dec.input_size_p = 0.0;
  for (int i = 0; i < m; ++i) {
    double v = powp(pair.grad[i], p);
    if (finite_tau) v += powp(std::abs(pair.f[i]) / tau, p);
    dec.input_size_p += X.weight[i] * v;
  }

  BoundaryFunction F = height_function(pair, q, tau);
  BoundaryFunction MF = hl_maximal(X, F, MaxVariant::kUncentered);
  double mf_min = *std::min_element(MF.begin(), MF.end());
  double mf_max = *std::max_element(MF.begin(), MF.end());

  if (mf_max <= 0) {
    // zero seminorm: f is constant and there is nothing to decompose
    dec.residual_constant = pair.f.empty() ? 0.0 : pair.f[0];
    return dec;
  }

  const double t_min = std::pow(mf_min, 1.0 / q);
  const double t_max = std::pow(mf_max, 1.0 / q);
  // smallest j with 2^j >= t_min: the cz decomposition exists from there on,
  // and U is empty once 2^j >= t_max
  const int j_lo = static_cast<int>(std::ceil(std::log2(t_min) - 1e-12));
  const int j_hi = static_cast<int>(std::ceil(std::log2(t_max) + 1e-12)) + 1;
  dec.j_min = j_lo - 1;
  dec.j_max = j_hi;

  std::vector<CZDecomposition> gen(j_hi - j_lo + 1);
  for (int j = j_lo; j <= j_hi; ++j)
    gen[j - j_lo] = cz_decompose(X, pair, std::ldexp(1.0, j), q, p, tau);

  auto good_of = [&](int j) -> const BoundaryFunction& {
    return gen[std::min(j, j_hi) - j_lo].good;
  };
  // localized certified gradients of the good parts
  std::vector<BoundaryFunction> grad_g(j_hi - j_lo + 1);
  for (int j = j_lo; j <= j_hi; ++j) grad_g[j - j_lo] = half_pointwise_lip(X, gen[j - j_lo].good);

  struct RawAtom {
    Ball ball;
    BoundaryFunction l;
    BoundaryFunction grad;
    int j = 0;
  };
  std::vector<RawAtom> raw;

  // generation j_lo - 1: the whole-space piece l = g^{j_lo} - 0
  {
    RawAtom ra;
    ra.ball = {-1, X.diameter()};
    ra.l = good_of(j_lo);
    ra.grad = grad_g[0];
    ra.j = j_lo - 1;
    if (std::any_of(ra.l.begin(), ra.l.end(), [](double v) { return v != 0.0; }))
      raw.push_back(std::move(ra));
  }

  // generations j in [j_lo, j_hi - 1]: l^j = g^{j+1} - g^j cut by the pou of
  // the Whitney cover of U_{2^j}
  for (int j = j_lo; j < j_hi; ++j) {
    const CZDecomposition& cz = gen[j - j_lo];
    if (cz.degenerate || cz.cover.balls.empty()) continue;
    const BoundaryFunction &gj = good_of(j), &gj1 = good_of(j + 1);
    const BoundaryFunction &dgj = grad_g[j - j_lo], &dgj1 = grad_g[std::min(j + 1, j_hi) - j_lo];
    BoundaryFunction l(m, 0.0);
    for (int x = 0; x < m; ++x) l[x] = gj1[x] - gj[x];
    for (size_t bi = 0; bi < cz.cover.balls.size(); ++bi) {
      const auto& wb = cz.cover.balls[bi];
      RawAtom ra;
      ra.ball = {wb.center, wb.radius};
      ra.l.assign(m, 0.0);
      ra.grad.assign(m, 0.0);
      bool nonzero = false;
      for (size_t k = 0; k < wb.support.size(); ++k) {
        int y = wb.support[k];
        ra.l[y] = l[y] * wb.pou[k];
        ra.grad[y] = dgj[y] + dgj1[y] + wb.pou_lip * std::abs(l[y]);
        if (ra.l[y] != 0.0) nonzero = true;
      }
      ra.j = j;
      if (nonzero) raw.push_back(std::move(ra));
    }
  }

  // smallest C making every l_i^j / (C 2^j sigma(B)^{1/p}) a valid atom
  double C = 0.0;
  std::vector<double> sigma_b(raw.size());
  for (size_t k = 0; k < raw.size(); ++k) {
    double sb = 0.0;
    if (raw[k].ball.center < 0) {
      sb = X.total_mass();
    } else {
      for (int y = 0; y < m; ++y)
        if (X.dist(raw[k].ball.center, y) <= raw[k].ball.radius + kTieTol) sb += X.weight[y];
    }
    sigma_b[k] = sb;
    const double h = std::ldexp(1.0, raw[k].j);
    C = std::max(C, linf_norm(raw[k].grad) / h);
    if (finite_tau) C = std::max(C, linf_norm(raw[k].l) / (tau * h));
  }
  if (C <= 0) C = 1.0;
  C *= 1.0 + 1e-12;
  dec.norm_constant = C;

  dec.atoms.reserve(raw.size());
  for (size_t k = 0; k < raw.size(); ++k) {
    SobolevAtom atom;
    atom.ball = raw[k].ball;
    atom.generation = raw[k].j;
    atom.coeff = C * std::ldexp(1.0, raw[k].j) * std::pow(sigma_b[k], 1.0 / p);
    atom.a.assign(m, 0.0);
    atom.grad.assign(m, 0.0);
    for (int y = 0; y < m; ++y) {
      atom.a[y] = raw[k].l[y] / atom.coeff;
      atom.grad[y] = raw[k].grad[y] / atom.coeff;
    }
    dec.coeff_sum_p += powp(atom.coeff, p);
    dec.atoms.push_back(std::move(atom));
  }

  BoundaryFunction rec(m, dec.residual_constant);
  for (const auto& atom : dec.atoms)
    for (int y = 0; y < m; ++y) rec[y] += atom.coeff * atom.a[y];
  for (int y = 0; y < m; ++y)
    dec.recon_error = std::max(dec.recon_error, std::abs(rec[y] - pair.f[y]));
  return dec;
}

double atom_validity_factor(const MetricMeasureSpace& X, const SobolevAtom& atom, double p,
                            double tau) {
  const int m = X.n();
  double sb = 0.0;
  for (int y = 0; y < m; ++y) {
    bool inside =
        atom.ball.center < 0 || X.dist(atom.ball.center, y) <= atom.ball.radius + kTieTol;
    if (inside)
      sb += X.weight[y];
    else if (atom.a[y] != 0.0)
      return kInf;  // support escapes the ball
  }
  const double bound = std::pow(sb, -1.0 / p);
  double factor = linf_norm(atom.grad) / bound;
  if (!std::isinf(tau)) factor = std::max(factor, linf_norm(atom.a) / (tau * bound));
  if (!hajlasz_certified(X, atom.a, atom.grad)) return kInf;
  return factor;
}

std::string atomic_report(const MetricMeasureSpace& X, const AtomicDecomposition& dec) {
  std::ostringstream ss;
  ss << "atomic decomposition: p=" << fmt(dec.p) << " tau=" << fmt(dec.tau)
     << " atoms=" << dec.atoms.size() << " on " << X.label << "\n";
  ss << "residual_constant " << fmt(dec.residual_constant) << "\n";
  ss << "coeff_sum_p " << fmt(dec.coeff_sum_p) << "\n";
  ss << "input_size_p " << fmt(dec.input_size_p) << "\n";
  ss << "norm_constant " << fmt(dec.norm_constant) << "\n";
  ss << "recon_error " << fmt(dec.recon_error) << "\n";
  for (const auto& atom : dec.atoms)
    ss << "atom gen=" << atom.generation << " center=" << atom.ball.center
       << " radius=" << fmt(atom.ball.radius) << " coeff=" << fmt(atom.coeff)
       << " grad_sup=" << fmt(linf_norm(atom.grad)) << "\n";
  return ss.str();
}

InterpolationReport interpolation_harness(const MetricMeasureSpace& X, const SampleOperator& op,
                                          const std::vector<GradientPair>& dataset, double a,
                                          double b, double t, double tau) {
  if (!(0 < a && a < t && t < b)) throw std::invalid_argument("need 0 < a < t < b");
  InterpolationReport rep;
  rep.a = a;
  rep.b = b;
  rep.t = t;
  rep.tau = tau;
  const int m = X.n();
  const bool b_finite = !std::isinf(b);

  auto level_mass = [&](const BoundaryFunction& v, double kappa) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      if (std::abs(v[i]) > kappa) s += X.weight[i];
    return s;
  };

  int id = 0;
  for (const auto& pair : dataset) {
    ++id;
    if (!pair.certified) throw std::invalid_argument("harness dataset must be certified");
    BoundaryFunction Tf;
    try {
      Tf = op(pair.f);
    } catch (const std::exception& e) {
      throw std::runtime_error("operator sample failure on f #" + std::to_string(id) + ": " +
                               e.what());
    }

    const double norm_t = mtau_norm(X, pair, t, tau);
    const double norm_a = mtau_norm(X, pair, a, tau);
    double norm_b;
    if (b_finite) {
      norm_b = mtau_norm(X, pair, b, tau);
    } else {
      norm_b = linf_norm(pair.grad);
      if (!std::isinf(tau)) norm_b += linf_norm(pair.f) / tau;
    }
    if (norm_t <= 0) continue;
    rep.direct_constant = std::max(rep.direct_constant, lp_norm(X, Tf, t) / norm_t);

    BoundaryFunction F = height_function(pair, a, tau);
    BoundaryFunction MF = hl_maximal(X, F, MaxVariant::kUncentered);
    double mf_min = *std::min_element(MF.begin(), MF.end());
    double mf_max = *std::max_element(MF.begin(), MF.end());
    if (mf_max <= 0) continue;
    double kap_lo = std::pow(std::max(mf_min, 1e-300), 1.0 / a);
    double kap_hi = 2.0 * std::max(std::pow(mf_max, 1.0 / a), linf_norm(Tf));
    const int j_lo = static_cast<int>(std::ceil(std::log2(kap_lo) - 1e-12));
    const int j_hi = static_cast<int>(std::ceil(std::log2(std::max(kap_hi, kap_lo))));

    for (int j = j_lo - 8; j <= j_hi; ++j) {
      double kappa = std::ldexp(1.0, j);
      double lev = level_mass(Tf, kappa);
      if (lev <= 0) continue;
      if (norm_a > 0)
        rep.weak_a_constant =
            std::max(rep.weak_a_constant, kappa * std::pow(lev, 1.0 / a) / norm_a);
      if (norm_b > 0 && b_finite)
        rep.weak_b_constant =
            std::max(rep.weak_b_constant, kappa * std::pow(lev, 1.0 / b) / norm_b);
    }
    if (!b_finite && norm_b > 0)
      rep.weak_b_constant = std::max(rep.weak_b_constant, linf_norm(Tf) / norm_b);

    // layer cake: the mass below the first admissible height plus upper sums
    // of the good/bad weak terms over dyadic [kappa, 2 kappa] slices
    double implied_t = X.total_mass() * std::pow(std::ldexp(1.0, j_lo), t);
    for (int j = j_lo; j <= j_hi; ++j) {
      double kappa = std::ldexp(1.0, j);
      CZDecomposition cz = cz_decompose(X, pair, kappa, a, a, tau);
      BoundaryFunction bad(m, 0.0);
      for (const auto& part : cz.bad)
        for (int y = 0; y < m; ++y) bad[y] += part.b[y];
      BoundaryFunction Tg, Tb;
      try {
        Tg = op(cz.good);
        Tb = op(bad);
      } catch (const std::exception& e) {
        throw std::runtime_error("operator sample failure on f #" + std::to_string(id) + ": " +
                                 e.what());
      }
      double lev = level_mass(Tg, kappa / 2) + level_mass(Tb, kappa / 2);
      implied_t += t * std::pow(2.0 * kappa, t - 1.0) * lev * kappa;
    }
    rep.implied_constant = std::max(rep.implied_constant, std::pow(implied_t, 1.0 / t) / norm_t);
    ++rep.cases;
  }
  return rep;
}

}  // namespace roughbv
