#include "roughbv/tent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "roughbv/io.hpp"
#include "roughbv/mspace.hpp"

namespace roughbv {

namespace {

// mean of |u|^2 over the grid disc B(y, delta(y) * factor)
std::vector<double> cell_sq_averages(const GridDomain& dom, const std::vector<double>& sq,
                                     double factor) {
  const int n = dom.ncells();
  std::vector<double> out(n, 0.0);
  for (int c = 0; c < n; ++c) {
    const double rho = dom.delta[c] * factor;
    const int i = dom.cells[c][0], j = dom.cells[c][1];
    const int w = static_cast<int>(rho / dom.h) + 1;
    Pt pc = dom.center(c);
    double acc = 0.0;
    int cnt = 0;
    for (int dj = -w; dj <= w; ++dj)
      for (int di = -w; di <= w; ++di) {
        int nb = dom.cell_at(i + di, j + dj);
        if (nb < 0) continue;
        Pt q = dom.center(nb);
        if (std::hypot(q[0] - pc[0], q[1] - pc[1]) <= rho + 1e-15) {
          acc += sq[nb];
          ++cnt;
        }
      }
    out[c] = cnt > 0 ? acc / cnt : sq[c];
  }
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("aperture must be positive");
}

// scatter helper: visit every (sample, cell) pair with cell in the cone of
// the sample, optionally truncated
template <typename F>
void for_cone_pairs(const GridDomain& dom, const SampleIndex& idx, double alpha, double R,
                    F&& fn) {
  for (int c = 0; c < dom.ncells(); ++c) {
    double rho = (1.0 + alpha) * dom.delta[c];
    double reach = std::min(rho, R);
    Pt p = dom.center(c);
    idx.for_each_within(p, reach, [&](int s, double d) {
      if (d < rho && d < R) fn(s, c);
    });
  }
}

}  // namespace

ConeTable build_cone_table(const GridDomain& dom, double alpha, double R) {
  check_alpha(alpha);
  ConeTable tab;
  tab.alpha = alpha;
  tab.R = R;
  tab.members.assign(dom.bsample.size(), {});
  SampleIndex idx(dom);
  for_cone_pairs(dom, idx, alpha, R, [&](int s, int c) { tab.members[s].push_back(c); });
  for (auto& v : tab.members) std::sort(v.begin(), v.end());
  return tab;
}

BoundaryFunction ntmax(const GridDomain& dom, const DiscreteField& u, double alpha,
                       NtVariant variant, double R) {
  check_alpha(alpha);
  const int n = dom.ncells();
  std::vector<double> vals(n);
  if (variant == NtVariant::kPlain) {
    for (int c = 0; c < n; ++c) vals[c] = std::abs(u.v[c]);
  } else {
    std::vector<double> sq(n);
    for (int c = 0; c < n; ++c) sq[c] = u.v[c] * u.v[c];
    std::vector<double> avg = cell_sq_averages(dom, sq, 0.25);
    for (int c = 0; c < n; ++c) vals[c] = std::sqrt(avg[c]);
  }
  BoundaryFunction out(dom.bsample.size(), 0.0);
  SampleIndex idx(dom);
  for_cone_pairs(dom, idx, alpha, R,
                 [&](int s, int c) { out[s] = std::max(out[s], vals[c]); });
  return out;
}

BoundaryFunction ntmax_grad(const GridDomain& dom, const VectorField& g, double alpha, double R) {
  check_alpha(alpha);
  const int n = dom.ncells();
  std::vector<double> sq(n);
  for (int c = 0; c < n; ++c) sq[c] = g.x[c] * g.x[c] + g.y[c] * g.y[c];
  std::vector<double> avg = cell_sq_averages(dom, sq, 0.25);
  BoundaryFunction out(dom.bsample.size(), 0.0);
  SampleIndex idx(dom);
  for_cone_pairs(dom, idx, alpha, R,
                 [&](int s, int c) { out[s] = std::max(out[s], std::sqrt(avg[c])); });
  return out;
}

namespace {

BoundaryFunction area_from_sq(const GridDomain& dom, const std::vector<double>& sq,
                              double alpha) {
  BoundaryFunction acc(dom.bsample.size(), 0.0);
  SampleIndex idx(dom);
  const double h2 = dom.h * dom.h;
  for_cone_pairs(dom, idx, alpha, kNoTrunc, [&](int s, int c) {
    acc[s] += sq[c] * h2 / (dom.delta[c] * dom.delta[c]);
  });
  for (double& v : acc) v = std::sqrt(v);
  return acc;
}

}  // namespace

BoundaryFunction area_functional(const GridDomain& dom, const DiscreteField& g, double alpha) {
  check_alpha(alpha);
  std::vector<double> sq(dom.ncells());
  for (int c = 0; c < dom.ncells(); ++c) sq[c] = g.v[c] * g.v[c];
  return area_from_sq(dom, sq, alpha);
}

BoundaryFunction area_functional_vec(const GridDomain& dom, const VectorField& g, double alpha) {
  check_alpha(alpha);
  std::vector<double> sq(dom.ncells());
  for (int c = 0; c < dom.ncells(); ++c) sq[c] = g.x[c] * g.x[c] + g.y[c] * g.y[c];
  return area_from_sq(dom, sq, alpha);
}

BoundaryFunction carleson_functional(const GridDomain& dom, const DiscreteField& g, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("carleson functional requires q >= 1");
  const int n = dom.ncells();
  std::vector<double> aq(n);
  for (int c = 0; c < n; ++c) aq[c] = std::pow(std::abs(g.v[c]), q);
  std::vector<double> avg = cell_sq_averages(dom, aq, 0.125);  // mean of |g|^q over B(x, delta/8)
  std::vector<double> amp(n);
  for (int c = 0; c < n; ++c) amp[c] = std::pow(avg[c], 1.0 / q) * dom.h * dom.h;

  BoundaryFunction out(dom.bsample.size(), 0.0);
  std::vector<std::pair<double, double>> by_dist(n);
  for (size_t s = 0; s < dom.bsample.size(); ++s) {
    const Pt& xi = dom.bsample[s];
    for (int c = 0; c < n; ++c) {
      Pt p = dom.center(c);
      by_dist[c] = {std::hypot(p[0] - xi[0], p[1] - xi[1]), amp[c]};
    }
    std::sort(by_dist.begin(), by_dist.end());
    double acc = 0.0, best = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += by_dist[k].second;
      double r = by_dist[k].first;
      // sup over r of r^{-1} * sum over B(xi, r): realized at the outermost
      // cell of each prefix
      if (r > 0) best = std::max(best, acc / r);
    }
    out[s] = best;
  }
  return out;
}

double tent_norm(const GridDomain& dom, const DiscreteField& g, double p, double alpha) {
  BoundaryFunction a = area_functional(dom, g, alpha);
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += dom.bweight[k] * std::pow(a[k], p);
  return std::pow(s, 1.0 / p);
}

double tent_norm_vec(const GridDomain& dom, const VectorField& g, double p, double alpha) {
  BoundaryFunction a = area_functional_vec(dom, g, alpha);
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += dom.bweight[k] * std::pow(a[k], p);
  return std::pow(s, 1.0 / p);
}

std::vector<int> tent_of(const GridDomain& dom, const std::vector<char>& in_o, double alpha) {
  check_alpha(alpha);
  if (in_o.size() != dom.bsample.size())
    throw std::invalid_argument("tent_of needs one flag per boundary sample");
  std::vector<char> excluded(dom.ncells(), 0);
  SampleIndex idx(dom);
  for_cone_pairs(dom, idx, alpha, kNoTrunc, [&](int s, int c) {
    if (!in_o[s]) excluded[c] = 1;
  });
  std::vector<int> cells;
  for (int c = 0; c < dom.ncells(); ++c)
    if (!excluded[c]) cells.push_back(c);
  return cells;
}

TentDecomposition tent_atomic_decompose(const GridDomain& dom, const DiscreteField& f, double p) {
  if (!(p > 0) || p > 1.0) throw std::invalid_argument("tent decomposition requires 0 < p <= 1");
  const double alpha = 1.0;
  const double tau = 0.9;
  const int n = dom.ncells();

  TentDecomposition dec;
  dec.p = p;

  BoundaryFunction A = area_functional(dom, f, alpha);
  const int ns = static_cast<int>(A.size());
  double amax = 0.0, apos = std::numeric_limits<double>::infinity();
  for (int s = 0; s < ns; ++s) {
    amax = std::max(amax, A[s]);
    if (A[s] > 0) apos = std::min(apos, A[s]);
  }
  for (int s = 0; s < ns; ++s) dec.area_norm_p += dom.bweight[s] * std::pow(A[s], p);
  if (amax <= 0) return dec;  // f == 0

  const int k_lo = static_cast<int>(std::floor(std::log2(apos))) - 1;
  const int k_hi = static_cast<int>(std::ceil(std::log2(amax) + 1e-12));  // O_{k_hi} empty

  MetricMeasureSpace bspace = boundary_space(dom);
  SampleIndex idx(dom);

  // O_k^* flags per generation and the corresponding tents
  std::vector<std::vector<char>> ostar(k_hi - k_lo + 1);
  std::vector<std::vector<char>> tent_flags(k_hi - k_lo + 1);
  for (int k = k_lo; k <= k_hi; ++k) {
    const double lev = std::ldexp(1.0, k);
    BoundaryFunction chi(ns, 0.0);
    int cnt = 0;
    for (int s = 0; s < ns; ++s)
      if (A[s] > lev) {
        chi[s] = 1.0;
        ++cnt;
      }
    std::vector<char> star(ns, 0);
    if (cnt > 0) {
      BoundaryFunction M = hl_maximal(bspace, chi, MaxVariant::kCentered);
      for (int s = 0; s < ns; ++s) star[s] = M[s] > 1.0 - tau ? 1 : 0;
    }
    ostar[k - k_lo] = star;
    bool any = false;
    for (int s = 0; s < ns; ++s) any = any || star[s];
    if (!any) {
      tent_flags[k - k_lo].assign(n, 0);
      continue;
    }
    SampleIndex idx2(dom);
    std::vector<char> flags(n, 1);
    for_cone_pairs(dom, idx2, alpha, kNoTrunc, [&](int s, int c) {
      if (!star[s]) flags[c] = 0;
    });
    tent_flags[k - k_lo] = flags;
  }

  struct Region {
    int k;
    int center = -1;     // boundary sample (or -1 for the whole boundary)
    double radius = 0;   // whitney ball radius r_i (support ball is C r_i)
    std::vector<int> ball_samples;  // samples of B_i (for R_alpha membership)
  };

  // Whitney covers per generation (single whole-boundary region when O* = all)
  std::vector<std::vector<Region>> regions(k_hi - k_lo + 1);
  for (int k = k_lo; k < k_hi; ++k) {
    const auto& star = ostar[k - k_lo];
    std::vector<int> o_ids;
    for (int s = 0; s < ns; ++s)
      if (star[s]) o_ids.push_back(s);
    if (o_ids.empty()) continue;
    if (static_cast<int>(o_ids.size()) == ns) {
      Region r;
      r.k = k;
      r.center = -1;
      r.radius = dom.diameter;
      regions[k - k_lo].push_back(std::move(r));
      continue;
    }
    WhitneyCover cover = whitney_decompose(bspace, o_ids);
    for (const auto& wb : cover.balls) {
      Region r;
      r.k = k;
      r.center = wb.center;
      r.radius = wb.radius;
      for (int s = 0; s < ns; ++s)
        if (bspace.dist(wb.center, s) <= wb.radius + kTieTol) r.ball_samples.push_back(s);
      regions[k - k_lo].push_back(std::move(r));
    }
  }

  // cone shadows: for each cell, the samples whose cone contains it
  std::vector<std::vector<int>> shadow(n);
  for_cone_pairs(dom, idx, alpha, kNoTrunc, [&](int s, int c) { shadow[c].push_back(s); });

  // strip membership: generation of x is the largest k with x in T(O_k^*)
  auto in_strip = [&](int c, int k) {
    const auto& tk = tent_flags[k - k_lo];
    if (tk.empty() || !tk[c]) return false;
    if (k + 1 > k_hi) return true;
    const auto& tk1 = tent_flags[k + 1 - k_lo];
    return tk1.empty() || !tk1[c];
  };

  // claim-1 enlargement: every strip cell must meet some region of its
  // generation through the cone condition; measure the factor needed
  double C = 1.0;
  std::vector<char> in_ball_sample(ns, 0);
  for (int c = 0; c < n; ++c) {
    if (f.v[c] == 0.0) continue;
    for (int k = k_lo; k < k_hi; ++k) {
      if (!in_strip(c, k)) continue;
      double best = std::numeric_limits<double>::infinity();
      Pt pc = dom.center(c);
      for (const auto& r : regions[k - k_lo]) {
        if (r.center < 0) {
          best = 1.0;
          break;
        }
        // must be in R_alpha(B_i): some sample of B_i sees the cell
        bool sees = false;
        for (int s : shadow[c]) {
          if (bspace.dist(r.center, s) <= r.radius + kTieTol) {
            sees = true;
            break;
          }
        }
        if (!sees) continue;
        const Pt& cen = dom.bsample[r.center];
        double need = std::hypot(pc[0] - cen[0], pc[1] - cen[1]) / r.radius;
        best = std::min(best, need);
      }
      if (std::isfinite(best)) C = std::max(C, best);
      break;  // strips partition the generations
    }
  }
  dec.enlargement = C;

  // build the regions Delta_i^k, the flat pou over them, and the atoms
  struct Accum {
    std::vector<std::pair<int, double>> cells;  // (cell, f * phi)
    double mu = 0.0;
  };
  for (int k = k_lo; k < k_hi; ++k) {
    auto& regs = regions[k - k_lo];
    if (regs.empty()) continue;
    std::vector<Accum> acc(regs.size());
    std::vector<int> cover_count(n, 0);
    std::vector<std::vector<int>> covering(n);
    int overlap = 0;
    for (int c = 0; c < n; ++c) {
      if (!in_strip(c, k)) continue;
      Pt pc = dom.center(c);
      for (size_t i = 0; i < regs.size(); ++i) {
        const auto& r = regs[i];
        bool inside;
        if (r.center < 0) {
          inside = true;
        } else {
          const Pt& cen = dom.bsample[r.center];
          if (std::hypot(pc[0] - cen[0], pc[1] - cen[1]) > C * r.radius + kTieTol) continue;
          bool sees = false;
          for (int s : shadow[c])
            if (bspace.dist(r.center, s) <= r.radius + kTieTol) {
              sees = true;
              break;
            }
          inside = sees;
        }
        if (inside) {
          covering[c].push_back(static_cast<int>(i));
          ++cover_count[c];
        }
      }
      overlap = std::max(overlap, cover_count[c]);
      if (cover_count[c] == 0 && f.v[c] != 0.0)
        throw std::runtime_error("tent decomposition: strip cell not covered by any region");
      for (int i : covering[c]) {
        double phi = 1.0 / cover_count[c];
        double val = f.v[c] * phi;
        if (val != 0.0) {
          acc[i].cells.push_back({c, val});
          acc[i].mu += val * val * dom.h * dom.h / dom.delta[c];
        }
      }
    }
    dec.max_overlap = std::max(dec.max_overlap, overlap);

    for (size_t i = 0; i < regs.size(); ++i) {
      if (acc[i].cells.empty() || acc[i].mu <= 0) continue;
      const auto& r = regs[i];
      TentAtom atom;
      atom.generation = k;
      atom.center_sample = r.center;
      atom.radius = r.center < 0 ? dom.diameter : C * r.radius;
      // sigma of the support ball on the boundary
      double sb = 0.0;
      if (r.center < 0) {
        for (int s = 0; s < ns; ++s) sb += dom.bweight[s];
      } else {
        for (int s = 0; s < ns; ++s)
          if (bspace.dist(r.center, s) <= atom.radius + kTieTol) sb += dom.bweight[s];
      }
      double lambda = std::pow(sb, 1.0 / p - 0.5) * std::sqrt(acc[i].mu);
      atom.values.reserve(acc[i].cells.size());
      for (auto& [c, v] : acc[i].cells) atom.values.push_back({c, v / lambda});
      dec.atoms.push_back(std::move(atom));
      dec.coeffs.push_back(lambda);
      dec.coeff_sum_p += std::pow(lambda, p);
    }
  }

  // reconstruction defect
  std::vector<double> rec(n, 0.0);
  for (size_t a = 0; a < dec.atoms.size(); ++a)
    for (auto& [c, v] : dec.atoms[a].values) rec[c] += dec.coeffs[a] * v;
  for (int c = 0; c < n; ++c)
    dec.recon_error = std::max(dec.recon_error, std::abs(rec[c] - f.v[c]));
  return dec;
}

double tent_atom_validity(const GridDomain& dom, const TentAtom& atom, double p) {
  double mu = 0.0;
  for (auto& [c, v] : atom.values) {
    mu += v * v * dom.h * dom.h / dom.delta[c];
    if (atom.center_sample >= 0) {
      Pt pc = dom.center(c);
      const Pt& cen = dom.bsample[atom.center_sample];
      if (std::hypot(pc[0] - cen[0], pc[1] - cen[1]) > atom.radius + 1e-12)
        return std::numeric_limits<double>::infinity();
    }
  }
  double sb = 0.0;
  for (size_t s = 0; s < dom.bsample.size(); ++s) {
    if (atom.center_sample < 0) {
      sb += dom.bweight[s];
    } else {
      const Pt& cen = dom.bsample[atom.center_sample];
      if (std::hypot(dom.bsample[s][0] - cen[0], dom.bsample[s][1] - cen[1]) <=
          atom.radius + 1e-12)
        sb += dom.bweight[s];
    }
  }
  return mu / std::pow(sb, 1.0 - 2.0 / p);
}

std::string tent_report(const TentDecomposition& dec) {
  std::ostringstream ss;
  ss << "tent decomposition: p=" << fmt(dec.p) << " atoms=" << dec.atoms.size() << "\n";
  ss << "coeff_sum_p " << fmt(dec.coeff_sum_p) << "\n";
  ss << "area_norm_p " << fmt(dec.area_norm_p) << "\n";
  ss << "enlargement " << fmt(dec.enlargement) << "\n";
  ss << "max_overlap " << dec.max_overlap << "\n";
  ss << "recon_error " << fmt(dec.recon_error) << "\n";
  for (size_t a = 0; a < dec.atoms.size(); ++a)
    ss << "atom gen=" << dec.atoms[a].generation << " center=" << dec.atoms[a].center_sample
       << " radius=" << fmt(dec.atoms[a].radius) << " coeff=" << fmt(dec.coeffs[a])
       << " cells=" << dec.atoms[a].values.size() << "\n";
  return ss.str();
}

}  // namespace roughbv
