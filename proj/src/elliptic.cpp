#include "roughbv/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "roughbv/io.hpp"
#include "roughbv/svg.hpp"

namespace roughbv {

namespace {

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

double spectral_norm_2x2(const std::array<double, 4>& A) {
  // largest singular value
  double a = A[0], b = A[1], c = A[2], d = A[3];
  double t1 = a * a + b * b + c * c + d * d;
  double det = a * d - b * c;
  double t2 = std::sqrt(std::max(0.0, t1 * t1 - 4.0 * det * det));
  return std::sqrt(0.5 * (t1 + t2));
}

}  // namespace

CoefficientField CoefficientField::identity(const GridDomain& dom) {
  CoefficientField c;
  c.A.assign(dom.ncells(), {1.0, 0.0, 0.0, 1.0});
  c.lambda_ell = 1.0;
  return c;
}

CoefficientField CoefficientField::from_function(
    const GridDomain& dom, const std::function<std::array<double, 4>(Pt)>& fn) {
  CoefficientField c;
  c.A.resize(dom.ncells());
  double lam = 1.0;
  for (int i = 0; i < dom.ncells(); ++i) {
    c.A[i] = fn(dom.center(i));
    const auto& A = c.A[i];
    double sym_min = 0.5 * (A[0] + A[3]) -
                     std::sqrt(0.25 * (A[0] - A[3]) * (A[0] - A[3]) +
                               0.25 * (A[1] + A[2]) * (A[1] + A[2]));
    lam = std::min({lam, sym_min, 1.0 / spectral_norm_2x2(A)});
  }
  if (!(lam > 0)) throw std::invalid_argument("coefficient field is not elliptic");
  c.lambda_ell = lam;
  return c;
}

void CoefficientField::validate(const GridDomain& dom) const {
  if (static_cast<int>(A.size()) != dom.ncells())
    throw std::invalid_argument("coefficient field size mismatch");
  if (!(lambda_ell > 0) || lambda_ell > 1.0)
    throw std::invalid_argument("ellipticity constant must lie in (0, 1]");
  for (const auto& a : A) {
    double sym_min = 0.5 * (a[0] + a[3]) -
                     std::sqrt(0.25 * (a[0] - a[3]) * (a[0] - a[3]) +
                               0.25 * (a[1] + a[2]) * (a[1] + a[2]));
    if (sym_min < lambda_ell * (1.0 - 1e-12))
      throw std::invalid_argument("matrix fails lambda |xi|^2 <= xi . A xi");
    if (spectral_norm_2x2(a) > 1.0 / lambda_ell * (1.0 + 1e-12))
      throw std::invalid_argument("matrix exceeds |A| <= 1/lambda");
  }
}

bool CoefficientField::symmetric_diagonal() const {
  for (const auto& a : A)
    if (a[1] != 0.0 || a[2] != 0.0) return false;
  return true;
}

EllipticOperator::EllipticOperator(const GridDomain& dom, const CoefficientField& coeff)
    : dom_(&dom) {
  coeff.validate(dom);
  const int n = dom.ncells();
  h2_ = dom.h * dom.h;
  symmetric_ = coeff.symmetric_diagonal();
  cells_.resize(n);

  // band slots: non-interior grid positions referenced by a stencil
  std::vector<int> band_of(static_cast<size_t>(dom.nx) * dom.ny, -1);
  SampleIndex idx(dom);
  auto slot = [&](int i, int j) -> int {
    if (i < 0 || j < 0 || i >= dom.nx || j >= dom.ny) return -1;  // outside allocation: no cell
    int c = dom.cell_at(i, j);
    if (c >= 0) return c;
    int& b = band_of[static_cast<size_t>(j) * dom.nx + i];
    if (b < 0) {
      Pt p = {dom.x0 + (i + 0.5) * dom.h, dom.y0 + (j + 0.5) * dom.h};
      b = static_cast<int>(band_dep_.size());
      band_dep_.push_back(dom.deposit(p, idx));
    }
    return -(b + 2);
  };

  for (int c = 0; c < n; ++c) {
    int i = dom.cells[c][0], j = dom.cells[c][1];
    Cell& s = cells_[c];
    s.e = slot(i + 1, j);
    s.w = slot(i - 1, j);
    s.n = slot(i, j + 1);
    s.s = slot(i, j - 1);
    s.ne = slot(i + 1, j + 1);
    s.nw = slot(i - 1, j + 1);
    s.se = slot(i + 1, j - 1);
    s.sw = slot(i - 1, j - 1);

    auto coeff_at = [&](int nb) -> const std::array<double, 4>& {
      return nb >= 0 ? coeff.A[nb] : coeff.A[c];  // band faces use the cell's own A
    };
    s.a11e = harmonic_mean(coeff.A[c][0], coeff_at(s.e)[0]);
    s.a11w = harmonic_mean(coeff.A[c][0], coeff_at(s.w)[0]);
    s.a22n = harmonic_mean(coeff.A[c][3], coeff_at(s.n)[3]);
    s.a22s = harmonic_mean(coeff.A[c][3], coeff_at(s.s)[3]);
    s.a12e = 0.5 * (coeff.A[c][1] + coeff_at(s.e)[1]);
    s.a12w = 0.5 * (coeff.A[c][1] + coeff_at(s.w)[1]);
    s.a21n = 0.5 * (coeff.A[c][2] + coeff_at(s.n)[2]);
    s.a21s = 0.5 * (coeff.A[c][2] + coeff_at(s.s)[2]);
  }

  diag_.assign(n, 0.0);
  for (int c = 0; c < n; ++c)
    diag_[c] = (cells_[c].a11e + cells_[c].a11w + cells_[c].a22n + cells_[c].a22s) / h2_;
}

// enumerate the off-center couplings of cell c as (position, coefficient),
// where Op u (c) = diag_c u_c + sum coef * u_position
template <typename F>
void EllipticOperator::for_each_entry(int c, F&& fn) const {
  const Cell& s = cells_[c];
  const double inv = 1.0 / h2_;
  fn(s.e, -s.a11e * inv);
  fn(s.w, -s.a11w * inv);
  fn(s.n, -s.a22n * inv);
  fn(s.s, -s.a22s * inv);
  // mixed terms: d/dy at the east/west faces, d/dx at the north/south faces
  const double q = 0.25 * inv;
  fn(s.n, -s.a12e * q);
  fn(s.ne, -s.a12e * q);
  fn(s.s, s.a12e * q);
  fn(s.se, s.a12e * q);
  fn(s.n, s.a12w * q);
  fn(s.nw, s.a12w * q);
  fn(s.s, -s.a12w * q);
  fn(s.sw, -s.a12w * q);
  fn(s.e, -s.a21n * q);
  fn(s.ne, -s.a21n * q);
  fn(s.w, s.a21n * q);
  fn(s.nw, s.a21n * q);
  fn(s.e, s.a21s * q);
  fn(s.se, s.a21s * q);
  fn(s.w, -s.a21s * q);
  fn(s.sw, -s.a21s * q);
}

void EllipticOperator::apply(const std::vector<double>& u, const std::vector<double>& band,
                             std::vector<double>& out) const {
  const int n = static_cast<int>(cells_.size());
  out.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    double acc = diag_[c] * u[c];
    for_each_entry(c, [&](int pos, double coef) {
      if (pos >= 0)
        acc += coef * u[pos];
      else if (pos <= -2)
        acc += coef * band[-(pos + 2)];
    });
    out[c] = acc;
  }
}

void EllipticOperator::apply_adjoint(const std::vector<double>& w,
                                     std::vector<double>& out) const {
  const int n = static_cast<int>(cells_.size());
  out.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    out[c] += diag_[c] * w[c];
    for_each_entry(c, [&](int pos, double coef) {
      if (pos >= 0) out[pos] += coef * w[c];
    });
  }
}

void EllipticOperator::band_masses(const std::vector<double>& w, std::vector<double>& out) const {
  out.assign(band_dep_.size(), 0.0);
  for (int c = 0; c < static_cast<int>(cells_.size()); ++c)
    for_each_entry(c, [&](int pos, double coef) {
      if (pos <= -2) out[-(pos + 2)] -= coef * w[c];
    });
}

void EllipticOperator::scatter_band_to_samples(const std::vector<double>& band,
                                               std::vector<double>& samples) const {
  for (size_t b = 0; b < band_dep_.size(); ++b) {
    const auto& d = band_dep_[b];
    samples[d.s0] += d.w0 * band[b];
    if (d.s1 >= 0) samples[d.s1] += d.w1 * band[b];
  }
}

std::vector<double> EllipticOperator::band_values_from_boundary(
    const std::vector<double>& f) const {
  if (f.size() != dom_->bsample.size())
    throw std::invalid_argument("boundary data size must match boundary samples");
  std::vector<double> band(band_dep_.size());
  for (size_t b = 0; b < band_dep_.size(); ++b) {
    const auto& d = band_dep_[b];
    band[b] = d.w0 * f[d.s0] + (d.s1 >= 0 ? d.w1 * f[d.s1] : 0.0);
  }
  return band;
}

namespace {

using Apply = std::function<void(const std::vector<double>&, std::vector<double>&)>;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

std::string residual_history(const std::vector<double>& hist) {
  std::ostringstream ss;
  size_t from = hist.size() > 6 ? hist.size() - 6 : 0;
  for (size_t k = from; k < hist.size(); ++k) ss << (k > from ? " " : "") << fmt(hist[k], 4);
  return ss.str();
}

// Jacobi-preconditioned CG
void cg(const Apply& A, const std::vector<double>& diag, const std::vector<double>& b,
        std::vector<double>& x, const SolverOptions& opts, SolveStats* stats) {
  const int n = static_cast<int>(b.size());
  x.assign(n, 0.0);
  double bn = nrm(b);
  if (bn == 0.0) return;
  std::vector<double> r = b, z(n), p(n), Ap(n);
  for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);
  std::vector<double> hist;
  for (int it = 0; it < opts.maxiter; ++it) {
    A(p, Ap);
    double alpha = rz / dot(p, Ap);
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    double rn = nrm(r);
    if (stats) {
      stats->iterations = it + 1;
      stats->residual = rn / bn;
    }
    if (rn <= opts.tol * bn) return;
    if (it % 50 == 0) hist.push_back(rn / bn);
    for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw std::runtime_error("cg did not converge after " + std::to_string(opts.maxiter) +
                           " iterations; residual history: " + residual_history(hist));
}

// Jacobi-preconditioned BiCGStab
void bicgstab(const Apply& A, const std::vector<double>& diag, const std::vector<double>& b,
              std::vector<double>& x, const SolverOptions& opts, SolveStats* stats) {
  const int n = static_cast<int>(b.size());
  x.assign(n, 0.0);
  double bn = nrm(b);
  if (bn == 0.0) return;
  std::vector<double> r = b, r0 = b, p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
  double rho = 1, alpha = 1, omega = 1;
  std::vector<double> hist;
  for (int it = 0; it < opts.maxiter; ++it) {
    double rho1 = dot(r0, r);
    if (rho1 == 0.0) break;
    if (it == 0) {
      p = r;
    } else {
      double beta = (rho1 / rho) * (alpha / omega);
      for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho1;
    for (int i = 0; i < n; ++i) ph[i] = p[i] / diag[i];
    A(ph, v);
    alpha = rho / dot(r0, v);
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (nrm(s) <= opts.tol * bn) {
      axpy(alpha, ph, x);
      if (stats) {
        stats->iterations = it + 1;
        stats->residual = nrm(s) / bn;
      }
      return;
    }
    for (int i = 0; i < n; ++i) sh[i] = s[i] / diag[i];
    A(sh, t);
    omega = dot(t, s) / dot(t, t);
    axpy(alpha, ph, x);
    axpy(omega, sh, x);
    for (int i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    double rn = nrm(r);
    if (stats) {
      stats->iterations = it + 1;
      stats->residual = rn / bn;
    }
    if (rn <= opts.tol * bn) return;
    if (it % 50 == 0) hist.push_back(rn / bn);
    if (omega == 0.0) break;
  }
  throw std::runtime_error("bicgstab did not converge after " + std::to_string(opts.maxiter) +
                           " iterations; residual history: " + residual_history(hist));
}

void krylov_solve(const EllipticOperator& op, const std::vector<double>& rhs,
                  std::vector<double>& x, bool adjoint, const SolverOptions& opts,
                  SolveStats* stats) {
  Apply A;
  std::vector<double> zero_band(op.nband(), 0.0);
  if (adjoint)
    A = [&op](const std::vector<double>& u, std::vector<double>& out) {
      op.apply_adjoint(u, out);
    };
  else
    A = [&op, &zero_band](const std::vector<double>& u, std::vector<double>& out) {
      op.apply(u, zero_band, out);
    };
  if (op.symmetric())
    cg(A, op.diagonal(), rhs, x, opts, stats);
  else
    bicgstab(A, op.diagonal(), rhs, x, opts, stats);
}

}  // namespace

DiscreteField solve_dirichlet(const GridDomain& dom, const CoefficientField& coeff,
                              const std::vector<double>& f, const SolverOptions& opts,
                              SolveStats* stats) {
  EllipticOperator op(dom, coeff);
  std::vector<double> band = op.band_values_from_boundary(f);
  const int n = dom.ncells();
  std::vector<double> zero(n, 0.0), rhs(n);
  op.apply(zero, band, rhs);
  for (double& v : rhs) v = -v;
  DiscreteField u;
  krylov_solve(op, rhs, u.v, /*adjoint=*/false, opts, stats);
  return u;
}

namespace {

std::vector<double> poisson_rhs(const GridDomain& dom, const DiscreteField& H,
                                const std::function<double(int)>& divXi) {
  std::vector<double> rhs(dom.ncells());
  for (int c = 0; c < dom.ncells(); ++c) rhs[c] = H.v[c] - divXi(c);
  return rhs;
}

}  // namespace

DiscreteField solve_poisson(const GridDomain& dom, const CoefficientField& coeff,
                            const DiscreteField& H, const VectorField& Xi,
                            const SolverOptions& opts, SolveStats* stats) {
  EllipticOperator op(dom, coeff);
  auto at = [&](const std::vector<double>& a, int i, int j) {
    int c = dom.cell_at(i, j);
    return c >= 0 ? a[c] : 0.0;  // compactly supported data vanishes at the band
  };
  auto divXi = [&](int c) {
    int i = dom.cells[c][0], j = dom.cells[c][1];
    // centered face averages: value on the east face is the mean of the two
    // adjacent cells, so div reduces to wide centered differences
    return (at(Xi.x, i + 1, j) - at(Xi.x, i - 1, j) + at(Xi.y, i, j + 1) -
            at(Xi.y, i, j - 1)) /
           (2.0 * dom.h);
  };
  std::vector<double> rhs = poisson_rhs(dom, H, divXi);
  DiscreteField u;
  krylov_solve(op, rhs, u.v, false, opts, stats);
  return u;
}

DiscreteField solve_poisson_face(const GridDomain& dom, const CoefficientField& coeff,
                                 const DiscreteField& H, const FaceField& Xi,
                                 const SolverOptions& opts, SolveStats* stats) {
  EllipticOperator op(dom, coeff);
  auto face = [&](const std::vector<double>& a, int i, int j) {
    int c = dom.cell_at(i, j);
    return c >= 0 ? a[c] : 0.0;
  };
  auto divXi = [&](int c) {
    int i = dom.cells[c][0], j = dom.cells[c][1];
    return (face(Xi.east, i, j) - face(Xi.east, i - 1, j) + face(Xi.north, i, j) -
            face(Xi.north, i, j - 1)) /
           dom.h;
  };
  std::vector<double> rhs = poisson_rhs(dom, H, divXi);
  DiscreteField u;
  krylov_solve(op, rhs, u.v, false, opts, stats);
  return u;
}

MeasureEstimate elliptic_measure(const GridDomain& dom, const CoefficientField& coeff, int pole,
                                 const SolverOptions& opts) {
  if (pole < 0 || pole >= dom.ncells()) throw std::invalid_argument("pole must be an interior cell");
  EllipticOperator op(dom, coeff);
  std::vector<double> rhs(dom.ncells(), 0.0);
  rhs[pole] = 1.0;
  std::vector<double> w;
  krylov_solve(op, rhs, w, /*adjoint=*/true, opts, nullptr);
  std::vector<double> mb;
  op.band_masses(w, mb);
  MeasureEstimate est;
  est.pole = pole;
  est.masses.assign(dom.bsample.size(), 0.0);
  op.scatter_band_to_samples(mb, est.masses);
  return est;
}

DiscreteField green_function(const GridDomain& dom, const CoefficientField& coeff, int pole,
                             const SolverOptions& opts) {
  if (pole < 0 || pole >= dom.ncells()) throw std::invalid_argument("pole must be an interior cell");
  EllipticOperator op(dom, coeff);
  std::vector<double> rhs(dom.ncells(), 0.0);
  rhs[pole] = 1.0 / (dom.h * dom.h);  // delta source normalized by cell area
  DiscreteField g;
  krylov_solve(op, rhs, g.v, /*adjoint=*/true, opts, nullptr);
  return g;
}

VectorField gradient(const GridDomain& dom, const DiscreteField& u) {
  VectorField g;
  const int n = dom.ncells();
  g.x.assign(n, 0.0);
  g.y.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    int i = dom.cells[c][0], j = dom.cells[c][1];
    int e = dom.cell_at(i + 1, j), w = dom.cell_at(i - 1, j);
    int nn = dom.cell_at(i, j + 1), ss = dom.cell_at(i, j - 1);
    if (e >= 0 && w >= 0)
      g.x[c] = (u.v[e] - u.v[w]) / (2.0 * dom.h);
    else if (e >= 0)
      g.x[c] = (u.v[e] - u.v[c]) / dom.h;
    else if (w >= 0)
      g.x[c] = (u.v[c] - u.v[w]) / dom.h;
    if (nn >= 0 && ss >= 0)
      g.y[c] = (u.v[nn] - u.v[ss]) / (2.0 * dom.h);
    else if (nn >= 0)
      g.y[c] = (u.v[nn] - u.v[c]) / dom.h;
    else if (ss >= 0)
      g.y[c] = (u.v[c] - u.v[ss]) / dom.h;
  }
  return g;
}

FaceField face_gradient(const GridDomain& dom, const DiscreteField& u) {
  FaceField f;
  const int n = dom.ncells();
  f.east.assign(n, 0.0);
  f.north.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    int i = dom.cells[c][0], j = dom.cells[c][1];
    int e = dom.cell_at(i + 1, j), nn = dom.cell_at(i, j + 1);
    if (e >= 0) f.east[c] = (u.v[e] - u.v[c]) / dom.h;
    if (nn >= 0) f.north[c] = (u.v[nn] - u.v[c]) / dom.h;
  }
  return f;
}

DiscreteField field_from_function(const GridDomain& dom, const std::function<double(Pt)>& fn) {
  DiscreteField f;
  f.v.resize(dom.ncells());
  for (int c = 0; c < dom.ncells(); ++c) f.v[c] = fn(dom.center(c));
  return f;
}

std::vector<double> boundary_from_function(const GridDomain& dom,
                                           const std::function<double(Pt)>& fn) {
  std::vector<double> f(dom.bsample.size());
  for (size_t s = 0; s < dom.bsample.size(); ++s) f[s] = fn(dom.bsample[s]);
  return f;
}

std::string field_csv(const GridDomain& dom, const DiscreteField& u) {
  std::ostringstream ss;
  ss << "i,j,value\n";
  for (int c = 0; c < dom.ncells(); ++c)
    ss << dom.cells[c][0] << ',' << dom.cells[c][1] << ',' << fmt(u.v[c]) << "\n";
  return ss.str();
}

std::string field_heatmap(const GridDomain& dom, const DiscreteField& u,
                          const std::string& title) {
  return svg_heatmap(dom.cells, u.v, dom.nx, dom.ny, title);
}

std::vector<double> boundary_indicator(const GridDomain& dom, const std::vector<int>& set,
                                       double mollify_width) {
  const int ns = static_cast<int>(dom.bsample.size());
  std::vector<double> chi(ns, 0.0);
  for (int s : set) chi[s] = 1.0;
  if (mollify_width <= 0.0) return chi;
  std::vector<double> out(ns, 0.0);
  for (int s = 0; s < ns; ++s) {
    double acc = 0.0, wsum = 0.0;
    for (int t = 0; t < ns; ++t) {
      double d = std::hypot(dom.bsample[s][0] - dom.bsample[t][0],
                            dom.bsample[s][1] - dom.bsample[t][1]);
      double w = std::max(0.0, 1.0 - d / mollify_width) * dom.bweight[t];
      acc += w * chi[t];
      wsum += w;
    }
    out[s] = wsum > 0 ? acc / wsum : chi[s];
  }
  return out;
}

double measure_of_set(const GridDomain& dom, const CoefficientField& coeff, int pole,
                      const std::vector<int>& set, double mollify_width,
                      const SolverOptions& opts) {
  if (mollify_width <= 0.0) {
    MeasureEstimate est = elliptic_measure(dom, coeff, pole, opts);
    double m = 0.0;
    for (int s : set) m += est.masses[s];
    return m;
  }
  std::vector<double> f = boundary_indicator(dom, set, mollify_width);
  DiscreteField u = solve_dirichlet(dom, coeff, f, opts);
  return u.v[pole];
}

}  // namespace roughbv
