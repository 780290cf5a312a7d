#include "roughbv/lp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughbv {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace

std::vector<double> solve_pair_covering_lp(const std::vector<double>& cost,
                                           const std::vector<PairConstraint>& pairs,
                                           double tol, int max_iter) {
  const int n = static_cast<int>(cost.size());
  const int P = static_cast<int>(pairs.size());
  if (P == 0) return std::vector<double>(n, 0.0);

  Vec c(n);
  for (int i = 0; i < n; ++i) {
    if (!(cost[i] > 0)) throw std::invalid_argument("LP costs must be positive");
    c[i] = cost[i];
  }
  Vec b(P);
  std::vector<int> deg(n, 0);
  for (int p = 0; p < P; ++p) {
    b[p] = pairs[p].w;
    ++deg[pairs[p].i];
    ++deg[pairs[p].j];
  }

  auto mul_A = [&](const Vec& u) {  // (Au)_p = u_i + u_j
    Vec r(P);
    for (int p = 0; p < P; ++p) r[p] = u[pairs[p].i] + u[pairs[p].j];
    return r;
  };
  auto mul_At = [&](const Vec& v) {  // (A^T v)_i = sum over pairs at i
    Vec r = Vec::Zero(n);
    for (int p = 0; p < P; ++p) {
      r[pairs[p].i] += v[p];
      r[pairs[p].j] += v[p];
    }
    return r;
  };

  // strictly interior start
  const double wmax = b.maxCoeff();
  Vec x = Vec::Constant(n, 0.5 * std::max(wmax, 1e-6) + 1e-3);
  Vec s = mul_A(x) - b;  // > 0
  double eps = 0.25;
  for (int i = 0; i < n; ++i)
    if (deg[i] > 0) eps = std::min(eps, 0.5 * c[i] / deg[i]);
  Vec y = Vec::Constant(P, eps);
  Vec z = c - mul_At(y);  // >= c/2 > 0

  const double scale = 1.0 + std::max(wmax, c.lpNorm<Eigen::Infinity>());
  Mat M(n, n);
  Vec dy_row(P);

  for (int iter = 0; iter < max_iter; ++iter) {
    Vec rp = mul_A(x) - s - b;          // primal residual
    Vec rd = mul_At(y) + z - c;         // dual residual
    double mu = (x.dot(z) + s.dot(y)) / (n + P);
    double gap = x.dot(z) + s.dot(y);
    if (gap < tol * scale * (n + P) && rp.lpNorm<Eigen::Infinity>() < tol * scale &&
        rd.lpNorm<Eigen::Infinity>() < tol * scale) {
      std::vector<double> out(n);
      for (int i = 0; i < n; ++i) out[i] = std::max(0.0, x[i]);
      return out;
    }

    // M = A^T (Y/S) A + Z/X
    for (int p = 0; p < P; ++p) dy_row[p] = y[p] / s[p];
    M.setZero();
    for (int p = 0; p < P; ++p) {
      const int i = pairs[p].i, j = pairs[p].j;
      const double d = dy_row[p];
      M(i, i) += d;
      M(j, j) += d;
      M(i, j) += d;
      M(j, i) += d;
    }
    for (int i = 0; i < n; ++i) M(i, i) += z[i] / x[i];
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success) throw std::runtime_error("LP normal matrix not SPD");

    auto solve_step = [&](const Vec& rxz, const Vec& rsy, Vec& dx, Vec& dyv, Vec& dz, Vec& ds) {
      // eliminate dz = (rxz - Z dx)/X, ds = (rsy - S dy)/Y:
      //   M dx = -rd + X^{-1} rxz - A^T (Y/S) rp + A^T (rsy / S)
      Vec rhs = -rd;
      for (int i = 0; i < n; ++i) rhs[i] += rxz[i] / x[i];
      Vec v(P);
      for (int p = 0; p < P; ++p) v[p] = -dy_row[p] * rp[p] + rsy[p] / s[p];
      rhs += mul_At(v);
      dx = llt.solve(rhs);
      Vec adx = mul_A(dx);
      dyv.resize(P);
      for (int p = 0; p < P; ++p) dyv[p] = -dy_row[p] * (rp[p] + adx[p]) + rsy[p] / s[p];
      dz.resize(n);
      for (int i = 0; i < n; ++i) dz[i] = (rxz[i] - z[i] * dx[i]) / x[i];
      ds.resize(P);
      for (int p = 0; p < P; ++p) ds[p] = (rsy[p] - s[p] * dyv[p]) / y[p];
    };

    auto step_len = [](const Vec& v, const Vec& dv) {
      double a = 1.0;
      for (int i = 0; i < v.size(); ++i)
        if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
      return a;
    };

    // predictor
    Vec rxz = -(x.array() * z.array()).matrix();
    Vec rsy = -(s.array() * y.array()).matrix();
    Vec dx, dyv, dz, ds;
    solve_step(rxz, rsy, dx, dyv, dz, ds);
    double ap = std::min(step_len(x, dx), step_len(s, ds));
    double ad = std::min(step_len(y, dyv), step_len(z, dz));
    double mu_aff = ((x + ap * dx).dot(z + ad * dz) + (s + ap * ds).dot(y + ad * dyv)) / (n + P);
    double sigma = std::pow(mu_aff / mu, 3);
    sigma = std::clamp(sigma, 1e-8, 0.9);

    // corrector
    for (int i = 0; i < n; ++i) rxz[i] = sigma * mu - x[i] * z[i] - dx[i] * dz[i];
    for (int p = 0; p < P; ++p) rsy[p] = sigma * mu - s[p] * y[p] - ds[p] * dyv[p];
    solve_step(rxz, rsy, dx, dyv, dz, ds);
    ap = 0.995 * std::min(step_len(x, dx), step_len(s, ds));
    ad = 0.995 * std::min(step_len(y, dyv), step_len(z, dz));
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);
    x += ap * dx;
    s += ap * ds;
    y += ad * dyv;
    z += ad * dz;
  }
  throw std::runtime_error("interior point LP did not converge");
}

}  // namespace roughbv
