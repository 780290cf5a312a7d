#pragma once

// Shared helpers for the unit suites: exhaustive oracles that re-derive
// expected values independently of the library path under test.

#include <algorithm>
#include <cmath>
#include <vector>

#include "roughbv/maximal.hpp"
#include "roughbv/mspace.hpp"
#include "roughbv/rng.hpp"

namespace testsup {

using roughbv::BoundaryFunction;
using roughbv::MetricMeasureSpace;

// brute-force centered maximal at one point: max over all realized radii
inline double oracle_centered_maximal(const MetricMeasureSpace& X, const BoundaryFunction& f,
                                      int x) {
  double best = 0.0;
  for (int k = 0; k < X.n(); ++k) {
    double r = X.dist(x, k);
    double sw = 0.0, sf = 0.0;
    for (int y = 0; y < X.n(); ++y)
      if (X.dist(x, y) <= r + 1e-12) {
        sw += X.weight[y];
        sf += X.weight[y] * std::abs(f[y]);
      }
    best = std::max(best, sf / sw);
  }
  return best;
}

// brute-force Calderon sharp at one point
inline double oracle_calderon_sharp(const MetricMeasureSpace& X, const BoundaryFunction& f,
                                    int x) {
  double best = 0.0;
  for (int k = 0; k < X.n(); ++k) {
    double r = X.dist(x, k);
    if (r <= 1e-12) continue;
    double sw = 0.0, sf = 0.0;
    for (int y = 0; y < X.n(); ++y)
      if (X.dist(x, y) <= r + 1e-12) {
        sw += X.weight[y];
        sf += X.weight[y] * f[y];
      }
    double mean = sf / sw, dev = 0.0;
    for (int y = 0; y < X.n(); ++y)
      if (X.dist(x, y) <= r + 1e-12) dev += X.weight[y] * std::abs(f[y] - mean);
    best = std::max(best, dev / sw / r);
  }
  return best;
}

// brute-force dual grand maximal at one point (centered balls), scanning all
// candidate constants c among the data values
inline double oracle_grand_dual_centered(const MetricMeasureSpace& X, const BoundaryFunction& f,
                                         int x) {
  double best = 0.0;
  for (int k = 0; k < X.n(); ++k) {
    double r = X.dist(x, k);
    if (r <= 1e-12) continue;
    double sw = 0.0;
    for (int y = 0; y < X.n(); ++y)
      if (X.dist(x, y) <= r + 1e-12) sw += X.weight[y];
    double mindev = std::numeric_limits<double>::infinity();
    for (int c = 0; c < X.n(); ++c) {
      double dev = 0.0;
      for (int y = 0; y < X.n(); ++y)
        if (X.dist(x, y) <= r + 1e-12) dev += X.weight[y] * std::abs(f[y] - f[c]);
      mindev = std::min(mindev, dev);
    }
    best = std::max(best, mindev / sw / r);
  }
  return best;
}

inline BoundaryFunction random_lipschitz(const MetricMeasureSpace& X, roughbv::Rng& rng,
                                         double scale = 1.0) {
  // random smooth-ish profile: a few radial bumps anchored at random points
  const int m = X.n();
  BoundaryFunction f(m, 0.0);
  int bumps = 2 + static_cast<int>(rng.index(3));
  for (int b = 0; b < bumps; ++b) {
    int c = static_cast<int>(rng.index(m));
    double amp = rng.uniform(-scale, scale);
    double width = rng.uniform(0.1, 0.5) * X.diameter();
    for (int i = 0; i < m; ++i) f[i] += amp * std::max(0.0, 1.0 - X.dist(c, i) / width);
  }
  return f;
}

// exhaustive Whitney cover verification; returns max pou Lipschitz factor
// max_i (lip(phi_i) * r_i) and asserts the structural invariants via REQUIRE
struct CoverCheck {
  bool union_equals_u = false;
  bool lambda_ball_reaches_complement = false;
  bool pou_partition = false;
  bool pou_off_u_zero = false;
  int overlap = 0;
  double neighbor_ratio = 0.0;
  double pou_lip_factor = 0.0;
};

inline CoverCheck verify_cover(const MetricMeasureSpace& X, const std::vector<int>& U,
                               const roughbv::WhitneyCover& cov) {
  CoverCheck c;
  const int m = X.n();
  std::vector<bool> in_u(m, false);
  for (int x : U) in_u[x] = true;

  // (i) exact equality of the union of underline balls with U
  std::vector<bool> covered(m, false);
  bool underline_inside = true;
  for (const auto& b : cov.balls)
    for (int y = 0; y < m; ++y)
      if (X.dist(b.center, y) <= b.radius / cov.lambda + 1e-12) {
        covered[y] = true;
        if (!in_u[y]) underline_inside = false;
      }
  c.union_equals_u = underline_inside;
  for (int y = 0; y < m; ++y)
    if (in_u[y] != covered[y]) c.union_equals_u = false;

  // (iii) lambda B_i meets the complement
  c.lambda_ball_reaches_complement = true;
  for (const auto& b : cov.balls) {
    bool hit = false;
    for (int y = 0; y < m; ++y)
      if (!in_u[y] && X.dist(b.center, y) <= cov.lambda * b.radius + 1e-12) hit = true;
    if (!hit) c.lambda_ball_reaches_complement = false;
  }

  // (ii) overlap
  for (int y = 0; y < m; ++y) {
    int cnt = 0;
    for (const auto& b : cov.balls)
      if (X.dist(b.center, y) <= b.radius + 1e-12) ++cnt;
    c.overlap = std::max(c.overlap, cnt);
  }

  // (iv) neighbor comparability
  c.neighbor_ratio = 1.0;
  for (size_t i = 0; i < cov.balls.size(); ++i)
    for (size_t j = i + 1; j < cov.balls.size(); ++j)
      if (X.dist(cov.balls[i].center, cov.balls[j].center) <=
          cov.balls[i].radius + cov.balls[j].radius + 1e-12) {
        double q = cov.balls[i].radius / cov.balls[j].radius;
        c.neighbor_ratio = std::max(c.neighbor_ratio, std::max(q, 1.0 / q));
      }

  // partition of unity
  c.pou_partition = true;
  c.pou_off_u_zero = true;
  for (int y = 0; y < m; ++y) {
    double s = cov.pou_sum(y);
    if (in_u[y] && std::abs(s - 1.0) > 1e-12) c.pou_partition = false;
    if (!in_u[y] && s != 0.0) c.pou_off_u_zero = false;
  }
  for (size_t i = 0; i < cov.balls.size(); ++i) {
    const auto& b = cov.balls[i];
    for (size_t k = 0; k < b.support.size(); ++k)
      if (X.dist(b.center, b.support[k]) > b.radius + 1e-12) c.pou_partition = false;
    c.pou_lip_factor = std::max(c.pou_lip_factor, b.pou_lip * b.radius);
    if (b.pou_lip > 2.0 / b.radius + 1e-12) c.pou_partition = false;  // pairwise 2/r_i bound
  }
  return c;
}

}  // namespace testsup
