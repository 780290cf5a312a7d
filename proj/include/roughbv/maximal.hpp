#pragma once

#include <string>
#include <vector>

#include "roughbv/mspace.hpp"

namespace roughbv {

using BoundaryFunction = std::vector<double>;

// A function together with a Hajlasz gradient candidate. certified means the
// pairwise inequality |f(x)-f(y)| <= d(x,y) (g(x)+g(y)) holds exhaustively.
struct GradientPair {
  BoundaryFunction f;
  BoundaryFunction grad;
  bool certified = false;
};

constexpr double kCertifyTol = 1e-10;

bool hajlasz_certified(const MetricMeasureSpace& X, const BoundaryFunction& f,
                       const BoundaryFunction& grad, double tol = kCertifyTol);

enum class MaxVariant { kUncentered, kCentered, kTruncated };

// Hardy-Littlewood maximal operator; exact discrete supremum over the
// finitely many distinct closed balls. kTruncated restricts centered balls to
// radii r < t (the singleton ball r -> 0+ is always admissible).
BoundaryFunction hl_maximal(const MetricMeasureSpace& X, const BoundaryFunction& f,
                            MaxVariant variant, double t = 0.0);

// Calderon-type maximal operator: sup_r (1/r) avg_{B(x,r)} |f - f_B|.
BoundaryFunction calderon_sharp(const MetricMeasureSpace& X, const BoundaryFunction& f);

// Dual form of the grand maximal of the tangential gradient:
//   sup over admissible balls B of (1/r(B)) inf_c avg_B |f - c|,
// the infimum attained at a weighted median. centered restricts to balls
// centered at the evaluation point; otherwise all balls containing it.
BoundaryFunction grand_maximal_dual(const MetricMeasureSpace& X, const BoundaryFunction& f,
                                    bool centered);

enum class GradMethod { kLpExact, kSharpSurrogate };

// kLpExact: minimizes sum sigma_i g_i over the pair constraints
// g_i + g_j >= |f_i - f_j| / d_ij (p = 1, n <= kLpMaxPoints).
// kSharpSurrogate: C * calderon_sharp(f) with C the smallest certifying scalar.
constexpr int kLpMaxPoints = 512;
GradientPair hajlasz_gradient(const MetricMeasureSpace& X, const BoundaryFunction& f, double p,
                              GradMethod method);

struct Ball {
  int center = -1;
  double radius = 0.0;
};

enum class PoincareVariant { kZeroMean, kCompactSupport };

// Best constant C in the Poincare inequality:
//   zero_mean:       int_B |f-f_B|^p <= C r(B)^p int_B |grad|^p, max over balls
//   compact_support: int_B |f|^p    <= C r(B)^p int_{lambda B} |grad|^p
// Returns +inf when a nonconstant f comes with a vanishing gradient.
double poincare_check(const MetricMeasureSpace& X, const GradientPair& pair, double p,
                      PoincareVariant variant, Ball B = {});

// norms on the space ((sum sigma |f|^p)^{1/p}; quasinorm for p < 1)
double lp_norm(const MetricMeasureSpace& X, const BoundaryFunction& f, double p);
double linf_norm(const BoundaryFunction& f);

// tau-weighted Sobolev norm tau^{-1} ||f||_p + ||grad||_p (1/inf = 0)
double mtau_norm(const MetricMeasureSpace& X, const GradientPair& pair, double p, double tau);

// smallest value v among data with cumulative weight(f <= v) >= total/2
double weighted_median(std::vector<double> values, std::vector<double> weights);

}  // namespace roughbv
