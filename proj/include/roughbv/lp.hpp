#pragma once

#include <cstdint>
#include <vector>

namespace roughbv {

// min c.x  subject to  x_i + x_j >= w_p for each pair p = (i, j),  x >= 0.
// Dense primal-dual interior point on the normal equations; the central path
// limit picks the analytic center of the optimal face, so symmetric inputs
// get symmetric minimizers. Throws on non-convergence.
struct PairConstraint {
  int i = 0, j = 0;
  double w = 0.0;
};

std::vector<double> solve_pair_covering_lp(const std::vector<double>& cost,
                                           const std::vector<PairConstraint>& pairs,
                                           double tol = 1e-11, int max_iter = 200);

}  // namespace roughbv
