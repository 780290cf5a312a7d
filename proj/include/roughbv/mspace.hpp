#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace roughbv {

// Balls are closed, {y : d(x,y) <= r + kTieTol}; fixed for determinism on
// finite spaces where open vs closed only matters at realized distances.
constexpr double kTieTol = 1e-12;

enum class MetricKind {
  kLine1D,    // d = |s_i - s_j| on stored arc positions
  kCircle1D,  // d = min(|s_i - s_j|, L - |s_i - s_j|), circumference L
  kEuclid2D,  // d = |p_i - p_j| on stored planar coordinates
  kMatrix,    // explicit dense matrix
};

// A finite metric measure space (X, d, sigma): the stage for all boundary
// analysis. Weights sigma_i > 0, metric symmetric with triangle inequality.
struct MetricMeasureSpace {
  MetricKind kind = MetricKind::kEuclid2D;
  std::vector<double> weight;          // sigma_i > 0
  std::vector<double> arc;             // kLine1D / kCircle1D positions
  double circumference = 0.0;          // kCircle1D
  std::vector<std::array<double, 2>> xy;  // kEuclid2D (also kept for curves when known)
  std::vector<double> dmat;            // kMatrix, row-major n*n
  double lambda = 8.0;                 // uniform perfectness constant, >= 2
  double ahlfors_dim = 0.0;            // reference dimension (0 = none)
  std::string label;

  int n() const { return static_cast<int>(weight.size()); }

  double dist(int i, int j) const;
  double total_mass() const;
  double diameter() const;
  double min_positive_distance() const;

  // distances from i to all points (length n)
  std::vector<double> dist_row(int i) const;

  // checks symmetry/triangle inequality/positive weights; throws on failure
  void validate() const;
};

struct SpaceParams {
  int size = 0;             // points (circle/segment) or depth (cantor4)
  double circumference = 1.0;
  double length = 1.0;
  int depth = 0;
  double lambda = 8.0;
  std::string path;         // from_file
};

MetricMeasureSpace build_space(const std::string& kind, const SpaceParams& params);

// Text format: "d <dim> lambda <l>", then "point <id> <weight> [coords...]",
// then optional "dist <i> <j> <value>" lines.
MetricMeasureSpace read_space_file(const std::string& path);
void write_space_file(const std::string& path, const MetricMeasureSpace& X);

struct RegularityReport {
  double dimension = 0.0;
  double c0 = 0.0;              // best C0 over the tested (x, r) grid
  double doubling = 0.0;        // observed doubling constant
  double ratio_drift = 0.0;     // max/min of sigma(B)/r^d across the grid
  bool uniformly_perfect = false;
  int centers_tested = 0;
  int radii_tested = 0;
};

// Sweeps a logarithmic radius grid placed at log-midpoints between realized
// distances, so that the step function sigma(B(x,r)) is sampled away from
// its jumps. Diagnostic: always returns.
RegularityReport check_regularity(const MetricMeasureSpace& X, double d);

struct WhitneyBall {
  int center = -1;
  double radius = 0.0;           // r_i; underline radius is r_i / lambda
  std::vector<int> support;      // points with pou value > 0 (subset of B_i)
  std::vector<double> pou;       // phi_i on the support points
  double pou_lip = 0.0;          // measured pairwise Lipschitz seminorm of phi_i
};

struct WhitneyCover {
  std::vector<WhitneyBall> balls;
  double lambda = 0.0;
  int overlap_bound = 0;         // observed N
  double neighbor_ratio = 0.0;   // observed max r_i/r_j over intersecting pairs
  std::vector<int> set;          // the decomposed set U (sorted ids)

  // phi_i evaluated at point x (0 off the support)
  double pou_at(int ball, int x) const;
  // sum of phi_i at x
  double pou_sum(int x) const;
};

// Whitney ball decomposition of U (proper nonempty subset of X): greedy cover
// with underline radii d(x, X\U)/(2 lambda); main balls are lambda times the
// underline balls so that lambda B_i always reaches the complement.
// U == X throws ("decomposition requires nonempty complement"); U empty
// returns an empty cover.
WhitneyCover whitney_decompose(const MetricMeasureSpace& X, const std::vector<int>& U);

}  // namespace roughbv
