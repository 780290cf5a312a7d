#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "roughbv/mspace.hpp"
#include "roughbv/rng.hpp"

namespace roughbv {

using Pt = std::array<double, 2>;

class SampleIndex;

// A discretized planar domain: interior cells on a uniform grid, the physical
// boundary as a sampled polyline, and the distance field to it. Artificial
// box sides (halfspace-type kinds) are part of the solver band but not of the
// physical boundary_set.
struct GridDomain {
  std::string kind;
  double h = 0.0;
  double x0 = 0.0, y0 = 0.0;  // lower-left corner of cell (0,0)
  int nx = 0, ny = 0;

  std::vector<std::array<int, 2>> cells;  // interior cells (i, j)
  std::vector<int> cell_index;            // (i, j) -> interior id, -1 outside
  std::vector<double> delta;              // distance to boundary_set per cell

  std::vector<std::array<double, 4>> segments;  // boundary polyline pieces
  std::vector<Pt> bsample;                      // boundary samples
  std::vector<double> bweight;                  // H^1 weights per sample
  std::vector<int> sample_chain;                // polyline chain id per sample
  std::vector<int> sample_seg;                  // segment index per sample
  std::vector<double> sample_arc;               // arclength position within chain
  std::vector<int> seg_chain;                   // chain id per segment
  std::vector<double> seg_arc0;                 // arc position of each segment start
  std::vector<double> chain_len;                // total arclength per chain
  std::vector<char> chain_closed;               // wraps around (disk)
  std::vector<std::vector<int>> chain_samples;  // sample ids per chain, in arc order

  double diameter = 0.0;

  int ncells() const { return static_cast<int>(cells.size()); }
  int cell_at(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
    return cell_index[static_cast<size_t>(j) * nx + i];
  }
  Pt center(int c) const {
    return {x0 + (cells[c][0] + 0.5) * h, y0 + (cells[c][1] + 0.5) * h};
  }
  double dist_to_boundary(const Pt& p) const;  // exact distance to the polyline

  // linear deposition onto the two samples bracketing the projection of p in
  // arclength: (sample, weight) pairs with weights summing to one
  struct Deposit {
    int s0 = -1, s1 = -1;
    double w0 = 1.0, w1 = 0.0;
  };
  Deposit deposit(const Pt& p, const SampleIndex& idx) const;
};

struct DomainParams {
  double h = 1.0 / 64.0;
  int depth = 4;
  double L = 1.0;        // sawtooth slope
  double radius = 1.0;   // disk
  double width = 1.0, height = 1.0;  // halfspace_box / sawtooth / slit boxes
};

// kinds: disk | halfspace_box | sawtooth | koch | cantor_complement | slit
GridDomain build_domain(const std::string& kind, const DomainParams& params);

// `kind=..., h=..., depth=..., L=...` (comma or whitespace separated)
GridDomain build_domain_from_spec(const std::string& spec);

// min over sampled (x in boundary, dyadic r in [16h, diam/2]) of the largest
// inscribed interior ball radius inside B(x, r) over r; exhaustive over the
// grid (smaller radii cannot certify an inscribed ball at resolution h)
double corkscrew_check(const GridDomain& dom, int samples);

// boundary samples as a metric measure space (Euclidean ambient metric)
MetricMeasureSpace boundary_space(const GridDomain& dom);

bool domain_connected(const GridDomain& dom);  // 4-neighbor flood fill

// CSV exports: cell rows "i,j,x,y,delta" and boundary rows "x,y,weight"
std::string cells_csv(const GridDomain& dom);
std::string boundary_csv(const GridDomain& dom);

// Uniform-bucket index over the boundary samples: nearest-sample and
// fixed-radius queries in O(output) after an O(n) build.
class SampleIndex {
public:
  explicit SampleIndex(const GridDomain& dom);

  int nearest(const Pt& p, double* dist_out = nullptr) const;

  template <typename F>
  void for_each_within(const Pt& p, double r, F&& fn) const {
    int i0 = bucket_of(p[0] - r, bx0_), i1 = bucket_of(p[0] + r, bx0_);
    int j0 = bucket_of(p[1] - r, by0_), j1 = bucket_of(p[1] + r, by0_);
    i0 = std::max(i0, 0); j0 = std::max(j0, 0);
    i1 = std::min(i1, bnx_ - 1); j1 = std::min(j1, bny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        for (int s : buckets_[static_cast<size_t>(j) * bnx_ + i]) {
          double dx = pts_[s][0] - p[0], dy = pts_[s][1] - p[1];
          double d = std::sqrt(dx * dx + dy * dy);
          if (d <= r) fn(s, d);
        }
  }

private:
  int bucket_of(double v, double origin) const {
    return static_cast<int>(std::floor((v - origin) / bsize_));
  }
  std::vector<Pt> pts_;
  std::vector<std::vector<int>> buckets_;
  double bx0_ = 0, by0_ = 0, bsize_ = 1;
  int bnx_ = 1, bny_ = 1;
};

}  // namespace roughbv
