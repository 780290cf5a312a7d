#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "roughbv/domain2d.hpp"
#include "roughbv/elliptic.hpp"
#include "roughbv/maximal.hpp"

namespace roughbv {

constexpr double kNoTrunc = std::numeric_limits<double>::infinity();

// Materialized cone membership per boundary sample; meant for small grids
// (set computations in tests). The functionals below evaluate cones by
// scattering cells instead and never build this table.
struct ConeTable {
  double alpha = 1.0;
  double R = kNoTrunc;
  std::vector<std::vector<int>> members;  // per sample: interior cells of gamma_alpha
};

ConeTable build_cone_table(const GridDomain& dom, double alpha, double R = kNoTrunc);

enum class NtVariant { kPlain, kModified };

// Non-tangential maximal operator over gamma_alpha(xi) = {y : |xi-y| <
// (1+alpha) delta(y)}, optionally truncated to |xi-y| < R. The modified
// variant takes L2 cell averages over B(y, delta(y)/4) first.
BoundaryFunction ntmax(const GridDomain& dom, const DiscreteField& u, double alpha,
                       NtVariant variant, double R = kNoTrunc);

// modified variant of |field| for vector data (gradients of solutions)
BoundaryFunction ntmax_grad(const GridDomain& dom, const VectorField& g, double alpha,
                            double R = kNoTrunc);

// area functional A(g)(xi) = (sum_{y in cone} g(y)^2 h^2 / delta(y)^2)^{1/2}
BoundaryFunction area_functional(const GridDomain& dom, const DiscreteField& g, double alpha);
BoundaryFunction area_functional_vec(const GridDomain& dom, const VectorField& g, double alpha);

// q-Carleson functional, exact discrete sup over realized radii
BoundaryFunction carleson_functional(const GridDomain& dom, const DiscreteField& g, double q);

// tent space (quasi)norm ||A(g)||_{L^p(sigma)}
double tent_norm(const GridDomain& dom, const DiscreteField& g, double p, double alpha = 1.0);
double tent_norm_vec(const GridDomain& dom, const VectorField& g, double p, double alpha = 1.0);

// T(O) = Omega \ union of cones with vertex outside O (O given per sample)
std::vector<int> tent_of(const GridDomain& dom, const std::vector<char>& in_o, double alpha);

struct TentAtom {
  int center_sample = -1;          // support ball center (boundary sample id)
  double radius = 0.0;             // support ball radius
  std::vector<std::pair<int, double>> values;  // sparse interior cells
  int generation = 0;              // level 2^k
};

struct TentDecomposition {
  double p = 0;
  std::vector<TentAtom> atoms;
  std::vector<double> coeffs;
  double coeff_sum_p = 0;      // sum |lambda|^p
  double area_norm_p = 0;      // ||A(f)||_p^p
  double enlargement = 0;      // measured claim-1 factor C
  int max_overlap = 0;         // per-generation overlap of the regions Delta_i^k
  double recon_error = 0;
};

// Atomic decomposition of T^p_2 data (0 < p <= 1, f bounded with compact
// support): level sets of the area functional, global tau-density expansions,
// Whitney covers on the boundary, and region cuts of the tent strips.
// Aperture 1 and tau = 0.9 fixed. Atoms are normalized through the exponent
// sigma(B)^{1-2/p} of their own support ball, which makes them exactly valid.
TentDecomposition tent_atomic_decompose(const GridDomain& dom, const DiscreteField& f, double p);

// validity factor of one atom: (int a^2/delta) / sigma(B cap dOmega)^{1-2/p},
// <= 1 means a true atom
double tent_atom_validity(const GridDomain& dom, const TentAtom& atom, double p);

std::string tent_report(const TentDecomposition& dec);

}  // namespace roughbv
