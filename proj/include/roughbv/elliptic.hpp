#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "roughbv/domain2d.hpp"

namespace roughbv {

// Per-cell coefficient matrix A = [a11 a12; a21 a22], not necessarily
// symmetric, subject to the strong ellipticity conditions
// lambda |xi|^2 <= xi . A xi and |A| <= 1/lambda.
struct CoefficientField {
  std::vector<std::array<double, 4>> A;  // a11 a12 a21 a22 per interior cell
  double lambda_ell = 1.0;

  static CoefficientField identity(const GridDomain& dom);
  static CoefficientField from_function(const GridDomain& dom,
                                        const std::function<std::array<double, 4>(Pt)>& fn);
  void validate(const GridDomain& dom) const;
  bool symmetric_diagonal() const;  // a12 == a21 == 0 everywhere
};

// scalar function on interior cells
struct DiscreteField {
  std::vector<double> v;
};

// vector function on interior cells (component storage)
struct VectorField {
  std::vector<double> x, y;
};

// flux values on the east/north faces of each interior cell
struct FaceField {
  std::vector<double> east, north;
};

struct SolverOptions {
  double tol = 1e-10;
  int maxiter = 100000;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

// Finite-volume discretization of div A grad u with harmonically averaged
// diagonal face coefficients (arithmetic for the mixed entries). Dirichlet
// values are imposed on the one-cell band around the interior, interpolated
// linearly in arclength between the two bracketing boundary samples; on
// halfspace-type kinds the artificial sides inherit their nearest physical
// sample values the same way.
class EllipticOperator {
public:
  EllipticOperator(const GridDomain& dom, const CoefficientField& coeff);

  const GridDomain& domain() const { return *dom_; }
  int nband() const { return static_cast<int>(band_dep_.size()); }

  // y = (-div A grad u) on interior cells, with the given band values
  void apply(const std::vector<double>& u, const std::vector<double>& band,
             std::vector<double>& out) const;
  void apply_adjoint(const std::vector<double>& w, std::vector<double>& out) const;

  // masses scattered to band slots: out_b = -sum_C coef(C, b) w_C
  void band_masses(const std::vector<double>& w, std::vector<double>& out) const;
  void scatter_band_to_samples(const std::vector<double>& band,
                               std::vector<double>& samples) const;

  std::vector<double> band_values_from_boundary(const std::vector<double>& f) const;
  const std::vector<double>& diagonal() const { return diag_; }
  bool symmetric() const { return symmetric_; }

private:
  const GridDomain* dom_;
  struct Cell {
    int e, w, n, s, ne, nw, se, sw;  // interior id >= 0, band id encoded as -(b+2), or -1 none
    double a11e, a11w, a22n, a22s, a12e, a12w, a21n, a21s;
  };
  std::vector<Cell> cells_;
  std::vector<GridDomain::Deposit> band_dep_;  // band slot -> bracketing samples
  std::vector<double> diag_;
  bool symmetric_ = true;
  double h2_ = 1.0;

  template <typename F>
  void for_each_entry(int c, F&& fn) const;  // enumerate (position, coefficient)
};

// solution of the continuous Dirichlet problem with boundary data f given on
// the boundary samples; iterative solve to relative residual <= tol
DiscreteField solve_dirichlet(const GridDomain& dom, const CoefficientField& coeff,
                              const std::vector<double>& f, const SolverOptions& opts = {},
                              SolveStats* stats = nullptr);

// -div A grad v = H - div Xi with zero boundary values; Xi given per cell
// (averaged to faces) or directly per face
DiscreteField solve_poisson(const GridDomain& dom, const CoefficientField& coeff,
                            const DiscreteField& H, const VectorField& Xi,
                            const SolverOptions& opts = {}, SolveStats* stats = nullptr);
DiscreteField solve_poisson_face(const GridDomain& dom, const CoefficientField& coeff,
                                 const DiscreteField& H, const FaceField& Xi,
                                 const SolverOptions& opts = {}, SolveStats* stats = nullptr);

struct MeasureEstimate {
  int pole = -1;
  std::vector<double> masses;  // per boundary sample, nonnegative, sum 1
};

// discrete elliptic measure: one adjoint solve with a unit source at the pole
// gives the full row of the solution operator
MeasureEstimate elliptic_measure(const GridDomain& dom, const CoefficientField& coeff, int pole,
                                 const SolverOptions& opts = {});

// Green function with the pole fixed in the second slot: G(., pole) from the
// adjoint solve with source e_pole / h^2
DiscreteField green_function(const GridDomain& dom, const CoefficientField& coeff, int pole,
                             const SolverOptions& opts = {});

// centered differences on interior cells, one-sided where a neighbor is in
// the boundary band
VectorField gradient(const GridDomain& dom, const DiscreteField& u);

FaceField face_gradient(const GridDomain& dom, const DiscreteField& u);

DiscreteField field_from_function(const GridDomain& dom, const std::function<double(Pt)>& fn);
std::vector<double> boundary_from_function(const GridDomain& dom,
                                           const std::function<double(Pt)>& fn);

// CSV rows "i,j,value" and an SVG heatmap of a cell field
std::string field_csv(const GridDomain& dom, const DiscreteField& u);
std::string field_heatmap(const GridDomain& dom, const DiscreteField& u,
                          const std::string& title);

// indicator of a boundary sample set, optionally mollified by a tent kernel
// of the given width along the boundary
std::vector<double> boundary_indicator(const GridDomain& dom, const std::vector<int>& set,
                                       double mollify_width = 0.0);

// omega^pole(F): by default the exact discrete masses; with mollify_width > 0
// the fidelity route that solves with mollified indicator data
double measure_of_set(const GridDomain& dom, const CoefficientField& coeff, int pole,
                      const std::vector<int>& set, double mollify_width = 0.0,
                      const SolverOptions& opts = {});

}  // namespace roughbv
