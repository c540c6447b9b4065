#pragma once

#include <cstdint>

#include "maglap/exact_torus.hpp"
#include "maglap/fields.hpp"
#include "maglap/operator.hpp"

namespace maglap {

// Per-edge line integrals of a 1-form over the two structured edge families
// of an n1 x n2 periodic grid. Entry (i, j) of theta1 belongs to the edge
// from vertex (i, j) to (i+1, j); theta2 to the edge toward (i, j+1).
struct SampledForm {
  int n1 = 0;
  int n2 = 0;
  Eigen::ArrayXXd theta1;
  Eigen::ArrayXXd theta2;
};

SampledForm zero_sampled_form(int n1, int n2);

// Structured periodic grid over a torus R^2 / (lattice). Each parallelogram
// cell is split along its shorter diagonal; edge weights are the cotangent
// weights of that triangulation (the diagonal weight vanishes exactly for
// rectangular bases). A conformal factor enters only through the vertex
// masses cellArea * exp(2 phi).
struct TorusGrid {
  FlatTorus torus;
  int n1 = 0;
  int n2 = 0;
  bool diagUp = true;        // true: cell diagonal (i,j)->(i+1,j+1)
  SampledForm potential;     // edge phases of the magnetic 1-form
  Eigen::ArrayXXd thetaDiag; // phases along the per-cell diagonal
  Eigen::ArrayXXd phi;       // conformal factor at vertices
  Eigen::ArrayXXd q;         // electric potential at vertices

  int vertex_count() const { return n1 * n2; }
  int vertex_index(int i, int j) const;
  Eigen::Vector2d vertex_params(int i, int j) const;
  double cell_area() const;
};

// Edge weights of the torus triangulation: the two axis families and the
// diagonal family.
struct GridWeights {
  double w1 = 0.0;
  double w2 = 0.0;
  double wd = 0.0;
};

GridWeights grid_weights(const TorusGrid& grid);

TorusGrid make_torus_grid(const FlatTorus& torus, int n1, int n2,
                          const OneForm& potential, const ScalarField& q,
                          const ScalarField& phi);

// Neumann grid on [0, L1] x [0, L2] with n1 x n2 cells. Boundary-parallel
// edges carry half weight, so the discretization keeps exact discrete
// cosine eigenfunctions. theta1 is (n1, n2+1), theta2 is (n1+1, n2),
// q is (n1+1, n2+1).
struct RectangleGrid {
  double L1 = 0.0;
  double L2 = 0.0;
  int n1 = 0;
  int n2 = 0;
  Eigen::ArrayXXd theta1;
  Eigen::ArrayXXd theta2;
  Eigen::ArrayXXd q;

  int vertex_count() const { return (n1 + 1) * (n2 + 1); }
  int vertex_index(int i, int j) const;
  Eigen::Vector2d vertex_point(int i, int j) const;
};

RectangleGrid make_rectangle_grid(double L1, double L2, int n1, int n2,
                                  const OneForm& potential,
                                  const ScalarField& q);

HermitianOperator build_torus_operator(const TorusGrid& grid);
HermitianOperator build_rectangle_operator(const RectangleGrid& grid);

// Adds the exact edge integrals of d(gauge) to every stored phase. The
// operator built afterwards is unitarily equivalent to the original one.
void apply_gauge(TorusGrid& grid, const ScalarField& gauge);
void apply_gauge(RectangleGrid& grid, const ScalarField& gauge);

// Cell-averaged magnetic field: oriented circulation of the axis phases
// around each cell divided by the flat cell area. norm2 is the squared L2
// norm of the field 2-form; on a conformal grid the pointwise norm of a
// 2-form scales by exp(-2 phi), which is applied per cell.
struct PlaquetteField {
  Eigen::ArrayXXd b;
  double norm2 = 0.0;
};

PlaquetteField plaquette_field(const TorusGrid& grid);
PlaquetteField plaquette_field(const RectangleGrid& grid);

// L2 inner product of two sampled forms, using the metric-correct quadratic
// form on the per-vertex edge pairs (conformally invariant in 2d).
double form_inner(const TorusGrid& grid, const SampledForm& a,
                  const SampledForm& b);

// Discrete Hodge decomposition theta = d f + delta-free mean part + rest:
// harmonic is the constant Cartesian form matching the family means, exact
// is the discrete gradient of the minimizing potential f, coexact is the
// divergence-free zero-mean remainder.
struct HodgeParts {
  ConstantForm harmonic;
  SampledForm exact;
  SampledForm coexact;
  Eigen::VectorXd potential;  // f, pinned to zero at vertex (0, 0)
};

HodgeParts hodge_decompose(const TorusGrid& grid, const SampledForm& theta);

SampledForm sample_constant_form(const TorusGrid& grid,
                                 const ConstantForm& form);

// Pointwise squared Cartesian norm |A|^2 of the 1-form at grid vertices.
Eigen::ArrayXXd sample_form_norm2(const TorusGrid& grid, const OneForm& form);
Eigen::ArrayXXd sample_form_norm2(const RectangleGrid& grid,
                                  const OneForm& form);

// Riemannian volume, integral of q, and the first positive eigenvalue mu of
// the potential-free non-magnetic operator on the same grid.
struct ScalarQuantities {
  double volume = 0.0;
  double qIntegral = 0.0;
  double mu = 0.0;
};

ScalarQuantities scalar_quantities(const TorusGrid& grid, double tol,
                                   std::uint64_t seed);
ScalarQuantities scalar_quantities(const RectangleGrid& grid, double tol,
                                   std::uint64_t seed);

}  // namespace maglap
