#pragma once

#include <vector>

#include "maglap/bound_report.hpp"
#include "maglap/lattice.hpp"

namespace maglap {

// Constant (harmonic) real 1-form on a flat torus, in Cartesian components.
struct ConstantForm {
  Eigen::VectorXd components;
  double norm2() const { return components.squaredNorm(); }
};

// Flat torus R^n / lattice.
struct FlatTorus {
  Lattice lattice;
  explicit FlatTorus(Lattice l) : lattice(std::move(l)) {}
  int dim() const { return lattice.dim(); }
  double volume() const { return lattice.covolume(); }
};

// k smallest eigenvalues of the magnetic Schroedinger operator with constant
// potential form A and constant q: the values |A - w|^2 + q over flux-lattice
// points w, sorted ascending and repeated per multiplicity.
std::vector<double> exact_spectrum(const FlatTorus& T, const ConstantForm& A,
                                   double q, int k);

double exact_lambda1(const FlatTorus& T, const ConstantForm& A);

// Closest flux-lattice points to A (the minimizing gauges).
ClosestResult exact_minimizers(const FlatTorus& T, const ConstantForm& A);

// Equality of the ground eigenvalue with the closed-potential upper bound
// (distance to the flux lattice plus mean potential); exact on flat tori.
BoundReport verify_genusone_equality(const FlatTorus& T, const ConstantForm& A,
                                     double q);

}  // namespace maglap
