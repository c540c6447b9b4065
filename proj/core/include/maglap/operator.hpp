#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <stdexcept>

namespace maglap {

using Complex = std::complex<double>;
using SparseC = Eigen::SparseMatrix<Complex>;

// Hermitian matrix with an optional positive diagonal mass; the eigenproblem
// of interest is H x = lambda M x. An empty mass vector means the identity.
struct HermitianOperator {
  SparseC matrix;
  Eigen::VectorXd mass;

  int dim() const { return static_cast<int>(matrix.rows()); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    return matrix * x;
  }

  double mass_at(int i) const { return mass.size() ? mass(i) : 1.0; }

  // Exact structural check: every stored entry must have its exact conjugate
  // partner. Builders call this after assembly.
  void check_hermitian() const {
    if (matrix.rows() != matrix.cols())
      throw std::logic_error("operator matrix is not square");
    if (mass.size() && mass.size() != matrix.rows())
      throw std::logic_error("mass dimension mismatch");
    if (mass.size() && mass.minCoeff() <= 0.0)
      throw std::logic_error("mass must be positive");
    SparseC adj = SparseC(matrix.adjoint());
    SparseC diff = matrix - adj;
    for (int o = 0; o < diff.outerSize(); ++o)
      for (SparseC::InnerIterator it(diff, o); it; ++it)
        if (it.value() != Complex(0.0, 0.0))
          throw std::logic_error("operator assembly is not Hermitian");
  }
};

}  // namespace maglap
