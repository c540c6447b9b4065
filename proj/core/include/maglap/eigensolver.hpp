#pragma once

#include <cstdint>
#include <vector>

#include "maglap/operator.hpp"

namespace maglap {

// Lowest eigenpairs of H x = lambda M x. Eigenvalues are nondecreasing,
// vectors (columns) are M-orthonormal, and residuals[j] is the certificate
// ||H x_j - lambda_j M x_j||_2 with ||x_j||_M = 1. A run that fails to reach
// the tolerance within the sweep budget reports converged = false.
struct SpectralResult {
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  Eigen::MatrixXcd vectors;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

struct SolverOptions {
  int denseThreshold = 600;   // at or below: direct dense solve
  bool forceIterative = false;
  int guard = 8;              // extra subspace vectors beyond k + 4
  int sweepsPerEigenvalue = 50;
};

SpectralResult lowest_eigenpairs(const HermitianOperator& H, int k, double tol,
                                 std::uint64_t seed,
                                 const SolverOptions& opt = {});

// Partial heat trace sum(exp(-t * lambda)) over the given eigenvalues.
double heat_trace_partial(const std::vector<double>& eigs, double t);

// Riesz mean sum((z - lambda)_+) over the given eigenvalues.
double riesz_mean(const std::vector<double>& eigs, double z);

}  // namespace maglap
