#pragma once

#include <vector>

#include "maglap/bound_report.hpp"

namespace maglap {

// Geometric and spectral inputs of the eigenvalue bounds. dist2 is the
// squared L2 distance (volume-weighted) between the harmonic part of the
// potential and the integral flux lattice; mu is the first positive
// eigenvalue of the free Laplacian, which on a surface equals the lowest
// Hodge eigenvalue on coexact 1-forms.
struct Quantities {
  double volume = 0.0;
  double dist2 = 0.0;
  double fieldNorm2 = 0.0;
  double mu = 0.0;
  double qIntegral = 0.0;
  int genus = 0;
};

// (dist2 + fieldNorm2 / mu + qIntegral) / volume.
double gamma_bound(const Quantities& in);

// Inequality tolerance derived from the eigensolver tolerance.
double default_tol(double solverTol, double rhs);

// Error estimate from two resolutions of an order-p scheme.
double richardson_error(double coarse, double fine, int order = 2);

// lambda1 <= gamma.
BoundReport check_lambda1_general(double lambda1, const Quantities& in,
                                  double tol);

// lambda1 <= (dist2 + qIntegral) / volume, valid when the potential is
// closed (vanishing field norm).
BoundReport check_lambda1_closed(double lambda1, const Quantities& in,
                                 double tol);

// lambda2 * volume <= 8 pi floor((genus+3)/2) + fieldNorm2/mu + dist2 + qIntegral
// for a closed oriented surface.
BoundReport check_lambda2_surface(double lambda2, const Quantities& in,
                                  double tol);

// sum_j (z - lambda_j)_+ >= volume (z - gamma)_+^2 / (8 pi). The eigenvalue
// list must be sorted and reach beyond z.
BoundReport check_riesz_mean(const std::vector<double>& eigs, double z,
                             const Quantities& in, double tol);

// (1/k) sum_{j<=k} lambda_j <= 2 pi (k-1)/volume + gamma.
BoundReport check_eigenvalue_sum(const std::vector<double>& eigs, int k,
                                 const Quantities& in, double tol);

// lambda_k <= max(32 pi (k-1)/volume, 2 gamma), valid when the first k
// eigenvalues of the plain Schroedinger operator sum to a nonnegative
// value; freeSum carries that sum and is rejected if negative.
BoundReport check_kth_eigenvalue(const std::vector<double>& eigs, int k,
                                 const Quantities& in, double freeSum,
                                 double tol);

// sum_j exp(-t lambda_j) >= volume exp(-t gamma) / (4 pi t). The computed
// partial sum undercounts the left side, so the check errs on the strict
// side.
BoundReport check_heat_trace(const std::vector<double>& eigs, double t,
                             const Quantities& in, double tol);

// lambda_k(magnetic) <= lambda_k(schrodinger) + slack_k for every index.
BoundReport check_comparison(const std::vector<double>& magnetic,
                             const std::vector<double>& schrodinger,
                             const std::vector<double>& slack);

// lambda1(plain) <= lambda1(magnetic) + tol.
BoundReport check_diamagnetic(double lambda1Magnetic, double lambda1Plain,
                              double tol);

// On a flat torus: lambda1 vanishes exactly when the harmonic part lies in
// the flux lattice, and otherwise stays above a quarter of the pointwise
// squared distance.
BoundReport check_flux_quantization(double lambda1, double dist2,
                                    double volume, double tol);

// Relative eigenvalue drift between two gauge-equivalent operators.
BoundReport check_gauge_invariance(const std::vector<double>& a,
                                   const std::vector<double>& b, double tol);

// Recomputes lhs, rhs, margin, and holds of a report from its recorded
// inputs and compares against the stored values.
bool audit_report(const BoundReport& report, double tol = 1e-12);

}  // namespace maglap
