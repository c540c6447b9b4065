#pragma once

#include <Eigen/Dense>
#include <vector>

namespace maglap {

// Full-rank lattice in R^n, n in {1,2,3}; the columns of basis generate it.
struct Lattice {
  Eigen::MatrixXd basis;

  explicit Lattice(Eigen::MatrixXd b);
  int dim() const { return static_cast<int>(basis.rows()); }
  double covolume() const { return std::abs(basis.determinant()); }
};

// Points listed with integer coefficients and the matching Cartesian positions.
// points[i] is exactly basis * coeffs[i]; entries are ordered lexicographically
// by coefficient vector.
struct LatticePointSet {
  std::vector<Eigen::VectorXi> coeffs;
  std::vector<Eigen::VectorXd> points;
  std::size_t size() const { return coeffs.size(); }
};

struct ClosestResult {
  double dist2 = 0.0;
  LatticePointSet minimizers;  // all points attaining dist2 up to the tie tolerance
};

Lattice dual(const Lattice& L);
Lattice flux_lattice(const Lattice& L);

// Same lattice as a point set: both basis changes are integral within tol.
bool lattices_equal(const Lattice& A, const Lattice& B, double tol = 1e-9);

// All lattice points p with |p - center| <= radius. The search box is derived
// from the row norms of basis^-1, so no point in the ball can be missed.
LatticePointSet enumerate_ball(const Lattice& L, const Eigen::VectorXd& center,
                               double radius);

ClosestResult closest_vectors(const Lattice& L, const Eigen::VectorXd& target);

// Squared L2 distance of the constant 1-form h to the flux lattice of L,
// on a torus of the given Riemannian volume: volume * min_w |h - w|^2.
double distance_to_flux_lattice(const Lattice& L, const Eigen::VectorXd& h,
                                double volume);

}  // namespace maglap
