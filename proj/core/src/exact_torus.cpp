#include "maglap/exact_torus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maglap {

namespace {

// Half the diagonal of the fundamental box bounds the covering radius.
double covering_estimate(const Lattice& L) {
  double s = 0.0;
  for (int j = 0; j < L.dim(); ++j) s += L.basis.col(j).squaredNorm();
  return 0.5 * std::sqrt(s);
}

}  // namespace

std::vector<double> exact_spectrum(const FlatTorus& T, const ConstantForm& A,
                                   double q, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (A.components.size() != T.dim())
    throw std::invalid_argument("form dimension mismatch");

  const Lattice F = flux_lattice(T.lattice);
  const Eigen::VectorXd a = A.components;

  double r = a.norm() + covering_estimate(F);
  LatticePointSet pts = enumerate_ball(F, a, r);
  while (static_cast<int>(pts.size()) < k) {
    r *= 2.0;
    pts = enumerate_ball(F, a, r);
  }

  std::vector<double> d2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    d2[i] = (pts.points[i] - a).squaredNorm();
  std::nth_element(d2.begin(), d2.begin() + (k - 1), d2.end());
  const double dk = d2[k - 1];

  // Re-enumerate so every point tied with the k-th distance is present.
  const double tieTol = 1e-9 * std::max(1.0, dk);
  pts = enumerate_ball(F, a, std::sqrt(dk + tieTol + 1e-300));

  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    vals[i] = (pts.points[i] - a).squaredNorm();
  std::sort(vals.begin(), vals.end());
  vals.resize(k);
  for (double& v : vals) v += q;
  return vals;
}

double exact_lambda1(const FlatTorus& T, const ConstantForm& A) {
  return exact_minimizers(T, A).dist2;
}

ClosestResult exact_minimizers(const FlatTorus& T, const ConstantForm& A) {
  if (A.components.size() != T.dim())
    throw std::invalid_argument("form dimension mismatch");
  return closest_vectors(flux_lattice(T.lattice), A.components);
}

BoundReport verify_genusone_equality(const FlatTorus& T, const ConstantForm& A,
                                     double q) {
  const double lam1 = exact_lambda1(T, A) + q;
  const double d2 =
      distance_to_flux_lattice(T.lattice, A.components, T.volume());
  const double rhs = d2 / T.volume() + q;
  const double gap = std::abs(lam1 - rhs);
  const double allowance = 1e-12 * std::max(1.0, std::abs(rhs));
  return make_report(
      "genusone_equality",
      "|lambda1 - (d2/vol + q)| <= 1e-12 on a flat torus with constant q", gap,
      allowance, 0.0,
      {{"lambda1", lam1},
       {"dist2", d2},
       {"volume", T.volume()},
       {"q", q}});
}

}  // namespace maglap
