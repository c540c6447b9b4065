#include "maglap/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maglap {

namespace {

// LLL reduction (delta = 0.75) of the basis columns; R = B * T with T
// unimodular. Dimensions here are at most 3, so plain double arithmetic with
// full Gram-Schmidt recomputation is ample.
void lll_reduce(Eigen::MatrixXd& B, Eigen::MatrixXi& T) {
  const int n = static_cast<int>(B.cols());
  T = Eigen::MatrixXi::Identity(n, n);
  if (n == 1) return;

  Eigen::MatrixXd bstar(B.rows(), n);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd norm2(n);
  auto gram_schmidt = [&]() {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd v = B.col(i);
      for (int j = 0; j < i; ++j) {
        mu(i, j) = B.col(i).dot(bstar.col(j)) / norm2(j);
        v -= mu(i, j) * bstar.col(j);
      }
      bstar.col(i) = v;
      norm2(i) = v.squaredNorm();
    }
  };

  gram_schmidt();
  int k = 1;
  int guard = 0;
  while (k < n && ++guard < 10000) {
    for (int j = k - 1; j >= 0; --j) {
      const long long q = std::llround(mu(k, j));
      if (q != 0) {
        B.col(k) -= double(q) * B.col(j);
        T.col(k) -= static_cast<int>(q) * T.col(j);
        gram_schmidt();
      }
    }
    if (norm2(k) >= (0.75 - mu(k, k - 1) * mu(k, k - 1)) * norm2(k - 1)) {
      ++k;
    } else {
      B.col(k).swap(B.col(k - 1));
      T.col(k).swap(T.col(k - 1));
      gram_schmidt();
      k = std::max(1, k - 1);
    }
  }
}

// Coefficient vectors (w.r.t. the given basis) of all lattice points within
// the ball; the box bound comes from the row norms of basis^-1.
std::vector<Eigen::VectorXi> raw_enumerate(const Eigen::MatrixXd& basis,
                                           const Eigen::VectorXd& center,
                                           double radius) {
  const int n = static_cast<int>(basis.rows());
  const Eigen::MatrixXd inv = basis.inverse();
  const Eigen::VectorXd c = inv * center;

  Eigen::VectorXi lo(n), hi(n);
  double boxCount = 1.0;
  for (int i = 0; i < n; ++i) {
    const double rho = inv.row(i).norm() * radius;
    lo(i) = static_cast<int>(std::ceil(c(i) - rho - 1e-12));
    hi(i) = static_cast<int>(std::floor(c(i) + rho + 1e-12));
    boxCount *= std::max(0.0, double(hi(i)) - double(lo(i)) + 1.0);
  }
  if (boxCount > 5e7) throw std::runtime_error("enumeration box too large");

  std::vector<Eigen::VectorXi> out;
  if (boxCount < 1.0) return out;
  const double cut = radius * radius * (1.0 + 1e-12) + 1e-300;
  Eigen::VectorXi m = lo;
  while (true) {
    if ((basis * m.cast<double>() - center).squaredNorm() <= cut)
      out.push_back(m);
    int i = n - 1;
    while (i >= 0 && m(i) == hi(i)) {
      m(i) = lo(i);
      --i;
    }
    if (i < 0) break;
    ++m(i);
  }
  return out;
}

bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

LatticePointSet collect(const Lattice& L, const Eigen::MatrixXi& T,
                        std::vector<Eigen::VectorXi> reducedCoeffs) {
  std::vector<Eigen::VectorXi> coeffs(reducedCoeffs.size());
  for (std::size_t i = 0; i < reducedCoeffs.size(); ++i)
    coeffs[i] = T * reducedCoeffs[i];
  std::sort(coeffs.begin(), coeffs.end(), lex_less);

  LatticePointSet out;
  out.coeffs = std::move(coeffs);
  out.points.reserve(out.coeffs.size());
  for (const auto& c : out.coeffs)
    out.points.push_back(L.basis * c.cast<double>());
  return out;
}

}  // namespace

Lattice::Lattice(Eigen::MatrixXd b) : basis(std::move(b)) {
  if (basis.rows() != basis.cols())
    throw std::invalid_argument("lattice basis must be square");
  const int n = static_cast<int>(basis.rows());
  if (n < 1 || n > 3)
    throw std::invalid_argument("lattice dimension must be 1, 2 or 3");
  if (std::abs(basis.determinant()) <= 1e-12)
    throw std::invalid_argument("lattice basis is singular");
}

Lattice dual(const Lattice& L) {
  return Lattice(L.basis.inverse().transpose());
}

Lattice flux_lattice(const Lattice& L) {
  return Lattice(2.0 * std::numbers::pi * dual(L).basis);
}

bool lattices_equal(const Lattice& A, const Lattice& B, double tol) {
  if (A.dim() != B.dim()) return false;
  const Eigen::MatrixXd ab = A.basis.inverse() * B.basis;
  const Eigen::MatrixXd ba = B.basis.inverse() * A.basis;
  auto integral = [tol](const Eigen::MatrixXd& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (std::abs(m(i, j) - std::round(m(i, j))) > tol) return false;
    return true;
  };
  return integral(ab) && integral(ba);
}

LatticePointSet enumerate_ball(const Lattice& L, const Eigen::VectorXd& center,
                               double radius) {
  if (center.size() != L.dim())
    throw std::invalid_argument("center dimension mismatch");
  if (radius < 0.0 || !std::isfinite(radius))
    throw std::invalid_argument("radius must be finite and non-negative");

  Eigen::MatrixXd R = L.basis;
  Eigen::MatrixXi T;
  lll_reduce(R, T);
  return collect(L, T, raw_enumerate(R, center, radius));
}

ClosestResult closest_vectors(const Lattice& L, const Eigen::VectorXd& target) {
  const int n = L.dim();
  if (target.size() != n)
    throw std::invalid_argument("target dimension mismatch");

  Eigen::MatrixXd R = L.basis;
  Eigen::MatrixXi T;
  lll_reduce(R, T);

  // Babai rounding on the reduced basis gives the initial search radius.
  const Eigen::VectorXd c = R.inverse() * target;
  Eigen::VectorXi m0(n);
  for (int i = 0; i < n; ++i) m0(i) = static_cast<int>(std::llround(c(i)));
  const double d0sq = (R * m0.cast<double>() - target).squaredNorm();

  // Radius covering the minimum and every tie within the tie tolerance.
  const double r2 = d0sq * (1.0 + 1e-9) + 2e-9 * std::max(1.0, d0sq) + 1e-300;
  const auto reduced = raw_enumerate(R, target, std::sqrt(r2));

  double dmin2 = d0sq;
  for (const auto& m : reduced)
    dmin2 = std::min(dmin2, (R * m.cast<double>() - target).squaredNorm());

  const double tieTol = 1e-9 * std::max(1.0, dmin2);
  std::vector<Eigen::VectorXi> ties;
  for (const auto& m : reduced)
    if ((R * m.cast<double>() - target).squaredNorm() <= dmin2 + tieTol)
      ties.push_back(m);

  ClosestResult res;
  res.dist2 = dmin2;
  res.minimizers = collect(L, T, std::move(ties));
  return res;
}

double distance_to_flux_lattice(const Lattice& L, const Eigen::VectorXd& h,
                                double volume) {
  if (volume <= 0.0) throw std::invalid_argument("volume must be positive");
  return volume * closest_vectors(flux_lattice(L), h).dist2;
}

}  // namespace maglap
