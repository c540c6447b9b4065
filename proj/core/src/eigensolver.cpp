#include "maglap/eigensolver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>
#include <stdexcept>

namespace maglap {

namespace {

void validate(const HermitianOperator& H, int k, double tol) {
  if (H.dim() < 1) throw std::invalid_argument("operator is empty");
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (k >= H.dim()) throw std::invalid_argument("k must be below the dimension");
  if (!(tol >= 1e-12 && tol <= 1e-4))
    throw std::invalid_argument("tol must lie in [1e-12, 1e-4]");
  if (H.mass.size()) {
    if (H.mass.size() != H.dim())
      throw std::invalid_argument("mass dimension mismatch");
    if (!(H.mass.minCoeff() > 0.0))
      throw std::invalid_argument("mass must be positive");
  }
}

// Mass-scaled matrix D^-1/2 H D^-1/2 turning the pencil into a standard one.
SparseC scaled_matrix(const HermitianOperator& H,
                      const Eigen::VectorXd& dinvsqrt) {
  SparseC A = H.matrix;
  for (int o = 0; o < A.outerSize(); ++o)
    for (SparseC::InnerIterator it(A, o); it; ++it)
      it.valueRef() *= dinvsqrt(it.row()) * dinvsqrt(it.col());
  return A;
}

double gershgorin_lower(const SparseC& A) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(n);
  for (int o = 0; o < A.outerSize(); ++o)
    for (SparseC::InnerIterator it(A, o); it; ++it) {
      if (it.row() == it.col())
        diag(it.row()) += it.value().real();
      else
        radius(it.row()) += std::abs(it.value());
    }
  return (diag - radius).minCoeff();
}

// Residuals in the original pencil for the leading columns.
void original_residuals(const HermitianOperator& H,
                        const Eigen::VectorXd& dinvsqrt,
                        const Eigen::MatrixXcd& Y,
                        const Eigen::VectorXd& theta, int count,
                        std::vector<double>& out) {
  out.assign(count, 0.0);
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXcd x = dinvsqrt.asDiagonal() * Y.col(j);
    Eigen::VectorXcd r = H.matrix * x;
    if (H.mass.size())
      r -= theta(j) * (H.mass.asDiagonal() * x).eval();
    else
      r -= theta(j) * x;
    out[j] = r.norm();
  }
}

SpectralResult finish(const HermitianOperator& H,
                      const Eigen::VectorXd& dinvsqrt,
                      const Eigen::MatrixXcd& Y, const Eigen::VectorXd& theta,
                      int k, double tol, std::uint64_t seed, int iterations,
                      bool capped) {
  SpectralResult res;
  res.seed = seed;
  res.iterations = iterations;
  res.eigenvalues.assign(theta.data(), theta.data() + k);
  res.vectors = dinvsqrt.asDiagonal() * Y.leftCols(k);
  original_residuals(H, dinvsqrt, Y, theta, k, res.residuals);
  bool ok = !capped;
  for (double r : res.residuals) ok = ok && r <= tol;
  res.converged = ok;
  return res;
}

}  // namespace

namespace {

// A short Lanczos run (full reorthogonalization) estimating the smallest
// eigenvalue and the spectral spread of A.
struct LanczosEstimate {
  double low = 0.0;     // smallest Ritz value
  double bound = 0.0;   // residual bound on its accuracy
  double spread = 1.0;
};

LanczosEstimate estimate_edge(const SparseC& A, std::mt19937_64& rng) {
  const int n = static_cast<int>(A.rows());
  const int steps = std::min(n, 40);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXcd V(n, steps);
  Eigen::VectorXd alpha(steps), beta(steps);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v.normalize();
  V.col(0) = v;

  int used = 0;
  double lastBeta = 0.0;
  for (int j = 0; j < steps; ++j) {
    Eigen::VectorXcd w = A * V.col(j);
    alpha(j) = w.dot(V.col(j)).real();
    used = j + 1;
    w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w).eval();
    w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w).eval();
    lastBeta = w.norm();
    if (j + 1 == steps || lastBeta < 1e-13 * std::max(1.0, std::abs(alpha(j)))) {
      beta(j) = 0.0;
      break;
    }
    beta(j) = lastBeta;
    V.col(j + 1) = w / lastBeta;
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
  for (int j = 0; j < used; ++j) {
    T(j, j) = alpha(j);
    if (j + 1 < used) T(j, j + 1) = T(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

  LanczosEstimate est;
  est.low = es.eigenvalues()(0);
  est.spread =
      std::max(1e-12, es.eigenvalues()(used - 1) - es.eigenvalues()(0));
  est.bound = lastBeta * std::abs(es.eigenvectors()(used - 1, 0));
  return est;
}

int negative_pivots(const Eigen::SimplicialLDLT<SparseC, Eigen::Lower>& ldlt) {
  const auto d = ldlt.vectorD();
  int count = 0;
  for (int i = 0; i < d.size(); ++i)
    if (std::real(d(i)) < 0.0) ++count;
  return count;
}

}  // namespace

SpectralResult lowest_eigenpairs(const HermitianOperator& H, int k, double tol,
                                 std::uint64_t seed, const SolverOptions& opt) {
  validate(H, k, tol);
  const int n = H.dim();

  Eigen::VectorXd dinvsqrt(n);
  if (H.mass.size())
    dinvsqrt = H.mass.cwiseSqrt().cwiseInverse();
  else
    dinvsqrt.setOnes();

  const SparseC A = scaled_matrix(H, dinvsqrt);

  if (!opt.forceIterative && n <= opt.denseThreshold) {
    Eigen::MatrixXcd Ad(A);
    Ad = (Ad + Ad.adjoint().eval()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Ad);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("dense eigensolver failed");
    return finish(H, dinvsqrt, es.eigenvectors(), es.eigenvalues(), k, tol,
                  seed, 1, false);
  }

  // Shift-invert subspace iteration with Rayleigh-Ritz extraction. The shift
  // is placed just below the smallest eigenvalue (Lanczos estimate, then
  // verified through the LDL^H inertia: zero negative pivots certifies that
  // the shift sits below the whole spectrum). The Gershgorin bound is the
  // unconditional fallback.
  std::mt19937_64 rng(seed);
  const LanczosEstimate edge = estimate_edge(A, rng);
  const double gersh = gershgorin_lower(A);

  SparseC id(n, n);
  id.setIdentity();
  Eigen::SimplicialLDLT<SparseC, Eigen::Lower> ldlt;
  double sigma = 0.0;
  {
    double margin = std::max({3.0 * edge.bound, 1e-3 * edge.spread,
                              1e-8 * std::max(1.0, std::abs(edge.low))});
    sigma = edge.low - margin;
    for (int attempt = 0;; ++attempt) {
      ldlt.compute(SparseC(A - Complex(sigma, 0.0) * id));
      if (ldlt.info() == Eigen::Success && negative_pivots(ldlt) == 0) break;
      if (attempt >= 6 || sigma <= gersh) {
        sigma = gersh - 1e-3 * std::max(1.0, std::abs(gersh));
        ldlt.compute(SparseC(A - Complex(sigma, 0.0) * id));
        if (ldlt.info() != Eigen::Success)
          throw std::runtime_error(
              "factorization of the shifted operator failed");
        break;
      }
      margin *= 8.0;
      sigma = edge.low - margin;
    }
  }

  const int m = std::min(n, k + 4 + opt.guard);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd X(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = Complex(gauss(rng), gauss(rng));

  const int maxSweeps = opt.sweepsPerEigenvalue * k;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
  std::vector<double> gate;
  int sweep = 0;
  bool done = false;
  double lastWorst = std::numeric_limits<double>::infinity();
  for (; sweep < maxSweeps && !done; ++sweep) {
    Eigen::MatrixXcd Y = ldlt.solve(X);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Y);
    Eigen::MatrixXcd Q =
        qr.householderQ() * Eigen::MatrixXcd::Identity(n, m);
    Eigen::MatrixXcd t = Q.adjoint() * (A * Q);
    t = (t + t.adjoint().eval()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t);
    X = Q * es.eigenvectors();
    theta = es.eigenvalues();

    original_residuals(H, dinvsqrt, X, theta, k, gate);
    double worst = 0.0;
    for (double r : gate) worst = std::max(worst, r);
    done = worst <= tol;

    // Slow contraction means the shift is too deep; pull it toward the
    // current ground Ritz value and refactor.
    if (!done && sweep > 0 && sweep % 8 == 7 && worst > 0.5 * lastWorst) {
      double cand = theta(0) - std::max(10.0 * worst,
                                        1e-6 * std::max(1.0, std::abs(theta(0))));
      for (int attempt = 0; cand > sigma && attempt < 4; ++attempt) {
        Eigen::SimplicialLDLT<SparseC, Eigen::Lower> trial;
        trial.compute(SparseC(A - Complex(cand, 0.0) * id));
        if (trial.info() == Eigen::Success && negative_pivots(trial) == 0) {
          ldlt.compute(SparseC(A - Complex(cand, 0.0) * id));
          sigma = cand;
          break;
        }
        cand = sigma + 0.5 * (cand - sigma);
      }
    }
    lastWorst = worst;
  }

  return finish(H, dinvsqrt, X, theta, k, tol, seed, sweep, !done);
}

double heat_trace_partial(const std::vector<double>& eigs, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  double s = 0.0;
  for (double v : eigs) s += std::exp(-t * v);
  return s;
}

double riesz_mean(const std::vector<double>& eigs, double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("z must be finite");
  double s = 0.0;
  for (double v : eigs) s += std::max(0.0, z - v);
  return s;
}

}  // namespace maglap
