#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstring>
#include <random>

#include "maglap/eigensolver.hpp"
#include "oracles.hpp"

using namespace maglap;
using oracles::kPi;

namespace {

HermitianOperator from_dense(const Eigen::MatrixXcd& Hd,
                             const Eigen::VectorXd& mass = {}) {
  HermitianOperator op;
  op.matrix = Hd.sparseView();
  op.mass = mass;
  return op;
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return (m + m.adjoint().eval()) * 0.5;
}

// Reference: full dense decomposition of the mass-scaled pencil, done from
// scratch with no shared code path beyond Eigen itself.
Eigen::VectorXd dense_oracle(const Eigen::MatrixXcd& Hd,
                             const Eigen::VectorXd& mass) {
  Eigen::MatrixXcd A = Hd;
  if (mass.size()) {
    Eigen::VectorXd s = mass.cwiseSqrt().cwiseInverse();
    A = s.asDiagonal() * A * s.asDiagonal();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  return es.eigenvalues();
}

// Hand-rolled residual check, independent of the library's own certificate.
double hand_residual(const Eigen::MatrixXcd& Hd, const Eigen::VectorXd& mass,
                     const Eigen::VectorXcd& x, double lambda) {
  const int n = static_cast<int>(Hd.rows());
  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    Complex acc(0, 0);
    for (int j = 0; j < n; ++j) acc += Hd(i, j) * x(j);
    acc -= lambda * (mass.size() ? mass(i) : 1.0) * x(i);
    out += std::norm(acc);
  }
  return std::sqrt(out);
}

}  // namespace

TEST_CASE("diagonal operator returns its smallest entries") {
  const int n = 100;
  Eigen::MatrixXcd Hd = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) Hd(i, i) = Complex(i + 1.0, 0.0);
  auto op = from_dense(Hd);

  for (bool iterative : {false, true}) {
    SolverOptions opt;
    opt.forceIterative = iterative;
    auto res = lowest_eigenpairs(op, 3, 1e-10, 42, opt);
    REQUIRE(res.eigenvalues.size() == 3);
    CHECK(res.converged);
    for (int j = 0; j < 3; ++j) {
      CHECK(res.eigenvalues[j] == doctest::Approx(j + 1.0).epsilon(1e-10));
      CHECK(res.residuals[j] <= 1e-10);
    }
  }
}

TEST_CASE("iterative path matches a dense oracle on random matrices") {
  std::mt19937_64 rng(314);
  std::uniform_int_distribution<int> dims(20, 200);
  SolverOptions opt;
  opt.forceIterative = true;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = dims(rng);
    Eigen::MatrixXcd Hd = random_hermitian(rng, n, 2.0);
    auto op = from_dense(Hd);
    const int k = std::min(6, n - 1);
    auto res = lowest_eigenpairs(op, k, 1e-9, 1000 + trial, opt);
    REQUIRE(res.converged);
    Eigen::VectorXd want = dense_oracle(Hd, {});
    for (int j = 0; j < k; ++j) {
      CHECK(res.eigenvalues[j] ==
            doctest::Approx(want(j)).epsilon(1e-8).scale(1.0));
      CHECK(hand_residual(Hd, {}, res.vectors.col(j), res.eigenvalues[j]) <=
            1e-9);
    }
    // M-orthonormality (identity mass here).
    Eigen::MatrixXcd g = res.vectors.adjoint() * res.vectors;
    CHECK((g - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() <=
          1e-8);
  }
}

TEST_CASE("generalized pencil with diagonal mass") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mdist(0.2, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 120;
    Eigen::MatrixXcd Hd = random_hermitian(rng, n, 1.0);
    Eigen::VectorXd mass(n);
    for (int i = 0; i < n; ++i) mass(i) = mdist(rng);
    auto op = from_dense(Hd, mass);

    SolverOptions opt;
    opt.forceIterative = (trial % 2 == 1);
    auto res = lowest_eigenpairs(op, 5, 1e-9, 7 + trial, opt);
    REQUIRE(res.converged);
    Eigen::VectorXd want = dense_oracle(Hd, mass);
    for (int j = 0; j < 5; ++j) {
      CHECK(res.eigenvalues[j] ==
            doctest::Approx(want(j)).epsilon(1e-8).scale(1.0));
      CHECK(hand_residual(Hd, mass, res.vectors.col(j), res.eigenvalues[j]) <=
            1e-9);
    }
    // M-orthonormal vectors.
    Eigen::MatrixXcd g =
        res.vectors.adjoint() * mass.asDiagonal() * res.vectors;
    CHECK((g - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() <=
          1e-8);
  }
}

TEST_CASE("doubling the mass halves every eigenvalue") {
  std::mt19937_64 rng(5);
  const int n = 80;
  Eigen::MatrixXcd Hd = random_hermitian(rng, n, 1.0);
  auto a = lowest_eigenpairs(from_dense(Hd), 4, 1e-10, 1);
  auto b = lowest_eigenpairs(
      from_dense(Hd, Eigen::VectorXd::Constant(n, 2.0)), 4, 1e-10, 1);
  for (int j = 0; j < 4; ++j)
    CHECK(b.eigenvalues[j] ==
          doctest::Approx(0.5 * a.eigenvalues[j]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("results are bitwise reproducible for a fixed seed") {
  std::mt19937_64 rng(21);
  const int n = 150;
  Eigen::MatrixXcd Hd = random_hermitian(rng, n, 1.5);
  auto op = from_dense(Hd);
  SolverOptions opt;
  opt.forceIterative = true;
  auto a = lowest_eigenpairs(op, 4, 1e-10, 777, opt);
  auto b = lowest_eigenpairs(op, 4, 1e-10, 777, opt);
  CHECK(std::memcmp(a.eigenvalues.data(), b.eigenvalues.data(),
                    a.eigenvalues.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.vectors.data(), b.vectors.data(),
                    sizeof(Complex) * a.vectors.size()) == 0);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("adding c times the mass shifts eigenvalues by exactly c") {
  std::mt19937_64 rng(65);
  const int n = 90;
  Eigen::MatrixXcd Hd = random_hermitian(rng, n, 1.0);
  const double c = 3.25;
  Eigen::MatrixXcd Hc =
      Hd + c * Eigen::MatrixXcd::Identity(n, n);
  for (bool iterative : {false, true}) {
    SolverOptions opt;
    opt.forceIterative = iterative;
    auto a = lowest_eigenpairs(from_dense(Hd), 4, 1e-10, 11, opt);
    auto b = lowest_eigenpairs(from_dense(Hc), 4, 1e-10, 11, opt);
    for (int j = 0; j < 4; ++j) {
      CHECK(b.eigenvalues[j] == doctest::Approx(a.eigenvalues[j] + c)
                                    .epsilon(1e-10)
                                    .scale(1.0));
      const double align =
          std::abs((a.vectors.col(j).adjoint() * b.vectors.col(j))(0, 0));
      CHECK(align == doctest::Approx(1.0).epsilon(1e-7));
    }
  }
}

TEST_CASE("an unreachable tolerance reports non-convergence") {
  std::mt19937_64 rng(1);
  const int n = 60;
  Eigen::MatrixXcd Hd = random_hermitian(rng, n, 1e8);
  SolverOptions opt;
  opt.forceIterative = true;
  opt.sweepsPerEigenvalue = 3;
  auto res = lowest_eigenpairs(from_dense(Hd), 2, 1e-12, 9, opt);
  CHECK_FALSE(res.converged);
  CHECK(res.eigenvalues.size() == 2);
}

TEST_CASE("argument validation") {
  auto op = from_dense(Eigen::MatrixXcd::Identity(10, 10));
  CHECK_THROWS_AS(lowest_eigenpairs(op, 0, 1e-9, 1), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenpairs(op, 10, 1e-9, 1), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenpairs(op, 2, 1e-15, 1), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenpairs(op, 2, 1e-3, 1), std::invalid_argument);
  HermitianOperator bad = op;
  bad.mass = Eigen::VectorXd::Constant(10, -1.0);
  CHECK_THROWS_AS(lowest_eigenpairs(bad, 2, 1e-9, 1), std::invalid_argument);
}

TEST_CASE("partial heat trace of the unit-square modes") {
  auto modes = oracles::rectangle_modes(1.0, 1.0, 20);
  const double got = heat_trace_partial(modes, 0.1);
  const double want = oracles::mode_heat_sum(modes, 0.1);
  CHECK(got == doctest::Approx(want).epsilon(1e-13));
  CHECK(got == doctest::Approx(1.93805).epsilon(1e-4));
  CHECK_THROWS_AS(heat_trace_partial(modes, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(heat_trace_partial(modes, -1.0), std::invalid_argument);
}

TEST_CASE("Riesz mean of the unit-square modes") {
  auto modes = oracles::rectangle_modes(1.0, 1.0, 20);
  const double got = riesz_mean(modes, 30.0);
  CHECK(got == doctest::Approx(oracles::mode_riesz_sum(modes, 30.0))
                   .epsilon(1e-13));
  CHECK(got == doctest::Approx(80.5215824).epsilon(1e-7));
  CHECK(riesz_mean(modes, -5.0) == 0.0);
}

TEST_CASE("Hermiticity violations are caught at assembly checks") {
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(4, 4);
  bad(0, 1) = Complex(1.0, 0.5);
  bad(1, 0) = Complex(1.0, 0.5);  // should be the conjugate
  HermitianOperator op;
  op.matrix = bad.sparseView();
  CHECK_THROWS_AS(op.check_hermitian(), std::logic_error);
}
