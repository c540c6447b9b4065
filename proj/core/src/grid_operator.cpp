#include "maglap/grid_operator.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "maglap/eigensolver.hpp"

namespace maglap {
namespace {

void require_resolution(int n1, int n2, const char* what) {
  if (n1 < 8 || n2 < 8) {
    throw std::invalid_argument(std::string(what) +
                                ": resolution must be at least 8 per axis");
  }
}

bool integral_vector(const Eigen::Vector2d& k) {
  return std::abs(k.x() - std::round(k.x())) <= 1e-9 &&
         std::abs(k.y() - std::round(k.y())) <= 1e-9;
}

void require_periodic(const ScalarField& f, const char* what) {
  for (const Wave& w : f.waves) {
    if (w.amp != 0.0 && !integral_vector(w.wave)) {
      throw std::invalid_argument(
          std::string(what) +
          ": wave vectors must be integral for a periodic field");
    }
  }
}

void require_periodic(const OneForm& a, const char* what) {
  for (const DirWave& w : a.waves) {
    if (w.amp != 0.0 && !integral_vector(w.wave)) {
      throw std::invalid_argument(
          std::string(what) +
          ": wave vectors must be integral for a periodic field");
    }
  }
  require_periodic(a.gradient, what);
}

// Cotangent of the triangle angle at p0, spanned toward p1 and p2.
double cot_at(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
              const Eigen::Vector2d& p2) {
  Eigen::Vector2d u = p1 - p0;
  Eigen::Vector2d v = p2 - p0;
  double cross = std::abs(u.x() * v.y() - u.y() * v.x());
  if (cross < 1e-300) throw std::invalid_argument("degenerate grid cell");
  return u.dot(v) / cross;
}

Eigen::ArrayXXd sample_scalar(const ScalarField& f, int n1, int n2) {
  Eigen::ArrayXXd out(n1, n2);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      out(i, j) = f.value({double(i) / n1, double(j) / n2});
    }
  }
  return out;
}

struct EdgeAccumulator {
  std::vector<Eigen::Triplet<Complex>> off;
  Eigen::VectorXd diag;

  explicit EdgeAccumulator(int n) : diag(Eigen::VectorXd::Zero(n)) {}

  void add(int a, int b, double w, double theta) {
    diag[a] += w;
    diag[b] += w;
    Complex phase = std::polar(1.0, -theta);
    off.emplace_back(a, b, -w * phase);
    off.emplace_back(b, a, -w * std::conj(phase));
  }
};

HermitianOperator assemble(int n, EdgeAccumulator& acc,
                           const Eigen::VectorXd& mass,
                           const Eigen::VectorXd& q) {
  for (int i = 0; i < n; ++i) {
    acc.off.emplace_back(i, i, Complex(acc.diag[i] + q[i] * mass[i], 0.0));
  }
  HermitianOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(acc.off.begin(), acc.off.end());
  op.matrix.makeCompressed();
  op.mass = mass;
  return op;
}

}  // namespace

SampledForm zero_sampled_form(int n1, int n2) {
  SampledForm s;
  s.n1 = n1;
  s.n2 = n2;
  s.theta1 = Eigen::ArrayXXd::Zero(n1, n2);
  s.theta2 = Eigen::ArrayXXd::Zero(n1, n2);
  return s;
}

int TorusGrid::vertex_index(int i, int j) const {
  int ii = ((i % n1) + n1) % n1;
  int jj = ((j % n2) + n2) % n2;
  return ii + n1 * jj;
}

Eigen::Vector2d TorusGrid::vertex_params(int i, int j) const {
  int ii = ((i % n1) + n1) % n1;
  int jj = ((j % n2) + n2) % n2;
  return {double(ii) / n1, double(jj) / n2};
}

double TorusGrid::cell_area() const {
  return torus.volume() / (double(n1) * n2);
}

GridWeights grid_weights(const TorusGrid& grid) {
  Eigen::Vector2d a = grid.torus.lattice.basis.col(0) / grid.n1;
  Eigen::Vector2d b = grid.torus.lattice.basis.col(1) / grid.n2;
  Eigen::Vector2d o = Eigen::Vector2d::Zero();
  Eigen::Vector2d ab = a + b;
  GridWeights w;
  if (grid.diagUp) {
    // Triangles {0, a, a+b} and {0, a+b, b} share the long diagonal 0->a+b.
    w.w1 = 0.5 * (cot_at(ab, o, a) + cot_at(o, ab, b));
    w.w2 = 0.5 * (cot_at(ab, o, b) + cot_at(o, a, ab));
    w.wd = 0.5 * (cot_at(a, o, ab) + cot_at(b, o, ab));
  } else {
    // Triangles {0, a, b} and {a, a+b, b} share the diagonal a->b.
    w.w1 = 0.5 * (cot_at(b, o, a) + cot_at(a, ab, b));
    w.w2 = 0.5 * (cot_at(a, o, b) + cot_at(b, a, ab));
    w.wd = 0.5 * (cot_at(o, a, b) + cot_at(ab, a, b));
  }
  return w;
}

TorusGrid make_torus_grid(const FlatTorus& torus, int n1, int n2,
                          const OneForm& potential, const ScalarField& q,
                          const ScalarField& phi) {
  require_resolution(n1, n2, "torus grid");
  if (torus.dim() != 2) {
    throw std::invalid_argument("torus grid requires a 2d lattice");
  }
  require_periodic(potential, "torus magnetic potential");
  require_periodic(q, "torus electric potential");
  require_periodic(phi, "torus conformal factor");

  TorusGrid g{torus, n1, n2, true, {}, {}, {}, {}};
  Eigen::Matrix2d B = torus.lattice.basis;
  g.diagUp = (B.col(0) / n1).dot(B.col(1) / n2) <= 0.0;

  g.potential = zero_sampled_form(n1, n2);
  g.thetaDiag = Eigen::ArrayXXd::Zero(n1, n2);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      Eigen::Vector2d u00(double(i) / n1, double(j) / n2);
      Eigen::Vector2d u10(double(i + 1) / n1, double(j) / n2);
      Eigen::Vector2d u01(double(i) / n1, double(j + 1) / n2);
      Eigen::Vector2d u11(double(i + 1) / n1, double(j + 1) / n2);
      g.potential.theta1(i, j) = potential.line_integral(u00, u10, B);
      g.potential.theta2(i, j) = potential.line_integral(u00, u01, B);
      g.thetaDiag(i, j) = g.diagUp ? potential.line_integral(u00, u11, B)
                                   : potential.line_integral(u10, u01, B);
    }
  }
  g.phi = sample_scalar(phi, n1, n2);
  g.q = sample_scalar(q, n1, n2);
  return g;
}

int RectangleGrid::vertex_index(int i, int j) const {
  return i + (n1 + 1) * j;
}

Eigen::Vector2d RectangleGrid::vertex_point(int i, int j) const {
  return {L1 * double(i) / n1, L2 * double(j) / n2};
}

RectangleGrid make_rectangle_grid(double L1, double L2, int n1, int n2,
                                  const OneForm& potential,
                                  const ScalarField& q) {
  require_resolution(n1, n2, "rectangle grid");
  if (!(L1 > 0.0) || !(L2 > 0.0)) {
    throw std::invalid_argument("rectangle grid: side lengths must be positive");
  }
  RectangleGrid g;
  g.L1 = L1;
  g.L2 = L2;
  g.n1 = n1;
  g.n2 = n2;
  Eigen::Matrix2d P = Eigen::Vector2d(L1, L2).asDiagonal();
  g.theta1 = Eigen::ArrayXXd::Zero(n1, n2 + 1);
  g.theta2 = Eigen::ArrayXXd::Zero(n1 + 1, n2);
  for (int j = 0; j <= n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      Eigen::Vector2d u0(double(i) / n1, double(j) / n2);
      Eigen::Vector2d u1(double(i + 1) / n1, double(j) / n2);
      g.theta1(i, j) = potential.line_integral(u0, u1, P);
    }
  }
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i <= n1; ++i) {
      Eigen::Vector2d u0(double(i) / n1, double(j) / n2);
      Eigen::Vector2d u1(double(i) / n1, double(j + 1) / n2);
      g.theta2(i, j) = potential.line_integral(u0, u1, P);
    }
  }
  g.q = Eigen::ArrayXXd::Zero(n1 + 1, n2 + 1);
  for (int j = 0; j <= n2; ++j) {
    for (int i = 0; i <= n1; ++i) {
      g.q(i, j) = q.value({double(i) / n1, double(j) / n2});
    }
  }
  return g;
}

HermitianOperator build_torus_operator(const TorusGrid& grid) {
  int n = grid.vertex_count();
  GridWeights w = grid_weights(grid);
  EdgeAccumulator acc(n);
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      int v = grid.vertex_index(i, j);
      acc.add(v, grid.vertex_index(i + 1, j), w.w1, grid.potential.theta1(i, j));
      acc.add(v, grid.vertex_index(i, j + 1), w.w2, grid.potential.theta2(i, j));
      if (std::abs(w.wd) > 1e-15) {
        int a = grid.diagUp ? v : grid.vertex_index(i + 1, j);
        int b = grid.diagUp ? grid.vertex_index(i + 1, j + 1)
                            : grid.vertex_index(i, j + 1);
        acc.add(a, b, w.wd, grid.thetaDiag(i, j));
      }
    }
  }
  Eigen::VectorXd mass(n);
  Eigen::VectorXd q(n);
  double area = grid.cell_area();
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      int v = grid.vertex_index(i, j);
      mass[v] = area * std::exp(2.0 * grid.phi(i, j));
      q[v] = grid.q(i, j);
    }
  }
  return assemble(n, acc, mass, q);
}

HermitianOperator build_rectangle_operator(const RectangleGrid& grid) {
  int n = grid.vertex_count();
  double h1 = grid.L1 / grid.n1;
  double h2 = grid.L2 / grid.n2;
  EdgeAccumulator acc(n);
  for (int j = 0; j <= grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      double w = (h2 / h1) * ((j == 0 || j == grid.n2) ? 0.5 : 1.0);
      acc.add(grid.vertex_index(i, j), grid.vertex_index(i + 1, j), w,
              grid.theta1(i, j));
    }
  }
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i <= grid.n1; ++i) {
      double w = (h1 / h2) * ((i == 0 || i == grid.n1) ? 0.5 : 1.0);
      acc.add(grid.vertex_index(i, j), grid.vertex_index(i, j + 1), w,
              grid.theta2(i, j));
    }
  }
  Eigen::VectorXd mass(n);
  Eigen::VectorXd q(n);
  for (int j = 0; j <= grid.n2; ++j) {
    for (int i = 0; i <= grid.n1; ++i) {
      double fi = (i == 0 || i == grid.n1) ? 0.5 : 1.0;
      double fj = (j == 0 || j == grid.n2) ? 0.5 : 1.0;
      int v = grid.vertex_index(i, j);
      mass[v] = h1 * h2 * fi * fj;
      q[v] = grid.q(i, j);
    }
  }
  return assemble(n, acc, mass, q);
}

void apply_gauge(TorusGrid& grid, const ScalarField& gauge) {
  require_periodic(gauge, "torus gauge function");
  auto at = [&](int i, int j) { return gauge.value(grid.vertex_params(i, j)); };
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      double g00 = at(i, j);
      grid.potential.theta1(i, j) += at(i + 1, j) - g00;
      grid.potential.theta2(i, j) += at(i, j + 1) - g00;
      if (grid.diagUp) {
        grid.thetaDiag(i, j) += at(i + 1, j + 1) - g00;
      } else {
        grid.thetaDiag(i, j) += at(i, j + 1) - at(i + 1, j);
      }
    }
  }
}

void apply_gauge(RectangleGrid& grid, const ScalarField& gauge) {
  auto at = [&](int i, int j) {
    return gauge.value({double(i) / grid.n1, double(j) / grid.n2});
  };
  for (int j = 0; j <= grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      grid.theta1(i, j) += at(i + 1, j) - at(i, j);
    }
  }
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i <= grid.n1; ++i) {
      grid.theta2(i, j) += at(i, j + 1) - at(i, j);
    }
  }
}

PlaquetteField plaquette_field(const TorusGrid& grid) {
  PlaquetteField f;
  f.b = Eigen::ArrayXXd::Zero(grid.n1, grid.n2);
  double area = grid.cell_area();
  double norm2 = 0.0;
  auto t1 = [&](int i, int j) {
    return grid.potential.theta1(((i % grid.n1) + grid.n1) % grid.n1,
                                 ((j % grid.n2) + grid.n2) % grid.n2);
  };
  auto t2 = [&](int i, int j) {
    return grid.potential.theta2(((i % grid.n1) + grid.n1) % grid.n1,
                                 ((j % grid.n2) + grid.n2) % grid.n2);
  };
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      double circ = t1(i, j) + t2(i + 1, j) - t1(i, j + 1) - t2(i, j);
      f.b(i, j) = circ / area;
      double phiCell = 0.25 * (grid.phi(i, j) +
                               grid.phi((i + 1) % grid.n1, j) +
                               grid.phi(i, (j + 1) % grid.n2) +
                               grid.phi((i + 1) % grid.n1, (j + 1) % grid.n2));
      norm2 += f.b(i, j) * f.b(i, j) * std::exp(-2.0 * phiCell) * area;
    }
  }
  f.norm2 = norm2;
  return f;
}

PlaquetteField plaquette_field(const RectangleGrid& grid) {
  PlaquetteField f;
  f.b = Eigen::ArrayXXd::Zero(grid.n1, grid.n2);
  double area = (grid.L1 / grid.n1) * (grid.L2 / grid.n2);
  double norm2 = 0.0;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      double circ = grid.theta1(i, j) + grid.theta2(i + 1, j) -
                    grid.theta1(i, j + 1) - grid.theta2(i, j);
      f.b(i, j) = circ / area;
      norm2 += f.b(i, j) * f.b(i, j) * area;
    }
  }
  f.norm2 = norm2;
  return f;
}

namespace {

Eigen::Matrix2d edge_metric(const TorusGrid& grid) {
  Eigen::Matrix2d E;
  E.col(0) = grid.torus.lattice.basis.col(0) / grid.n1;
  E.col(1) = grid.torus.lattice.basis.col(1) / grid.n2;
  return E;
}

}  // namespace

double form_inner(const TorusGrid& grid, const SampledForm& a,
                  const SampledForm& b) {
  if (a.n1 != grid.n1 || a.n2 != grid.n2 || b.n1 != grid.n1 ||
      b.n2 != grid.n2) {
    throw std::invalid_argument("form_inner: sample dimensions mismatch");
  }
  Eigen::Matrix2d E = edge_metric(grid);
  Eigen::Matrix2d W =
      grid.cell_area() * (E.transpose() * E).inverse();
  double total = 0.0;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      Eigen::Vector2d av(a.theta1(i, j), a.theta2(i, j));
      Eigen::Vector2d bv(b.theta1(i, j), b.theta2(i, j));
      total += av.dot(W * bv);
    }
  }
  return total;
}

HodgeParts hodge_decompose(const TorusGrid& grid, const SampledForm& theta) {
  if (theta.n1 != grid.n1 || theta.n2 != grid.n2) {
    throw std::invalid_argument("hodge_decompose: sample dimensions mismatch");
  }
  int n1 = grid.n1;
  int n2 = grid.n2;
  int n = n1 * n2;
  Eigen::Matrix2d E = edge_metric(grid);
  Eigen::Matrix2d W = grid.cell_area() * (E.transpose() * E).inverse();
  double w11 = W(0, 0), w12 = W(0, 1), w22 = W(1, 1);

  // Least-squares potential: minimize sum_v (d f - theta)^T W (d f - theta)
  // with f pinned to zero at vertex 0.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(9) * n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  auto add = [&](int r, int c, double v) {
    if (r == 0 || c == 0) return;
    trips.emplace_back(r - 1, c - 1, v);
  };
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      int v0 = grid.vertex_index(i, j);
      int v1 = grid.vertex_index(i + 1, j);
      int v2 = grid.vertex_index(i, j + 1);
      add(v0, v0, w11 + 2.0 * w12 + w22);
      add(v1, v1, w11);
      add(v2, v2, w22);
      add(v0, v1, -w11 - w12);
      add(v1, v0, -w11 - w12);
      add(v0, v2, -w22 - w12);
      add(v2, v0, -w22 - w12);
      add(v1, v2, w12);
      add(v2, v1, w12);
      double c1 = w11 * theta.theta1(i, j) + w12 * theta.theta2(i, j);
      double c2 = w12 * theta.theta1(i, j) + w22 * theta.theta2(i, j);
      rhs[v1] += c1;
      rhs[v0] -= c1;
      rhs[v2] += c2;
      rhs[v0] -= c2;
    }
  }
  Eigen::SparseMatrix<double> L(n - 1, n - 1);
  L.setFromTriplets(trips.begin(), trips.end());
  L.makeCompressed();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(L);
  if (chol.info() != Eigen::Success) {
    throw std::runtime_error("hodge_decompose: factorization failed");
  }
  Eigen::VectorXd fRed = chol.solve(rhs.tail(n - 1));
  HodgeParts parts;
  parts.potential = Eigen::VectorXd::Zero(n);
  parts.potential.tail(n - 1) = fRed;

  parts.exact = zero_sampled_form(n1, n2);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      double f0 = parts.potential[grid.vertex_index(i, j)];
      parts.exact.theta1(i, j) =
          parts.potential[grid.vertex_index(i + 1, j)] - f0;
      parts.exact.theta2(i, j) =
          parts.potential[grid.vertex_index(i, j + 1)] - f0;
    }
  }

  double mean1 = theta.theta1.mean();
  double mean2 = theta.theta2.mean();
  parts.harmonic.components =
      E.transpose().inverse() * Eigen::Vector2d(mean1, mean2);

  parts.coexact = zero_sampled_form(n1, n2);
  parts.coexact.theta1 = theta.theta1 - mean1 - parts.exact.theta1;
  parts.coexact.theta2 = theta.theta2 - mean2 - parts.exact.theta2;
  return parts;
}

SampledForm sample_constant_form(const TorusGrid& grid,
                                 const ConstantForm& form) {
  Eigen::Matrix2d E = edge_metric(grid);
  SampledForm s = zero_sampled_form(grid.n1, grid.n2);
  s.theta1.setConstant(form.components.dot(E.col(0)));
  s.theta2.setConstant(form.components.dot(E.col(1)));
  return s;
}

Eigen::ArrayXXd sample_form_norm2(const TorusGrid& grid, const OneForm& form) {
  Eigen::ArrayXXd out(grid.n1, grid.n2);
  Eigen::Matrix2d B = grid.torus.lattice.basis;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      out(i, j) = form.value(grid.vertex_params(i, j), B).squaredNorm();
    }
  }
  return out;
}

Eigen::ArrayXXd sample_form_norm2(const RectangleGrid& grid,
                                  const OneForm& form) {
  Eigen::ArrayXXd out(grid.n1 + 1, grid.n2 + 1);
  Eigen::Matrix2d P = Eigen::Vector2d(grid.L1, grid.L2).asDiagonal();
  for (int j = 0; j <= grid.n2; ++j) {
    for (int i = 0; i <= grid.n1; ++i) {
      out(i, j) =
          form.value({double(i) / grid.n1, double(j) / grid.n2}, P).squaredNorm();
    }
  }
  return out;
}

ScalarQuantities scalar_quantities(const TorusGrid& grid, double tol,
                                   std::uint64_t seed) {
  TorusGrid freeGrid = grid;
  freeGrid.potential = zero_sampled_form(grid.n1, grid.n2);
  freeGrid.thetaDiag.setZero();
  freeGrid.q.setZero();
  HermitianOperator freeOp = build_torus_operator(freeGrid);

  ScalarQuantities s;
  s.volume = freeOp.mass.sum();
  double qInt = 0.0;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      qInt += grid.q(i, j) * freeOp.mass[grid.vertex_index(i, j)];
    }
  }
  s.qIntegral = qInt;
  s.mu = lowest_eigenpairs(freeOp, 2, tol, seed).eigenvalues[1];
  return s;
}

ScalarQuantities scalar_quantities(const RectangleGrid& grid, double tol,
                                   std::uint64_t seed) {
  RectangleGrid freeGrid = grid;
  freeGrid.theta1.setZero();
  freeGrid.theta2.setZero();
  freeGrid.q.setZero();
  HermitianOperator freeOp = build_rectangle_operator(freeGrid);

  ScalarQuantities s;
  s.volume = freeOp.mass.sum();
  double qInt = 0.0;
  for (int j = 0; j <= grid.n2; ++j) {
    for (int i = 0; i <= grid.n1; ++i) {
      qInt += grid.q(i, j) * freeOp.mass[grid.vertex_index(i, j)];
    }
  }
  s.qIntegral = qInt;
  s.mu = lowest_eigenpairs(freeOp, 2, tol, seed).eigenvalues[1];
  return s;
}

}  // namespace maglap
