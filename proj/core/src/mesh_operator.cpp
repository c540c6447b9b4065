#include "maglap/mesh_operator.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "maglap/eigensolver.hpp"

namespace maglap {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

long long edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b);
}

// Cotangent of the angle at p0 toward p1 and p2; rejects degenerate angles.
double cot_checked(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                   const Eigen::Vector3d& p2) {
  Eigen::Vector3d u = p1 - p0;
  Eigen::Vector3d v = p2 - p0;
  double cross = u.cross(v).norm();
  double dot = u.dot(v);
  double angle = std::atan2(cross, dot);
  if (angle < 1e-6 || angle > kPi - 1e-6) {
    throw std::invalid_argument("mesh triangle has a degenerate angle");
  }
  return dot / cross;
}

}  // namespace

int SurfaceMesh::edge_count() const {
  std::map<long long, int> seen;
  for (int f = 0; f < face_count(); ++f) {
    for (int k = 0; k < 3; ++k) {
      ++seen[edge_key(faces(f, k), faces(f, (k + 1) % 3))];
    }
  }
  return int(seen.size());
}

int SurfaceMesh::euler_characteristic() const {
  return vertex_count() - edge_count() + face_count();
}

double SurfaceMesh::total_area() const {
  double area = 0.0;
  for (int f = 0; f < face_count(); ++f) {
    Eigen::Vector3d a = vertices.row(faces(f, 0));
    Eigen::Vector3d b = vertices.row(faces(f, 1));
    Eigen::Vector3d c = vertices.row(faces(f, 2));
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  return area;
}

Eigen::VectorXd SurfaceMesh::vertex_areas() const {
  Eigen::VectorXd areas = Eigen::VectorXd::Zero(vertex_count());
  for (int f = 0; f < face_count(); ++f) {
    Eigen::Vector3d a = vertices.row(faces(f, 0));
    Eigen::Vector3d b = vertices.row(faces(f, 1));
    Eigen::Vector3d c = vertices.row(faces(f, 2));
    double third = (b - a).cross(c - a).norm() / 6.0;
    for (int k = 0; k < 3; ++k) areas[faces(f, k)] += third;
  }
  return areas;
}

Eigen::MatrixXd SurfaceMesh::vertex_normals() const {
  Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(vertex_count(), 3);
  for (int f = 0; f < face_count(); ++f) {
    Eigen::Vector3d a = vertices.row(faces(f, 0));
    Eigen::Vector3d b = vertices.row(faces(f, 1));
    Eigen::Vector3d c = vertices.row(faces(f, 2));
    Eigen::Vector3d w = 0.5 * (b - a).cross(c - a);
    for (int k = 0; k < 3; ++k) normals.row(faces(f, k)) += w.transpose();
  }
  for (int v = 0; v < vertex_count(); ++v) {
    double len = normals.row(v).norm();
    if (len > 0.0) normals.row(v) /= len;
  }
  return normals;
}

SurfaceMesh make_icosphere(int subdivisions, double radius) {
  if (subdivisions < 0 || subdivisions > 6) {
    throw std::invalid_argument("icosphere subdivisions must lie in [0, 6]");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("icosphere radius must be positive");
  }
  double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v = radius * v.normalized();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<long long, int> midpoint;
    auto mid = [&](int a, int b) {
      long long key = edge_key(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = radius * (verts[a] + verts[b]).normalized();
      verts.push_back(m);
      int idx = int(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int m01 = mid(f[0], f[1]);
      int m12 = mid(f[1], f[2]);
      int m02 = mid(f[0], f[2]);
      next.push_back({f[0], m01, m02});
      next.push_back({f[1], m12, m01});
      next.push_back({f[2], m02, m12});
      next.push_back({m01, m12, m02});
    }
    faces = std::move(next);
  }

  SurfaceMesh mesh;
  mesh.vertices.resize(int(verts.size()), 3);
  for (int i = 0; i < int(verts.size()); ++i) mesh.vertices.row(i) = verts[i];
  mesh.faces.resize(int(faces.size()), 3);
  for (int i = 0; i < int(faces.size()); ++i) {
    mesh.faces.row(i) << faces[i][0], faces[i][1], faces[i][2];
  }
  return mesh;
}

SurfaceMesh make_revolution_torus(double R, double r, int res) {
  if (res < 8) {
    throw std::invalid_argument("revolution torus resolution must be at least 8");
  }
  if (!(r > 0.0) || !(R > r)) {
    throw std::invalid_argument(
        "revolution torus requires 0 < tube radius < major radius");
  }
  SurfaceMesh mesh;
  mesh.vertices.resize(res * res, 3);
  auto vid = [res](int i, int j) {
    return ((i % res + res) % res) + res * ((j % res + res) % res);
  };
  for (int j = 0; j < res; ++j) {
    double v = 2.0 * kPi * j / res;
    for (int i = 0; i < res; ++i) {
      double u = 2.0 * kPi * i / res;
      double w = R + r * std::cos(v);
      mesh.vertices.row(vid(i, j)) << w * std::cos(u), w * std::sin(u),
          r * std::sin(v);
    }
  }
  std::vector<std::array<int, 3>> faces;
  faces.reserve(static_cast<std::size_t>(2) * res * res);
  for (int j = 0; j < res; ++j) {
    for (int i = 0; i < res; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j);
      int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      double dA = (mesh.vertices.row(v00) - mesh.vertices.row(v11)).norm();
      double dB = (mesh.vertices.row(v10) - mesh.vertices.row(v01)).norm();
      if (dA <= dB) {
        faces.push_back({v00, v10, v11});
        faces.push_back({v00, v11, v01});
      } else {
        faces.push_back({v00, v10, v01});
        faces.push_back({v10, v11, v01});
      }
    }
  }
  mesh.faces.resize(int(faces.size()), 3);
  for (int i = 0; i < int(faces.size()); ++i) {
    mesh.faces.row(i) << faces[i][0], faces[i][1], faces[i][2];
  }
  return mesh;
}

void write_off(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "OFF\n"
      << mesh.vertex_count() << ' ' << mesh.face_count() << ' '
      << mesh.edge_count() << '\n';
  out << std::setprecision(17);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    out << mesh.vertices(v, 0) << ' ' << mesh.vertices(v, 1) << ' '
        << mesh.vertices(v, 2) << '\n';
  }
  for (int f = 0; f < mesh.face_count(); ++f) {
    out << "3 " << mesh.faces(f, 0) << ' ' << mesh.faces(f, 1) << ' '
        << mesh.faces(f, 2) << '\n';
  }
  if (!out.good()) throw std::runtime_error("failed writing " + path);
}

HermitianOperator build_cotan_magnetic(const SurfaceMesh& mesh,
                                       const AmbientForm& potential,
                                       const AmbientScalar& q) {
  int n = mesh.vertex_count();
  if (n == 0) throw std::invalid_argument("empty mesh");
  std::map<long long, double> weights;
  for (int f = 0; f < mesh.face_count(); ++f) {
    int ia = mesh.faces(f, 0), ib = mesh.faces(f, 1), ic = mesh.faces(f, 2);
    Eigen::Vector3d a = mesh.vertices.row(ia);
    Eigen::Vector3d b = mesh.vertices.row(ib);
    Eigen::Vector3d c = mesh.vertices.row(ic);
    weights[edge_key(ib, ic)] += 0.5 * cot_checked(a, b, c);
    weights[edge_key(ia, ic)] += 0.5 * cot_checked(b, c, a);
    weights[edge_key(ia, ib)] += 0.5 * cot_checked(c, a, b);
  }

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(4 * weights.size() + n);
  for (const auto& [key, w] : weights) {
    int a = int(key >> 32);
    int b = int(key & 0xffffffff);
    double theta = potential.is_zero()
                       ? 0.0
                       : potential.chord_integral(mesh.vertices.row(a),
                                                  mesh.vertices.row(b));
    diag[a] += w;
    diag[b] += w;
    Complex phase = std::polar(1.0, -theta);
    trips.emplace_back(a, b, -w * phase);
    trips.emplace_back(b, a, -w * std::conj(phase));
  }
  Eigen::VectorXd mass = mesh.vertex_areas();
  for (int v = 0; v < n; ++v) {
    double qv = q.value(mesh.vertices.row(v));
    trips.emplace_back(v, v, Complex(diag[v] + qv * mass[v], 0.0));
  }
  HermitianOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  op.mass = mass;
  return op;
}

double mesh_form_norm2(const SurfaceMesh& mesh, const AmbientForm& form) {
  Eigen::VectorXd areas = mesh.vertex_areas();
  Eigen::MatrixXd normals = mesh.vertex_normals();
  double total = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    Eigen::Vector3d x = mesh.vertices.row(v);
    Eigen::Vector3d a = form.value(x);
    Eigen::Vector3d nv = normals.row(v);
    Eigen::Vector3d tangential = a - a.dot(nv) * nv;
    total += tangential.squaredNorm() * areas[v];
  }
  return total;
}

MeshFieldNorm mesh_plaquette_field(const SurfaceMesh& mesh,
                                   const AmbientForm& potential) {
  MeshFieldNorm out;
  out.perFace = Eigen::VectorXd::Zero(mesh.face_count());
  for (int f = 0; f < mesh.face_count(); ++f) {
    Eigen::Vector3d a = mesh.vertices.row(mesh.faces(f, 0));
    Eigen::Vector3d b = mesh.vertices.row(mesh.faces(f, 1));
    Eigen::Vector3d c = mesh.vertices.row(mesh.faces(f, 2));
    double area = 0.5 * (b - a).cross(c - a).norm();
    if (area <= 0.0) throw std::invalid_argument("mesh face with zero area");
    double circ = potential.chord_integral(a, b) +
                  potential.chord_integral(b, c) +
                  potential.chord_integral(c, a);
    out.perFace[f] = circ / area;
    out.norm2 += out.perFace[f] * out.perFace[f] * area;
  }
  return out;
}

MeshQuantities mesh_quantities(const SurfaceMesh& mesh, const AmbientScalar& q,
                               double tol, std::uint64_t seed) {
  MeshQuantities out;
  Eigen::VectorXd areas = mesh.vertex_areas();
  out.area = areas.sum();
  double qInt = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    qInt += q.value(mesh.vertices.row(v)) * areas[v];
  }
  out.qIntegral = qInt;
  HermitianOperator freeOp =
      build_cotan_magnetic(mesh, AmbientForm{}, AmbientScalar{});
  out.mu = lowest_eigenpairs(freeOp, 2, tol, seed).eigenvalues[1];
  return out;
}

}  // namespace maglap
