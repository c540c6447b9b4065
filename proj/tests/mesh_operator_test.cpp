#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "maglap/eigensolver.hpp"
#include "maglap/mesh_operator.hpp"
#include "oracles.hpp"

using namespace maglap;

namespace {

double signed_volume(const SurfaceMesh& mesh) {
  double vol = 0.0;
  for (int f = 0; f < mesh.face_count(); ++f) {
    Eigen::Vector3d a = mesh.vertices.row(mesh.faces(f, 0));
    Eigen::Vector3d b = mesh.vertices.row(mesh.faces(f, 1));
    Eigen::Vector3d c = mesh.vertices.row(mesh.faces(f, 2));
    vol += a.dot(b.cross(c)) / 6.0;
  }
  return vol;
}

std::vector<double> low_spectrum(const HermitianOperator& op, int k,
                                 std::uint64_t seed) {
  SpectralResult r = lowest_eigenpairs(op, k, 1e-10, seed);
  REQUIRE(r.converged);
  return {r.eigenvalues.begin(), r.eigenvalues.end()};
}

AmbientForm rotation_form(double a) {
  AmbientForm f;
  f.rotation = a;
  return f;
}

}  // namespace

TEST_CASE("icosphere counts, area, and orientation") {
  SurfaceMesh base = make_icosphere(0, 1.0);
  CHECK(base.vertex_count() == 12);
  CHECK(base.face_count() == 20);
  CHECK(base.edge_count() == 30);
  CHECK(base.euler_characteristic() == 2);
  CHECK(signed_volume(base) > 0.0);

  SurfaceMesh s3 = make_icosphere(3, 1.0);
  CHECK(s3.vertex_count() == 642);
  CHECK(s3.face_count() == 1280);
  CHECK(s3.edge_count() == 1920);
  CHECK(s3.euler_characteristic() == 2);
  double sphereArea = 4.0 * oracles::kPi;
  CHECK(std::abs(s3.total_area() - sphereArea) < 0.01 * sphereArea);
  CHECK(signed_volume(s3) > 0.0);
  // Vertices sit on the sphere and the lumped areas sum to the total.
  for (int v = 0; v < s3.vertex_count(); v += 50) {
    CHECK(std::abs(s3.vertices.row(v).norm() - 1.0) < 1e-12);
  }
  CHECK(std::abs(s3.vertex_areas().sum() - s3.total_area()) < 1e-10);

  SurfaceMesh big = make_icosphere(2, 2.0);
  CHECK(std::abs(big.total_area() - 16.0 * oracles::kPi) <
        0.02 * 16.0 * oracles::kPi);
}

TEST_CASE("revolution torus counts and area") {
  int res = 96;
  double R = 2.0, r = 0.5;
  SurfaceMesh torus = make_revolution_torus(R, r, res);
  CHECK(torus.vertex_count() == res * res);
  CHECK(torus.face_count() == 2 * res * res);
  CHECK(torus.edge_count() == 3 * res * res);
  CHECK(torus.euler_characteristic() == 0);
  double exact = 4.0 * oracles::kPi * oracles::kPi * R * r;
  CHECK(std::abs(torus.total_area() - exact) < 0.005 * exact);
  // Enclosed volume of the solid torus: 2 pi^2 R r^2.
  double vol = 2.0 * oracles::kPi * oracles::kPi * R * r * r;
  CHECK(std::abs(signed_volume(torus) - vol) < 0.01 * vol);
}

TEST_CASE("mesh constructors reject invalid arguments") {
  CHECK_THROWS_AS(make_icosphere(7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_icosphere(-1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_icosphere(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_revolution_torus(2.0, 0.5, 7), std::invalid_argument);
  CHECK_THROWS_AS(make_revolution_torus(0.5, 0.5, 16), std::invalid_argument);
  CHECK_THROWS_AS(make_revolution_torus(2.0, -0.1, 16), std::invalid_argument);
}

TEST_CASE("free sphere spectrum approximates l(l+1) with multiplicities") {
  SurfaceMesh sphere = make_icosphere(3, 1.0);
  HermitianOperator op =
      build_cotan_magnetic(sphere, AmbientForm{}, AmbientScalar{});
  op.check_hermitian();
  std::vector<double> eigs = low_spectrum(op, 5, 17);
  CHECK(std::abs(eigs[0]) < 1e-8);
  for (int i = 1; i <= 3; ++i) {
    CHECK(std::abs(eigs[i] - 2.0) < 0.01 * 2.0);
  }
  CHECK(std::abs(eigs[4] - 6.0) < 0.03 * 6.0);
}

TEST_CASE("degenerate triangles are rejected") {
  SurfaceMesh bad;
  bad.vertices.resize(3, 3);
  bad.vertices << 0, 0, 0, 1, 0, 0, 2, 1e-9, 0;
  bad.faces.resize(1, 3);
  bad.faces << 0, 1, 2;
  CHECK_THROWS_AS(build_cotan_magnetic(bad, AmbientForm{}, AmbientScalar{}),
                  std::invalid_argument);
}

TEST_CASE("rotation form norms match the closed-form sphere integrals") {
  SurfaceMesh sphere = make_icosphere(3, 1.0);
  double a = 1.2;
  // Tangential squared norm integrates to a^2 * 8 pi / 3 on the unit sphere.
  double tangential = mesh_form_norm2(sphere, rotation_form(a));
  double exactTan = a * a * 8.0 * oracles::kPi / 3.0;
  CHECK(std::abs(tangential - exactTan) < 0.02 * exactTan);
  // The field dA = 2a dx dy has squared norm 16 pi a^2 / 3 on the sphere.
  MeshFieldNorm field = mesh_plaquette_field(sphere, rotation_form(a));
  double exactField = 16.0 * oracles::kPi * a * a / 3.0;
  CHECK(std::abs(field.norm2 - exactField) < 0.02 * exactField);
  // Total flux through the closed surface vanishes.
  double flux = 0.0;
  for (int f = 0; f < sphere.face_count(); ++f) {
    Eigen::Vector3d p0 = sphere.vertices.row(sphere.faces(f, 0));
    Eigen::Vector3d p1 = sphere.vertices.row(sphere.faces(f, 1));
    Eigen::Vector3d p2 = sphere.vertices.row(sphere.faces(f, 2));
    flux += field.perFace[f] * 0.5 * (p1 - p0).cross(p2 - p0).norm();
  }
  CHECK(std::abs(flux) < 1e-9);
}

TEST_CASE("adding an exact gradient to the potential preserves the spectrum") {
  SurfaceMesh sphere = make_icosphere(2, 1.0);
  AmbientScalar q;
  q.constant = 0.3;
  q.waves.push_back({0.8, Trig::Cos, 2, 2.0, 0.1});
  AmbientForm a = rotation_form(0.9);
  std::vector<double> before =
      low_spectrum(build_cotan_magnetic(sphere, a, q), 4, 19);

  AmbientForm gauged = a;
  gauged.gradient.linear = Eigen::Vector3d(0.4, -1.1, 0.5);
  gauged.gradient.waves.push_back({1.3, Trig::Sin, 0, 3.0, 0.7});
  std::vector<double> after =
      low_spectrum(build_cotan_magnetic(sphere, gauged, q), 4, 19);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(after[i] - before[i]) <
          1e-8 * std::max(1.0, std::abs(before[i])));
  }

  SurfaceMesh torus = make_revolution_torus(2.0, 0.5, 16);
  std::vector<double> tb =
      low_spectrum(build_cotan_magnetic(torus, a, AmbientScalar{}), 4, 23);
  std::vector<double> ta =
      low_spectrum(build_cotan_magnetic(torus, gauged, AmbientScalar{}), 4, 23);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(ta[i] - tb[i]) < 1e-8 * std::max(1.0, std::abs(tb[i])));
  }
}

TEST_CASE("magnetic potentials never lower the mesh ground state") {
  SurfaceMesh sphere = make_icosphere(2, 1.0);
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    AmbientScalar q;
    q.constant = uni(rng);
    q.waves.push_back({1.2 * uni(rng), Trig::Cos, trial % 3, 2.0, uni(rng)});
    AmbientForm a = rotation_form(1.5 * uni(rng));
    a.gradient.waves.push_back({uni(rng), Trig::Sin, (trial + 1) % 3, 2.0,
                                uni(rng)});
    double withA = low_spectrum(build_cotan_magnetic(sphere, a, q), 1, 29)[0];
    double without =
        low_spectrum(build_cotan_magnetic(sphere, AmbientForm{}, q), 1, 29)[0];
    CHECK(withA >= without - 1e-12 * std::max(1.0, std::abs(without)));
  }
}

TEST_CASE("mesh quantities: area, q integral, and mu") {
  SurfaceMesh sphere = make_icosphere(3, 1.0);
  AmbientScalar q;
  q.constant = 0.7;
  // The linear part integrates to zero: the icosphere is centrally symmetric.
  q.linear = Eigen::Vector3d(0.3, -0.2, 0.9);
  MeshQuantities mq = mesh_quantities(sphere, q, 1e-10, 31);
  CHECK(std::abs(mq.area - sphere.total_area()) < 1e-10);
  double expected = 0.7 * mq.area;
  CHECK(std::abs(mq.qIntegral - expected) < 1e-8 * std::max(1.0, expected));
  CHECK(mq.mu >= 1.96);
  CHECK(mq.mu <= 2.0);
}

TEST_CASE("sphere eigenvalue error shrinks under subdivision") {
  double errs[2];
  int idx = 0;
  for (int s : {2, 3}) {
    SurfaceMesh sphere = make_icosphere(s, 1.0);
    HermitianOperator op =
        build_cotan_magnetic(sphere, AmbientForm{}, AmbientScalar{});
    errs[idx++] = std::abs(low_spectrum(op, 2, 37)[1] - 2.0);
  }
  CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("off export round-trips the counts") {
  SurfaceMesh base = make_icosphere(0, 1.0);
  std::string path = "icosa_test.off";
  write_off(base, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "OFF");
  int v = 0, f = 0, e = 0;
  in >> v >> f >> e;
  CHECK(v == 12);
  CHECK(f == 20);
  CHECK(e == 30);
  double x, y, z;
  in >> x >> y >> z;
  CHECK(std::abs(Eigen::Vector3d(x, y, z).norm() - 1.0) < 1e-12);
  std::remove(path.c_str());
}
