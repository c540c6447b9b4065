#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maglap/fields.hpp"
#include "maglap/operator.hpp"

namespace maglap {

// Triangulated closed surface embedded in R^3.
struct SurfaceMesh {
  Eigen::MatrixXd vertices;  // (n, 3)
  Eigen::MatrixXi faces;     // (m, 3), outward oriented

  int vertex_count() const { return int(vertices.rows()); }
  int face_count() const { return int(faces.rows()); }
  int edge_count() const;
  int euler_characteristic() const;
  double total_area() const;

  // Barycentric lumped vertex areas (one third of each incident face).
  Eigen::VectorXd vertex_areas() const;
  // Area-weighted vertex normals, normalized.
  Eigen::MatrixXd vertex_normals() const;
};

// Sphere of the given radius created by recursive icosahedron subdivision:
// 10 * 4^s + 2 vertices at subdivision level s in [0, 6].
SurfaceMesh make_icosphere(int subdivisions, double radius);

// Torus of revolution with major radius R and tube radius r: a res x res
// periodic quad grid, each quad split along its shorter diagonal.
SurfaceMesh make_revolution_torus(double R, double r, int res);

// Writes the mesh in OFF format.
void write_off(const SurfaceMesh& mesh, const std::string& path);

// Magnetic Schroedinger operator on the mesh: cotangent edge weights with
// Peierls phases from the chord integrals of the potential, barycentric
// lumped mass, and the electric potential sampled at vertices. Throws if
// any triangle angle degenerates.
HermitianOperator build_cotan_magnetic(const SurfaceMesh& mesh,
                                       const AmbientForm& potential,
                                       const AmbientScalar& q);

// Squared L2 norm of the tangential part of the 1-form over the mesh,
// projecting out the vertex-normal component.
double mesh_form_norm2(const SurfaceMesh& mesh, const AmbientForm& form);

// Integral of dA over each face per unit area (circulation of the chord
// phases around the face), and its squared L2 norm.
struct MeshFieldNorm {
  Eigen::VectorXd perFace;
  double norm2 = 0.0;
};

MeshFieldNorm mesh_plaquette_field(const SurfaceMesh& mesh,
                                   const AmbientForm& potential);

// Area, integral of q, and the first positive eigenvalue mu of the free
// Laplacian on the mesh.
struct MeshQuantities {
  double area = 0.0;
  double qIntegral = 0.0;
  double mu = 0.0;
};

MeshQuantities mesh_quantities(const SurfaceMesh& mesh, const AmbientScalar& q,
                               double tol, std::uint64_t seed);

}  // namespace maglap
