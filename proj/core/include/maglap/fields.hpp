#pragma once

#include <Eigen/Dense>
#include <vector>

namespace maglap {

enum class Trig { Sin, Cos };

// Plane wave amp * trig(2*pi*<wave, u> + phase) on the parameter domain
// u = (s, t). Periodic geometries require integer wave components.
struct Wave {
  double amp = 0.0;
  Trig trig = Trig::Cos;
  Eigen::Vector2d wave = Eigen::Vector2d::Zero();
  double phase = 0.0;
};

// Scalar field on the parameter domain: constant plus plane waves.
struct ScalarField {
  double constant = 0.0;
  std::vector<Wave> waves;

  double value(const Eigen::Vector2d& u) const;
  Eigen::Vector2d gradient_params(const Eigen::Vector2d& u) const;
  bool is_constant() const;
  bool is_zero() const;
};

// Directional plane wave: amp * trig(2*pi*<wave, u> + phase) * <dir, .>,
// with dir a Cartesian covector.
struct DirWave {
  double amp = 0.0;
  Trig trig = Trig::Cos;
  Eigen::Vector2d wave = Eigen::Vector2d::Zero();
  double phase = 0.0;
  Eigen::Vector2d dir = Eigen::Vector2d::Zero();
};

// Real 1-form on a 2d parameter domain, written against Cartesian
// coordinates: constant part + directional waves + d(gradient).
// paramToCart maps parameter displacements to Cartesian ones (the lattice
// basis for a torus, diag(L1, L2) for a rectangle).
struct OneForm {
  Eigen::Vector2d constant = Eigen::Vector2d::Zero();
  std::vector<DirWave> waves;
  ScalarField gradient;

  bool is_zero() const;

  Eigen::Vector2d value(const Eigen::Vector2d& u,
                        const Eigen::Matrix2d& paramToCart) const;

  // Exact integral along the straight segment u0 -> u1 (parameters may run
  // outside the unit square; periodic fields wrap consistently).
  double line_integral(const Eigen::Vector2d& u0, const Eigen::Vector2d& u1,
                       const Eigen::Matrix2d& paramToCart) const;
};

// --- ambient fields in R^3, used on embedded surface meshes ---

// amp * trig(freq * x_axis + phase) along one coordinate axis.
struct Wave3 {
  double amp = 0.0;
  Trig trig = Trig::Cos;
  int axis = 0;
  double freq = 1.0;
  double phase = 0.0;
};

struct AmbientScalar {
  double constant = 0.0;
  Eigen::Vector3d linear = Eigen::Vector3d::Zero();
  std::vector<Wave3> waves;

  double value(const Eigen::Vector3d& x) const;
  Eigen::Vector3d gradient(const Eigen::Vector3d& x) const;
  bool is_constant() const;
};

// Ambient 1-form: rotation * (-y dx + x dy) + d(gradient).
struct AmbientForm {
  double rotation = 0.0;
  AmbientScalar gradient;

  bool is_zero() const;
  Eigen::Vector3d value(const Eigen::Vector3d& x) const;

  // Integral along the straight chord p -> q: exact differences for the
  // gradient part, 4-point Gauss for the rest.
  double chord_integral(const Eigen::Vector3d& p,
                        const Eigen::Vector3d& q) const;
};

}  // namespace maglap
