#include "maglap/fields.hpp"

#include <cmath>

namespace maglap {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double eval_trig(Trig t, double arg) {
  return t == Trig::Sin ? std::sin(arg) : std::cos(arg);
}

// Derivative of trig: cos' = -sin, sin' = cos.
double eval_trig_deriv(Trig t, double arg) {
  return t == Trig::Sin ? std::cos(arg) : -std::sin(arg);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

// Average of trig(a + b*tau) over tau in [0, 1].
double trig_average(Trig t, double a, double b) {
  return eval_trig(t, a + 0.5 * b) * sinc(0.5 * b);
}

}  // namespace

double ScalarField::value(const Eigen::Vector2d& u) const {
  double v = constant;
  for (const Wave& w : waves) {
    v += w.amp * eval_trig(w.trig, kTwoPi * w.wave.dot(u) + w.phase);
  }
  return v;
}

Eigen::Vector2d ScalarField::gradient_params(const Eigen::Vector2d& u) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const Wave& w : waves) {
    double d = w.amp * eval_trig_deriv(w.trig, kTwoPi * w.wave.dot(u) + w.phase);
    g += kTwoPi * d * w.wave;
  }
  return g;
}

bool ScalarField::is_constant() const {
  for (const Wave& w : waves) {
    if (w.amp != 0.0) return false;
  }
  return true;
}

bool ScalarField::is_zero() const { return constant == 0.0 && is_constant(); }

bool OneForm::is_zero() const {
  if (constant.squaredNorm() != 0.0) return false;
  for (const DirWave& w : waves) {
    if (w.amp != 0.0 && w.dir.squaredNorm() != 0.0) return false;
  }
  return gradient.is_constant();
}

Eigen::Vector2d OneForm::value(const Eigen::Vector2d& u,
                               const Eigen::Matrix2d& paramToCart) const {
  Eigen::Vector2d v = constant;
  for (const DirWave& w : waves) {
    v += w.amp * eval_trig(w.trig, kTwoPi * w.wave.dot(u) + w.phase) * w.dir;
  }
  if (!gradient.is_constant()) {
    // Cartesian gradient from the parameter gradient via the inverse
    // transpose Jacobian.
    v += paramToCart.transpose().inverse() * gradient.gradient_params(u);
  }
  return v;
}

double OneForm::line_integral(const Eigen::Vector2d& u0,
                              const Eigen::Vector2d& u1,
                              const Eigen::Matrix2d& paramToCart) const {
  Eigen::Vector2d du = u1 - u0;
  Eigen::Vector2d dx = paramToCart * du;
  double total = constant.dot(dx);
  for (const DirWave& w : waves) {
    double a = kTwoPi * w.wave.dot(u0) + w.phase;
    double b = kTwoPi * w.wave.dot(du);
    total += w.amp * w.dir.dot(dx) * trig_average(w.trig, a, b);
  }
  total += gradient.value(u1) - gradient.value(u0);
  return total;
}

double AmbientScalar::value(const Eigen::Vector3d& x) const {
  double v = constant + linear.dot(x);
  for (const Wave3& w : waves) {
    v += w.amp * eval_trig(w.trig, w.freq * x[w.axis] + w.phase);
  }
  return v;
}

Eigen::Vector3d AmbientScalar::gradient(const Eigen::Vector3d& x) const {
  Eigen::Vector3d g = linear;
  for (const Wave3& w : waves) {
    g[w.axis] += w.amp * w.freq * eval_trig_deriv(w.trig, w.freq * x[w.axis] + w.phase);
  }
  return g;
}

bool AmbientScalar::is_constant() const {
  if (linear.squaredNorm() != 0.0) return false;
  for (const Wave3& w : waves) {
    if (w.amp != 0.0) return false;
  }
  return true;
}

bool AmbientForm::is_zero() const {
  return rotation == 0.0 && gradient.is_constant();
}

Eigen::Vector3d AmbientForm::value(const Eigen::Vector3d& x) const {
  Eigen::Vector3d v(-rotation * x.y(), rotation * x.x(), 0.0);
  if (!gradient.is_constant()) v += gradient.gradient(x);
  return v;
}

double AmbientForm::chord_integral(const Eigen::Vector3d& p,
                                   const Eigen::Vector3d& q) const {
  // 4-point Gauss-Legendre on [0, 1]; exact for the degree-1 rotation part.
  static const double nodes[4] = {0.069431844202973712, 0.33000947820757187,
                                  0.66999052179242813, 0.93056815579702629};
  static const double weights[4] = {0.17392742256872693, 0.32607257743127307,
                                    0.32607257743127307, 0.17392742256872693};
  Eigen::Vector3d d = q - p;
  double total = 0.0;
  if (rotation != 0.0) {
    for (int g = 0; g < 4; ++g) {
      Eigen::Vector3d x = p + nodes[g] * d;
      total += weights[g] * rotation * (x.x() * d.y() - x.y() * d.x());
    }
  }
  total += gradient.value(q) - gradient.value(p);
  return total;
}

}  // namespace maglap
