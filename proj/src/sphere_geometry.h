#pragma once

// Closed-form unit-sphere maps on single vectors. Shared by Sphere and the
// row-wise Oblique manifold.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace rpgd::sphere_geometry {

// Points closer than this to the antipode are treated as on the cut locus.
inline constexpr double kCutLocusTol = 1e-8;

inline Eigen::VectorXd project(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& a) {
  return a - x.dot(a) * x;
}

// Great-circle distance, accurate at both ends of [0, pi].
inline double dist(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

inline Eigen::VectorXd exp(const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  const double t = v.norm();
  if (t == 0.0) return x;
  Eigen::VectorXd y = std::cos(t) * x + (std::sin(t) / t) * v;
  return y / y.norm();
}

// Requires dist(x, y) < pi - kCutLocusTol; callers check.
inline Eigen::VectorXd log(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double theta = dist(x, y);
  Eigen::VectorXd u = project(x, y);
  const double n = u.norm();
  if (theta == 0.0 || n == 0.0) return Eigen::VectorXd::Zero(x.size());
  u *= theta / n;
  return project(x, u);
}

// Transport of w along the geodesic leaving x with unit direction u for arc
// length theta.
inline Eigen::VectorXd transport_dir(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& u, double theta,
                                     const Eigen::VectorXd& w) {
  const double c = u.dot(w);
  Eigen::VectorXd out =
      w + c * ((std::cos(theta) - 1.0) * u - std::sin(theta) * x);
  return out;
}

inline Eigen::VectorXd transport_along(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& v,
                                       const Eigen::VectorXd& w) {
  const double theta = v.norm();
  if (theta == 0.0) return w;
  const Eigen::VectorXd y = exp(x, v);
  return project(y, transport_dir(x, v / theta, theta, w));
}

inline Eigen::VectorXd transport(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& w) {
  const Eigen::VectorXd v = log(x, y);
  const double theta = v.norm();
  if (theta == 0.0) return w;
  return project(y, transport_dir(x, v / theta, theta, w));
}

inline bool on_cut_locus(double theta) {
  return theta >= std::numbers::pi - kCutLocusTol;
}

}  // namespace rpgd::sphere_geometry
