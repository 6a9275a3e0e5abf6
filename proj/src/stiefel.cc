#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rpgd/manifolds.h"

namespace rpgd {

namespace {

Matrix sym_part(const Matrix& b) { return 0.5 * (b + b.transpose()); }

// Embedded-metric geodesic with A = X^T V, S = V^T V, M = [[A, -S], [I, A]]:
//   X(t)  = [X V] expm(tM) [I; 0] expm(-tA)
//   X'(t) = [X V] expm(tM) [0; I] expm(-tA)
class Geodesic {
 public:
  Geodesic(const Matrix& x, const Matrix& v) : k_(x.cols()) {
    a_ = x.transpose() * v;
    const Matrix s = v.transpose() * v;
    m_.resize(2 * k_, 2 * k_);
    m_ << a_, -s, Matrix::Identity(k_, k_), a_;
    xv_.resize(x.rows(), 2 * k_);
    xv_ << x, v;
  }

  Matrix point(double t) const {
    const Matrix e = (t * m_).exp();
    const Matrix f = (-t * a_).exp();
    return xv_ * e.leftCols(k_) * f;
  }

  Matrix velocity(double t) const {
    const Matrix e = (t * m_).exp();
    const Matrix f = (-t * a_).exp();
    return xv_ * e.rightCols(k_) * f;
  }

 private:
  Eigen::Index k_;
  Matrix a_;
  Matrix m_;
  Matrix xv_;
};

}  // namespace

Stiefel::Stiefel(Eigen::Index n, Eigen::Index k) : Stiefel(n, k, Options{}) {}

Stiefel::Stiefel(Eigen::Index n, Eigen::Index k, Options opts)
    : Manifold(n, k), opts_(opts) {
  if (k < 1 || n < k) throw InvalidArgument("Stiefel: need 1 <= k <= n");
  if (opts_.transport_steps < 1) {
    throw InvalidArgument("Stiefel: transport_steps must be >= 1");
  }
}

std::string Stiefel::name() const {
  return "stiefel(" + std::to_string(rows()) + "," + std::to_string(cols()) +
         ")";
}

GeometryInfo Stiefel::geometry() const {
  const Eigen::Index n = rows(), k = cols();
  // k = 1 is the unit sphere. For k > 1 the defaults are placeholders that a
  // caller with a sharper bound should override.
  const double kb = opts_.curvature_bound.value_or(1.0);
  const double inj = opts_.injectivity.value_or(
      k == 1 ? std::numbers::pi : std::numbers::pi / 2);
  return {kb, inj, static_cast<int>(n * k - k * (k + 1) / 2)};
}

double Stiefel::feasibility_impl(const Matrix& a) const {
  return (a.transpose() * a - Matrix::Identity(cols(), cols())).norm();
}

double Stiefel::tangency_impl(const Matrix& x, const Matrix& v) const {
  const Matrix b = x.transpose() * v;
  return (b + b.transpose()).norm();
}

Matrix Stiefel::normalize_impl(const Matrix& a) const {
  return orthonormalize(a);
}

Matrix Stiefel::project_impl(const Matrix& x, const Matrix& a) const {
  return a - x * sym_part(x.transpose() * a);
}

Matrix Stiefel::exp_impl(const Matrix& x, const Matrix& v) const {
  return orthonormalize(Geodesic(x, v).point(1.0));
}

Matrix Stiefel::transport_along_impl(const Matrix& x, const Matrix& v,
                                     const Matrix& w) const {
  // Parallel fields along an embedded geodesic satisfy
  //   W' = -X sym(X'^T W),
  // which keeps W tangent and has a normal derivative. Integrated with RK4.
  const Geodesic geo(x, v);
  const int steps = std::max(
      8, static_cast<int>(std::ceil(opts_.transport_steps * v.norm())));
  const double h = 1.0 / steps;
  auto rhs = [&geo](double t, const Matrix& wt) -> Matrix {
    const Matrix xt = geo.point(t);
    const Matrix dxt = geo.velocity(t);
    return -xt * sym_part(dxt.transpose() * wt);
  };
  Matrix wt = w;
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Matrix k1 = rhs(t, wt);
    const Matrix k2 = rhs(t + 0.5 * h, wt + 0.5 * h * k1);
    const Matrix k3 = rhs(t + 0.5 * h, wt + 0.5 * h * k2);
    const Matrix k4 = rhs(t + h, wt + h * k3);
    wt += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return project_impl(exp_impl(x, v), wt);
}

}  // namespace rpgd
