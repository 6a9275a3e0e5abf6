#pragma once

#include <memory>
#include <ostream>
#include <vector>

#include "rpgd/manifolds.h"
#include "rpgd/objective.h"

namespace rpgd {

// Keeps parameterized test names readable in ctest output.
inline void PrintTo(const std::shared_ptr<const Manifold>& m, std::ostream* os) {
  *os << m->name();
}

}  // namespace rpgd

namespace rpgd::testing {

inline Matrix col(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

/// Tangent at x with a uniformly random direction and norm exactly `len`.
inline Tangent random_tangent(const Manifold& m, const Point& x, double len,
                              Rng& rng) {
  std::normal_distribution<double> g;
  Matrix a(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = g(rng);
  }
  Tangent t = m.project_tangent(x, a);
  return (len / t.norm()) * t;
}

/// The manifolds with closed-form log and transport.
inline std::vector<std::shared_ptr<const Manifold>> log_manifolds() {
  return {std::make_shared<Sphere>(3), std::make_shared<Sphere>(6),
          std::make_shared<Oblique>(4, 3), std::make_shared<Euclidean>(4),
          std::make_shared<Grassmann>(5, 2), std::make_shared<Grassmann>(6, 3),
          std::make_shared<Grassmann>(4, 1)};
}

/// x^T diag(1,-1,4) x + 3 x2^2 x3 on S^2. e1 is still an exact saddle with
/// tangent Hessian spectrum {-4, 6}, but the cubic term breaks the reflection
/// symmetry through e1 that the plain quadratic has.
class SkewedSaddle final : public Objective {
 public:
  explicit SkewedSaddle(std::shared_ptr<const Manifold> m)
      : Objective(std::move(m)) {}
  std::string kind() const override { return "skewed-saddle"; }
  bool has_exact_hessian() const override { return true; }

 protected:
  double value_impl(const Matrix& x) const override {
    const double a = x(0), b = x(1), c = x(2);
    return a * a - b * b + 4 * c * c + 3 * b * b * c;
  }
  Matrix egrad_impl(const Matrix& x) const override {
    Matrix g(3, 1);
    g << 2 * x(0), -2 * x(1) + 6 * x(1) * x(2), 8 * x(2) + 3 * x(1) * x(1);
    return g;
  }
  Matrix hess_impl(const Matrix& x, const Matrix& v) const override {
    Eigen::Matrix3d h;
    h << 2, 0, 0, 0, -2 + 6 * x(2), 6 * x(1), 0, 6 * x(1), 8;
    // Weingarten term on the sphere: subtract (x^T egrad) v.
    return h * v - (x.transpose() * egrad_impl(x))(0, 0) * v;
  }
};

}  // namespace rpgd::testing
