#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include "rpgd/errors.h"

namespace rpgd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// The one stateful object in the library. Owned by a single caller at a time.
using Rng = std::mt19937_64;

/// Feasibility (points) and tangency (vectors) residual bound.
inline constexpr double kFeasibilityTol = 1e-10;
inline constexpr double kTangencyTol = 1e-10;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct GeometryInfo {
  double curvature_bound = 0.0;     // K: |sectional curvature| <= K
  double injectivity_radius = kInf;  // may be +inf
  int dimension = 0;                 // intrinsic d
};

class Manifold;

/// A manifold element in ambient coordinates. Immutable; only a Manifold can
/// mint one, so every Point satisfies its manifold's feasibility bound.
class Point {
 public:
  const Matrix& coords() const { return coords_; }
  const Manifold& manifold() const { return *manifold_; }
  const std::shared_ptr<const Manifold>& manifold_ptr() const {
    return manifold_;
  }

  /// Same manifold and bit-identical coordinates.
  bool same_as(const Point& other) const;

 private:
  friend class Manifold;
  Point(std::shared_ptr<const Manifold> m, Matrix coords)
      : manifold_(std::move(m)), coords_(std::move(coords)) {}

  std::shared_ptr<const Manifold> manifold_;
  Matrix coords_;
};

/// A tangent vector anchored at `base()`.
class Tangent {
 public:
  const Point& base() const { return base_; }
  const Matrix& coords() const { return coords_; }
  const Manifold& manifold() const { return base_.manifold(); }

  /// Frobenius norm of the coordinates; equal to the Riemannian norm for every
  /// manifold provided here.
  double norm() const { return coords_.norm(); }

  Tangent operator-() const { return {base_, -coords_}; }
  friend Tangent operator*(double s, const Tangent& v) {
    return {v.base_, s * v.coords_};
  }
  friend Tangent operator+(const Tangent& a, const Tangent& b);
  friend Tangent operator-(const Tangent& a, const Tangent& b);

 private:
  friend class Manifold;
  Tangent(Point base, Matrix coords)
      : base_(std::move(base)), coords_(std::move(coords)) {}

  Point base_;
  Matrix coords_;
};

/// Riemannian manifold embedded in a space of rows() x cols() matrices, with
/// the metric induced by the ambient Frobenius inner product.
///
/// Public entry points validate their arguments and dispatch to the
/// coordinate-level `*_impl` hooks implemented by each concrete manifold.
/// Instances must be owned by a std::shared_ptr (points keep their manifold
/// alive).
class Manifold : public std::enable_shared_from_this<Manifold> {
 public:
  virtual ~Manifold() = default;

  virtual std::string name() const = 0;
  virtual GeometryInfo geometry() const = 0;
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  /// Wraps coordinates that already satisfy the feasibility bound.
  Point point(Matrix coords) const;
  /// Maps an arbitrary full-rank ambient array to the nearest-style feasible
  /// point (normalize rows / re-orthonormalize).
  Point project_point(const Matrix& a) const;
  /// Wraps coordinates that already satisfy the tangency bound at x.
  Tangent tangent(const Point& x, Matrix coords) const;
  Tangent zero(const Point& x) const;
  Point random_point(Rng& rng) const;

  Point exp(const Point& x, const Tangent& v) const;
  Tangent log(const Point& x, const Point& y) const;
  double dist(const Point& x, const Point& y) const;
  /// Parallel translation along the minimizing geodesic from x to y.
  Tangent transport(const Point& x, const Point& y, const Tangent& w) const;
  /// Parallel translation along t -> exp(x, t v), t in [0, 1]. Needs no log,
  /// so it is also available where transport(x, y, w) is not.
  Tangent transport_along(const Tangent& v, const Tangent& w) const;
  Tangent project_tangent(const Point& x, const Matrix& a) const;
  Tangent sample_tangent_ball(const Point& x, double radius, Rng& rng) const;
  double inner(const Point& x, const Tangent& u, const Tangent& v) const;

  virtual bool has_log() const { return true; }

  double feasibility_residual(const Matrix& a) const;
  double tangency_residual(const Matrix& x, const Matrix& v) const;

 protected:
  Manifold(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}

  virtual double feasibility_impl(const Matrix& a) const = 0;
  virtual double tangency_impl(const Matrix& x, const Matrix& v) const = 0;
  virtual Matrix normalize_impl(const Matrix& a) const = 0;
  virtual Matrix project_impl(const Matrix& x, const Matrix& a) const = 0;
  virtual Matrix exp_impl(const Matrix& x, const Matrix& v) const = 0;
  virtual Matrix log_impl(const Matrix& x, const Matrix& y) const;
  virtual double dist_impl(const Matrix& x, const Matrix& y) const;
  virtual Matrix transport_impl(const Matrix& x, const Matrix& y,
                                const Matrix& w) const;
  virtual Matrix transport_along_impl(const Matrix& x, const Matrix& v,
                                      const Matrix& w) const = 0;

  void check_shape(const Matrix& a, const char* what) const;
  void check_on(const Point& x, const char* what) const;
  void check_based(const Point& x, const Tangent& v, const char* what) const;
  Point wrap(Matrix coords) const {
    return Point(shared_from_this(), std::move(coords));
  }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
};

}  // namespace rpgd
