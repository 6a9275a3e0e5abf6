#pragma once

#include <optional>

#include "rpgd/manifold.h"

namespace rpgd {

/// Unit sphere S^{n-1} in R^n; points are n x 1 columns.
class Sphere final : public Manifold {
 public:
  explicit Sphere(Eigen::Index n);
  std::string name() const override;
  GeometryInfo geometry() const override;

 protected:
  double feasibility_impl(const Matrix& a) const override;
  double tangency_impl(const Matrix& x, const Matrix& v) const override;
  Matrix normalize_impl(const Matrix& a) const override;
  Matrix project_impl(const Matrix& x, const Matrix& a) const override;
  Matrix exp_impl(const Matrix& x, const Matrix& v) const override;
  Matrix log_impl(const Matrix& x, const Matrix& y) const override;
  double dist_impl(const Matrix& x, const Matrix& y) const override;
  Matrix transport_impl(const Matrix& x, const Matrix& y,
                        const Matrix& w) const override;
  Matrix transport_along_impl(const Matrix& x, const Matrix& v,
                              const Matrix& w) const override;
};

/// Oblique manifold: d x p matrices whose rows are unit vectors, i.e. the
/// product of d copies of S^{p-1}. Every map acts row by row; the distance is
/// the l2 combination of the per-row great-circle distances.
class Oblique final : public Manifold {
 public:
  Oblique(Eigen::Index d, Eigen::Index p);
  std::string name() const override;
  GeometryInfo geometry() const override;

 protected:
  double feasibility_impl(const Matrix& a) const override;
  double tangency_impl(const Matrix& x, const Matrix& v) const override;
  Matrix normalize_impl(const Matrix& a) const override;
  Matrix project_impl(const Matrix& x, const Matrix& a) const override;
  Matrix exp_impl(const Matrix& x, const Matrix& v) const override;
  Matrix log_impl(const Matrix& x, const Matrix& y) const override;
  double dist_impl(const Matrix& x, const Matrix& y) const override;
  Matrix transport_impl(const Matrix& x, const Matrix& y,
                        const Matrix& w) const override;
  Matrix transport_along_impl(const Matrix& x, const Matrix& v,
                              const Matrix& w) const override;
};

/// Flat R^n baseline.
class Euclidean final : public Manifold {
 public:
  explicit Euclidean(Eigen::Index n);
  std::string name() const override;
  GeometryInfo geometry() const override;

 protected:
  double feasibility_impl(const Matrix& a) const override;
  double tangency_impl(const Matrix& x, const Matrix& v) const override;
  Matrix normalize_impl(const Matrix& a) const override;
  Matrix project_impl(const Matrix& x, const Matrix& a) const override;
  Matrix exp_impl(const Matrix& x, const Matrix& v) const override;
  Matrix log_impl(const Matrix& x, const Matrix& y) const override;
  double dist_impl(const Matrix& x, const Matrix& y) const override;
  Matrix transport_impl(const Matrix& x, const Matrix& y,
                        const Matrix& w) const override;
  Matrix transport_along_impl(const Matrix& x, const Matrix& v,
                              const Matrix& w) const override;
};

/// Grassmann(n, k) of k-planes in R^n, represented by orthonormal n x k
/// matrices. Tangents are horizontal lifts (X^T V = 0). Maps are closed form
/// through thin SVDs; points returned by exp are one valid representative.
class Grassmann final : public Manifold {
 public:
  /// `injectivity` overrides the default pi/2 (largest principal angle at
  /// which the log is still unique).
  Grassmann(Eigen::Index n, Eigen::Index k,
            std::optional<double> injectivity = std::nullopt);
  std::string name() const override;
  GeometryInfo geometry() const override;

  /// Principal angles between span(x) and span(y), ascending.
  Vector principal_angles(const Matrix& x, const Matrix& y) const;

 protected:
  double feasibility_impl(const Matrix& a) const override;
  double tangency_impl(const Matrix& x, const Matrix& v) const override;
  Matrix normalize_impl(const Matrix& a) const override;
  Matrix project_impl(const Matrix& x, const Matrix& a) const override;
  Matrix exp_impl(const Matrix& x, const Matrix& v) const override;
  Matrix log_impl(const Matrix& x, const Matrix& y) const override;
  double dist_impl(const Matrix& x, const Matrix& y) const override;
  Matrix transport_impl(const Matrix& x, const Matrix& y,
                        const Matrix& w) const override;
  Matrix transport_along_impl(const Matrix& x, const Matrix& v,
                              const Matrix& w) const override;

 private:
  std::optional<double> injectivity_;
};

/// Stiefel(n, k) with the embedded (Frobenius) metric. Exp is the closed-form
/// geodesic through a 2k x 2k matrix exponential; parallel translation along a
/// geodesic integrates the transport ODE. No closed-form log or distance.
class Stiefel final : public Manifold {
 public:
  struct Options {
    std::optional<double> curvature_bound;
    std::optional<double> injectivity;
    int transport_steps = 200;  // RK4 steps per unit geodesic length
  };

  Stiefel(Eigen::Index n, Eigen::Index k);
  Stiefel(Eigen::Index n, Eigen::Index k, Options opts);
  std::string name() const override;
  GeometryInfo geometry() const override;
  bool has_log() const override { return false; }

 protected:
  double feasibility_impl(const Matrix& a) const override;
  double tangency_impl(const Matrix& x, const Matrix& v) const override;
  Matrix normalize_impl(const Matrix& a) const override;
  Matrix project_impl(const Matrix& x, const Matrix& a) const override;
  Matrix exp_impl(const Matrix& x, const Matrix& v) const override;
  Matrix transport_along_impl(const Matrix& x, const Matrix& v,
                              const Matrix& w) const override;

 private:
  Options opts_;
};

/// Thin QR with the signs of diag(R) made positive; returns the Q factor.
Matrix orthonormalize(const Matrix& a);

}  // namespace rpgd
