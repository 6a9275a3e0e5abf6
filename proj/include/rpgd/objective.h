#pragma once

#include <memory>
#include <optional>
#include <string>

#include "rpgd/manifold.h"

namespace rpgd {

/// Smooth cost on a manifold, defined through its ambient value and gradient.
/// Immutable after construction.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string kind() const = 0;
  const Manifold& manifold() const { return *manifold_; }
  const std::shared_ptr<const Manifold>& manifold_ptr() const {
    return manifold_;
  }

  double value(const Point& x) const;
  Matrix euclidean_gradient(const Point& x) const;
  /// Orthogonal projection of the ambient gradient onto T_xM.
  Tangent rgrad(const Point& x) const;

  /// True when `exact_hessian` has a closed form (used as a cross-check on
  /// the finite-difference operator).
  virtual bool has_exact_hessian() const { return false; }
  Tangent exact_hessian(const Point& x, const Tangent& v) const;

 protected:
  explicit Objective(std::shared_ptr<const Manifold> m);

  virtual double value_impl(const Matrix& x) const = 0;
  virtual Matrix egrad_impl(const Matrix& x) const = 0;
  virtual Matrix hess_impl(const Matrix& x, const Matrix& v) const;

 private:
  void check_point(const Point& x, const char* what) const;
  std::shared_ptr<const Manifold> manifold_;
};

/// f(x) = x^T diag(D) x on a sphere (the "sphere-quadratic" saddle example) or
/// on Euclidean space.
class DiagonalQuadratic final : public Objective {
 public:
  DiagonalQuadratic(std::shared_ptr<const Manifold> m, Vector diag);
  std::string kind() const override;
  bool has_exact_hessian() const override { return true; }
  const Vector& diag() const { return diag_; }

 protected:
  double value_impl(const Matrix& x) const override;
  Matrix egrad_impl(const Matrix& x) const override;
  Matrix hess_impl(const Matrix& x, const Matrix& v) const override;

 private:
  Vector diag_;
  bool on_sphere_;
};

/// kPCA cost f(X) = -1/2 tr(X^T H X) on Grassmann (or Stiefel) n x k.
class KPca final : public Objective {
 public:
  KPca(std::shared_ptr<const Manifold> m, Matrix h);
  std::string kind() const override { return "kpca"; }
  const Matrix& h() const { return h_; }

 protected:
  double value_impl(const Matrix& x) const override;
  Matrix egrad_impl(const Matrix& x) const override;

 private:
  Matrix h_;
};

/// Burer-Monteiro cost f(Y) = 1/2 tr(A Y Y^T) on the oblique manifold.
class BurerMonteiro final : public Objective {
 public:
  BurerMonteiro(std::shared_ptr<const Manifold> m, Matrix a);
  std::string kind() const override { return "burer-monteiro"; }
  const Matrix& a() const { return a_; }

 protected:
  double value_impl(const Matrix& y) const override;
  Matrix egrad_impl(const Matrix& y) const override;

 private:
  Matrix a_;
};

class ConstantObjective final : public Objective {
 public:
  ConstantObjective(std::shared_ptr<const Manifold> m, double c = 0.0);
  std::string kind() const override { return "constant"; }
  bool has_exact_hessian() const override { return true; }

 protected:
  double value_impl(const Matrix&) const override { return c_; }
  Matrix egrad_impl(const Matrix& x) const override;
  Matrix hess_impl(const Matrix& x, const Matrix& v) const override;

 private:
  double c_;
};

/// f(X) = <C, X>. Exact Hessian (zero) only on Euclidean space.
class LinearObjective final : public Objective {
 public:
  LinearObjective(std::shared_ptr<const Manifold> m, Matrix c);
  std::string kind() const override { return "linear"; }
  bool has_exact_hessian() const override;

 protected:
  double value_impl(const Matrix& x) const override;
  Matrix egrad_impl(const Matrix& x) const override;
  Matrix hess_impl(const Matrix& x, const Matrix& v) const override;

 private:
  Matrix c_;
};

/// (eps_mach)^{1/3} (1 + |x|) / (1 + |v|): the usual central-difference
/// balance between truncation and rounding.
double default_fd_step(const Point& x, const Tangent& v);

/// Riemannian Hessian-vector product by central differences of parallel
/// transported gradients:
///   [G(x+) - G(x-)] / 2s,  x(+/-) = exp(x, +/- s v),  G(y) = transport of
///   rgrad(y) back to x,
/// projected onto T_xM. Throws DomainError when s |v| reaches the injectivity
/// radius.
Tangent hess_vec(const Objective& obj, const Point& x, const Tangent& v,
                 std::optional<double> step = std::nullopt);

struct MinEigOptions {
  int max_iters = 500;
  int radius_probe_iters = 30;
  bool use_exact_hessian = false;
  std::optional<double> fd_step;
};

struct EigenEstimate {
  double lambda_min = 0.0;
  Tangent direction;  // unit norm
  bool converged = false;
  int iterations = 0;
  /// "converged" or a warning describing why the best estimate is returned.
  std::string status;
};

/// Smallest eigenvalue of the Riemannian Hessian at x by shifted power
/// iteration on (sigma I - H). A short power iteration on H gives the
/// spectral radius R; a second one on H + 2R I gives the largest Rayleigh
/// quotient q. sigma = q + max(1e-3 R, residual of that probe), raised if an
/// iterate ever shows a Rayleigh quotient above it.
EigenEstimate min_hess_eig(const Objective& obj, const Point& x, double tol,
                           Rng& rng, const MinEigOptions& opts = {});

struct SmoothnessEstimate {
  double beta_hat = 0.0;
  double rho_hat = 0.0;
  int num_samples = 0;
  double region_radius = 0.0;
  int pairs_used = 0;
};

/// Max-ratio lower bounds on the gradient and Hessian Lipschitz constants over
/// points sampled uniformly in the tangent ball of `radius` at `center`.
/// Every pair of samples is compared; pairs closer than 1e-12 or too far
/// apart to transport between are skipped.
SmoothnessEstimate estimate_smoothness(const Objective& obj,
                                       const Point& center, double radius,
                                       int n_samples, Rng& rng);

}  // namespace rpgd
