#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rpgd/manifolds.h"
#include "rpgd/objective.h"

namespace rpgd {

namespace {

void require_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument(std::string(what) + ": matrix must be square");
  }
  const double asym = (m - m.transpose()).norm();
  if (!(asym <= 1e-12 * std::max(1.0, m.norm()))) {
    std::ostringstream os;
    os << what << ": matrix is not symmetric (|M - M^T| = " << asym << ")";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

Objective::Objective(std::shared_ptr<const Manifold> m)
    : manifold_(std::move(m)) {
  if (!manifold_) throw InvalidArgument("Objective: null manifold");
}

void Objective::check_point(const Point& x, const char* what) const {
  if (&x.manifold() != manifold_.get() &&
      x.manifold().name() != manifold_->name()) {
    throw InvalidArgument(std::string(what) + ": point lives on " +
                          x.manifold().name() + " but the " + kind() +
                          " objective is defined on " + manifold_->name());
  }
}

double Objective::value(const Point& x) const {
  check_point(x, "value");
  return value_impl(x.coords());
}

Matrix Objective::euclidean_gradient(const Point& x) const {
  check_point(x, "euclidean_gradient");
  return egrad_impl(x.coords());
}

Tangent Objective::rgrad(const Point& x) const {
  check_point(x, "rgrad");
  return manifold_->project_tangent(x, egrad_impl(x.coords()));
}

Tangent Objective::exact_hessian(const Point& x, const Tangent& v) const {
  check_point(x, "exact_hessian");
  if (!has_exact_hessian()) {
    throw CapabilityError("exact_hessian: not available for " + kind() +
                          " on " + manifold_->name());
  }
  if (!v.base().same_as(x)) {
    throw InvalidArgument("exact_hessian: tangent not anchored at the point");
  }
  return manifold_->project_tangent(x, hess_impl(x.coords(), v.coords()));
}

Matrix Objective::hess_impl(const Matrix&, const Matrix&) const {
  throw CapabilityError("exact_hessian: not available for " + kind());
}

// --- DiagonalQuadratic -------------------------------------------------------

DiagonalQuadratic::DiagonalQuadratic(std::shared_ptr<const Manifold> m,
                                     Vector diag)
    : Objective(std::move(m)), diag_(std::move(diag)) {
  const Manifold& mf = manifold();
  on_sphere_ = dynamic_cast<const Sphere*>(&mf) != nullptr;
  const bool flat = dynamic_cast<const Euclidean*>(&mf) != nullptr;
  if (!on_sphere_ && !flat) {
    throw InvalidArgument(
        "DiagonalQuadratic: defined on a sphere or Euclidean space only");
  }
  if (diag_.size() != mf.rows()) {
    throw InvalidArgument("DiagonalQuadratic: diagonal has length " +
                          std::to_string(diag_.size()) + ", expected " +
                          std::to_string(mf.rows()));
  }
}

std::string DiagonalQuadratic::kind() const {
  return on_sphere_ ? "sphere-quadratic" : "quadratic";
}

double DiagonalQuadratic::value_impl(const Matrix& x) const {
  return (diag_.array() * x.col(0).array().square()).sum();
}

Matrix DiagonalQuadratic::egrad_impl(const Matrix& x) const {
  return 2.0 * (diag_.array() * x.col(0).array()).matrix();
}

Matrix DiagonalQuadratic::hess_impl(const Matrix& x, const Matrix& v) const {
  const Vector dv = 2.0 * (diag_.array() * v.col(0).array()).matrix();
  if (!on_sphere_) return dv;
  // P(2 D v) - (x^T 2 D x) v: Weingarten correction on the sphere.
  return dv - 2.0 * value_impl(x) * v.col(0);
}

// --- KPca --------------------------------------------------------------------

KPca::KPca(std::shared_ptr<const Manifold> m, Matrix h)
    : Objective(std::move(m)), h_(std::move(h)) {
  require_symmetric(h_, "KPca");
  if (h_.rows() != manifold().rows()) {
    throw InvalidArgument("KPca: H is " + std::to_string(h_.rows()) +
                          "x" + std::to_string(h_.cols()) +
                          " but points have " +
                          std::to_string(manifold().rows()) + " rows");
  }
}

double KPca::value_impl(const Matrix& x) const {
  return -0.5 * (x.transpose() * h_ * x).trace();
}

Matrix KPca::egrad_impl(const Matrix& x) const { return -(h_ * x); }

// --- BurerMonteiro -----------------------------------------------------------

BurerMonteiro::BurerMonteiro(std::shared_ptr<const Manifold> m, Matrix a)
    : Objective(std::move(m)), a_(std::move(a)) {
  require_symmetric(a_, "BurerMonteiro");
  if (a_.rows() != manifold().rows()) {
    throw InvalidArgument("BurerMonteiro: A is " + std::to_string(a_.rows()) +
                          "x" + std::to_string(a_.cols()) +
                          " but Y has " + std::to_string(manifold().rows()) +
                          " rows");
  }
}

double BurerMonteiro::value_impl(const Matrix& y) const {
  return 0.5 * (y.transpose() * a_ * y).trace();
}

Matrix BurerMonteiro::egrad_impl(const Matrix& y) const { return a_ * y; }

// --- ConstantObjective / LinearObjective -------------------------------------

ConstantObjective::ConstantObjective(std::shared_ptr<const Manifold> m,
                                     double c)
    : Objective(std::move(m)), c_(c) {}

Matrix ConstantObjective::egrad_impl(const Matrix& x) const {
  return Matrix::Zero(x.rows(), x.cols());
}

Matrix ConstantObjective::hess_impl(const Matrix& x, const Matrix&) const {
  return Matrix::Zero(x.rows(), x.cols());
}

LinearObjective::LinearObjective(std::shared_ptr<const Manifold> m, Matrix c)
    : Objective(std::move(m)), c_(std::move(c)) {
  if (c_.rows() != manifold().rows() || c_.cols() != manifold().cols()) {
    throw InvalidArgument("LinearObjective: coefficient shape mismatch");
  }
}

bool LinearObjective::has_exact_hessian() const {
  return dynamic_cast<const Euclidean*>(&manifold()) != nullptr;
}

double LinearObjective::value_impl(const Matrix& x) const {
  return (c_.array() * x.array()).sum();
}

Matrix LinearObjective::egrad_impl(const Matrix&) const { return c_; }

Matrix LinearObjective::hess_impl(const Matrix& x, const Matrix&) const {
  return Matrix::Zero(x.rows(), x.cols());
}

}  // namespace rpgd
