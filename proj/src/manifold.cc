#include "rpgd/manifold.h"

#include <cmath>
#include <sstream>

namespace rpgd {

namespace {

std::string shape_str(Eigen::Index r, Eigen::Index c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

}  // namespace

bool Point::same_as(const Point& other) const {
  if (manifold_ != other.manifold_ &&
      manifold_->name() != other.manifold_->name()) {
    return false;
  }
  return coords_.rows() == other.coords_.rows() &&
         coords_.cols() == other.coords_.cols() && coords_ == other.coords_;
}

Tangent operator+(const Tangent& a, const Tangent& b) {
  if (!a.base_.same_as(b.base_)) {
    throw InvalidArgument("tangent sum: vectors anchored at different points");
  }
  return {a.base_, a.coords_ + b.coords_};
}

Tangent operator-(const Tangent& a, const Tangent& b) {
  if (!a.base_.same_as(b.base_)) {
    throw InvalidArgument(
        "tangent difference: vectors anchored at different points");
  }
  return {a.base_, a.coords_ - b.coords_};
}

void Manifold::check_shape(const Matrix& a, const char* what) const {
  if (a.rows() != rows_ || a.cols() != cols_) {
    throw InvalidArgument(std::string(what) + ": expected shape " +
                          shape_str(rows_, cols_) + " on " + name() +
                          ", got " + shape_str(a.rows(), a.cols()));
  }
}

void Manifold::check_on(const Point& x, const char* what) const {
  if (&x.manifold() != this && x.manifold().name() != name()) {
    throw InvalidArgument(std::string(what) + ": point lives on " +
                          x.manifold().name() + ", not " + name());
  }
}

void Manifold::check_based(const Point& x, const Tangent& v,
                           const char* what) const {
  check_on(x, what);
  if (!v.base().same_as(x)) {
    throw InvalidArgument(std::string(what) +
                          ": tangent vector is not anchored at the point");
  }
}

double Manifold::feasibility_residual(const Matrix& a) const {
  check_shape(a, "feasibility_residual");
  return feasibility_impl(a);
}

double Manifold::tangency_residual(const Matrix& x, const Matrix& v) const {
  check_shape(x, "tangency_residual");
  check_shape(v, "tangency_residual");
  return tangency_impl(x, v);
}

Point Manifold::point(Matrix coords) const {
  check_shape(coords, "point");
  const double res = feasibility_impl(coords);
  if (!(res <= kFeasibilityTol)) {
    std::ostringstream os;
    os << "point: feasibility residual " << res << " exceeds "
       << kFeasibilityTol << " on " << name();
    throw InvalidArgument(os.str());
  }
  return wrap(std::move(coords));
}

Point Manifold::project_point(const Matrix& a) const {
  check_shape(a, "project_point");
  return wrap(normalize_impl(a));
}

Tangent Manifold::tangent(const Point& x, Matrix coords) const {
  check_on(x, "tangent");
  check_shape(coords, "tangent");
  const double res = tangency_impl(x.coords(), coords);
  // Relative to the vector's own scale: large ambient gradients carry
  // proportionally large rounding.
  if (!(res <= kTangencyTol * std::max(1.0, coords.norm()))) {
    std::ostringstream os;
    os << "tangent: tangency residual " << res << " exceeds " << kTangencyTol
       << " on " << name();
    throw InvalidArgument(os.str());
  }
  return Tangent(x, std::move(coords));
}

Tangent Manifold::zero(const Point& x) const {
  check_on(x, "zero");
  return Tangent(x, Matrix::Zero(rows_, cols_));
}

Point Manifold::random_point(Rng& rng) const {
  std::normal_distribution<double> g;
  Matrix a(rows_, cols_);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = g(rng);
  }
  return wrap(normalize_impl(a));
}

Point Manifold::exp(const Point& x, const Tangent& v) const {
  check_based(x, v, "exp");
  if (v.coords().isZero(0.0)) return x;
  return wrap(exp_impl(x.coords(), v.coords()));
}

Tangent Manifold::log(const Point& x, const Point& y) const {
  check_on(x, "log");
  check_on(y, "log");
  if (x.same_as(y)) return zero(x);
  return Tangent(x, log_impl(x.coords(), y.coords()));
}

double Manifold::dist(const Point& x, const Point& y) const {
  check_on(x, "dist");
  check_on(y, "dist");
  if (x.same_as(y)) return 0.0;
  return dist_impl(x.coords(), y.coords());
}

Tangent Manifold::transport(const Point& x, const Point& y,
                            const Tangent& w) const {
  check_based(x, w, "transport");
  check_on(y, "transport");
  if (x.same_as(y)) return w;
  return Tangent(y, transport_impl(x.coords(), y.coords(), w.coords()));
}

Tangent Manifold::transport_along(const Tangent& v, const Tangent& w) const {
  const Point& x = v.base();
  check_based(x, w, "transport_along");
  Point y = exp(x, v);
  if (v.coords().isZero(0.0)) return w;
  return Tangent(std::move(y),
                 transport_along_impl(x.coords(), v.coords(), w.coords()));
}

Tangent Manifold::project_tangent(const Point& x, const Matrix& a) const {
  check_on(x, "project_tangent");
  check_shape(a, "project_tangent");
  return Tangent(x, project_impl(x.coords(), a));
}

Tangent Manifold::sample_tangent_ball(const Point& x, double radius,
                                      Rng& rng) const {
  check_on(x, "sample_tangent_ball");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("sample_tangent_ball: radius must be positive");
  }
  const int d = geometry().dimension;
  if (d <= 0) return zero(x);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Matrix dir;
  double n = 0.0;
  do {
    Matrix a(rows_, cols_);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = g(rng);
    }
    dir = project_impl(x.coords(), a);
    n = dir.norm();
  } while (!(n > 0.0));
  const double len = radius * std::pow(u01(rng), 1.0 / d);
  // Rounding in len * dir / n can overshoot the radius by an ulp.
  Matrix v = (len / n) * dir;
  const double vn = v.norm();
  if (vn > radius) v *= radius / vn;
  return Tangent(x, std::move(v));
}

double Manifold::inner(const Point& x, const Tangent& u,
                       const Tangent& v) const {
  check_based(x, u, "inner");
  check_based(x, v, "inner");
  return (u.coords().array() * v.coords().array()).sum();
}

Matrix Manifold::log_impl(const Matrix&, const Matrix&) const {
  throw CapabilityError("log: no closed-form logarithm on " + name());
}

double Manifold::dist_impl(const Matrix&, const Matrix&) const {
  throw CapabilityError("dist: no closed-form distance on " + name());
}

Matrix Manifold::transport_impl(const Matrix&, const Matrix&,
                                const Matrix&) const {
  throw CapabilityError(
      "transport: point-to-point transport needs a logarithm, unavailable on " +
      name() + " (use transport_along)");
}

}  // namespace rpgd
