#include <numbers>
#include <sstream>

#include "rpgd/manifolds.h"
#include "sphere_geometry.h"

namespace rpgd {

namespace sg = sphere_geometry;

Sphere::Sphere(Eigen::Index n) : Manifold(n, 1) {
  if (n < 2) throw InvalidArgument("Sphere: ambient dimension must be >= 2");
}

std::string Sphere::name() const {
  return "sphere(" + std::to_string(rows()) + ")";
}

GeometryInfo Sphere::geometry() const {
  return {1.0, std::numbers::pi, static_cast<int>(rows() - 1)};
}

double Sphere::feasibility_impl(const Matrix& a) const {
  return std::abs(a.norm() - 1.0);
}

double Sphere::tangency_impl(const Matrix& x, const Matrix& v) const {
  return std::abs(x.col(0).dot(v.col(0)));
}

Matrix Sphere::normalize_impl(const Matrix& a) const {
  const double n = a.norm();
  if (!(n > 0.0)) throw InvalidArgument("Sphere: cannot normalize zero vector");
  return a / n;
}

Matrix Sphere::project_impl(const Matrix& x, const Matrix& a) const {
  return sg::project(x.col(0), a.col(0));
}

Matrix Sphere::exp_impl(const Matrix& x, const Matrix& v) const {
  return sg::exp(x.col(0), v.col(0));
}

Matrix Sphere::log_impl(const Matrix& x, const Matrix& y) const {
  const double theta = sg::dist(x.col(0), y.col(0));
  if (sg::on_cut_locus(theta)) {
    std::ostringstream os;
    os << "log: distance " << theta
       << " reaches the injectivity radius pi on " << name();
    throw DomainError(os.str());
  }
  return sg::log(x.col(0), y.col(0));
}

double Sphere::dist_impl(const Matrix& x, const Matrix& y) const {
  return sg::dist(x.col(0), y.col(0));
}

Matrix Sphere::transport_impl(const Matrix& x, const Matrix& y,
                              const Matrix& w) const {
  const double theta = sg::dist(x.col(0), y.col(0));
  if (sg::on_cut_locus(theta)) {
    std::ostringstream os;
    os << "transport: distance " << theta
       << " reaches the injectivity radius pi on " << name();
    throw DomainError(os.str());
  }
  return sg::transport(x.col(0), y.col(0), w.col(0));
}

Matrix Sphere::transport_along_impl(const Matrix& x, const Matrix& v,
                                    const Matrix& w) const {
  return sg::transport_along(x.col(0), v.col(0), w.col(0));
}

}  // namespace rpgd
