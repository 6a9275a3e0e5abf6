#include <cmath>
#include <numbers>
#include <sstream>

#include "rpgd/manifolds.h"
#include "sphere_geometry.h"

namespace rpgd {

namespace sg = sphere_geometry;

namespace {

// Applies a per-row sphere map f(row_x, row_a) -> row.
template <typename F>
Matrix rowwise(const Matrix& x, const Matrix& a, F f) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out.row(i) = f(Eigen::VectorXd(x.row(i).transpose()),
                   Eigen::VectorXd(a.row(i).transpose()))
                     .transpose();
  }
  return out;
}

}  // namespace

Oblique::Oblique(Eigen::Index d, Eigen::Index p) : Manifold(d, p) {
  if (d < 1 || p < 2) {
    throw InvalidArgument("Oblique: need d >= 1 rows of length p >= 2");
  }
}

std::string Oblique::name() const {
  return "oblique(" + std::to_string(rows()) + "," + std::to_string(cols()) +
         ")";
}

GeometryInfo Oblique::geometry() const {
  return {1.0, std::numbers::pi, static_cast<int>(rows() * (cols() - 1))};
}

double Oblique::feasibility_impl(const Matrix& a) const {
  return (a.rowwise().norm().array() - 1.0).abs().maxCoeff();
}

double Oblique::tangency_impl(const Matrix& x, const Matrix& v) const {
  return (x.array() * v.array()).rowwise().sum().abs().maxCoeff();
}

Matrix Oblique::normalize_impl(const Matrix& a) const {
  const Eigen::VectorXd n = a.rowwise().norm();
  if (!(n.minCoeff() > 0.0)) {
    throw InvalidArgument("Oblique: cannot normalize a zero row");
  }
  return n.cwiseInverse().asDiagonal() * a;
}

Matrix Oblique::project_impl(const Matrix& x, const Matrix& a) const {
  const Eigen::VectorXd d = (x.array() * a.array()).rowwise().sum();
  return a - d.asDiagonal() * x;
}

Matrix Oblique::exp_impl(const Matrix& x, const Matrix& v) const {
  return rowwise(x, v, [](const Eigen::VectorXd& xi, const Eigen::VectorXd& vi) {
    return sg::exp(xi, vi);
  });
}

Matrix Oblique::log_impl(const Matrix& x, const Matrix& y) const {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double theta = sg::dist(x.row(i).transpose(), y.row(i).transpose());
    if (sg::on_cut_locus(theta)) {
      std::ostringstream os;
      os << "log: row " << i << " distance " << theta
         << " reaches the per-factor injectivity radius pi on " << name();
      throw DomainError(os.str());
    }
  }
  return rowwise(x, y, [](const Eigen::VectorXd& xi, const Eigen::VectorXd& yi) {
    return sg::log(xi, yi);
  });
}

double Oblique::dist_impl(const Matrix& x, const Matrix& y) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double t = sg::dist(x.row(i).transpose(), y.row(i).transpose());
    s += t * t;
  }
  return std::sqrt(s);
}

Matrix Oblique::transport_impl(const Matrix& x, const Matrix& y,
                               const Matrix& w) const {
  const Matrix v = log_impl(x, y);
  return transport_along_impl(x, v, w);
}

Matrix Oblique::transport_along_impl(const Matrix& x, const Matrix& v,
                                     const Matrix& w) const {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out.row(i) = sg::transport_along(x.row(i).transpose(),
                                     v.row(i).transpose(),
                                     w.row(i).transpose())
                     .transpose();
  }
  return out;
}

}  // namespace rpgd
