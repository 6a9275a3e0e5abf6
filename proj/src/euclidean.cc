#include "rpgd/manifolds.h"

namespace rpgd {

Euclidean::Euclidean(Eigen::Index n) : Manifold(n, 1) {
  if (n < 1) throw InvalidArgument("Euclidean: dimension must be >= 1");
}

std::string Euclidean::name() const {
  return "euclidean(" + std::to_string(rows()) + ")";
}

GeometryInfo Euclidean::geometry() const {
  return {0.0, kInf, static_cast<int>(rows())};
}

double Euclidean::feasibility_impl(const Matrix& a) const {
  return a.allFinite() ? 0.0 : kInf;
}

double Euclidean::tangency_impl(const Matrix&, const Matrix& v) const {
  return v.allFinite() ? 0.0 : kInf;
}

Matrix Euclidean::normalize_impl(const Matrix& a) const { return a; }

Matrix Euclidean::project_impl(const Matrix&, const Matrix& a) const {
  return a;
}

Matrix Euclidean::exp_impl(const Matrix& x, const Matrix& v) const {
  return x + v;
}

Matrix Euclidean::log_impl(const Matrix& x, const Matrix& y) const {
  return y - x;
}

double Euclidean::dist_impl(const Matrix& x, const Matrix& y) const {
  return (y - x).norm();
}

Matrix Euclidean::transport_impl(const Matrix&, const Matrix&,
                                 const Matrix& w) const {
  return w;
}

Matrix Euclidean::transport_along_impl(const Matrix&, const Matrix&,
                                       const Matrix& w) const {
  return w;
}

}  // namespace rpgd
