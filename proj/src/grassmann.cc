#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rpgd/manifolds.h"

namespace rpgd {

namespace {

constexpr double kCutLocusTol = 1e-8;

// Pieces of the log from X to Y: with X^T Y = Um S Vm^T and
// L = (I - X X^T) Y Vm, column i of L has norm sin(theta_i) and the principal
// angle is theta_i = atan2(|L_i|, s_i). Y Vm Um^T is the representative of
// span(Y) reached by the geodesic from X.
struct LogParts {
  Matrix um;
  Matrix vm;
  Matrix l;
  Eigen::VectorXd theta;
};

LogParts log_parts(const Matrix& x, const Matrix& y) {
  Eigen::JacobiSVD<Matrix> svd(x.transpose() * y,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  LogParts p;
  p.um = svd.matrixU();
  p.vm = svd.matrixV();
  const Matrix yv = y * p.vm;
  p.l = yv - x * (x.transpose() * yv);
  const Eigen::VectorXd s = svd.singularValues();
  p.theta.resize(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    p.theta(i) = std::atan2(p.l.col(i).norm(), s(i));
  }
  return p;
}

double theta_over_sin(double theta) {
  return theta == 0.0 ? 1.0 : theta / std::sin(theta);
}

// Transport W (horizontal at X) along the geodesic X -> Exp_X(U diag(theta)
// R^T). U's columns must be orthonormal where theta > 0; columns with
// theta == 0 contribute nothing.
Matrix transport_svd(const Matrix& x, const Matrix& u,
                     const Eigen::VectorXd& theta, const Matrix& r,
                     const Matrix& w) {
  Matrix out = w;
  // W + (-X R sin + U (cos - 1)) U^T W, with zero angles masked out.
  const Eigen::Index k = theta.size();
  Eigen::VectorXd sn(k), cm1(k);
  Matrix um = u;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (theta(i) == 0.0) {
      sn(i) = 0.0;
      cm1(i) = 0.0;
      um.col(i).setZero();
    } else {
      sn(i) = std::sin(theta(i));
      cm1(i) = std::cos(theta(i)) - 1.0;
    }
  }
  const Matrix utw = um.transpose() * w;
  out.noalias() += (-(x * r) * sn.asDiagonal() + um * cm1.asDiagonal()) * utw;
  return out;
}

}  // namespace

Grassmann::Grassmann(Eigen::Index n, Eigen::Index k,
                     std::optional<double> injectivity)
    : Manifold(n, k), injectivity_(injectivity) {
  if (k < 1 || n <= k) throw InvalidArgument("Grassmann: need 1 <= k < n");
  if (injectivity && !(*injectivity > 0.0)) {
    throw InvalidArgument("Grassmann: injectivity override must be positive");
  }
}

std::string Grassmann::name() const {
  return "grassmann(" + std::to_string(rows()) + "," + std::to_string(cols()) +
         ")";
}

GeometryInfo Grassmann::geometry() const {
  const Eigen::Index n = rows(), k = cols();
  // Sectional curvature lies in [0, 2] when both k and n - k are >= 2; the
  // projective cases (k = 1 or k = n - 1) have constant curvature 1.
  const double kb = (std::min(k, n - k) >= 2) ? 2.0 : 1.0;
  return {kb, injectivity_.value_or(std::numbers::pi / 2),
          static_cast<int>(k * (n - k))};
}

Vector Grassmann::principal_angles(const Matrix& x, const Matrix& y) const {
  check_shape(x, "principal_angles");
  check_shape(y, "principal_angles");
  Vector t = log_parts(x, y).theta;
  std::sort(t.begin(), t.end());
  return t;
}

double Grassmann::feasibility_impl(const Matrix& a) const {
  return (a.transpose() * a - Matrix::Identity(cols(), cols())).norm();
}

double Grassmann::tangency_impl(const Matrix& x, const Matrix& v) const {
  return (x.transpose() * v).norm();
}

Matrix Grassmann::normalize_impl(const Matrix& a) const {
  return orthonormalize(a);
}

Matrix Grassmann::project_impl(const Matrix& x, const Matrix& a) const {
  return a - x * (x.transpose() * a);
}

Matrix Grassmann::exp_impl(const Matrix& x, const Matrix& v) const {
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Matrix& u = svd.matrixU();
  const Matrix& r = svd.matrixV();
  const Eigen::VectorXd c = s.array().cos();
  const Eigen::VectorXd sn = s.array().sin();
  const Matrix y =
      (x * r * c.asDiagonal() + u * sn.asDiagonal()) * r.transpose();
  return orthonormalize(y);
}

Matrix Grassmann::log_impl(const Matrix& x, const Matrix& y) const {
  const LogParts p = log_parts(x, y);
  const double tmax = p.theta.maxCoeff();
  if (tmax >= std::numbers::pi / 2 - kCutLocusTol) {
    std::ostringstream os;
    os << "log: largest principal angle " << tmax
       << " reaches the cut-locus radius pi/2 on " << name();
    throw DomainError(os.str());
  }
  Eigen::VectorXd scale(p.theta.size());
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    scale(i) = theta_over_sin(p.theta(i));
  }
  const Matrix v = p.l * scale.asDiagonal() * p.um.transpose();
  return project_impl(x, v);
}

double Grassmann::dist_impl(const Matrix& x, const Matrix& y) const {
  return log_parts(x, y).theta.norm();
}

Matrix Grassmann::transport_impl(const Matrix& x, const Matrix& y,
                                 const Matrix& w) const {
  const LogParts p = log_parts(x, y);
  const double tmax = p.theta.maxCoeff();
  if (tmax >= std::numbers::pi / 2 - kCutLocusTol) {
    std::ostringstream os;
    os << "transport: largest principal angle " << tmax
       << " reaches the cut-locus radius pi/2 on " << name();
    throw DomainError(os.str());
  }
  Matrix u(p.l.rows(), p.l.cols());
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    const double n = p.l.col(i).norm();
    u.col(i) = n > 0.0 ? Eigen::VectorXd(p.l.col(i) / n)
                       : Eigen::VectorXd::Zero(u.rows());
  }
  // Transported vector is horizontal at Y Vm Um^T; re-express it at Y.
  const Matrix at_geodesic_end = transport_svd(x, u, p.theta, p.um, w);
  const Matrix out = at_geodesic_end * p.um * p.vm.transpose();
  return project_impl(y, out);
}

Matrix Grassmann::transport_along_impl(const Matrix& x, const Matrix& v,
                                       const Matrix& w) const {
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix y = exp_impl(x, v);
  const Matrix out = transport_svd(x, svd.matrixU(), svd.singularValues(),
                                   svd.matrixV(), w);
  return project_impl(y, out);
}

Matrix orthonormalize(const Matrix& a) {
  const Eigen::Index n = a.rows(), k = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace rpgd
