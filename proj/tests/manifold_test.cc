#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rpgd/manifolds.h"
#include "test_util.h"

namespace rpgd {
namespace {

using testing::col;
using testing::random_tangent;
constexpr double kPi = std::numbers::pi;

class SphereTest : public ::testing::Test {
 protected:
  std::shared_ptr<const Sphere> s2 = std::make_shared<Sphere>(3);
  Point e1 = s2->point(col({1, 0, 0}));
  Point e2 = s2->point(col({0, 1, 0}));
  Point e3 = s2->point(col({0, 0, 1}));
};

TEST_F(SphereTest, ExpOfZeroIsExactlyTheBase) {
  const Point y = s2->exp(e1, s2->zero(e1));
  EXPECT_EQ(y.coords(), e1.coords());
}

TEST_F(SphereTest, ExpQuarterGreatCircle) {
  const Tangent v = s2->tangent(e1, col({0, kPi / 2, 0}));
  const Point y = s2->exp(e1, v);
  EXPECT_LT((y.coords() - e2.coords()).norm(), 1e-15);
}

TEST_F(SphereTest, LogQuarterGreatCircle) {
  const Tangent v = s2->log(e1, e2);
  EXPECT_LT((v.coords() - col({0, kPi / 2, 0})).norm(), 1e-15);
}

TEST_F(SphereTest, LogOfSelfIsZero) {
  EXPECT_TRUE(s2->log(e2, e2).coords().isZero(0.0));
}

TEST_F(SphereTest, LogAntipodalIsDomainError) {
  const Point minus_e1 = s2->point(col({-1, 0, 0}));
  try {
    s2->log(e1, minus_e1);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("pi"), std::string::npos);
  }
  EXPECT_THROW(s2->transport(e1, minus_e1, s2->tangent(e1, col({0, 1, 0}))),
               DomainError);
}

TEST_F(SphereTest, Distances) {
  EXPECT_NEAR(s2->dist(e1, e3), kPi / 2, 1e-15);
  EXPECT_NEAR(s2->dist(e1, s2->point(col({-1, 0, 0}))), kPi, 1e-15);
  EXPECT_EQ(s2->dist(e1, e1), 0.0);
  const Point x = s2->point(col({0.6, 0.8, 0}));
  EXPECT_NEAR(s2->dist(x, e3), std::acos(x.coords().col(0).dot(e3.coords().col(0))),
              1e-15);
  EXPECT_DOUBLE_EQ(s2->dist(x, e1), s2->dist(e1, x));
}

TEST_F(SphereTest, TransportExamples) {
  const Tangent normal = s2->tangent(e1, col({0, 0, 1}));
  EXPECT_LT((s2->transport(e1, e2, normal).coords() - col({0, 0, 1})).norm(),
            1e-15);
  const Tangent along = s2->tangent(e1, col({0, 1, 0}));
  EXPECT_LT((s2->transport(e1, e2, along).coords() - col({-1, 0, 0})).norm(),
            1e-15);
  const Tangent w = s2->tangent(e1, col({0, 0.3, -0.7}));
  EXPECT_EQ(s2->transport(e1, e1, w).coords(), w.coords());
}

TEST_F(SphereTest, ProjectTangentExamples) {
  EXPECT_EQ(s2->project_tangent(e1, col({5, 1, 2})).coords(), col({0, 1, 2}));
  const Matrix t = col({0, 3, -1});
  EXPECT_EQ(s2->project_tangent(e1, t).coords(), t);
}

TEST_F(SphereTest, InnerProduct) {
  const Tangent u = s2->tangent(e1, col({0, 1, 0}));
  const Tangent v = s2->tangent(e1, col({0, 0, 1}));
  EXPECT_EQ(s2->inner(e1, u, v), 0.0);
  const Tangent a = s2->tangent(e1, col({0, 0.3, -2}));
  const Tangent b = s2->tangent(e1, col({0, 1.7, 0.4}));
  EXPECT_DOUBLE_EQ(s2->inner(e1, a, a), a.norm() * a.norm());
  EXPECT_EQ(s2->inner(e1, a, b), s2->inner(e1, b, a));
}

TEST_F(SphereTest, ArgumentErrors) {
  EXPECT_THROW(s2->point(col({1, 1, 0})), InvalidArgument);
  EXPECT_THROW(s2->point(col({1, 0})), InvalidArgument);
  EXPECT_THROW(s2->tangent(e1, col({1, 1, 0})), InvalidArgument);
  EXPECT_THROW(s2->project_tangent(e1, col({1, 0})), InvalidArgument);
  // Vector anchored elsewhere.
  const Tangent at_e2 = s2->tangent(e2, col({1, 0, 0}));
  EXPECT_THROW(s2->exp(e1, at_e2), InvalidArgument);
  EXPECT_THROW(s2->inner(e1, at_e2, at_e2), InvalidArgument);
  // Different manifold.
  auto s3 = std::make_shared<Sphere>(4);
  const Point f1 = s3->point(col({1, 0, 0, 0}));
  EXPECT_THROW(s2->dist(e1, f1), InvalidArgument);
}

TEST_F(SphereTest, TangentBallSamples) {
  Rng rng(11);
  EXPECT_THROW(s2->sample_tangent_ball(e1, 0.0, rng), InvalidArgument);
  EXPECT_THROW(s2->sample_tangent_ball(e1, -1.0, rng), InvalidArgument);

  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Tangent v = s2->sample_tangent_ball(e1, 1.0, rng);
    ASSERT_LE(v.norm(), 1.0);
    ASSERT_LE(s2->tangency_residual(e1.coords(), v.coords()), 1e-15);
    sum += v.norm();
  }
  // d = 2: E|xi| = r d / (d + 1).
  EXPECT_NEAR(sum / n, 2.0 / 3.0, 0.01);

  Rng a(5), b(5);
  EXPECT_EQ(s2->sample_tangent_ball(e2, 0.3, a).coords(),
            s2->sample_tangent_ball(e2, 0.3, b).coords());
}

TEST(ObliqueTest, QuarterTurnInOneRow) {
  auto ob = std::make_shared<Oblique>(2, 3);
  Matrix a(2, 3), b(2, 3);
  a << 1, 0, 0, 0, 1, 0;
  b << 0, 1, 0, 0, 1, 0;
  const Point y = ob->point(a), yp = ob->point(b);
  EXPECT_NEAR(ob->dist(y, yp), kPi / 2, 1e-15);
  // l2 combination of per-row arcs.
  Matrix c(2, 3);
  c << 0, 1, 0, 0, 0, 1;
  EXPECT_NEAR(ob->dist(y, ob->point(c)), std::sqrt(2.0) * kPi / 2, 1e-15);
}

TEST(ObliqueTest, RowwiseCutLocus) {
  auto ob = std::make_shared<Oblique>(2, 3);
  Matrix a(2, 3), b(2, 3);
  a << 1, 0, 0, 0, 1, 0;
  b << -1, 0, 0, 0, 1, 0;
  EXPECT_THROW(ob->log(ob->point(a), ob->point(b)), DomainError);
}

TEST(ObliqueTest, MatchesSphereRowByRow) {
  auto ob = std::make_shared<Oblique>(3, 4);
  auto s = std::make_shared<Sphere>(4);
  Rng rng(3);
  const Point x = ob->random_point(rng);
  const Tangent v = random_tangent(*ob, x, 1.3, rng);
  const Tangent w = random_tangent(*ob, x, 0.7, rng);
  const Point y = ob->exp(x, v);
  const Tangent tw = ob->transport(x, y, w);
  for (Eigen::Index i = 0; i < 3; ++i) {
    const Point xi = s->point(x.coords().row(i).transpose());
    const Tangent vi = s->tangent(xi, v.coords().row(i).transpose());
    const Tangent wi = s->tangent(xi, w.coords().row(i).transpose());
    const Point yi = s->exp(xi, vi);
    EXPECT_LT((yi.coords().transpose() - y.coords().row(i)).norm(), 1e-14);
    EXPECT_LT((s->transport(xi, yi, wi).coords().transpose() - tw.coords().row(i))
                  .norm(),
              1e-12);
  }
}

TEST(EuclideanTest, FlatMaps) {
  auto e = std::make_shared<Euclidean>(3);
  const Point x = e->point(col({1, 2, 3}));
  const Point y = e->point(col({0, -1, 5}));
  EXPECT_EQ(e->log(x, y).coords(), col({-1, -3, 2}));
  EXPECT_NEAR(e->dist(x, y), std::sqrt(14.0), 1e-15);
  const Tangent w = e->tangent(x, col({4, 5, 6}));
  EXPECT_EQ(e->transport(x, y, w).coords(), w.coords());
  const GeometryInfo g = e->geometry();
  EXPECT_EQ(g.curvature_bound, 0.0);
  EXPECT_TRUE(std::isinf(g.injectivity_radius));
}

TEST(GeometryInfoTest, ClosedFormValues) {
  const GeometryInfo s = Sphere(3).geometry();
  EXPECT_EQ(s.curvature_bound, 1.0);
  EXPECT_DOUBLE_EQ(s.injectivity_radius, kPi);
  EXPECT_EQ(s.dimension, 2);
  const GeometryInfo o = Oblique(100, 20).geometry();
  EXPECT_EQ(o.curvature_bound, 1.0);
  EXPECT_DOUBLE_EQ(o.injectivity_radius, kPi);
  EXPECT_EQ(o.dimension, 1900);
  EXPECT_EQ(Grassmann(5, 3).geometry().dimension, 6);
  EXPECT_DOUBLE_EQ(Grassmann(5, 3).geometry().injectivity_radius, kPi / 2);
  EXPECT_DOUBLE_EQ(Grassmann(5, 3, 0.4).geometry().injectivity_radius, 0.4);
  EXPECT_EQ(Stiefel(4, 2).geometry().dimension, 5);
}

TEST(GrassmannTest, KnownPrincipalAngle) {
  auto gr = std::make_shared<Grassmann>(4, 2);
  Matrix a = Matrix::Zero(4, 2), b = Matrix::Zero(4, 2);
  a(0, 0) = 1;
  a(1, 1) = 1;
  const double t = 0.4;
  b(0, 0) = std::cos(t);
  b(2, 0) = std::sin(t);
  b(1, 1) = 1;
  const Point x = gr->point(a), y = gr->point(b);
  EXPECT_NEAR(gr->dist(x, y), t, 1e-15);
  Matrix expected = Matrix::Zero(4, 2);
  expected(2, 0) = t;
  EXPECT_LT((gr->log(x, y).coords() - expected).norm(), 1e-15);
  // Rotating the representative of y changes nothing.
  Matrix rot(2, 2);
  rot << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
  const Point yr = gr->point(b * rot);
  EXPECT_NEAR(gr->dist(x, yr), t, 1e-15);
  EXPECT_LT((gr->log(x, yr).coords() - expected).norm(), 1e-14);
}

TEST(GrassmannTest, OrthogonalPlanesAreOnTheCutLocus) {
  auto gr = std::make_shared<Grassmann>(4, 2);
  Matrix a = Matrix::Zero(4, 2), b = Matrix::Zero(4, 2);
  a(0, 0) = a(1, 1) = 1;
  b(2, 0) = b(1, 1) = 1;
  EXPECT_THROW(gr->log(gr->point(a), gr->point(b)), DomainError);
  EXPECT_NEAR(gr->dist(gr->point(a), gr->point(b)), kPi / 2, 1e-15);
}

TEST(GrassmannTest, LineCaseMatchesSphere) {
  // Grassmann(n, 1) is projective space; away from the antipode it is
  // locally the sphere.
  auto gr = std::make_shared<Grassmann>(4, 1);
  auto s = std::make_shared<Sphere>(4);
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    const Point xs = s->random_point(rng);
    const Tangent v = random_tangent(*s, xs, 0.9, rng);
    const Tangent w = random_tangent(*s, xs, 1.0, rng);
    const Point ys = s->exp(xs, v);
    const Point xg = gr->point(xs.coords());
    const Point yg = gr->point(ys.coords());
    EXPECT_NEAR(gr->dist(xg, yg), 0.9, 1e-12);
    EXPECT_LT((gr->log(xg, yg).coords() - v.coords()).norm(), 1e-12);
    const Tangent wg = gr->tangent(xg, w.coords());
    EXPECT_LT((gr->transport(xg, yg, wg).coords() -
               s->transport(xs, ys, w).coords())
                  .norm(),
              1e-12);
  }
}

TEST(StiefelTest, SmallStepStaysClose) {
  auto st = std::make_shared<Stiefel>(4, 2);
  Matrix a = Matrix::Zero(4, 2);
  a(0, 0) = a(1, 1) = 1;
  const Point x = st->point(a);
  Rng rng(1);
  const Tangent v = random_tangent(*st, x, 1e-8, rng);
  const Point y = st->exp(x, v);
  EXPECT_LE((y.coords() - x.coords()).norm(), 2e-8);
  EXPECT_LE(st->feasibility_residual(y.coords()), 1e-14);
}

TEST(StiefelTest, ProjectionKillsSymmetricPart) {
  auto st = std::make_shared<Stiefel>(3, 2);
  Matrix a = Matrix::Zero(3, 2);
  a(0, 0) = a(1, 1) = 1;
  const Point x = st->point(a);
  Matrix s(2, 2);
  s << 2.0, -0.5, -0.5, 3.0;
  EXPECT_LT(st->project_tangent(x, a * s).norm(), 1e-15);
}

TEST(StiefelTest, RotationWithinTheFrameIsAGeodesic) {
  // For V = X Omega with Omega skew, exp(X, V) = X expm(Omega).
  auto st = std::make_shared<Stiefel>(5, 2);
  Rng rng(8);
  const Point x = st->random_point(rng);
  const double w = 0.8;
  Matrix omega(2, 2);
  omega << 0, -w, w, 0;
  Matrix rot(2, 2);
  rot << std::cos(w), -std::sin(w), std::sin(w), std::cos(w);
  const Tangent v = st->tangent(x, x.coords() * omega);
  EXPECT_LT((st->exp(x, v).coords() - x.coords() * rot).norm(), 1e-13);
}

TEST(StiefelTest, GeodesicAccelerationIsNormal) {
  // Finite-difference oracle: X'' must lie in the normal space X * Sym.
  auto st = std::make_shared<Stiefel>(6, 3);
  Rng rng(4);
  const Point x = st->random_point(rng);
  const Tangent v = random_tangent(*st, x, 1.0, rng);
  const double h = 1e-4;
  for (double t : {0.2, 0.5, 0.9}) {
    const Point xm = st->exp(x, (t - h) * v);
    const Point x0 = st->exp(x, t * v);
    const Point xp = st->exp(x, (t + h) * v);
    const Matrix acc =
        (xp.coords() - 2.0 * x0.coords() + xm.coords()) / (h * h);
    const double tangential = st->project_tangent(x0, acc).norm();
    EXPECT_LT(tangential, 1e-5 * std::max(1.0, acc.norm())) << "t=" << t;
  }
}

TEST(StiefelTest, SingleColumnMatchesSphere) {
  auto st = std::make_shared<Stiefel>(4, 1);
  auto s = std::make_shared<Sphere>(4);
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Point xs = s->random_point(rng);
    const Tangent v = random_tangent(*s, xs, 1.7, rng);
    const Tangent w = random_tangent(*s, xs, 1.0, rng);
    const Point xt = st->point(xs.coords());
    const Tangent vt = st->tangent(xt, v.coords());
    const Tangent wt = st->tangent(xt, w.coords());
    EXPECT_LT((st->exp(xt, vt).coords() - s->exp(xs, v).coords()).norm(),
              1e-13);
    EXPECT_LT((st->transport_along(vt, wt).coords() -
               s->transport_along(v, w).coords())
                  .norm(),
              1e-10);
  }
}

TEST(StiefelTest, TransportAlongIsIsometricAndReversible) {
  auto st = std::make_shared<Stiefel>(5, 2);
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    const Point x = st->random_point(rng);
    const Tangent v = random_tangent(*st, x, 1.0, rng);
    const Tangent w = random_tangent(*st, x, 1.0, rng);
    const Tangent u = random_tangent(*st, x, 1.0, rng);
    const Tangent tw = st->transport_along(v, w);
    const Tangent tu = st->transport_along(v, u);
    const Point& y = tw.base();
    EXPECT_LT(st->tangency_residual(y.coords(), tw.coords()), 1e-12);
    EXPECT_NEAR(tw.norm(), w.norm(), 1e-10);
    EXPECT_NEAR(st->inner(y, tw, tu), st->inner(x, w, u), 1e-10);
    // Back along the reversed geodesic.
    const Tangent back_dir = -st->transport_along(v, v);
    const Tangent back = st->transport_along(back_dir, tw);
    EXPECT_LT((back.base().coords() - x.coords()).norm(), 1e-10);
    EXPECT_LT((back.coords() - w.coords()).norm(), 1e-8);
  }
}

TEST(StiefelTest, NoLogOrDistance) {
  auto st = std::make_shared<Stiefel>(4, 2);
  Rng rng(2);
  const Point x = st->random_point(rng);
  const Point y = st->random_point(rng);
  EXPECT_FALSE(st->has_log());
  EXPECT_THROW(st->log(x, y), CapabilityError);
  EXPECT_THROW(st->dist(x, y), CapabilityError);
  EXPECT_THROW(st->transport(x, y, st->zero(x)), CapabilityError);
}

// Property checks over every manifold with a closed-form log.
class LogManifoldProperties
    : public ::testing::TestWithParam<std::shared_ptr<const Manifold>> {};

TEST_P(LogManifoldProperties, RoundTripAndGeodesicSpeed) {
  const Manifold& m = *GetParam();
  const double reach = std::min(0.9 * m.geometry().injectivity_radius, 3.0);
  Rng rng(123);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const Point x = m.random_point(rng);
    const double len = reach * u01(rng);
    const Tangent v = random_tangent(m, x, len, rng);
    const Point y = m.exp(x, v);
    ASSERT_LE(m.feasibility_residual(y.coords()), kFeasibilityTol);
    const Tangent back = m.log(x, y);
    EXPECT_LE((back.coords() - v.coords()).norm(), 1e-7 * (1.0 + len));
    EXPECT_NEAR(back.norm(), m.dist(x, y), 1e-10);
    EXPECT_LE(m.dist(m.exp(x, back), y), 1e-8);
    const double t = u01(rng);
    EXPECT_NEAR(m.dist(x, m.exp(x, t * v)), t * len, 1e-8);
  }
}

TEST_P(LogManifoldProperties, TransportIsAnIsometry) {
  const Manifold& m = *GetParam();
  const double reach = std::min(0.9 * m.geometry().injectivity_radius, 3.0);
  Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    const Point x = m.random_point(rng);
    const Point y = m.exp(x, random_tangent(m, x, reach * 0.99, rng));
    const Tangent w = random_tangent(m, x, 1.3, rng);
    const Tangent u = random_tangent(m, x, 0.4, rng);
    const Tangent tw = m.transport(x, y, w);
    const Tangent tu = m.transport(x, y, u);
    EXPECT_LE(m.tangency_residual(y.coords(), tw.coords()), kTangencyTol);
    EXPECT_LE(std::abs(tw.norm() - w.norm()), 1e-10);
    EXPECT_LE(std::abs(m.inner(y, tw, tu) - m.inner(x, w, u)), 1e-10);
  }
}

TEST_P(LogManifoldProperties, TransportAlongAgreesWithTransport) {
  const Manifold& m = *GetParam();
  const double reach = std::min(0.8 * m.geometry().injectivity_radius, 2.0);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Point x = m.random_point(rng);
    const Tangent v = random_tangent(m, x, reach, rng);
    const Tangent w = random_tangent(m, x, 1.0, rng);
    const Tangent a = m.transport_along(v, w);
    const Tangent b = m.transport(x, a.base(), w);
    EXPECT_LT((a.coords() - b.coords()).norm(), 1e-10);
  }
}

TEST_P(LogManifoldProperties, ProjectionIsIdempotentAndOrthogonal) {
  const Manifold& m = *GetParam();
  Rng rng(31);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    const Point x = m.random_point(rng);
    Matrix a(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      for (Eigen::Index r = 0; r < a.rows(); ++r) a(r, c) = g(rng);
    const Tangent p = m.project_tangent(x, a);
    const Tangent pp = m.project_tangent(x, p.coords());
    EXPECT_LE((pp.coords() - p.coords()).norm(), 1e-12);
    const Tangent t = random_tangent(m, x, 1.0, rng);
    EXPECT_LE(std::abs(((a - p.coords()).array() * t.coords().array()).sum()),
              1e-10);
  }
}

TEST_P(LogManifoldProperties, LogOfSelfIsZero) {
  const Manifold& m = *GetParam();
  Rng rng(1);
  const Point x = m.random_point(rng);
  EXPECT_TRUE(m.log(x, x).coords().isZero(0.0));
  EXPECT_EQ(m.dist(x, x), 0.0);
}

INSTANTIATE_TEST_SUITE_P(AllManifolds, LogManifoldProperties,
                         ::testing::ValuesIn(testing::log_manifolds()),
                         [](const auto& info) {
                           std::string s = info.param->name();
                           for (char& c : s)
                             if (!std::isalnum(static_cast<unsigned char>(c)))
                               c = '_';
                           return s;
                         });

}  // namespace
}  // namespace rpgd
