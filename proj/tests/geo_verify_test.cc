#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "rpgd/geo_verify.h"
#include "rpgd/manifolds.h"
#include "test_util.h"

namespace rpgd {
namespace {

using testing::col;
using testing::random_tangent;

constexpr double kPi = std::numbers::pi;

const std::vector<double> kCubicScales{0.2, 0.1, 0.05, 0.025};
const std::vector<double> kRadii{0.5, 0.25, 0.125, 0.0625};
const std::vector<double> kTriangleScales{0.4, 0.2, 0.1, 0.05};
const std::vector<double> kSaddleScales{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

std::shared_ptr<const Sphere> s2() { return std::make_shared<Sphere>(3); }

std::shared_ptr<DiagonalQuadratic> saddle_objective() {
  Vector d(3);
  d << 1, -1, 4;
  return std::make_shared<DiagonalQuadratic>(s2(), d);
}

CheckOptions falsified() {
  CheckOptions o;
  o.falsify = true;
  return o;
}

TEST(LogLogSlope, RecoversPowerLaw) {
  std::vector<double> x{1, 0.5, 0.25, 0.125}, y;
  for (double v : x) y.push_back(7 * v * v * v);
  EXPECT_NEAR(loglog_slope(x, y), 3.0, 1e-12);
  EXPECT_TRUE(std::isnan(loglog_slope({1.0}, {1.0})));
  EXPECT_TRUE(std::isnan(loglog_slope({1.0, 0.5}, {0.0, 0.0})));
}

// ---- two-step --------------------------------------------------------------

TEST(TwoStep, ZeroLegsGiveZeroResidual) {
  auto m = s2();
  Rng rng(1);
  Point x = m->random_point(rng);
  Tangent v = random_tangent(*m, x, 0.3, rng);
  EXPECT_EQ(two_step_residual(*m, m->zero(x), v).residual, 0.0);
  // y = 0: both sides are Exp_x(a).
  EXPECT_LE(two_step_residual(*m, v, m->zero(x)).residual, 1e-15);
  EXPECT_EQ(two_step_residual(*m, v, m->zero(x)).bound, 0.0);
}

TEST(TwoStep, CubicScalingOnSphere) {
  Rng rng(11);
  VerificationReport r = check_two_step(*s2(), 1000, kCubicScales, rng);
  EXPECT_TRUE(r.pass) << r.to_text();
  EXPECT_NEAR(r.fitted_slope, 3.0, 0.3);
  EXPECT_EQ(r.violations, 0);
  EXPECT_GT(r.fitted_constant, 0.0);
}

TEST(TwoStep, OtherManifolds) {
  Rng rng(12);
  EXPECT_TRUE(check_two_step(*std::make_shared<Oblique>(4, 3), 300, kCubicScales, rng).pass);
  EXPECT_TRUE(check_two_step(*std::make_shared<Grassmann>(5, 2), 300, kCubicScales, rng).pass);
  VerificationReport flat = check_two_step(*std::make_shared<Euclidean>(3), 100, kCubicScales, rng);
  EXPECT_TRUE(flat.exact);
  EXPECT_TRUE(flat.pass);
}

TEST(TwoStep, FalsifiedBoundFails) {
  Rng rng(11);
  VerificationReport r =
      check_two_step(*s2(), 300, kCubicScales, rng, falsified());
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(r.falsified);
  EXPECT_DOUBLE_EQ(r.expected_exponent, 2.0);
}

TEST(TwoStep, RejectsBadScales) {
  Rng rng(1);
  EXPECT_THROW(check_two_step(*s2(), 10, {0.1, 0.2}, rng), InvalidArgument);
  EXPECT_THROW(check_two_step(*s2(), 10, {0.1}, rng), InvalidArgument);
  EXPECT_THROW(check_two_step(*s2(), 0, kCubicScales, rng), InvalidArgument);
}

// ---- log bi-Lipschitz --------------------------------------------------------

TEST(LogBiLipschitz, EqualPointsRejectedAndGeodesicIsIsometric) {
  auto m = s2();
  Point x = m->point(col({1, 0, 0}));
  Point y = m->point(col({std::cos(0.3), std::sin(0.3), 0}));
  Point z = m->point(col({std::cos(0.7), std::sin(0.7), 0}));
  EXPECT_THROW(log_distortion(*m, x, y, y), InvalidArgument);
  EXPECT_NEAR(log_distortion(*m, x, y, z), 1.0, 1e-12);
}

TEST(LogBiLipschitz, QuadraticDeviationOnSphere) {
  Rng rng(21);
  VerificationReport r = check_log_bilipschitz(*s2(), 1000, kRadii, rng);
  EXPECT_TRUE(r.pass) << r.to_text();
  EXPECT_NEAR(r.fitted_slope, 2.0, 0.3);
  ASSERT_TRUE(r.extra("c2") && r.extra("c3"));
  // Positive curvature: the log map only expands distances.
  EXPECT_EQ(*r.extra("c2"), 0.0);
  EXPECT_GT(*r.extra("c3"), 0.0);
}

TEST(LogBiLipschitz, FalsifiedBoundFails) {
  Rng rng(21);
  EXPECT_FALSE(check_log_bilipschitz(*s2(), 300, kRadii, rng, falsified()).pass);
}

// ---- transport contraction ---------------------------------------------------

TEST(TransportContraction, Trivialities) {
  auto m = s2();
  Rng rng(3);
  Point x = m->random_point(rng);
  Tangent w = random_tangent(*m, x, 0.8, rng);
  EXPECT_LE(transport_contraction_residual(*m, x, w).residual, 1e-15);
  Point y = m->exp(x, random_tangent(*m, x, 0.2, rng));
  Residual r = transport_contraction_residual(*m, y, m->zero(x));
  EXPECT_NEAR(r.residual / r.bound, 1.0, 1e-12);
}

TEST(TransportContraction, SphereContracts) {
  Rng rng(31);
  VerificationReport r = check_transport_contraction(*s2(), 1000, rng);
  EXPECT_TRUE(r.pass) << r.to_text();
  ASSERT_TRUE(r.extra("c4"));
  EXPECT_LE(*r.extra("c4"), 1.05);
}

TEST(TransportContraction, FalsifiedBoundFails) {
  Rng rng(31);
  EXPECT_FALSE(check_transport_contraction(*s2(), 300, rng,
                                           {0.4, 0.2, 0.1, 0.05}, falsified())
                   .pass);
}

// ---- holonomy ----------------------------------------------------------------

TEST(Holonomy, CollinearPointsHaveNoHolonomy) {
  auto m = s2();
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    Point x = m->random_point(rng);
    Tangent v = random_tangent(*m, x, 1.0, rng);
    Point y = m->exp(x, 0.4 * v);
    Point z = m->exp(x, 0.9 * v);
    Tangent w = random_tangent(*m, x, 1.0, rng);
    EXPECT_LE(holonomy_residual(*m, y, z, w).residual, 1e-10);
  }
}

TEST(Holonomy, OctantTriangle) {
  auto m = s2();
  Point x = m->point(col({1, 0, 0}));
  Point y = m->point(col({0, 1, 0}));
  Point z = m->point(col({0, 0, 1}));
  Tangent w = m->tangent(x, col({0, 0, 1}));
  Residual r = holonomy_residual(*m, y, z, w);
  EXPECT_NEAR(r.residual, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.residual / r.bound, std::sqrt(2.0) / (kPi * kPi / 4), 1e-12);
  EXPECT_NEAR(r.residual / r.bound, 0.573, 1e-3);
}

TEST(Holonomy, QuadraticDecayOnSphere) {
  Rng rng(41);
  VerificationReport r = check_holonomy(*s2(), 1000, kTriangleScales, rng);
  EXPECT_TRUE(r.pass) << r.to_text();
  EXPECT_NEAR(r.fitted_slope, 2.0, 0.3);
}

TEST(Holonomy, FlatAndFalsified) {
  Rng rng(41);
  EXPECT_TRUE(check_holonomy(*std::make_shared<Euclidean>(3), 50, kTriangleScales, rng).exact);
  EXPECT_TRUE(check_holonomy(*std::make_shared<Grassmann>(4, 2), 300, kTriangleScales, rng).pass);
  EXPECT_FALSE(
      check_holonomy(*s2(), 300, kTriangleScales, rng, falsified()).pass);
}

// ---- linearization -----------------------------------------------------------

TEST(Linearization, CoincidentPointsGiveZero) {
  auto f = saddle_objective();
  const Manifold& m = f->manifold();
  Point x = m.point(col({1, 0, 0}));
  Point u = m.point(col({std::cos(0.01), 0, std::sin(0.01)}));
  EXPECT_EQ(linearization_residual(*f, x, u, u, 0.05).residual, 0.0);
}

TEST(Linearization, ExactInFlatSpace) {
  Vector d(3);
  d << 1, -2, 3;
  auto e3 = std::make_shared<Euclidean>(3);
  DiagonalQuadratic f(e3, d);
  Rng rng(5);
  VerificationReport r = check_linearization(
      f, e3->point(Matrix::Zero(3, 1)), 200, kSaddleScales, 0.05, rng);
  EXPECT_TRUE(r.exact);
  EXPECT_TRUE(r.pass);
  for (double v : r.max_residual_per_scale) EXPECT_LE(v, 1e-10);
}

TEST(Linearization, SymmetricSaddleDecaysOneOrderFaster) {
  // x^T D x is invariant under the reflection diag(1,-1,-1) fixing e1, so
  // the step map is odd in normal coordinates and the first-order error term
  // cancels: residual / d(u,w) goes like s^2. The bound still holds.
  auto f = saddle_objective();
  Rng rng(51);
  VerificationReport r =
      check_linearization(*f, f->manifold().point(col({1, 0, 0})), 1000,
                          kSaddleScales, 0.05, rng);
  EXPECT_NEAR(r.fitted_slope, 2.0, 0.3) << r.to_text();
  EXPECT_EQ(r.violations, 0);
  EXPECT_FALSE(r.pass);
}

TEST(Linearization, LinearDecayAtSkewedSaddle) {
  auto f = std::make_shared<testing::SkewedSaddle>(s2());
  const Point x = f->manifold().point(col({1, 0, 0}));
  ASSERT_EQ(f->rgrad(x).norm(), 0.0);
  Rng rng(51);
  VerificationReport r =
      check_linearization(*f, x, 1000, kSaddleScales, 0.05, rng);
  EXPECT_TRUE(r.pass) << r.to_text();
  EXPECT_NEAR(r.fitted_slope, 1.0, 0.3);
}

TEST(Linearization, NeedsExactHessian) {
  auto gr = std::make_shared<Grassmann>(5, 3);
  Vector h(5);
  h << 0, 1, 2, 3, 4;
  KPca f(gr, h.asDiagonal().toDenseMatrix());
  Rng rng(1);
  Point x = gr->random_point(rng);
  EXPECT_THROW(check_linearization(f, x, 10, kSaddleScales, 0.05, rng),
               CapabilityError);
  EXPECT_THROW(linearization_residual(f, x, x, x, 0.05), CapabilityError);
}

TEST(Linearization, FalsifiedBoundFails) {
  auto f = std::make_shared<testing::SkewedSaddle>(s2());
  Rng rng(51);
  EXPECT_FALSE(check_linearization(*f, f->manifold().point(col({1, 0, 0})),
                                   300, kSaddleScales, 0.05, rng, falsified())
                   .pass);
}

// ---- gradient Taylor ---------------------------------------------------------

TEST(GradientTaylor, SamePointAndLinearFlat) {
  auto f = saddle_objective();
  Rng rng(6);
  Point x = f->manifold().random_point(rng);
  EXPECT_LE(gradient_taylor_residual(*f, x, x).residual, 1e-15);

  auto e4 = std::make_shared<Euclidean>(4);
  LinearObjective lin(e4, Matrix::Ones(4, 1));
  VerificationReport r = check_gradient_taylor(lin, 100, kCubicScales, rng);
  EXPECT_TRUE(r.exact);
  for (double v : r.max_residual_per_scale) EXPECT_EQ(v, 0.0);
}

TEST(GradientTaylor, QuadraticDecayOnSphere) {
  auto f = saddle_objective();
  Rng rng(61);
  VerificationReport r = check_gradient_taylor(*f, 1000, kCubicScales, rng);
  EXPECT_TRUE(r.pass) << r.to_text();
  EXPECT_NEAR(r.fitted_slope, 2.0, 0.3);
  ASSERT_TRUE(r.extra("rho_fit"));
  EXPECT_GT(*r.extra("rho_fit"), 0.0);
}

TEST(GradientTaylor, FiniteDifferenceHessianPath) {
  // Burer-Monteiro has no exact Hessian; the check falls back to hess_vec.
  Rng rng(62);
  auto ob = std::make_shared<Oblique>(4, 3);
  Matrix a = Matrix::Random(4, 4);
  BurerMonteiro f(ob, 0.5 * (a + a.transpose()));
  VerificationReport r = check_gradient_taylor(f, 200, kCubicScales, rng);
  EXPECT_TRUE(r.pass) << r.to_text();
}

TEST(GradientTaylor, FalsifiedBoundFails) {
  auto f = saddle_objective();
  Rng rng(61);
  EXPECT_FALSE(
      check_gradient_taylor(*f, 300, kCubicScales, rng, falsified()).pass);
}

// ---- descent -----------------------------------------------------------------

TEST(Descent, ConstantObjective) {
  auto m = s2();
  ConstantObjective c(m, 3.0);
  Rng rng(7);
  VerificationReport r =
      check_descent(c, m->point(col({1, 0, 0})), 1.0, 100, 0.1, rng);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_residual_per_scale[0], 0.0);
  EXPECT_EQ(r.violations, 0);
}

TEST(Descent, StepBelowInverseLipschitzDescends) {
  auto f = saddle_objective();
  Point c = f->manifold().point(col({1, 0, 0}));
  Rng rng(71);
  const double beta_hat = estimate_smoothness(*f, c, 3.0, 120, rng).beta_hat;
  EXPECT_GT(beta_hat, 8.0);
  VerificationReport ok = check_descent(*f, c, 3.0, 1000, 0.9 / beta_hat, rng);
  EXPECT_TRUE(ok.pass) << ok.to_text();
  VerificationReport over =
      check_descent(*f, c, 3.0, 1000, 10.0 / beta_hat, rng);
  EXPECT_FALSE(over.pass);
  EXPECT_GT(over.violations, 0);
  VerificationReport fals =
      check_descent(*f, c, 3.0, 1000, 0.9 / beta_hat, rng, falsified());
  EXPECT_FALSE(fals.pass);
}

// ---- determinism and serialization --------------------------------------------

TEST(Reports, DeterministicPerSeed) {
  Rng a(99), b(99);
  EXPECT_EQ(check_two_step(*s2(), 200, kCubicScales, a).to_text(),
            check_two_step(*s2(), 200, kCubicScales, b).to_text());
}

TEST(Reports, TextFormat) {
  Rng rng(1);
  VerificationReport r = check_holonomy(*s2(), 50, kTriangleScales, rng);
  const std::string t = r.to_text();
  EXPECT_NE(t.find("lemma_id = holonomy\n"), std::string::npos);
  EXPECT_NE(t.find("n_samples = 50\n"), std::string::npos);
  EXPECT_NE(t.find("pass = "), std::string::npos);
  EXPECT_NE(t.find("[scales]\nscale max_residual\n0.40000000000000002 "),
            std::string::npos);
}

// ---- coupling probe ----------------------------------------------------------

ThresholdSet probe_thresholds() {
  AssumptionParams p;
  p.dim_d = 2;
  p.beta = 10;
  p.rho = 8;
  p.epsilon = 0.1;
  p.delta = 0.1;
  p.f_gap = 2;
  p.injectivity = kPi;
  PracticalOverrides o;
  o.eta = 0.05;
  o.r = 1e-3;
  o.g_thres = 1e-4;
  o.t_thres = 200;
  o.f_thres = 1e-8;
  return practical_thresholds(p, o);
}

TEST(Coupling, ZeroMuKeepsSequencesIdentical) {
  auto f = saddle_objective();
  Rng rng(8);
  CouplingReport r = coupling_probe(*f, f->manifold().point(col({1, 0, 0})),
                                    probe_thresholds(), 0.0, 100, rng);
  ASSERT_FALSE(r.psi.empty());
  for (double v : r.psi) EXPECT_EQ(v, 0.0);
  for (double v : r.phi) EXPECT_EQ(v, 0.0);
}

TEST(Coupling, EigendirectionGrowsGeometrically) {
  auto f = saddle_objective();
  const Point x = f->manifold().point(col({1, 0, 0}));
  const ThresholdSet thr = probe_thresholds();
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    CouplingReport r = coupling_probe(*f, x, thr, 1.0, 1000, rng);
    EXPECT_NEAR(r.lambda_min, -4.0, 1e-6);
    EXPECT_NEAR(r.predicted_ratio, 1.2, 1e-6);
    EXPECT_NEAR(r.psi.front(), thr.r, 1e-12);
    EXPECT_GE(r.fraction_above_threshold, 0.9) << r.to_text();
    EXPECT_TRUE(r.first_tenfold_t.has_value());
    EXPECT_TRUE(r.first_exit_t.has_value());
    EXPECT_EQ(r.stop_reason, "escaped");
    EXPECT_NEAR(r.escape_radius, 3 * thr.c_hat * thr.script_S, 1e-15);
  }
}

TEST(Coupling, StopsAtTmax) {
  auto f = saddle_objective();
  Rng rng(8);
  CouplingReport r = coupling_probe(*f, f->manifold().point(col({1, 0, 0})),
                                    probe_thresholds(), 1.0, 5, rng);
  EXPECT_EQ(r.stop_reason, "t_max");
  EXPECT_EQ(r.psi.size(), 6u);
  EXPECT_NE(r.to_text().find("stop_reason = t_max"), std::string::npos);
}

TEST(Coupling, NeedsLogMap) {
  auto st = std::make_shared<Stiefel>(4, 2);
  Vector h(4);
  h << 0, 1, 2, 3;
  KPca f(st, h.asDiagonal().toDenseMatrix());
  Rng rng(1);
  EXPECT_THROW(coupling_probe(f, st->random_point(rng), probe_thresholds(), 1,
                              10, rng),
               CapabilityError);
}

}  // namespace
}  // namespace rpgd
