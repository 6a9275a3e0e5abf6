#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpgd/manifold.h"
#include "rpgd/objective.h"
#include "rpgd/optimizer.h"

namespace rpgd {

/// Outcome of one empirical check. Per-scale maxima are fitted on a log-log
/// scale; the constant is the largest residual/bound ratio at the coarsest
/// scale. A check passes when the slope lies in the window and every sample
/// satisfies residual <= audit_factor * constant * bound.
struct VerificationReport {
  std::string lemma_id;
  int n_samples = 0;  // per scale
  std::vector<double> scales;
  std::vector<double> max_residual_per_scale;
  double fitted_slope = 0.0;
  double fitted_constant = 0.0;
  bool pass = false;

  double expected_exponent = 0.0;
  std::pair<double, double> slope_window{0.0, 0.0};
  bool slope_checked = true;
  int violations = 0;
  /// Every residual <= 1e-10: the identity holds exactly and no slope exists.
  bool exact = false;
  bool falsified = false;
  /// Extra named values (fitted c2/c3, c4, ...).
  std::vector<std::pair<std::string, double>> extras;

  std::optional<double> extra(const std::string& key) const;
  /// key = value lines followed by a "scale max_residual" table.
  std::string to_text() const;
};

struct CheckOptions {
  /// Negative control: lower the exponent of the bound expression by one
  /// (and the expected slope with it). A sound check must then fail.
  bool falsify = false;
  double slope_halfwidth = 0.3;
  double audit_factor = 2.0;
};

/// Residual together with the bound expression it is audited against.
struct Residual {
  double residual = 0.0;
  double bound = 0.0;
};

// ---- per-sample oracles ------------------------------------------------------

/// d(Exp_x(y + a), Exp_z(transport of y to z)) with z = Exp_x(a); bound is
/// min{|a|,|y|} (|a| + |y|)^2.
Residual two_step_residual(const Manifold& m, const Tangent& a,
                           const Tangent& y);

/// Ratio |log_x(y) - log_x(z)| / d(y, z). Requires y != z.
double log_distortion(const Manifold& m, const Point& x, const Point& y,
                      const Point& z);

/// d(Exp_x(w), Exp_y(transport of w to y)); bound is d(x, y).
Residual transport_contraction_residual(const Manifold& m, const Point& y,
                                        const Tangent& w);

/// |G_y^z G_x^y w - G_x^z w|; bound is d(x,y) d(y,z) |w|.
Residual holonomy_residual(const Manifold& m, const Point& y, const Point& z,
                           const Tangent& w);

/// |log_x(w+) - log_x(u+) - (I - eta H(x))(log_x(w) - log_x(u))| where u+, w+
/// are clamped gradient steps; bound is d(u,w) (d(u,w) + d(u,x) + d(w,x)).
/// Needs the exact Hessian of obj.
Residual linearization_residual(const Objective& obj, const Point& x,
                                const Point& u, const Point& w, double eta);

/// |G_z^x grad f(z) - grad f(x) - H(x)[log_x z]|; bound is d(x,z)^2 / 2.
/// H is exact when available, finite-difference otherwise.
Residual gradient_taylor_residual(const Objective& obj, const Point& x,
                                  const Point& z);

// ---- drivers -----------------------------------------------------------------

/// Descent lemma audit over n points drawn from the geodesic ball of `radius`
/// around `center`: f(u+) <= f(u) - eta_bar/2 |grad f(u)|^2 + 1e-12, with
/// eta_bar = min{eta, I/|grad|}. Passes iff there are no violations.
VerificationReport check_descent(const Objective& obj, const Point& center,
                                 double radius, int n, double eta, Rng& rng,
                                 const CheckOptions& opts = {});

VerificationReport check_two_step(const Manifold& m, int n,
                                  const std::vector<double>& scales, Rng& rng,
                                  const CheckOptions& opts = {});

/// Triples within diameter R. Residual per scale is max |ratio - 1|, expected
/// to scale as R^2; extras carry the fitted c2 and c3.
VerificationReport check_log_bilipschitz(const Manifold& m, int n,
                                         const std::vector<double>& R_values,
                                         Rng& rng,
                                         const CheckOptions& opts = {});

/// w uniform in the unit tangent ball, y at distance proportional to the
/// scale. extras carry the fitted c4 (largest residual / d(x, y)).
VerificationReport check_transport_contraction(
    const Manifold& m, int n, Rng& rng,
    const std::vector<double>& scales = {0.4, 0.2, 0.1, 0.05},
    const CheckOptions& opts = {});

VerificationReport check_holonomy(const Manifold& m, int n,
                                  const std::vector<double>& scales, Rng& rng,
                                  const CheckOptions& opts = {});

/// u, w drawn from the ball of radius s around the saddle. The per-scale
/// quantity is max residual / d(u, w), expected to decay linearly.
VerificationReport check_linearization(const Objective& obj,
                                       const Point& saddle_x, int n,
                                       const std::vector<double>& scales,
                                       double eta, Rng& rng,
                                       const CheckOptions& opts = {});

/// extras carry rho_fit = 2 * fitted_constant, a Hessian Lipschitz stand-in.
VerificationReport check_gradient_taylor(const Objective& obj, int n,
                                         const std::vector<double>& scales,
                                         Rng& rng,
                                         const CheckOptions& opts = {});

// ---- coupling probe ----------------------------------------------------------

struct CouplingReport {
  double mu = 0.0;
  double lambda_min = 0.0;
  Matrix e1;  // unit eigenvector coordinates at the saddle
  double escape_radius = 0.0;
  double predicted_ratio = 0.0;  // 1 - eta * lambda_min
  double threshold_ratio = 0.0;  // 1 + eta * gamma / 2
  std::vector<double> psi;
  std::vector<double> phi;
  std::vector<double> growth_ratios;  // psi_{t+1} / psi_t, up to first exit
  std::optional<int> first_tenfold_t;
  std::optional<int> first_exit_t;  // first t where either sequence is outside
  std::optional<int> both_exit_t;
  /// Fraction of growth ratios (before the first exit) at or above
  /// threshold_ratio.
  double fraction_above_threshold = 0.0;
  std::string stop_reason;  // "escaped", "t_max", "left injectivity ball"

  std::string to_text() const;
};

struct CouplingOptions {
  /// Defaults to 3 * c_hat * script_S.
  std::optional<double> escape_radius;
  double eig_tol = 1e-8;
};

/// Two gradient-descent sequences from u0 = Exp_x(xi), xi uniform in the
/// radius-r ball, and w0 = Exp_x(log_x(u0) + mu r e1), with e1 the most
/// negative Hessian direction at x. Tracks psi_t (e1 component of
/// log_x(w_t) - log_x(u_t)) and phi_t (norm of the orthogonal part).
CouplingReport coupling_probe(const Objective& obj, const Point& saddle_x,
                              const ThresholdSet& thr, double mu, int t_max,
                              Rng& rng, const CouplingOptions& opts = {});

/// Slope of the least-squares line through (log x_i, log y_i). Entries with
/// y_i <= 0 are dropped; NaN when fewer than two remain.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rpgd
