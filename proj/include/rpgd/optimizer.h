#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rpgd/manifold.h"
#include "rpgd/objective.h"

namespace rpgd {

struct AssumptionParams {
  double beta = 0.0;         // gradient Lipschitz constant
  double rho = 0.0;          // Hessian Lipschitz constant
  double curvature_K = 0.0;  // sectional curvature bound
  double injectivity = kInf;
  double epsilon = 0.0;
  double delta = 0.1;
  double f_gap = 0.0;  // upper bound on f(x0) - f*
  int dim_d = 0;
  /// max(rho, C(K, beta, rho)). No closed form for C exists, so this is an
  /// input; unset means rho.
  std::optional<double> rho_hat;
  /// Fitted stand-ins for c2(K), c3(K) (the log bi-Lipschitz constants).
  /// Only used to evaluate the admissible-epsilon bound.
  std::optional<double> c2;
  std::optional<double> c3;

  double effective_rho_hat() const { return rho_hat.value_or(rho); }
  /// Throws InvalidArgument listing every violated field.
  void validate() const;
};

struct ThresholdSet {
  std::string mode;  // "theory" or "practical"
  double c_hat = 4.0;
  double c_max = 0.0;
  double chi = 0.0;
  double r = 0.0;
  double f_thres = 0.0;
  double g_thres = 0.0;
  std::int64_t t_thres = 0;
  double eta = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
  double script_F = 0.0;
  double script_G = 0.0;
  double script_S = 0.0;
  double script_T = 0.0;
  double injectivity = kInf;
  std::vector<std::string> warnings;
};

/// Both sides of the admissible-epsilon condition of the main convergence
/// theorem:
///   eps <= min{ rho_hat/(56 max(c2,c3) eta beta) L,
///               (I rho_hat/(12 c_hat sqrt(eta beta)) L)^2 },
/// L = log(d beta/(sqrt(rho_hat eps) delta)). The first term is absent
/// without fitted c2/c3.
struct EpsilonBound {
  double epsilon = 0.0;
  std::optional<double> curvature_term;
  double injectivity_term = kInf;
  bool satisfied = true;
};

EpsilonBound epsilon_bound(const AssumptionParams& p, const ThresholdSet& thr);

/// Worst-case thresholds with c_max at its largest admissible value
/// (1/(56 c_hat^2))^2. A violated epsilon bound is appended to `warnings`.
ThresholdSet derive_thresholds(const AssumptionParams& p, double c_hat = 4.0);

struct PracticalOverrides {
  std::optional<double> eta;
  std::optional<double> r;
  std::optional<double> g_thres;
  std::optional<double> f_thres;
  std::optional<std::int64_t> t_thres;
};

/// Desk-scale thresholds. Defaults: eta = 0.1/beta, r = sqrt(eps),
/// g_thres = eps, t_thres = ceil(4/(eta sqrt(rho_hat eps))),
/// f_thres = 0.1 sqrt(eps^3/rho_hat). Derived quantities (gamma, kappa and the
/// script constants) use the chosen eta.
ThresholdSet practical_thresholds(const AssumptionParams& p,
                                  const PracticalOverrides& o = {},
                                  double c_hat = 4.0);

struct TraceRow {
  std::int64_t t = 0;
  double f = 0.0;         // at the point the gradient step starts from
  double gradnorm = 0.0;  // idem
  double step_norm = 0.0;
  bool perturbed = false;
  std::optional<double> dist_to_tilde;  // d(x_t, x~), once a perturbation happened
  std::optional<double> dist_to_start;  // d(x_t, x_0) when the manifold has dist
};

enum class RunStatus {
  kSecondOrderPoint,
  kIterationCap,
  kStepFailure,
  kGradientTolerance,  // rgd_baseline only
};

std::string to_string(RunStatus s);

struct TraceEnd {
  RunStatus status;
  std::int64_t total_iterations = 0;
  double wall_time_s = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::optional<TraceEnd> end;
};

struct OptState {
  std::int64_t t = 0;
  Point x;
  Point x0;
  std::int64_t t_noise = 0;
  std::optional<Point> x_tilde;
  double f_tilde = 0.0;
  Trace trace;

  /// Fresh state at t = 0 with t_noise = -t_thres - 1.
  static OptState initial(const Point& x0, const ThresholdSet& thr);
};

struct RunResult {
  RunStatus status;
  Point final_point;
  double final_f = 0.0;
  double final_gradnorm = 0.0;
  std::optional<double> final_lambda_min;
  std::int64_t iterations = 0;
  std::string message;
  Trace trace;
};

/// One pass of the perturbed loop: perturb if the gradient is small and no
/// window is open, terminate if a window closes without sufficient decrease,
/// otherwise take the clamped gradient step and advance t.
std::variant<OptState, RunResult> prgd_step(OptState state,
                                            const ThresholdSet& thr,
                                            const Objective& obj, Rng& rng);

RunResult run(const Objective& obj, const Point& x0, const ThresholdSet& thr,
              std::int64_t max_iters, Rng& rng);

/// Plain Riemannian gradient descent with the same clamped step and no
/// perturbation. Stops once |grad| <= g_tol.
RunResult rgd_baseline(const Objective& obj, const Point& x0, double eta,
                       double g_tol, std::int64_t max_iters,
                       double injectivity = kInf);

enum class Stationarity { kSaddle, kSecondOrder, kNonStationary };

std::string to_string(Stationarity s);

/// Ties at -sqrt(rho_hat eps) go to kSaddle.
Stationarity classify_stationarity(double gradnorm, double lambda_min,
                                   double epsilon, double rho_hat);

}  // namespace rpgd
