#include <chrono>
#include <cmath>
#include <sstream>

#include "rpgd/optimizer.h"

namespace rpgd {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kSecondOrderPoint: return "second-order-point";
    case RunStatus::kIterationCap: return "iteration-cap";
    case RunStatus::kStepFailure: return "step-failure";
    case RunStatus::kGradientTolerance: return "gradient-tolerance";
  }
  return "unknown";
}

std::string to_string(Stationarity s) {
  switch (s) {
    case Stationarity::kSaddle: return "saddle";
    case Stationarity::kSecondOrder: return "second-order";
    case Stationarity::kNonStationary: return "non-stationary";
  }
  return "unknown";
}

Stationarity classify_stationarity(double gradnorm, double lambda_min,
                                   double epsilon, double rho_hat) {
  if (!(epsilon > 0) || !(rho_hat > 0)) {
    throw InvalidArgument("classify_stationarity: epsilon and rho_hat must be positive");
  }
  if (gradnorm > epsilon) return Stationarity::kNonStationary;
  if (lambda_min <= -std::sqrt(rho_hat * epsilon)) return Stationarity::kSaddle;
  return Stationarity::kSecondOrder;
}

OptState OptState::initial(const Point& x0, const ThresholdSet& thr) {
  return OptState{0, x0, x0, -thr.t_thres - 1, std::nullopt, 0.0, {}};
}

namespace {

std::optional<double> safe_dist(const Manifold& m, const Point& a,
                                const Point& b) {
  if (!m.has_log()) return std::nullopt;
  try {
    return m.dist(a, b);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

RunResult finish(OptState&& s, RunStatus status, const Point& out, double f,
                 double gradnorm, std::string message) {
  s.trace.end = TraceEnd{status, s.t, 0.0};
  return RunResult{status, out,       f,         gradnorm, std::nullopt,
                   s.t,    std::move(message), std::move(s.trace)};
}

bool finite(double v) { return std::isfinite(v); }

// Exp_x(-min{eta, I/|g|} g). Returns the new point and the step length.
std::pair<Point, double> clamped_step(const Manifold& m, const Point& x,
                                      const Tangent& g, double gn, double eta,
                                      double injectivity) {
  double scale = eta;
  if (std::isfinite(injectivity) && gn > 0) {
    scale = std::min(eta, injectivity / gn);
  }
  if (gn == 0) return {x, 0.0};
  return {m.exp(x, -scale * g), scale * gn};
}

}  // namespace

std::variant<OptState, RunResult> prgd_step(OptState s, const ThresholdSet& thr,
                                            const Objective& obj, Rng& rng) {
  const Manifold& m = obj.manifold();
  Tangent g = obj.rgrad(s.x);
  double gn = g.norm();
  bool perturbed = false;

  if (gn <= thr.g_thres && s.t - s.t_noise > thr.t_thres) {
    s.t_noise = s.t;
    s.x_tilde = s.x;
    s.f_tilde = obj.value(s.x);
    s.x = m.exp(s.x, m.sample_tangent_ball(s.x, thr.r, rng));
    g = obj.rgrad(s.x);
    gn = g.norm();
    perturbed = true;
  }

  const double f = obj.value(s.x);
  if (!finite(f) || !finite(gn)) {
    std::ostringstream os;
    os << "non-finite value at t = " << s.t << ": f = " << f
       << ", |grad| = " << gn;
    const Point x = s.x;
    return finish(std::move(s), RunStatus::kStepFailure, x, f, gn, os.str());
  }

  if (s.t - s.t_noise == thr.t_thres && s.x_tilde &&
      f - s.f_tilde > -thr.f_thres) {
    const Point out = *s.x_tilde;
    const double f_out = s.f_tilde;
    const double g_out = obj.rgrad(out).norm();
    return finish(std::move(s), RunStatus::kSecondOrderPoint, out, f_out,
                  g_out, "");
  }

  auto [next, step_norm] =
      clamped_step(m, s.x, g, gn, thr.eta, thr.injectivity);

  TraceRow row;
  row.t = s.t;
  row.f = f;
  row.gradnorm = gn;
  row.step_norm = step_norm;
  row.perturbed = perturbed;
  if (s.x_tilde) row.dist_to_tilde = safe_dist(m, s.x, *s.x_tilde);
  row.dist_to_start = safe_dist(m, s.x, s.x0);
  s.trace.rows.push_back(row);

  s.x = std::move(next);
  ++s.t;
  return s;
}

RunResult run(const Objective& obj, const Point& x0, const ThresholdSet& thr,
              std::int64_t max_iters, Rng& rng) {
  if (max_iters < 0) throw InvalidArgument("run: max_iters must be >= 0");
  const auto start = std::chrono::steady_clock::now();
  OptState state = OptState::initial(x0, thr);
  RunResult result = [&]() -> RunResult {
    while (state.t < max_iters) {
      auto next = prgd_step(std::move(state), thr, obj, rng);
      if (auto* done = std::get_if<RunResult>(&next)) return std::move(*done);
      state = std::get<OptState>(std::move(next));
    }
    const Point x = state.x;
    const double f = obj.value(x);
    const double gn = obj.rgrad(x).norm();
    std::ostringstream os;
    os << "iteration cap of " << max_iters << " reached";
    return finish(std::move(state), RunStatus::kIterationCap, x, f, gn,
                  os.str());
  }();
  result.trace.end->wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

RunResult rgd_baseline(const Objective& obj, const Point& x0, double eta,
                       double g_tol, std::int64_t max_iters,
                       double injectivity) {
  if (!(eta > 0)) throw InvalidArgument("rgd_baseline: eta must be positive");
  if (!(g_tol >= 0)) throw InvalidArgument("rgd_baseline: g_tol must be >= 0");
  const auto start = std::chrono::steady_clock::now();
  const Manifold& m = obj.manifold();
  OptState s{0, x0, x0, 0, std::nullopt, 0.0, {}};
  RunResult result = [&]() -> RunResult {
    for (;;) {
      const Tangent g = obj.rgrad(s.x);
      const double gn = g.norm();
      const double f = obj.value(s.x);
      const Point x = s.x;
      if (!finite(f) || !finite(gn)) {
        return finish(std::move(s), RunStatus::kStepFailure, x, f, gn,
                      "non-finite value or gradient");
      }
      if (gn <= g_tol) {
        return finish(std::move(s), RunStatus::kGradientTolerance, x, f, gn,
                      "");
      }
      if (s.t >= max_iters) {
        return finish(std::move(s), RunStatus::kIterationCap, x, f, gn,
                      "iteration cap reached");
      }
      auto [next, step_norm] = clamped_step(m, s.x, g, gn, eta, injectivity);
      TraceRow row;
      row.t = s.t;
      row.f = f;
      row.gradnorm = gn;
      row.step_norm = step_norm;
      row.dist_to_start = safe_dist(m, s.x, s.x0);
      s.trace.rows.push_back(row);
      s.x = std::move(next);
      ++s.t;
    }
  }();
  result.trace.end->wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace rpgd
