// Finite-difference Hessian operator, smallest-eigenvalue estimation and
// empirical smoothness constants.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "rpgd/objective.h"

namespace rpgd {

double default_fd_step(const Point& x, const Tangent& v) {
  static const double kCbrtEps =
      std::cbrt(std::numeric_limits<double>::epsilon());
  return kCbrtEps * (1.0 + x.coords().norm()) / (1.0 + v.norm());
}

Tangent hess_vec(const Objective& obj, const Point& x, const Tangent& v,
                 std::optional<double> step) {
  const Manifold& m = obj.manifold();
  if (!v.base().same_as(x)) {
    throw InvalidArgument("hess_vec: tangent not anchored at the point");
  }
  const double vn = v.norm();
  if (vn == 0.0) return m.zero(x);
  const double s = step.value_or(default_fd_step(x, v));
  if (!(s > 0.0)) throw InvalidArgument("hess_vec: step must be positive");
  const double inj = m.geometry().injectivity_radius;
  if (!(s * vn < inj)) {
    std::ostringstream os;
    os << "hess_vec: step length " << s * vn
       << " leaves the injectivity ball of radius " << inj;
    throw DomainError(os.str());
  }

  // rgrad at exp(x, dir), carried back to T_xM.
  auto pulled_back = [&](const Tangent& dir) -> Matrix {
    const Point y = m.exp(x, dir);
    const Tangent g = obj.rgrad(y);
    if (m.has_log()) return m.transport(y, x, g).coords();
    const Tangent reverse = -m.transport_along(dir, dir);
    return m.transport_along(reverse, g).coords();
  };
  const Tangent sv = s * v;
  const Matrix diff = pulled_back(sv) - pulled_back(-sv);
  return m.project_tangent(x, diff / (2.0 * s));
}

namespace {

Tangent random_unit_tangent(const Manifold& m, const Point& x, Rng& rng) {
  for (;;) {
    const Tangent t = m.sample_tangent_ball(x, 1.0, rng);
    const double n = t.norm();
    if (n > 0.0) return (1.0 / n) * t;
  }
}

}  // namespace

EigenEstimate min_hess_eig(const Objective& obj, const Point& x, double tol,
                           Rng& rng, const MinEigOptions& opts) {
  if (!(tol > 0.0)) throw InvalidArgument("min_hess_eig: tol must be positive");
  const Manifold& m = obj.manifold();
  auto apply = [&](const Tangent& v) {
    return opts.use_exact_hessian ? obj.exact_hessian(x, v)
                                  : hess_vec(obj, x, v, opts.fd_step);
  };

  // Spectral radius probe: plain power iteration on H.
  double radius = 0.0;
  int evals = 0;
  {
    Tangent v = random_unit_tangent(m, x, rng);
    for (int i = 0; i < opts.radius_probe_iters; ++i) {
      const Tangent hv = apply(v);
      ++evals;
      const double n = hv.norm();
      radius = std::max({radius, n, std::abs(m.inner(x, v, hv))});
      if (n == 0.0) break;
      v = (1.0 / n) * hv;
    }
  }
  if (radius == 0.0) {
    return {0.0, random_unit_tangent(m, x, rng), true, evals, "converged"};
  }

  // Top of the spectrum: power iteration on H + 2R I, whose spectrum is
  // nonnegative, keeping the largest Rayleigh quotient of H.
  double top = -radius;
  double top_res = 0.0;  // residual of the last probe iterate
  {
    Tangent v = random_unit_tangent(m, x, rng);
    for (int i = 0; i < opts.radius_probe_iters; ++i) {
      const Tangent hv = apply(v);
      ++evals;
      const double q = m.inner(x, v, hv);
      top = std::max(top, q);
      top_res = (hv - q * v).norm();
      Tangent w = hv + (2.0 * radius) * v;
      const double n = w.norm();
      if (n == 0.0) break;
      v = (1.0 / n) * w;
    }
  }
  // sigma sits just above the largest eigenvalue; the closer, the faster
  // (sigma I - H) separates lambda_min from the rest. An unconverged probe
  // can sit up to about its residual below lambda_max.
  const double margin = std::max(1e-3 * radius, top_res);
  double sigma = top + margin;
  Tangent u = random_unit_tangent(m, x, rng);
  double rq = 0.0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= opts.max_iters; ++it) {
    const Tangent hu = apply(u);
    rq = m.inner(x, u, hu);
    if (rq > sigma) {
      // The probe underestimated the top of the spectrum.
      sigma = rq + margin;
      prev = std::numeric_limits<double>::quiet_NaN();
    }
    const double res = (hu - rq * u).norm();
    const bool settled = std::abs(rq - prev) <= 1e-3 * tol;
    if (res <= tol || (settled && res <= std::sqrt(tol))) {
      return {rq, u, true, evals + it, "converged"};
    }
    prev = rq;
    Tangent w = sigma * u - hu;
    const double n = w.norm();
    if (n == 0.0) {
      u = random_unit_tangent(m, x, rng);
      continue;
    }
    u = (1.0 / n) * w;
  }
  std::ostringstream os;
  os << "warning: shifted power iteration hit the cap of " << opts.max_iters
     << " iterations; returning the best estimate";
  return {rq, u, false, evals + opts.max_iters, os.str()};
}

SmoothnessEstimate estimate_smoothness(const Objective& obj,
                                       const Point& center, double radius,
                                       int n_samples, Rng& rng) {
  const Manifold& m = obj.manifold();
  const double inj = m.geometry().injectivity_radius;
  if (!(radius > 0.0) || !(radius < inj)) {
    throw InvalidArgument(
        "estimate_smoothness: radius must lie in (0, injectivity radius)");
  }
  if (n_samples < 2) {
    throw InvalidArgument("estimate_smoothness: need at least 2 samples");
  }

  struct Sample {
    Point y;
    Tangent grad;
    Tangent probe;
    Tangent hess_probe;
  };
  std::vector<Sample> samples;
  samples.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const Point y = m.exp(center, m.sample_tangent_ball(center, radius, rng));
    Tangent probe = random_unit_tangent(m, y, rng);
    Tangent hp = hess_vec(obj, y, probe);
    samples.push_back({y, obj.rgrad(y), std::move(probe), std::move(hp)});
  }

  SmoothnessEstimate est;
  est.num_samples = n_samples;
  est.region_radius = radius;
  for (int i = 0; i < n_samples; ++i) {
    for (int j = i + 1; j < n_samples; ++j) {
      const Sample& a = samples[i];
      const Sample& b = samples[j];
      const double d = m.dist(a.y, b.y);
      if (d < 1e-12) continue;
      try {
        const Tangent g = m.transport(a.y, b.y, a.grad);
        est.beta_hat =
            std::max(est.beta_hat, (b.grad.coords() - g.coords()).norm() / d);
        const Tangent pu = m.transport(a.y, b.y, a.probe);
        const Tangent hpu = m.transport(a.y, b.y, a.hess_probe);
        const Tangent hb = hess_vec(obj, b.y, pu);
        est.rho_hat =
            std::max(est.rho_hat, (hb.coords() - hpu.coords()).norm() / d);
        ++est.pairs_used;
      } catch (const DomainError&) {
        // Pair straddles the cut locus; no transport between them.
      }
    }
  }
  if (est.pairs_used == 0) {
    throw InvalidArgument(
        "estimate_smoothness: every sampled pair was degenerate");
  }
  return est;
}

}  // namespace rpgd
