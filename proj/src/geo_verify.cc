#include "rpgd/geo_verify.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rpgd {

namespace {

constexpr double kExactTol = 1e-10;
// Absolute slack in the per-sample audit, for residuals at round-off level.
constexpr double kAuditFloor = 1e-13;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream per (scale, sample) so a sample never depends on how
// many draws the previous one consumed.
Rng substream(std::uint64_t base, std::size_t scale_idx, int sample) {
  return Rng(splitmix64(base ^ splitmix64((scale_idx << 32) ^
                                          static_cast<std::uint64_t>(sample))));
}

Tangent random_direction(const Manifold& m, const Point& x, double len,
                         Rng& rng) {
  for (;;) {
    const Tangent t = m.sample_tangent_ball(x, 1.0, rng);
    const double n = t.norm();
    if (n > 0) return (len / n) * t;
  }
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Point gradient_step(const Objective& obj, const Point& p, double eta) {
  const Manifold& m = obj.manifold();
  const Tangent g = obj.rgrad(p);
  const double gn = g.norm();
  if (gn == 0) return p;
  const double inj = m.geometry().injectivity_radius;
  const double scale = std::isfinite(inj) ? std::min(eta, inj / gn) : eta;
  return m.exp(p, -scale * g);
}

void validate_scales(const std::vector<double>& scales, int n,
                     const char* what) {
  if (n < 1) throw InvalidArgument(std::string(what) + ": n must be >= 1");
  if (scales.size() < 2) {
    throw InvalidArgument(std::string(what) + ": need at least two scales");
  }
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0)) {
      throw InvalidArgument(std::string(what) + ": scales must be positive");
    }
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      throw InvalidArgument(std::string(what) +
                            ": scales must be strictly decreasing");
    }
  }
}

using Sampler = std::function<Residual(double scale, Rng& rng)>;

// Shared driver: collect per-sample residuals over all scales, fit the slope
// of per-scale maxima, fit the constant at the coarsest scale and audit
// every sample against it.
VerificationReport scaled_check(const std::string& id, int n,
                                const std::vector<double>& scales,
                                double exponent, Rng& rng,
                                const CheckOptions& opts,
                                const Sampler& sample) {
  validate_scales(scales, n, id.c_str());
  VerificationReport rep;
  rep.lemma_id = id;
  rep.n_samples = n;
  rep.scales = scales;
  rep.falsified = opts.falsify;
  rep.expected_exponent = opts.falsify ? exponent - 1 : exponent;
  rep.slope_window = {rep.expected_exponent - opts.slope_halfwidth,
                      rep.expected_exponent + opts.slope_halfwidth};

  const std::uint64_t base = rng();
  std::vector<std::vector<Residual>> all(scales.size());
  bool exact = true;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    double mx = 0.0;
    all[k].reserve(n);
    for (int i = 0; i < n; ++i) {
      Rng sub = substream(base, k, i);
      Residual r = sample(scales[k], sub);
      if (opts.falsify) r.bound /= scales[k];
      mx = std::max(mx, r.residual);
      exact = exact && r.residual <= kExactTol;
      all[k].push_back(r);
    }
    rep.max_residual_per_scale.push_back(mx);
  }

  if (exact) {
    rep.exact = true;
    rep.fitted_slope = 0.0;
    rep.fitted_constant = 0.0;
    rep.pass = true;
    return rep;
  }

  double c = 0.0;
  for (const Residual& r : all.front()) {
    if (r.bound > 0) c = std::max(c, r.residual / r.bound);
  }
  rep.fitted_constant = c;
  for (const auto& per_scale : all) {
    for (const Residual& r : per_scale) {
      if (r.residual > opts.audit_factor * c * r.bound + kAuditFloor) {
        ++rep.violations;
      }
    }
  }
  rep.fitted_slope = loglog_slope(scales, rep.max_residual_per_scale);
  const bool slope_ok = std::isfinite(rep.fitted_slope) &&
                        rep.fitted_slope >= rep.slope_window.first &&
                        rep.fitted_slope <= rep.slope_window.second;
  rep.pass = slope_ok && rep.violations == 0;
  return rep;
}

void write_double(std::ostream& os, double v) {
  os << std::setprecision(17) << v;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const std::size_t n = lx.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

std::optional<double> VerificationReport::extra(const std::string& key) const {
  for (const auto& [k, v] : extras) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << "lemma_id = " << lemma_id << "\n";
  os << "n_samples = " << n_samples << "\n";
  os << "expected_exponent = ";
  write_double(os, expected_exponent);
  os << "\n";
  if (slope_checked) {
    os << "slope_window = ";
    write_double(os, slope_window.first);
    os << " ";
    write_double(os, slope_window.second);
    os << "\n";
  }
  os << "fitted_slope = ";
  write_double(os, fitted_slope);
  os << "\nfitted_constant = ";
  write_double(os, fitted_constant);
  os << "\n";
  for (const auto& [k, v] : extras) {
    os << k << " = ";
    write_double(os, v);
    os << "\n";
  }
  os << "violations = " << violations << "\n";
  os << "exact = " << (exact ? "true" : "false") << "\n";
  os << "falsified = " << (falsified ? "true" : "false") << "\n";
  os << "pass = " << (pass ? "true" : "false") << "\n";
  os << "[scales]\nscale max_residual\n";
  for (std::size_t i = 0; i < scales.size(); ++i) {
    write_double(os, scales[i]);
    os << " ";
    write_double(os, max_residual_per_scale[i]);
    os << "\n";
  }
  return os.str();
}

// ---- per-sample oracles ------------------------------------------------------

Residual two_step_residual(const Manifold& m, const Tangent& a,
                           const Tangent& y) {
  const Point& x = a.base();
  const Point z = m.exp(x, a);
  const Point lhs = m.exp(x, y + a);
  const Point rhs = m.exp(z, m.transport(x, z, y));
  const double na = a.norm(), ny = y.norm();
  return {m.dist(lhs, rhs), std::min(na, ny) * (na + ny) * (na + ny)};
}

double log_distortion(const Manifold& m, const Point& x, const Point& y,
                      const Point& z) {
  const double d = m.dist(y, z);
  if (!(d > 0)) throw InvalidArgument("log_distortion: y and z coincide");
  return (m.log(x, y).coords() - m.log(x, z).coords()).norm() / d;
}

Residual transport_contraction_residual(const Manifold& m, const Point& y,
                                        const Tangent& w) {
  const Point& x = w.base();
  const Point a = m.exp(x, w);
  const Point b = m.exp(y, m.transport(x, y, w));
  return {m.dist(a, b), m.dist(x, y)};
}

Residual holonomy_residual(const Manifold& m, const Point& y, const Point& z,
                           const Tangent& w) {
  const Point& x = w.base();
  const Tangent two_legs = m.transport(y, z, m.transport(x, y, w));
  const Tangent direct = m.transport(x, z, w);
  return {(two_legs.coords() - direct.coords()).norm(),
          m.dist(x, y) * m.dist(y, z) * w.norm()};
}

Residual linearization_residual(const Objective& obj, const Point& x,
                                const Point& u, const Point& w, double eta) {
  if (!obj.has_exact_hessian()) {
    throw CapabilityError("linearization check needs an exact Hessian; " +
                          obj.kind() + " on " + obj.manifold().name() +
                          " has none");
  }
  const Manifold& m = obj.manifold();
  const Point up = gradient_step(obj, u, eta);
  const Point wp = gradient_step(obj, w, eta);
  const Tangent d0 = m.log(x, w) - m.log(x, u);
  const Tangent d1 = m.log(x, wp) - m.log(x, up);
  const Tangent lin = d0 - eta * obj.exact_hessian(x, d0);
  const double duw = m.dist(u, w);
  return {(d1.coords() - lin.coords()).norm(),
          duw * (duw + m.dist(u, x) + m.dist(w, x))};
}

Residual gradient_taylor_residual(const Objective& obj, const Point& x,
                                  const Point& z) {
  const Manifold& m = obj.manifold();
  const Tangent v = m.log(x, z);
  const Tangent back = m.transport(z, x, obj.rgrad(z));
  const Tangent hv = obj.has_exact_hessian() ? obj.exact_hessian(x, v)
                                             : hess_vec(obj, x, v);
  const Matrix r = back.coords() - obj.rgrad(x).coords() - hv.coords();
  const double d = v.norm();
  return {r.norm(), 0.5 * d * d};
}

// ---- drivers -----------------------------------------------------------------

VerificationReport check_descent(const Objective& obj, const Point& center,
                                 double radius, int n, double eta, Rng& rng,
                                 const CheckOptions& opts) {
  if (n < 1) throw InvalidArgument("check_descent: n must be >= 1");
  if (!(eta > 0)) throw InvalidArgument("check_descent: eta must be positive");
  const Manifold& m = obj.manifold();
  if (!(radius > 0) || !(radius < m.geometry().injectivity_radius)) {
    throw InvalidArgument(
        "check_descent: radius must lie in (0, injectivity radius)");
  }
  const double inj = m.geometry().injectivity_radius;
  VerificationReport rep;
  rep.lemma_id = "descent";
  rep.n_samples = n;
  rep.scales = {radius};
  rep.slope_checked = false;
  rep.falsified = opts.falsify;
  rep.expected_exponent = opts.falsify ? 0.0 : 1.0;  // power of eta_bar

  const std::uint64_t base = rng();
  double worst = 0.0;
  double worst_rel = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng sub = substream(base, 0, i);
    const Point u = m.exp(center, m.sample_tangent_ball(center, radius, sub));
    const Tangent g = obj.rgrad(u);
    const double gn = g.norm();
    const double eta_bar =
        (std::isfinite(inj) && gn > 0) ? std::min(eta, inj / gn) : eta;
    const double bound =
        0.5 * std::pow(eta_bar, rep.expected_exponent) * gn * gn;
    const double excess =
        obj.value(gradient_step(obj, u, eta)) - (obj.value(u) - bound);
    if (excess > 1e-12) ++rep.violations;
    worst = std::max(worst, excess);
    if (bound > 0) worst_rel = std::max(worst_rel, excess / bound);
  }
  rep.max_residual_per_scale = {std::max(worst, 0.0)};
  rep.fitted_constant = worst_rel;
  rep.exact = worst <= 0.0;
  rep.pass = rep.violations == 0;
  return rep;
}

VerificationReport check_two_step(const Manifold& m, int n,
                                  const std::vector<double>& scales, Rng& rng,
                                  const CheckOptions& opts) {
  return scaled_check("two_step", n, scales, 3.0, rng, opts,
                      [&](double s, Rng& r) {
                        const Point x = m.random_point(r);
                        const Tangent a =
                            random_direction(m, x, s * uniform(r, 0.5, 1), r);
                        const Tangent y =
                            random_direction(m, x, s * uniform(r, 0.5, 1), r);
                        return two_step_residual(m, a, y);
                      });
}

VerificationReport check_log_bilipschitz(const Manifold& m, int n,
                                         const std::vector<double>& R_values,
                                         Rng& rng, const CheckOptions& opts) {
  double c2 = 0.0, c3 = 0.0;
  VerificationReport rep = scaled_check(
      "log_bilipschitz", n, R_values, 2.0, rng, opts, [&](double R, Rng& r) {
        const Point x = m.random_point(r);
        const Point y = m.exp(x, m.sample_tangent_ball(x, R / 2, r));
        const Point z = m.exp(x, m.sample_tangent_ball(x, R / 2, r));
        if (m.dist(y, z) < 1e-9) return Residual{0.0, R * R};
        const double ratio = log_distortion(m, x, y, z);
        c3 = std::max(c3, (ratio - 1) / (R * R));
        c2 = std::max(c2, (1 / ratio - 1) / (R * R));
        return Residual{std::abs(ratio - 1), R * R};
      });
  rep.extras = {{"c2", c2}, {"c3", c3}};
  return rep;
}

VerificationReport check_transport_contraction(
    const Manifold& m, int n, Rng& rng, const std::vector<double>& scales,
    const CheckOptions& opts) {
  double c4 = 0.0;
  VerificationReport rep = scaled_check(
      "transport_contraction", n, scales, 1.0, rng, opts,
      [&](double s, Rng& r) {
        const Point x = m.random_point(r);
        const Point y =
            m.exp(x, random_direction(m, x, s * uniform(r, 0.5, 1), r));
        const Tangent w = m.sample_tangent_ball(x, 1.0, r);
        const Residual res = transport_contraction_residual(m, y, w);
        if (res.bound > 0) c4 = std::max(c4, res.residual / res.bound);
        return res;
      });
  rep.extras = {{"c4", c4}};
  return rep;
}

VerificationReport check_holonomy(const Manifold& m, int n,
                                  const std::vector<double>& scales, Rng& rng,
                                  const CheckOptions& opts) {
  return scaled_check(
      "holonomy", n, scales, 2.0, rng, opts, [&](double s, Rng& r) {
        const Point x = m.random_point(r);
        const Point y =
            m.exp(x, random_direction(m, x, s * uniform(r, 0.5, 1), r));
        const Point z =
            m.exp(x, random_direction(m, x, s * uniform(r, 0.5, 1), r));
        return holonomy_residual(m, y, z, random_direction(m, x, 1.0, r));
      });
}

VerificationReport check_linearization(const Objective& obj,
                                       const Point& saddle_x, int n,
                                       const std::vector<double>& scales,
                                       double eta, Rng& rng,
                                       const CheckOptions& opts) {
  if (!obj.has_exact_hessian()) {
    throw CapabilityError("check_linearization: " + obj.kind() + " on " +
                          obj.manifold().name() + " has no exact Hessian");
  }
  const Manifold& m = obj.manifold();
  return scaled_check(
      "linearization", n, scales, 1.0, rng, opts, [&](double s, Rng& r) {
        const Point u = m.exp(saddle_x, m.sample_tangent_ball(saddle_x, s, r));
        const Point w = m.exp(saddle_x, m.sample_tangent_ball(saddle_x, s, r));
        const double duw = m.dist(u, w);
        if (duw < 1e-14) return Residual{0.0, 0.0};
        Residual res = linearization_residual(obj, saddle_x, u, w, eta);
        return Residual{res.residual / duw, res.bound / duw};
      });
}

VerificationReport check_gradient_taylor(const Objective& obj, int n,
                                         const std::vector<double>& scales,
                                         Rng& rng, const CheckOptions& opts) {
  const Manifold& m = obj.manifold();
  VerificationReport rep = scaled_check(
      "gradient_taylor", n, scales, 2.0, rng, opts, [&](double s, Rng& r) {
        const Point x = m.random_point(r);
        const Point z =
            m.exp(x, random_direction(m, x, s * uniform(r, 0.5, 1), r));
        return gradient_taylor_residual(obj, x, z);
      });
  rep.extras = {{"rho_fit", 2 * rep.fitted_constant}};
  return rep;
}

// ---- coupling probe ----------------------------------------------------------

CouplingReport coupling_probe(const Objective& obj, const Point& saddle_x,
                              const ThresholdSet& thr, double mu, int t_max,
                              Rng& rng, const CouplingOptions& opts) {
  const Manifold& m = obj.manifold();
  if (!m.has_log()) {
    throw CapabilityError("coupling_probe: " + m.name() + " has no log map");
  }
  if (t_max < 1) throw InvalidArgument("coupling_probe: t_max must be >= 1");
  if (!(mu >= 0)) throw InvalidArgument("coupling_probe: mu must be >= 0");

  MinEigOptions eo;
  eo.use_exact_hessian = obj.has_exact_hessian();
  const EigenEstimate eig = min_hess_eig(obj, saddle_x, opts.eig_tol, rng, eo);
  const Tangent e1 = eig.direction;

  CouplingReport rep;
  rep.mu = mu;
  rep.lambda_min = eig.lambda_min;
  rep.e1 = e1.coords();
  rep.escape_radius = opts.escape_radius.value_or(3 * thr.c_hat * thr.script_S);
  rep.predicted_ratio = 1 - thr.eta * eig.lambda_min;
  rep.threshold_ratio = 1 + thr.eta * thr.gamma / 2;

  Point u = m.exp(saddle_x, m.sample_tangent_ball(saddle_x, thr.r, rng));
  Point w = mu == 0 ? u
                    : m.exp(saddle_x, m.log(saddle_x, u) + (mu * thr.r) * e1);

  rep.stop_reason = "t_max";
  for (int t = 0;; ++t) {
    double lu_norm, lw_norm;
    try {
      const Tangent lu = m.log(saddle_x, u);
      const Tangent lw = m.log(saddle_x, w);
      const Tangent diff = lw - lu;
      const double psi = m.inner(saddle_x, diff, e1);
      rep.psi.push_back(psi);
      rep.phi.push_back((diff - psi * e1).norm());
      lu_norm = lu.norm();
      lw_norm = lw.norm();
    } catch (const DomainError&) {
      rep.stop_reason = "left injectivity ball";
      break;
    }
    const bool out_u = lu_norm > rep.escape_radius;
    const bool out_w = lw_norm > rep.escape_radius;
    if ((out_u || out_w) && !rep.first_exit_t) rep.first_exit_t = t;
    if (out_u && out_w) {
      rep.both_exit_t = t;
      rep.stop_reason = "escaped";
      break;
    }
    if (t == t_max) break;
    u = gradient_step(obj, u, thr.eta);
    w = gradient_step(obj, w, thr.eta);
  }

  const double psi0 = rep.psi.empty() ? 0.0 : rep.psi.front();
  for (std::size_t t = 0; t < rep.psi.size(); ++t) {
    if (psi0 > 0 && rep.psi[t] >= 10 * psi0) {
      rep.first_tenfold_t = static_cast<int>(t);
      break;
    }
  }
  // Ratios psi_{t+1}/psi_t for steps that end no later than the first exit.
  std::size_t steps = rep.psi.empty() ? 0 : rep.psi.size() - 1;
  if (rep.first_exit_t) {
    steps = std::min(steps, static_cast<std::size_t>(*rep.first_exit_t));
  }
  int above = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    if (rep.psi[t] == 0) continue;
    const double ratio = rep.psi[t + 1] / rep.psi[t];
    rep.growth_ratios.push_back(ratio);
    if (ratio >= rep.threshold_ratio) ++above;
  }
  if (!rep.growth_ratios.empty()) {
    rep.fraction_above_threshold =
        static_cast<double>(above) / rep.growth_ratios.size();
  }
  return rep;
}

std::string CouplingReport::to_text() const {
  std::ostringstream os;
  auto kv = [&](const char* k, double v) {
    os << k << " = ";
    write_double(os, v);
    os << "\n";
  };
  os << "lemma_id = coupling\n";
  kv("mu", mu);
  kv("lambda_min", lambda_min);
  kv("escape_radius", escape_radius);
  kv("predicted_ratio", predicted_ratio);
  kv("threshold_ratio", threshold_ratio);
  kv("fraction_above_threshold", fraction_above_threshold);
  auto opt = [&](const char* k, const std::optional<int>& v) {
    os << k << " = ";
    if (v) {
      os << *v;
    } else {
      os << "none";
    }
    os << "\n";
  };
  opt("first_tenfold_t", first_tenfold_t);
  opt("first_exit_t", first_exit_t);
  opt("both_exit_t", both_exit_t);
  os << "stop_reason = " << stop_reason << "\n";
  os << "[trace]\nt psi phi growth_ratio\n";
  for (std::size_t t = 0; t < psi.size(); ++t) {
    os << t << " ";
    write_double(os, psi[t]);
    os << " ";
    write_double(os, phi[t]);
    os << " ";
    if (t < growth_ratios.size()) {
      write_double(os, growth_ratios[t]);
    } else {
      os << "-";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace rpgd
