#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpgd/optimizer.h"

namespace rpgd {

void AssumptionParams::validate() const {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const char* msg) {
    if (!ok) bad.emplace_back(msg);
  };
  need(beta > 0, "beta must be positive");
  need(rho > 0, "rho must be positive");
  need(curvature_K >= 0, "curvature_K must be nonnegative");
  need(injectivity > 0, "injectivity must be positive");
  need(epsilon > 0, "epsilon must be positive");
  need(delta > 0 && delta < 1, "delta must lie in (0, 1)");
  need(f_gap > 0, "f_gap must be positive");
  need(dim_d > 0, "dim_d must be a positive integer");
  if (rho_hat) need(*rho_hat >= rho, "rho_hat must be at least rho");
  if (c2) need(*c2 >= 0, "c2 must be nonnegative");
  if (c3) need(*c3 >= 0, "c3 must be nonnegative");
  if (bad.empty()) return;
  std::string msg = "invalid assumption parameters:";
  for (const auto& b : bad) msg += "\n  " + b;
  throw InvalidArgument(msg);
}

namespace {

// Fills gamma, kappa and the script constants from eta and the assumptions.
void fill_derived(const AssumptionParams& p, ThresholdSet& t) {
  const double rho_hat = p.effective_rho_hat();
  t.gamma = std::sqrt(rho_hat * p.epsilon);
  t.kappa = p.beta / t.gamma;
  const double L = std::log(p.dim_d * t.kappa / p.delta);
  const double eb = t.eta * p.beta;
  t.script_F = eb * std::pow(t.gamma, 3) / (rho_hat * rho_hat) / std::pow(L, 3);
  t.script_G = std::sqrt(eb) * t.gamma * t.gamma / rho_hat / (L * L);
  t.script_S = std::sqrt(eb) * t.gamma / rho_hat / L;
  t.script_T = L / (t.eta * t.gamma);
  t.injectivity = p.injectivity;
  if (!(L > 0)) {
    t.warnings.push_back(
        "log(d*kappa/delta) <= 0: the script constants are not meaningful");
  }
}

double chi_of(const AssumptionParams& p, double c_hat) {
  const double arg =
      p.dim_d * p.beta * p.f_gap / (c_hat * p.epsilon * p.epsilon * p.delta);
  return 3.0 * std::max(std::log(arg), 4.0);
}

}  // namespace

EpsilonBound epsilon_bound(const AssumptionParams& p, const ThresholdSet& thr) {
  const double rho_hat = p.effective_rho_hat();
  const double eb = thr.eta * p.beta;
  const double L =
      std::log(p.dim_d * p.beta / (std::sqrt(rho_hat * p.epsilon) * p.delta));
  EpsilonBound b;
  b.epsilon = p.epsilon;
  if (p.c2 && p.c3) {
    const double c = std::max(*p.c2, *p.c3);
    b.curvature_term = c > 0 ? rho_hat / (56.0 * c * eb) * L : kInf;
  }
  if (std::isfinite(p.injectivity)) {
    const double s =
        p.injectivity * rho_hat / (12.0 * thr.c_hat * std::sqrt(eb)) * L;
    b.injectivity_term = s * s;
  }
  const double rhs = std::min(b.curvature_term.value_or(kInf),
                              b.injectivity_term);
  b.satisfied = p.epsilon <= rhs;
  return b;
}

ThresholdSet derive_thresholds(const AssumptionParams& p, double c_hat) {
  p.validate();
  if (!(c_hat >= 4.0)) throw InvalidArgument("c_hat must be at least 4");
  const double rho_hat = p.effective_rho_hat();
  ThresholdSet t;
  t.mode = "theory";
  t.c_hat = c_hat;
  const double sqrt_cmax = 1.0 / (56.0 * c_hat * c_hat);
  t.c_max = sqrt_cmax * sqrt_cmax;
  t.chi = chi_of(p, c_hat);
  const double chi2 = t.chi * t.chi;
  t.r = sqrt_cmax * p.epsilon / chi2;
  t.f_thres = t.c_max / (chi2 * t.chi) *
              std::sqrt(std::pow(p.epsilon, 3) / rho_hat);
  t.g_thres = sqrt_cmax * p.epsilon / chi2;
  t.t_thres = static_cast<std::int64_t>(std::ceil(
      t.chi / t.c_max * p.beta / std::sqrt(rho_hat * p.epsilon)));
  t.eta = t.c_max / p.beta;
  fill_derived(p, t);

  const EpsilonBound b = epsilon_bound(p, t);
  if (!b.satisfied) {
    std::ostringstream os;
    os.precision(6);
    os << "epsilon = " << b.epsilon << " exceeds the admissible bound: min{";
    if (b.curvature_term) {
      os << *b.curvature_term;
    } else {
      os << "n/a";
    }
    os << ", " << b.injectivity_term << "}";
    t.warnings.push_back(os.str());
  }
  return t;
}

ThresholdSet practical_thresholds(const AssumptionParams& p,
                                  const PracticalOverrides& o, double c_hat) {
  p.validate();
  const double rho_hat = p.effective_rho_hat();
  const double eps = p.epsilon;
  ThresholdSet t;
  t.mode = "practical";
  t.c_hat = c_hat;
  t.eta = o.eta.value_or(0.1 / p.beta);
  t.r = o.r.value_or(std::sqrt(eps));
  t.g_thres = o.g_thres.value_or(eps);
  t.f_thres = o.f_thres.value_or(0.1 * std::sqrt(std::pow(eps, 3) / rho_hat));
  t.t_thres = o.t_thres.value_or(static_cast<std::int64_t>(
      std::ceil(4.0 / (t.eta * std::sqrt(rho_hat * eps)))));
  t.c_max = t.eta * p.beta;
  t.chi = chi_of(p, c_hat);

  std::vector<std::string> bad;
  if (!(t.eta > 0)) bad.emplace_back("eta must be positive");
  if (!(t.r > 0)) bad.emplace_back("r must be positive");
  if (!(t.g_thres > 0)) bad.emplace_back("g_thres must be positive");
  if (!(t.f_thres > 0)) bad.emplace_back("f_thres must be positive");
  if (t.t_thres < 1) bad.emplace_back("t_thres must be a positive integer");
  if (!bad.empty()) {
    std::string msg = "invalid practical thresholds:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw InvalidArgument(msg);
  }
  fill_derived(p, t);
  return t;
}

}  // namespace rpgd
