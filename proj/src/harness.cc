#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "rpgd/harness.h"
#include "rpgd/manifolds.h"

namespace rpgd {

namespace {

constexpr double kStartFeasibilityTol = 1e-8;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::filesystem::path resolve(const ExperimentConfig& cfg,
                              const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !cfg.base_dir.empty()) return cfg.base_dir / path;
  return path;
}

void require_symmetric_data(const Matrix& m, const std::string& what) {
  if (m.rows() != m.cols()) {
    throw DataError(what + " must be square, got " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()));
  }
  const double asym = (m - m.transpose()).norm();
  if (!(asym <= 1e-12)) {
    throw DataError(what + " is not symmetric: |M - M^T| = " + fmt(asym));
  }
}

// (G + G^T) / 2 on the upper-left block, G uniform on [0, 1), zero
// elsewhere. Nonnegative entries make the Hessian at the pattern start minus
// a weighted graph Laplacian, so that start is always a strict saddle.
Matrix random_block_matrix(int d, int block, Rng& rng) {
  std::uniform_real_distribution<double> u01;
  Matrix g(block, block);
  for (int j = 0; j < block; ++j) {
    for (int i = 0; i < block; ++i) g(i, j) = u01(rng);
  }
  Matrix a = Matrix::Zero(d, d);
  a.topLeftCorner(block, block) = 0.5 * (g + g.transpose());
  return a;
}

// (Y0)_{ij} = 1 iff row i falls in the j-th group of d/p consecutive rows.
Matrix pattern_start(int d, int p) {
  const int g = d / p;
  Matrix y = Matrix::Zero(d, p);
  for (int i = 0; i < d; ++i) y(i, i / g) = 1.0;
  return y;
}

Matrix unit_columns(int n, const std::vector<int>& one_based) {
  Matrix x = Matrix::Zero(n, static_cast<Eigen::Index>(one_based.size()));
  for (std::size_t j = 0; j < one_based.size(); ++j) {
    x(one_based[j] - 1, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return x;
}

Point admit_start(const Manifold& m, const Matrix& coords) {
  if (coords.rows() != m.rows() || coords.cols() != m.cols()) {
    throw DataError("initial point is " + std::to_string(coords.rows()) + "x" +
                    std::to_string(coords.cols()) + ", expected " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  const double res = m.feasibility_residual(coords);
  if (!(res <= kStartFeasibilityTol)) {
    throw DataError("infeasible initial point on " + m.name() +
                    ": feasibility residual " + fmt(res) + " > 1e-8");
  }
  return res <= kFeasibilityTol ? m.point(coords) : m.project_point(coords);
}

Problem build_problem_unchecked(const ExperimentConfig& cfg) {
  const std::string& exp = cfg.experiment;
  if (exp == "sphere-quadratic" || exp == "verify") {
    const Vector& D = cfg.sphere.D;
    auto m = std::make_shared<Sphere>(D.size());
    auto f = std::make_shared<DiagonalQuadratic>(m, D);
    Matrix x0 = Matrix::Zero(D.size(), 1);
    if (cfg.sphere.x0) {
      x0.col(0) = *cfg.sphere.x0;
    } else {
      x0(0, 0) = 1.0;
    }
    const double res = m->feasibility_residual(x0);
    return {f, admit_start(*m, x0), res};
  }
  if (exp == "kpca") {
    const auto& k = cfg.kpca;
    Matrix h = k.H_diag ? Matrix(k.H_diag->asDiagonal())
                        : load_matrix(resolve(cfg, *k.H_file));
    require_symmetric_data(h, "H");
    const int n = static_cast<int>(h.rows());
    if (k.k > n) throw DataError("k exceeds the dimension of H");
    std::shared_ptr<const Manifold> m;
    if (k.manifold == "stiefel") {
      m = std::make_shared<Stiefel>(n, k.k);
    } else {
      m = std::make_shared<Grassmann>(n, k.k, cfg.assumptions.injectivity);
    }
    auto f = std::make_shared<KPca>(m, h);
    if (k.x0_columns) {
      for (int c : *k.x0_columns) {
        if (c < 1 || c > n) {
          throw DataError("x0_columns entry " + std::to_string(c) +
                          " is out of range for n = " + std::to_string(n));
        }
      }
      Matrix x0 = unit_columns(n, *k.x0_columns);
      return {f, admit_start(*m, x0), m->feasibility_residual(x0)};
    }
    Rng rng = seeded_stream(cfg.seed, kStartStream);
    return {f, m->random_point(rng), 0.0};
  }
  if (exp == "burer-monteiro") {
    const auto& b = cfg.bm;
    Matrix a;
    if (b.A_file) {
      a = load_matrix(resolve(cfg, *b.A_file));
    } else {
      Rng rng = seeded_stream(cfg.seed, kDataStream);
      a = random_block_matrix(b.d, b.block, rng);
    }
    require_symmetric_data(a, "A");
    if (a.rows() != b.d) {
      throw DataError("A is " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " but d = " +
                      std::to_string(b.d));
    }
    auto m = std::make_shared<Oblique>(b.d, b.p);
    auto f = std::make_shared<BurerMonteiro>(m, a);
    if (b.x0 == "pattern") {
      Matrix y0 = pattern_start(b.d, b.p);
      return {f, admit_start(*m, y0), m->feasibility_residual(y0)};
    }
    Rng rng = seeded_stream(cfg.seed, kStartStream);
    return {f, m->random_point(rng), 0.0};
  }
  throw DataError("no problem to build for experiment '" + exp + "'");
}

}  // namespace

Rng seeded_stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

Problem build_problem(const ExperimentConfig& cfg) {
  try {
    return build_problem_unchecked(cfg);
  } catch (const DataError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw DataError(e.what());
  }
}

ResolvedAssumptions resolve_assumptions(const ExperimentConfig& cfg,
                                        const Problem& prob) {
  const auto& a = cfg.assumptions;
  const Objective& f = *prob.objective;
  const GeometryInfo g = f.manifold().geometry();

  ResolvedAssumptions out;
  AssumptionParams& p = out.params;
  p.curvature_K = a.K.value_or(g.curvature_bound);
  p.injectivity = a.injectivity.value_or(g.injectivity_radius);
  p.dim_d = g.dimension;
  p.epsilon = a.epsilon;
  p.delta = a.delta;
  p.f_gap = a.f_gap;
  p.rho_hat = a.rho_hat;
  p.c2 = a.c2;
  p.c3 = a.c3;

  if (a.beta && a.rho) {
    p.beta = *a.beta;
    p.rho = *a.rho;
  } else {
    Rng rng = seeded_stream(cfg.seed, kEstimateStream);
    SmoothnessEstimate est;
    try {
      est = estimate_smoothness(f, prob.x0, a.estimate_radius,
                                a.estimate_samples, rng);
    } catch (const std::logic_error& e) {
      throw DataError(std::string("smoothness estimation failed (") + e.what() +
                      "); set beta and rho in [assumptions]");
    }
    p.beta = a.beta.value_or(est.beta_hat);
    p.rho = a.rho.value_or(est.rho_hat);
    out.beta_estimated = !a.beta;
    out.rho_estimated = !a.rho;
    if (!(p.beta > 0) || !(p.rho > 0)) {
      throw DataError("estimated beta = " + fmt(p.beta) + ", rho = " +
                      fmt(p.rho) + " around the start; set them in [assumptions]");
    }
  }
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(e.what());
  }
  return out;
}

ThresholdSet thresholds_for(const ExperimentConfig& cfg,
                            const AssumptionParams& p) {
  if (cfg.mode == "theory") return derive_thresholds(p, cfg.assumptions.c_hat);
  return practical_thresholds(p, cfg.thresholds, cfg.assumptions.c_hat);
}

std::optional<double> ExperimentOutcome::extra(const std::string& key) const {
  for (const auto& [k, v] : extras) {
    if (k == key) return v;
  }
  return std::nullopt;
}

namespace {

void add_extras(const ExperimentConfig& cfg, const Problem& prob,
                ExperimentOutcome& o) {
  const Objective& f = *prob.objective;
  const Manifold& m = f.manifold();
  const Matrix& x = o.result.final_point.coords();
  if (const auto* q = dynamic_cast<const DiagonalQuadratic*>(&f)) {
    Eigen::Index j;
    const double dmin = q->diag().minCoeff(&j);
    o.extras.emplace_back("f_global_min", dmin);
    const double c = std::clamp(std::abs(x(j, 0)), 0.0, 1.0);
    o.extras.emplace_back("dist_to_global_min", std::acos(c));
  } else if (const auto* k = dynamic_cast<const KPca*>(&f)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(k->h());
    const Eigen::Index n = k->h().rows(), kk = m.cols();
    const Matrix top = es.eigenvectors().rightCols(kk);
    o.extras.emplace_back("f_global_min",
                          -0.5 * es.eigenvalues().tail(kk).sum());
    Eigen::JacobiSVD<Matrix> svd(x.transpose() * top);
    double worst = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      worst = std::max(
          worst, std::acos(std::clamp(svd.singularValues()(i), 0.0, 1.0)));
    }
    o.extras.emplace_back("max_principal_angle", worst);
    (void)n;
  } else if (dynamic_cast<const BurerMonteiro*>(&f)) {
    o.extras.emplace_back("f_decrease", o.initial_f - o.result.final_f);
    o.extras.emplace_back("final_feasibility", m.feasibility_residual(x));
  }
  o.extras.emplace_back("start_feasibility", prob.start_feasibility);
  (void)cfg;
}

}  // namespace

ExperimentOutcome execute(const ExperimentConfig& cfg, const Problem& prob) {
  const Objective& f = *prob.objective;
  ResolvedAssumptions ra = resolve_assumptions(cfg, prob);
  ThresholdSet thr = thresholds_for(cfg, ra.params);

  Rng rng = seeded_stream(cfg.seed, kOptimizerStream);
  RunResult result = run(f, prob.x0, thr, cfg.max_iters, rng);
  ExperimentOutcome o{std::move(ra),
                      std::move(thr),
                      f.value(prob.x0),
                      f.rgrad(prob.x0).norm(),
                      std::move(result),
                      std::nullopt,
                      Stationarity::kNonStationary,
                      {},
                      1};

  MinEigOptions eo;
  eo.use_exact_hessian = f.has_exact_hessian();
  {
    Rng erng = seeded_stream(cfg.seed, kEigenStream + 1);
    o.extras.emplace_back(
        "initial_lambda_min",
        min_hess_eig(f, prob.x0, cfg.eig_tol, erng, eo).lambda_min);
  }
  if (o.result.status != RunStatus::kStepFailure) {
    Rng erng = seeded_stream(cfg.seed, kEigenStream);
    o.final_eig = min_hess_eig(f, o.result.final_point, cfg.eig_tol, erng, eo);
    o.result.final_lambda_min = o.final_eig->lambda_min;
    o.classification = classify_stationarity(
        o.result.final_gradnorm, o.final_eig->lambda_min,
        o.assumptions.params.epsilon, o.assumptions.params.effective_rho_hat());
  }
  o.exit_code = o.result.status == RunStatus::kSecondOrderPoint &&
                        o.classification == Stationarity::kSecondOrder
                    ? 0
                    : 1;
  add_extras(cfg, prob, o);
  return o;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,f,gradnorm,step_norm,perturbed,dist_to_start\n";
  for (const auto& r : trace.rows) {
    os << r.t << "," << r.f << "," << r.gradnorm << "," << r.step_norm << ","
       << (r.perturbed ? 1 : 0) << ",";
    if (r.dist_to_start) os << *r.dist_to_start;
    os << "\n";
  }
  out << os.str();
}

namespace {

void write_thresholds(std::ostream& os, const ThresholdSet& t) {
  os << "mode = " << t.mode << "\n"
     << "eta = " << fmt(t.eta) << "\n"
     << "r = " << fmt(t.r) << "\n"
     << "g_thres = " << fmt(t.g_thres) << "\n"
     << "f_thres = " << fmt(t.f_thres) << "\n"
     << "t_thres = " << t.t_thres << "\n"
     << "c_hat = " << fmt(t.c_hat) << "\n"
     << "c_max = " << fmt(t.c_max) << "\n"
     << "chi = " << fmt(t.chi) << "\n"
     << "gamma = " << fmt(t.gamma) << "\n"
     << "kappa = " << fmt(t.kappa) << "\n"
     << "script_F = " << fmt(t.script_F) << "\n"
     << "script_G = " << fmt(t.script_G) << "\n"
     << "script_S = " << fmt(t.script_S) << "\n"
     << "script_T = " << fmt(t.script_T) << "\n"
     << "injectivity = " << fmt(t.injectivity) << "\n";
  for (const auto& w : t.warnings) os << "warning = " << w << "\n";
}

void write_assumptions(std::ostream& os, const ResolvedAssumptions& ra) {
  const AssumptionParams& p = ra.params;
  os << "beta = " << fmt(p.beta) << (ra.beta_estimated ? "  # estimated" : "")
     << "\n"
     << "rho = " << fmt(p.rho) << (ra.rho_estimated ? "  # estimated" : "")
     << "\n"
     << "rho_hat = " << fmt(p.effective_rho_hat())
     << (p.rho_hat ? "" : "  # = rho") << "\n"
     << "K = " << fmt(p.curvature_K) << "\n"
     << "injectivity = " << fmt(p.injectivity) << "\n"
     << "epsilon = " << fmt(p.epsilon) << "\n"
     << "delta = " << fmt(p.delta) << "\n"
     << "f_gap = " << fmt(p.f_gap) << "\n"
     << "d = " << p.dim_d << "\n";
  if (p.c2) os << "c2 = " << fmt(*p.c2) << "\n";
  if (p.c3) os << "c3 = " << fmt(*p.c3) << "\n";
}

}  // namespace

std::string summary_text(const ExperimentConfig& cfg,
                         const ExperimentOutcome& o) {
  std::ostringstream os;
  const RunResult& r = o.result;
  os << "experiment = " << cfg.experiment << "\n"
     << "seed = " << cfg.seed << "\n"
     << "status = " << to_string(r.status) << "\n"
     << "iterations = " << r.iterations << "\n"
     << "initial_f = " << fmt(o.initial_f) << "\n"
     << "initial_gradnorm = " << fmt(o.initial_gradnorm) << "\n"
     << "final_f = " << fmt(r.final_f) << "\n"
     << "final_gradnorm = " << fmt(r.final_gradnorm) << "\n"
     << "lambda_min = "
     << (r.final_lambda_min ? fmt(*r.final_lambda_min) : std::string("nan"))
     << "\n"
     << "lambda_min_status = "
     << (o.final_eig ? o.final_eig->status : std::string("not computed"))
     << "\n"
     << "classification = " << to_string(o.classification) << "\n";
  if (!r.message.empty()) os << "message = " << r.message << "\n";
  for (const auto& [k, v] : o.extras) os << k << " = " << fmt(v) << "\n";
  const Matrix& x = r.final_point.coords();
  if (x.size() <= 64) {
    os << "final_point =";
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) os << " " << fmt(x(i, j));
    }
    os << "\n";
  }
  os << "\n[assumptions]\n";
  write_assumptions(os, o.assumptions);
  os << "\n[thresholds]\n";
  write_thresholds(os, o.thresholds);
  return os.str();
}

// ---- verify ------------------------------------------------------------------

VerifyOutcome execute_verify(const ExperimentConfig& cfg, const Problem& prob) {
  const VerifyConfig& v = cfg.verify;
  const Objective& f = *prob.objective;
  const Manifold& m = f.manifold();
  const ResolvedAssumptions ra = resolve_assumptions(cfg, prob);
  const ThresholdSet thr = thresholds_for(cfg, ra.params);
  CheckOptions opts;
  opts.falsify = v.falsify;

  const bool stationary = f.rgrad(prob.x0).norm() <= 1e-10;
  VerifyOutcome out;
  auto wanted = [&](const std::string& name) {
    return std::find(v.checks.begin(), v.checks.end(), name) != v.checks.end();
  };
  auto record = [&](VerificationReport rep) {
    out.all_pass = out.all_pass && rep.pass;
    out.reports.push_back(std::move(rep));
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    out.skipped.push_back(name + ": " + why);
  };

  // Each check draws from its own stream, so selecting a subset of checks
  // does not change the others' results.
  std::uint64_t idx = 0;
  auto stream = [&]() { return seeded_stream(cfg.seed, kVerifyStream + 16 * ++idx); };

  const std::string no_log = m.name() + " has no log map";
  {
    Rng rng = stream();
    if (wanted("two_step")) {
      if (m.has_log()) {
        record(check_two_step(m, v.n_samples, v.two_step_scales, rng, opts));
      } else {
        skip("two_step", no_log);
      }
    }
  }
  {
    Rng rng = stream();
    if (wanted("log_bilipschitz")) {
      if (m.has_log()) {
        record(check_log_bilipschitz(m, v.n_samples, v.log_radii, rng, opts));
      } else {
        skip("log_bilipschitz", no_log);
      }
    }
  }
  {
    Rng rng = stream();
    if (wanted("transport_contraction")) {
      if (m.has_log()) {
        record(check_transport_contraction(m, v.n_samples, rng,
                                           v.transport_scales, opts));
      } else {
        skip("transport_contraction", no_log);
      }
    }
  }
  {
    Rng rng = stream();
    if (wanted("holonomy")) {
      if (m.has_log()) {
        record(check_holonomy(m, v.n_samples, v.holonomy_scales, rng, opts));
      } else {
        skip("holonomy", no_log);
      }
    }
  }
  {
    Rng rng = stream();
    if (wanted("linearization")) {
      if (!f.has_exact_hessian()) {
        skip("linearization", f.kind() + " has no exact Hessian");
      } else if (!m.has_log()) {
        skip("linearization", no_log);
      } else if (!stationary) {
        skip("linearization", "the start point is not stationary");
      } else {
        record(check_linearization(f, prob.x0, v.n_samples,
                                   v.linearization_scales, thr.eta, rng, opts));
      }
    }
  }
  {
    Rng rng = stream();
    if (wanted("gradient_taylor")) {
      if (m.has_log()) {
        record(check_gradient_taylor(f, v.n_samples, v.taylor_scales, rng, opts));
      } else {
        skip("gradient_taylor", no_log);
      }
    }
  }
  {
    Rng rng = stream();
    if (wanted("descent")) {
      record(check_descent(f, prob.x0, v.descent_radius, v.n_samples,
                           v.descent_eta.value_or(thr.eta), rng, opts));
    }
  }
  {
    Rng rng = stream();
    if (wanted("coupling")) {
      if (!m.has_log()) {
        skip("coupling", no_log);
      } else if (!stationary) {
        skip("coupling", "the start point is not stationary");
      } else {
        out.coupling = coupling_probe(f, prob.x0, thr, v.coupling_mu,
                                      v.coupling_t_max, rng);
        out.all_pass = out.all_pass && !out.coupling->growth_ratios.empty() &&
                       out.coupling->fraction_above_threshold >= 0.9;
      }
    }
  }
  return out;
}

std::string thresholds_text(const ExperimentConfig& cfg, const Problem& prob) {
  const ResolvedAssumptions ra = resolve_assumptions(cfg, prob);
  const ThresholdSet t = thresholds_for(cfg, ra.params);
  const AssumptionParams& p = ra.params;
  std::ostringstream os;
  os << "experiment = " << cfg.experiment << "\n"
     << "manifold = " << prob.objective->manifold().name() << "\n"
     << "objective = " << prob.objective->kind() << "\n\n[assumptions]\n";
  write_assumptions(os, ra);

  os << "\n[derivation]\n";
  if (t.mode == "theory") {
    os << "c_max = (1/(56 c_hat^2))^2\n"
       << "eta = c_max / beta\n"
       << "chi = 3 max{log(d beta f_gap / (c_hat eps^2 delta)), 4}\n"
       << "r = sqrt(c_max) eps / chi^2\n"
       << "g_thres = sqrt(c_max) eps / chi^2\n"
       << "f_thres = c_max / chi^3 sqrt(eps^3 / rho_hat)\n"
       << "t_thres = ceil(chi / c_max * beta / sqrt(rho_hat eps))\n";
  } else {
    const auto& o = cfg.thresholds;
    auto src = [](bool given) { return given ? "  (given)" : ""; };
    os << "eta = 0.1 / beta" << src(o.eta.has_value()) << "\n"
       << "r = sqrt(eps)" << src(o.r.has_value()) << "\n"
       << "g_thres = eps" << src(o.g_thres.has_value()) << "\n"
       << "f_thres = 0.1 sqrt(eps^3 / rho_hat)" << src(o.f_thres.has_value())
       << "\n"
       << "t_thres = ceil(4 / (eta sqrt(rho_hat eps)))"
       << src(o.t_thres.has_value()) << "\n"
       << "c_max = eta beta\n"
       << "chi = 3 max{log(d beta f_gap / (c_hat eps^2 delta)), 4}\n";
  }
  os << "gamma = sqrt(rho_hat eps)\n"
     << "kappa = beta / gamma\n"
     << "L = log(d kappa / delta)\n"
     << "script_F = eta beta gamma^3 / (rho_hat^2 L^3)\n"
     << "script_G = sqrt(eta beta) gamma^2 / (rho_hat L^2)\n"
     << "script_S = sqrt(eta beta) gamma / (rho_hat L)\n"
     << "script_T = L / (eta gamma)\n";

  os << "\n[thresholds]\n";
  write_thresholds(os, t);

  const EpsilonBound eb = epsilon_bound(p, t);
  os << "\n[epsilon_bound]\n"
     << "epsilon = " << fmt(eb.epsilon) << "\n"
     << "curvature_term = "
     << (eb.curvature_term ? fmt(*eb.curvature_term)
                           : std::string("absent (c2, c3 not given)"))
     << "\n"
     << "injectivity_term = " << fmt(eb.injectivity_term) << "\n"
     << "satisfied = " << (eb.satisfied ? "true" : "false") << "\n";
  return os.str();
}

// ---- output directories --------------------------------------------------------

namespace {

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw DataError("cannot create output directory " + dir.string() +
                    (ec ? ": " + ec.message() : ""));
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

int run_to_directory(const ExperimentConfig& cfg,
                     const std::filesystem::path& out_dir, std::ostream& log) {
  if (cfg.experiment == "verify") return verify_to_directory(cfg, out_dir, log);
  const Problem prob = build_problem(cfg);
  prepare_dir(out_dir);
  write_file(out_dir / "summary.txt", "");  // fail early when unwritable

  const auto start = std::chrono::steady_clock::now();
  const ExperimentOutcome o = execute(cfg, prob);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  std::ostringstream trace;
  write_trace_csv(trace, o.result.trace);
  write_file(out_dir / "trace.csv", trace.str());
  write_file(out_dir / "summary.txt", summary_text(cfg, o));

  log << cfg.experiment << ": " << to_string(o.result.status) << " after "
      << o.result.iterations << " iterations, f = " << fmt(o.result.final_f)
      << ", classification = " << to_string(o.classification) << " ("
      << std::setprecision(3) << secs << " s)\n";
  for (const auto& w : o.thresholds.warnings) log << "warning: " << w << "\n";
  if (!o.result.message.empty()) log << o.result.message << "\n";
  return o.exit_code;
}

int verify_to_directory(const ExperimentConfig& cfg,
                        const std::filesystem::path& out_dir,
                        std::ostream& log) {
  const Problem prob = build_problem(cfg);
  prepare_dir(out_dir);
  const VerifyOutcome v = execute_verify(cfg, prob);

  std::ostringstream summary;
  for (const auto& r : v.reports) {
    write_file(out_dir / (r.lemma_id + ".txt"), r.to_text());
    summary << r.lemma_id << " = " << (r.pass ? "pass" : "fail")
            << "  # slope " << fmt(r.fitted_slope) << ", violations "
            << r.violations << "\n";
  }
  if (v.coupling) {
    write_file(out_dir / "coupling.txt", v.coupling->to_text());
    const bool ok = !v.coupling->growth_ratios.empty() &&
                    v.coupling->fraction_above_threshold >= 0.9;
    summary << "coupling = " << (ok ? "pass" : "fail") << "  # fraction "
            << fmt(v.coupling->fraction_above_threshold) << "\n";
  }
  for (const auto& s : v.skipped) summary << "# skipped " << s << "\n";
  write_file(out_dir / "verify_summary.txt", summary.str());
  log << summary.str();
  return 0;
}

}  // namespace rpgd
