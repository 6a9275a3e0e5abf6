#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpgd/geo_verify.h"
#include "rpgd/manifold.h"
#include "rpgd/objective.h"
#include "rpgd/optimizer.h"

namespace rpgd {

// ---- configuration -----------------------------------------------------------

struct ConfigIssue {
  int line = 0;  // 0: not tied to a line (e.g. a missing key)
  std::string message;
};

/// Every problem found in a config file, not just the first.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Bad problem data: unreadable matrix file, asymmetric H, infeasible start.
class DataError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct SphereQuadraticConfig {
  Vector D;
  std::optional<Vector> x0;  // default e1
};

struct KpcaConfig {
  std::optional<Vector> H_diag;
  std::optional<std::string> H_file;
  int k = 0;
  std::string manifold = "grassmann";  // or "stiefel"
  std::optional<std::vector<int>> x0_columns;  // 1-based; default random
};

struct BurerMonteiroConfig {
  int d = 100;
  int p = 20;
  int block = 5;  // size of the random upper-left block of A
  std::optional<std::string> A_file;
  std::string x0 = "pattern";  // or "random"
};

struct AssumptionConfig {
  std::optional<double> beta, rho, rho_hat, K, injectivity, c2, c3;
  double epsilon = 1e-4;
  double delta = 0.1;
  double f_gap = 1.0;
  double c_hat = 4.0;
  // Used when beta or rho is not given.
  double estimate_radius = 0.5;
  int estimate_samples = 20;
};

struct VerifyConfig {
  int n_samples = 1000;
  bool falsify = false;
  std::vector<std::string> checks{"two_step",    "log_bilipschitz",
                                  "transport_contraction", "holonomy",
                                  "linearization", "gradient_taylor",
                                  "descent",      "coupling"};
  std::vector<double> two_step_scales{0.2, 0.1, 0.05, 0.025};
  std::vector<double> log_radii{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> transport_scales{0.4, 0.2, 0.1, 0.05};
  std::vector<double> holonomy_scales{0.4, 0.2, 0.1, 0.05};
  std::vector<double> linearization_scales{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<double> taylor_scales{0.2, 0.1, 0.05, 0.025};
  double descent_radius = 0.5;
  std::optional<double> descent_eta;  // default: thresholds eta
  double coupling_mu = 1.0;
  int coupling_t_max = 5000;
};

struct ExperimentConfig {
  std::string experiment;  // sphere-quadratic, kpca, burer-monteiro, verify
  std::string mode = "practical";
  std::uint64_t seed = 0;
  std::int64_t max_iters = 1000000;
  std::string out_dir = "out";
  double eig_tol = 1e-6;
  /// Relative file paths in the config resolve against this directory.
  std::filesystem::path base_dir;

  SphereQuadraticConfig sphere;
  KpcaConfig kpca;
  BurerMonteiroConfig bm;
  AssumptionConfig assumptions;
  PracticalOverrides thresholds;
  VerifyConfig verify;
};

/// Flat `key = value` lines, `[section]` headers, `#` comments. Throws
/// ConfigError listing every unknown key, type mismatch, duplicate and
/// missing required field.
ExperimentConfig parse_config(std::string_view text);
/// parse_config on a file; base_dir becomes the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

// ---- matrix files ------------------------------------------------------------

/// First line `rows cols`, then rows of whitespace-separated decimals.
Matrix read_matrix(std::istream& in);
Matrix load_matrix(const std::filesystem::path& path);
/// 17 significant digits, so a round trip is bit-exact.
void write_matrix(std::ostream& out, const Matrix& m);

// ---- experiments -------------------------------------------------------------

/// Independent generator for one purpose (data, start, estimation, ...)
/// derived from the config seed.
Rng seeded_stream(std::uint64_t seed, std::uint64_t tag);

enum StreamTag : std::uint64_t {
  kDataStream = 1,
  kStartStream = 2,
  kEstimateStream = 3,
  kOptimizerStream = 4,
  kEigenStream = 5,
  kVerifyStream = 7,  // 6 is the start-point eigen stream
};

struct Problem {
  std::shared_ptr<const Objective> objective;
  Point x0;
  /// Residual of the start before it was snapped onto the manifold.
  double start_feasibility = 0.0;
};

/// Builds manifold, objective and start point. Throws DataError on bad data
/// or a start whose feasibility residual exceeds 1e-8.
Problem build_problem(const ExperimentConfig& cfg);

struct ResolvedAssumptions {
  AssumptionParams params;
  bool beta_estimated = false;
  bool rho_estimated = false;
};

/// Fills beta and rho from estimate_smoothness around x0 when the config
/// does not give them; K, injectivity and d default to the manifold's.
ResolvedAssumptions resolve_assumptions(const ExperimentConfig& cfg,
                                        const Problem& prob);

ThresholdSet thresholds_for(const ExperimentConfig& cfg,
                            const AssumptionParams& p);

struct ExperimentOutcome {
  ResolvedAssumptions assumptions;
  ThresholdSet thresholds;
  double initial_f = 0.0;
  double initial_gradnorm = 0.0;
  RunResult result;
  std::optional<EigenEstimate> final_eig;  // absent after a step failure
  Stationarity classification = Stationarity::kNonStationary;
  /// Experiment-specific diagnostics (principal angles, decrease, ...).
  std::vector<std::pair<std::string, double>> extras;
  int exit_code = 1;

  std::optional<double> extra(const std::string& key) const;
};

/// Runs the optimizer from the problem's start and classifies the end point.
ExperimentOutcome execute(const ExperimentConfig& cfg, const Problem& prob);

void write_trace_csv(std::ostream& out, const Trace& trace);
std::string summary_text(const ExperimentConfig& cfg,
                         const ExperimentOutcome& o);

struct VerifyOutcome {
  std::vector<VerificationReport> reports;
  std::optional<CouplingReport> coupling;
  std::vector<std::string> skipped;  // "check: reason"
  bool all_pass = true;
};

/// Lemma checks on the config's manifold and objective. For
/// experiment = verify the problem is the sphere-quadratic saddle.
VerifyOutcome execute_verify(const ExperimentConfig& cfg, const Problem& prob);

/// Full derivation of the threshold set, for audit.
std::string thresholds_text(const ExperimentConfig& cfg, const Problem& prob);

/// Writes trace.csv and summary.txt (or the verify reports) into `out_dir`
/// and returns the process exit status: 0 success, 1 not converged.
/// Throws DataError when the directory cannot be written.
int run_to_directory(const ExperimentConfig& cfg,
                     const std::filesystem::path& out_dir, std::ostream& log);
int verify_to_directory(const ExperimentConfig& cfg,
                        const std::filesystem::path& out_dir,
                        std::ostream& log);

}  // namespace rpgd
