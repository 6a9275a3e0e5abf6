#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rpgd/harness.h"

namespace rpgd {

namespace {

std::string format_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << "invalid config (" << issues.size()
     << (issues.size() == 1 ? " error)" : " errors)");
  for (const auto& i : issues) {
    os << "\n  ";
    if (i.line > 0) os << "line " << i.line << ": ";
    os << i.message;
  }
  return os.str();
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

template <class T>
std::optional<T> to_integer(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  return std::nullopt;
}

// Splits "1 -1 4", "1, -1, 4" or "(1, -1, 4)" into tokens.
std::vector<std::string> tokens(std::string_view s) {
  std::string buf(trim(s));
  if (buf.size() >= 2 && ((buf.front() == '(' && buf.back() == ')') ||
                          (buf.front() == '[' && buf.back() == ']'))) {
    buf = buf.substr(1, buf.size() - 2);
  }
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream is(buf);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

std::optional<std::vector<double>> to_doubles(std::string_view s) {
  std::vector<double> out;
  for (const auto& t : tokens(s)) {
    auto v = to_double(t);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<std::vector<int>> to_ints(std::string_view s) {
  std::vector<int> out;
  for (const auto& t : tokens(s)) {
    auto v = to_integer<int>(t);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

using C = ExperimentConfig;
// Returns an error message on a type mismatch.
using Setter = std::function<std::optional<std::string>(std::string_view, C&)>;

Setter real(std::function<void(C&, double)> f) {
  return [f](std::string_view s, C& c) -> std::optional<std::string> {
    auto v = to_double(s);
    if (!v) return "expects a number";
    f(c, *v);
    return std::nullopt;
  };
}

Setter integer(std::function<void(C&, std::int64_t)> f) {
  return [f](std::string_view s, C& c) -> std::optional<std::string> {
    auto v = to_integer<std::int64_t>(s);
    if (!v) return "expects an integer";
    f(c, *v);
    return std::nullopt;
  };
}

Setter boolean(std::function<void(C&, bool)> f) {
  return [f](std::string_view s, C& c) -> std::optional<std::string> {
    auto v = to_bool(s);
    if (!v) return "expects true or false";
    f(c, *v);
    return std::nullopt;
  };
}

Setter text(std::function<void(C&, std::string)> f) {
  return [f](std::string_view s, C& c) -> std::optional<std::string> {
    std::string v(trim(s));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
      v = v.substr(1, v.size() - 2);
    }
    if (v.empty()) return "expects a non-empty string";
    f(c, std::move(v));
    return std::nullopt;
  };
}

Setter reals(std::function<void(C&, std::vector<double>)> f) {
  return [f](std::string_view s, C& c) -> std::optional<std::string> {
    auto v = to_doubles(s);
    if (!v) return "expects a list of numbers";
    f(c, std::move(*v));
    return std::nullopt;
  };
}

Setter ints(std::function<void(C&, std::vector<int>)> f) {
  return [f](std::string_view s, C& c) -> std::optional<std::string> {
    auto v = to_ints(s);
    if (!v) return "expects a list of integers";
    f(c, std::move(*v));
    return std::nullopt;
  };
}

using Schema = std::map<std::string, std::map<std::string, Setter>>;

const Schema& schema() {
  static const Schema s = [] {
    Schema s;
    auto& top = s[""];
    top["experiment"] = text([](C& c, std::string v) { c.experiment = v; });
    top["mode"] = text([](C& c, std::string v) { c.mode = v; });
    top["seed"] = [](std::string_view v, C& c) -> std::optional<std::string> {
      auto u = to_integer<std::uint64_t>(v);
      if (!u) return "expects an unsigned 64-bit integer";
      c.seed = *u;
      return std::nullopt;
    };
    top["max_iters"] = integer([](C& c, std::int64_t v) { c.max_iters = v; });
    top["out_dir"] = text([](C& c, std::string v) { c.out_dir = v; });
    top["eig_tol"] = real([](C& c, double v) { c.eig_tol = v; });

    auto& sq = s["sphere-quadratic"];
    sq["D"] = reals([](C& c, std::vector<double> v) { c.sphere.D = to_vector(v); });
    sq["x0"] = reals([](C& c, std::vector<double> v) { c.sphere.x0 = to_vector(v); });

    auto& kp = s["kpca"];
    kp["H_diag"] = reals([](C& c, std::vector<double> v) { c.kpca.H_diag = to_vector(v); });
    kp["H_file"] = text([](C& c, std::string v) { c.kpca.H_file = v; });
    kp["k"] = integer([](C& c, std::int64_t v) { c.kpca.k = static_cast<int>(v); });
    kp["manifold"] = text([](C& c, std::string v) { c.kpca.manifold = v; });
    kp["x0_columns"] = ints([](C& c, std::vector<int> v) { c.kpca.x0_columns = v; });

    auto& bm = s["burer-monteiro"];
    bm["d"] = integer([](C& c, std::int64_t v) { c.bm.d = static_cast<int>(v); });
    bm["p"] = integer([](C& c, std::int64_t v) { c.bm.p = static_cast<int>(v); });
    bm["block"] = integer([](C& c, std::int64_t v) { c.bm.block = static_cast<int>(v); });
    bm["A_file"] = text([](C& c, std::string v) { c.bm.A_file = v; });
    bm["x0"] = text([](C& c, std::string v) { c.bm.x0 = v; });

    auto& as = s["assumptions"];
    as["beta"] = real([](C& c, double v) { c.assumptions.beta = v; });
    as["rho"] = real([](C& c, double v) { c.assumptions.rho = v; });
    as["rho_hat"] = real([](C& c, double v) { c.assumptions.rho_hat = v; });
    as["K"] = real([](C& c, double v) { c.assumptions.K = v; });
    as["injectivity"] = real([](C& c, double v) { c.assumptions.injectivity = v; });
    as["c2"] = real([](C& c, double v) { c.assumptions.c2 = v; });
    as["c3"] = real([](C& c, double v) { c.assumptions.c3 = v; });
    as["epsilon"] = real([](C& c, double v) { c.assumptions.epsilon = v; });
    as["delta"] = real([](C& c, double v) { c.assumptions.delta = v; });
    as["f_gap"] = real([](C& c, double v) { c.assumptions.f_gap = v; });
    as["c_hat"] = real([](C& c, double v) { c.assumptions.c_hat = v; });
    as["estimate_radius"] = real([](C& c, double v) { c.assumptions.estimate_radius = v; });
    as["estimate_samples"] = integer([](C& c, std::int64_t v) {
      c.assumptions.estimate_samples = static_cast<int>(v);
    });

    auto& th = s["thresholds"];
    th["eta"] = real([](C& c, double v) { c.thresholds.eta = v; });
    th["r"] = real([](C& c, double v) { c.thresholds.r = v; });
    th["g_thres"] = real([](C& c, double v) { c.thresholds.g_thres = v; });
    th["f_thres"] = real([](C& c, double v) { c.thresholds.f_thres = v; });
    th["t_thres"] = integer([](C& c, std::int64_t v) { c.thresholds.t_thres = v; });

    auto& ve = s["verify"];
    ve["n_samples"] = integer([](C& c, std::int64_t v) { c.verify.n_samples = static_cast<int>(v); });
    ve["falsify"] = boolean([](C& c, bool v) { c.verify.falsify = v; });
    ve["checks"] = [](std::string_view v, C& c) -> std::optional<std::string> {
      auto t = tokens(v);
      if (t.empty()) return "expects a list of check names";
      c.verify.checks = t;
      return std::nullopt;
    };
    ve["two_step_scales"] = reals([](C& c, std::vector<double> v) { c.verify.two_step_scales = v; });
    ve["log_radii"] = reals([](C& c, std::vector<double> v) { c.verify.log_radii = v; });
    ve["transport_scales"] = reals([](C& c, std::vector<double> v) { c.verify.transport_scales = v; });
    ve["holonomy_scales"] = reals([](C& c, std::vector<double> v) { c.verify.holonomy_scales = v; });
    ve["linearization_scales"] = reals([](C& c, std::vector<double> v) { c.verify.linearization_scales = v; });
    ve["taylor_scales"] = reals([](C& c, std::vector<double> v) { c.verify.taylor_scales = v; });
    ve["descent_radius"] = real([](C& c, double v) { c.verify.descent_radius = v; });
    ve["descent_eta"] = real([](C& c, double v) { c.verify.descent_eta = v; });
    ve["coupling_mu"] = real([](C& c, double v) { c.verify.coupling_mu = v; });
    ve["coupling_t_max"] = integer([](C& c, std::int64_t v) { c.verify.coupling_t_max = static_cast<int>(v); });
    return s;
  }();
  return s;
}

const std::set<std::string> kExperiments{"sphere-quadratic", "kpca",
                                         "burer-monteiro", "verify"};
const std::set<std::string> kChecks{
    "two_step",      "log_bilipschitz", "transport_contraction", "holonomy",
    "linearization", "gradient_taylor", "descent",               "coupling"};

// Which experiment-specific sections each experiment accepts.
bool section_applies(const std::string& section, const std::string& exp) {
  if (section == "sphere-quadratic") {
    return exp == "sphere-quadratic" || exp == "verify";
  }
  if (section == "kpca" || section == "burer-monteiro") return section == exp;
  return true;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : InvalidArgument(format_issues(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::vector<ConfigIssue> issues;
  auto issue = [&](int line, std::string msg) {
    issues.push_back({line, std::move(msg)});
  };

  std::map<std::string, int> section_line;  // first header line per section
  std::map<std::pair<std::string, std::string>, int> seen;
  std::string section;
  bool skip_section = false;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;

    if (auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        issue(lineno, "malformed section header '" + std::string(line) + "'");
        skip_section = true;
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      skip_section = !schema().count(section) || section.empty();
      if (skip_section) {
        issue(lineno, "unknown section [" + section + "]");
      } else {
        section_line.emplace(section, lineno);
      }
      continue;
    }
    if (skip_section) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issue(lineno, "expected 'key = value', got '" + std::string(line) + "'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string where =
        section.empty() ? "" : " in [" + section + "]";

    const auto& keys = schema().at(section);
    auto it = keys.find(key);
    if (it == keys.end()) {
      issue(lineno, "unknown key '" + key + "'" + where);
      continue;
    }
    auto [prev, fresh] = seen.emplace(std::pair{section, key}, lineno);
    if (!fresh) {
      issue(lineno, "duplicate key '" + key + "'" + where + " (first on line " +
                        std::to_string(prev->second) + ")");
      continue;
    }
    if (value.empty()) {
      issue(lineno, "key '" + key + "'" + where + " has no value");
      continue;
    }
    if (auto err = it->second(value, cfg)) {
      issue(lineno, "key '" + key + "'" + where + " " + *err + ", got '" +
                        std::string(value) + "'");
    }
  }

  auto line_of = [&](const std::string& sec, const std::string& key) {
    auto it = seen.find({sec, key});
    return it == seen.end() ? 0 : it->second;
  };
  auto has = [&](const std::string& sec, const std::string& key) {
    return seen.count({sec, key}) > 0;
  };

  // Required fields and cross-field rules.
  if (!has("", "experiment")) {
    issue(0, "missing required key 'experiment'");
  } else if (!kExperiments.count(cfg.experiment)) {
    issue(line_of("", "experiment"),
          "experiment must be one of sphere-quadratic, kpca, burer-monteiro, "
          "verify; got '" + cfg.experiment + "'");
  }
  if (!has("", "seed")) issue(0, "missing required key 'seed'");
  if (cfg.mode != "theory" && cfg.mode != "practical") {
    issue(line_of("", "mode"),
          "mode must be 'theory' or 'practical'; got '" + cfg.mode + "'");
  }
  if (cfg.mode == "theory" && section_line.count("thresholds")) {
    issue(section_line["thresholds"],
          "[thresholds] overrides only apply in practical mode");
  }
  if (cfg.max_iters < 0) issue(line_of("", "max_iters"), "max_iters must be >= 0");
  if (!(cfg.eig_tol > 0)) issue(line_of("", "eig_tol"), "eig_tol must be positive");

  const std::string& exp = cfg.experiment;
  if (kExperiments.count(exp)) {
    for (const auto& [sec, line] : section_line) {
      if (!section_applies(sec, exp)) {
        issue(line, "section [" + sec + "] does not apply to experiment " + exp);
      }
    }
  }

  if (exp == "sphere-quadratic" || exp == "verify") {
    if (exp == "sphere-quadratic" && !has("sphere-quadratic", "D")) {
      issue(section_line.count("sphere-quadratic")
                ? section_line["sphere-quadratic"] : 0,
            "missing required key 'D' in [sphere-quadratic]");
    }
    if (exp == "verify" && !has("sphere-quadratic", "D")) {
      cfg.sphere.D = (Vector(3) << 1, -1, 4).finished();
    }
    if (cfg.sphere.D.size() > 0 && cfg.sphere.D.size() < 2) {
      issue(line_of("sphere-quadratic", "D"), "D needs at least 2 entries");
    }
    if (cfg.sphere.x0 && cfg.sphere.D.size() > 0 &&
        cfg.sphere.x0->size() != cfg.sphere.D.size()) {
      issue(line_of("sphere-quadratic", "x0"),
            "x0 has " + std::to_string(cfg.sphere.x0->size()) +
                " entries but D has " + std::to_string(cfg.sphere.D.size()));
    }
  }

  if (exp == "kpca") {
    const int sl = section_line.count("kpca") ? section_line["kpca"] : 0;
    if (!has("kpca", "k")) {
      issue(sl, "missing required key 'k' in [kpca]");
    } else if (cfg.kpca.k < 1) {
      issue(line_of("kpca", "k"), "k must be >= 1");
    }
    const bool diag = has("kpca", "H_diag"), file = has("kpca", "H_file");
    if (diag == file) {
      issue(sl, "[kpca] needs exactly one of H_diag or H_file");
    }
    if (diag && cfg.kpca.k > cfg.kpca.H_diag->size()) {
      issue(line_of("kpca", "k"), "k exceeds the dimension of H");
    }
    if (cfg.kpca.manifold != "grassmann" && cfg.kpca.manifold != "stiefel") {
      issue(line_of("kpca", "manifold"),
            "manifold must be 'grassmann' or 'stiefel'");
    }
    if (cfg.kpca.x0_columns) {
      const auto& cols = *cfg.kpca.x0_columns;
      const int line = line_of("kpca", "x0_columns");
      if (static_cast<int>(cols.size()) != cfg.kpca.k) {
        issue(line, "x0_columns needs k = " + std::to_string(cfg.kpca.k) +
                        " entries");
      }
      if (std::set<int>(cols.begin(), cols.end()).size() != cols.size()) {
        issue(line, "x0_columns has repeated entries");
      }
      for (int c : cols) {
        if (c < 1 || (diag && c > cfg.kpca.H_diag->size())) {
          issue(line, "x0_columns entry " + std::to_string(c) +
                          " is out of range (1-based)");
        }
      }
    }
  }

  if (exp == "burer-monteiro") {
    auto& b = cfg.bm;
    if (b.d < 1) issue(line_of("burer-monteiro", "d"), "d must be >= 1");
    if (b.p < 1) issue(line_of("burer-monteiro", "p"), "p must be >= 1");
    if (b.block < 1 || b.block > b.d) {
      issue(line_of("burer-monteiro", "block"), "block must lie in [1, d]");
    }
    if (b.x0 != "pattern" && b.x0 != "random") {
      issue(line_of("burer-monteiro", "x0"), "x0 must be 'pattern' or 'random'");
    } else if (b.x0 == "pattern" && b.d >= 1 && b.p >= 1 && b.d % b.p != 0) {
      issue(line_of("burer-monteiro", "x0"),
            "the pattern start needs p to divide d");
    }
  }

  auto& a = cfg.assumptions;
  if (a.estimate_samples < 2) {
    issue(line_of("assumptions", "estimate_samples"),
          "estimate_samples must be >= 2");
  }
  if (!(a.estimate_radius > 0)) {
    issue(line_of("assumptions", "estimate_radius"),
          "estimate_radius must be positive");
  }
  if (!(a.c_hat > 0)) issue(line_of("assumptions", "c_hat"), "c_hat must be positive");

  auto& v = cfg.verify;
  if (v.n_samples < 1) issue(line_of("verify", "n_samples"), "n_samples must be >= 1");
  if (v.coupling_t_max < 1) {
    issue(line_of("verify", "coupling_t_max"), "coupling_t_max must be >= 1");
  }
  for (const auto& c : v.checks) {
    if (!kChecks.count(c)) {
      issue(line_of("verify", "checks"), "unknown check '" + c + "'");
    }
  }

  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(),
                     [](const ConfigIssue& x, const ConfigIssue& y) {
                       return x.line < y.line;
                     });
    throw ConfigError(std::move(issues));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str());
  cfg.base_dir = path.parent_path();
  return cfg;
}

}  // namespace rpgd
