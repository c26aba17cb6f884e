#pragma once

// Experiment runner behind the command-line tool: flat key = value configs,
// reference optima, per-method trace files and summaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jfw/data.hpp"
#include "jfw/errors.hpp"
#include "jfw/objectives.hpp"
#include "jfw/oracles.hpp"
#include "jfw/polynomials.hpp"
#include "jfw/solvers.hpp"

namespace jfw {

enum class Task { Logistic, HuberRidge, MatrixCompletion, Synthetic };

constexpr std::string_view to_string(Task t) noexcept {
  switch (t) {
    case Task::Logistic: return "logistic";
    case Task::HuberRidge: return "huber_ridge";
    case Task::MatrixCompletion: return "matrix_completion";
    case Task::Synthetic: return "synthetic";
  }
  return "unknown";
}

enum class ReferenceMode { None, LongRun, File };

struct ReferenceSpec {
  ReferenceMode mode = ReferenceMode::None;
  int budget_multiplier = 100;  // long_run: iterations = multiplier * max_iters
  std::string path;             // file
};

struct SyntheticSpec {
  int dim = 10;
  double condition = 10.0;
  bool interior = false;
};

struct ExperimentConfig {
  Task task = Task::Synthetic;
  std::string dataset_path;
  ConstraintSet constraint;
  std::vector<Method> methods{Method::FW, Method::JFW};
  JacobiParams jacobi{1.2, 1.2, 2.0 / 3.0};
  std::optional<double> delta;
  int max_iters = 100;
  std::uint64_t seed = 0;
  std::optional<double> outlier_fraction;
  std::optional<double> train_fraction;
  ReferenceSpec reference;
  std::string output_dir = ".";
  SyntheticSpec synthetic;
  double oracle_tol = 1e-8;

  bool huber_task() const { return task == Task::HuberRidge || task == Task::MatrixCompletion; }
  bool uses(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }
};

struct RunSummary {
  Method method = Method::FW;
  double final_f = 0.0;
  double final_gap = 0.0;
  std::optional<double> final_subopt;
  std::optional<double> final_normalized_error;
  std::optional<double> rate_slope;
  int iterations = 0;
  double wall_ms = 0.0;
  double feasibility_max_slack = 0.0;
  std::vector<std::string> warnings;
  std::string trace_path;
};

struct ReferenceEstimate {
  double value = 0.0;
  double certificate_gap = 0.0;  // final duality gap of the long run; bounds value - f*
  int iterations = 0;
};

struct RunOptions {
  bool timing = false;  // write wall_ms into trace files (breaks byte-identical reruns)
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& why) { throw Error(ErrorKind::ConfigError, why); }

inline double config_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_double(trim(v), out)) config_fail(key + ": expected a number, got '" + v + "'");
  return out;
}

inline std::int64_t config_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  if (!parse_int(trim(v), out)) config_fail(key + ": expected an integer, got '" + v + "'");
  return out;
}

inline bool config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_fail(key + ": expected true or false, got '" + v + "'");
}

}  // namespace detail

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and
/// fields that do not apply to the task are errors.
inline ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) detail::config_fail("line " + std::to_string(ln) + ": missing '='");
    const std::string key(detail::trim(text.substr(0, eq)));
    const std::string value(detail::trim(text.substr(eq + 1)));
    if (key.empty()) detail::config_fail("line " + std::to_string(ln) + ": empty key");
    if (!kv.emplace(key, value).second) detail::config_fail("duplicate key '" + key + "'");
  }

  ExperimentConfig cfg;
  bool has_alpha = false;
  bool has_beta = false;
  bool has_gamma = false;
  bool has_task = false;
  bool has_synth = false;
  bool has_constraint = false;
  for (const auto& [key, value] : kv) {
    if (key == "task") {
      has_task = true;
      if (value == "logistic") cfg.task = Task::Logistic;
      else if (value == "huber_ridge") cfg.task = Task::HuberRidge;
      else if (value == "matrix_completion") cfg.task = Task::MatrixCompletion;
      else if (value == "synthetic") cfg.task = Task::Synthetic;
      else detail::config_fail("task: unknown '" + value + "'");
    } else if (key == "dataset_path") {
      cfg.dataset_path = value;
    } else if (key == "constraint") {
      has_constraint = true;
      if (value == "l2_ball") cfg.constraint.kind = SetKind::L2Ball;
      else if (value == "l1_ball") cfg.constraint.kind = SetKind::L1Ball;
      else if (value == "nuclear_ball") cfg.constraint.kind = SetKind::NuclearBall;
      else detail::config_fail("constraint: unknown '" + value + "'");
    } else if (key == "radius") {
      cfg.constraint.radius = detail::config_double(key, value);
    } else if (key == "methods") {
      cfg.methods.clear();
      for (auto tok : detail::split(value, ',')) {
        if (tok == "fw") cfg.methods.push_back(Method::FW);
        else if (tok == "jfw") cfg.methods.push_back(Method::JFW);
        else detail::config_fail("methods: unknown '" + std::string(tok) + "'");
      }
      if (cfg.methods.empty()) detail::config_fail("methods: empty list");
    } else if (key == "alpha") {
      has_alpha = true;
      cfg.jacobi.alpha = detail::config_double(key, value);
    } else if (key == "beta") {
      has_beta = true;
      cfg.jacobi.beta = detail::config_double(key, value);
    } else if (key == "gamma") {
      has_gamma = true;
      cfg.jacobi.gamma = detail::config_double(key, value);
    } else if (key == "delta") {
      cfg.delta = detail::config_double(key, value);
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(detail::config_int(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(detail::config_int(key, value));
    } else if (key == "outlier_fraction") {
      cfg.outlier_fraction = detail::config_double(key, value);
    } else if (key == "train_fraction") {
      cfg.train_fraction = detail::config_double(key, value);
    } else if (key == "reference") {
      if (value == "none") {
        cfg.reference.mode = ReferenceMode::None;
      } else if (value.rfind("long_run", 0) == 0) {
        cfg.reference.mode = ReferenceMode::LongRun;
        if (value.size() > 8) {
          if (value[8] != ':') detail::config_fail("reference: expected long_run[:multiplier]");
          cfg.reference.budget_multiplier = static_cast<int>(detail::config_int(key, value.substr(9)));
          if (cfg.reference.budget_multiplier < 1) detail::config_fail("reference: multiplier must be >= 1");
        }
      } else if (value.rfind("file:", 0) == 0) {
        cfg.reference.mode = ReferenceMode::File;
        cfg.reference.path = value.substr(5);
      } else {
        detail::config_fail("reference: expected none, long_run[:N] or file:<path>");
      }
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "oracle_tol") {
      cfg.oracle_tol = detail::config_double(key, value);
    } else if (key == "synthetic_dim") {
      has_synth = true;
      cfg.synthetic.dim = static_cast<int>(detail::config_int(key, value));
    } else if (key == "synthetic_condition") {
      has_synth = true;
      cfg.synthetic.condition = detail::config_double(key, value);
    } else if (key == "synthetic_interior") {
      has_synth = true;
      cfg.synthetic.interior = detail::config_bool(key, value);
    } else {
      detail::config_fail("unknown key '" + key + "'");
    }
  }

  if (!has_task) detail::config_fail("task is required");
  if (cfg.task != Task::Synthetic && cfg.dataset_path.empty()) detail::config_fail("dataset_path is required");
  if (cfg.task == Task::Synthetic && !cfg.dataset_path.empty()) {
    detail::config_fail("dataset_path does not apply to the synthetic task");
  }
  if (has_synth && cfg.task != Task::Synthetic) detail::config_fail("synthetic_* keys need task = synthetic");
  if (!has_constraint) detail::config_fail("constraint is required");
  cfg.constraint.validate();
  if (cfg.task == Task::MatrixCompletion && cfg.constraint.kind != SetKind::NuclearBall) {
    detail::config_fail("matrix_completion needs constraint = nuclear_ball");
  }
  if (cfg.task != Task::MatrixCompletion && cfg.constraint.kind == SetKind::NuclearBall) {
    detail::config_fail("nuclear_ball needs task = matrix_completion");
  }
  if (cfg.huber_task() != cfg.delta.has_value()) {
    detail::config_fail(cfg.huber_task() ? "delta is required for Huber tasks"
                                         : "delta only applies to Huber tasks");
  }
  if (cfg.delta && !(*cfg.delta > 0.0)) detail::config_fail("delta must be positive");
  if (cfg.task != Task::MatrixCompletion && (cfg.outlier_fraction || cfg.train_fraction)) {
    detail::config_fail("outlier_fraction and train_fraction only apply to matrix_completion");
  }
  if (cfg.task == Task::MatrixCompletion) {
    if (!cfg.outlier_fraction) cfg.outlier_fraction = 0.0;
    if (!cfg.train_fraction) cfg.train_fraction = 0.5;
    if (!(*cfg.outlier_fraction >= 0.0 && *cfg.outlier_fraction <= 1.0)) {
      detail::config_fail("outlier_fraction must lie in [0, 1]");
    }
    if (!(*cfg.train_fraction > 0.0 && *cfg.train_fraction < 1.0)) {
      detail::config_fail("train_fraction must lie in (0, 1)");
    }
  }
  if (cfg.uses(Method::JFW)) {
    if (!(has_alpha && has_beta && has_gamma)) detail::config_fail("jfw needs alpha, beta and gamma");
    try {
      cfg.jacobi.validate();
    } catch (const Error& e) {
      detail::config_fail(e.what());
    }
  } else if (has_alpha || has_beta || has_gamma) {
    detail::config_fail("alpha, beta and gamma only apply when methods include jfw");
  }
  if (cfg.max_iters < 1) detail::config_fail("max_iters must be >= 1");
  if (cfg.synthetic.dim < 1 || !(cfg.synthetic.condition >= 1.0)) {
    detail::config_fail("synthetic_dim must be >= 1 and synthetic_condition >= 1");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path);
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Trace files

inline constexpr const char* kTraceHeader =
    "k,f_value,duality_gap,subopt,normalized_error,wall_ms,feasibility_slack";

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

/// Write to a sibling temporary, then rename over the target.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + tmp);
    out << content;
    if (!out) throw Error(ErrorKind::ConfigError, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline std::string format_trace(const std::vector<TraceRecord>& trace, bool timing) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << detail::fmt(r.f_value) << ',' << detail::fmt(r.duality_gap) << ','
        << detail::fmt(r.subopt) << ',' << detail::fmt(r.normalized_error) << ','
        << (timing ? detail::fmt(r.wall_ms) : std::string()) << ',' << detail::fmt(r.feasibility_slack)
        << '\n';
  }
  return out.str();
}

inline void write_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& trace,
                        bool timing) {
  detail::write_atomically(path, format_trace(trace, timing));
}

inline std::vector<TraceRecord> read_trace(const std::string& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty() || detail::trim(lines.front()) != kTraceHeader) {
    throw Error(ErrorKind::ParseError, path + ": missing trace header");
  }
  std::vector<TraceRecord> trace;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto text = detail::trim(lines[ln]);
    if (text.empty()) continue;
    const auto f = detail::split(text, ',');
    if (f.size() != 7) detail::parse_fail(path, ln + 1, "expected 7 fields");
    auto opt = [&](std::string_view s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      double v = 0.0;
      if (!detail::parse_double(s, v)) detail::parse_fail(path, ln + 1, "bad number '" + std::string(s) + "'");
      return v;
    };
    TraceRecord r;
    std::int64_t k = 0;
    if (!detail::parse_int(f[0], k)) detail::parse_fail(path, ln + 1, "bad iteration index");
    r.k = static_cast<int>(k);
    r.f_value = opt(f[1]).value_or(std::nan(""));
    r.duality_gap = opt(f[2]).value_or(std::nan(""));
    r.subopt = opt(f[3]);
    r.normalized_error = opt(f[4]);
    r.wall_ms = opt(f[5]).value_or(0.0);
    r.feasibility_slack = opt(f[6]).value_or(0.0);
    trace.push_back(r);
  }
  return trace;
}

/// Least-squares slope of log(subopt) against log(k) over k in [k_min, k_max].
inline double rate_slope(const std::vector<TraceRecord>& trace, int k_min, int k_max) {
  constexpr std::size_t kMinPoints = 10;
  std::size_t in_window = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : trace) {
    if (r.k < k_min || r.k > k_max || r.k < 1 || !r.subopt) continue;
    ++in_window;
    if (*r.subopt > 0.0 && std::isfinite(*r.subopt)) {
      pts.emplace_back(std::log(static_cast<double>(r.k)), std::log(*r.subopt));
    }
  }
  if (in_window < kMinPoints) {
    throw Error(ErrorKind::InsufficientData, "fewer than 10 suboptimality values in the window");
  }
  if (pts.size() < kMinPoints) {
    throw Error(ErrorKind::NonpositiveGap, "fewer than 10 positive suboptimality values in the window");
  }
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Problem assembly

/// Everything a task needs besides the solver: objective, start point and
/// optional per-iterate monitor.
template <Objective Obj>
struct Problem {
  Obj objective;
  typename Obj::Point x0;
  std::function<double(const typename Obj::Point&)> monitor;
  std::optional<double> known_optimum;
  std::optional<double> smoothness;
};

/// Calls `fn(problem)` with the assembled problem for `cfg.task`.
template <typename Fn>
decltype(auto) with_problem(const ExperimentConfig& cfg, Fn&& fn) {
  switch (cfg.task) {
    case Task::Logistic: {
      const auto ds = load_breast_cancer(cfg.dataset_path);
      Problem<LogisticObjective> p{LogisticObjective(ds.features, ds.targets), {}, {}, {}, {}};
      p.x0 = p.objective.zero_point();
      return fn(p);
    }
    case Task::HuberRidge: {
      const auto ds = load_pima(cfg.dataset_path);
      Problem<HuberRidgeObjective> p{HuberRidgeObjective(ds.features, ds.targets, *cfg.delta), {}, {}, {}, {}};
      p.x0 = p.objective.zero_point();
      return fn(p);
    }
    case Task::MatrixCompletion: {
      const auto full = load_movielens(cfg.dataset_path);
      const auto corrupted = inject_outliers(full, *cfg.outlier_fraction, cfg.seed);
      auto [train, test] = train_test_split(corrupted.data, *cfg.train_fraction, cfg.seed + 1);
      auto test_obj = std::make_shared<MatrixCompletionObjective>(completion_objective(test, *cfg.delta));
      Problem<MatrixCompletionObjective> p{completion_objective(train, *cfg.delta), {}, {}, {}, {}};
      p.x0 = p.objective.zero_point();
      p.monitor = [test_obj](const DenseMatrix& x) { return normalized_test_error(*test_obj, x); };
      return fn(p);
    }
    case Task::Synthetic: {
      auto sp = synth_quadratic(cfg.synthetic.dim, cfg.synthetic.condition, cfg.constraint.radius,
                                cfg.synthetic.interior, cfg.seed);
      Problem<QuadraticObjective> p{sp.objective, {}, {}, sp.f_star, sp.smoothness};
      p.x0 = p.objective.zero_point();
      return fn(p);
    }
  }
  throw Error(ErrorKind::ConfigError, "unknown task");
}

inline SolverConfig solver_config(const ExperimentConfig& cfg, Method method, int max_iters) {
  SolverConfig sc;
  sc.method = method;
  sc.max_iters = max_iters;
  if (method == Method::JFW) sc.jacobi = cfg.jacobi;
  sc.oracle_tol = cfg.oracle_tol;
  sc.seed = cfg.seed;
  return sc;
}

/// Long FW run with gap floor 1e-10: the smallest objective value seen,
/// certified by the final duality gap.
template <Objective Obj>
ReferenceEstimate long_run_reference(const Obj& obj, const ConstraintSet& set,
                                     const typename Obj::Point& x0, const ExperimentConfig& cfg) {
  auto sc = solver_config(cfg, Method::FW, cfg.reference.budget_multiplier * cfg.max_iters);
  sc.gap_floor = 1e-10;
  const auto res = run_fw(obj, set, x0, sc);
  ReferenceEstimate est;
  est.value = res.trace.front().f_value;
  for (const auto& r : res.trace) est.value = std::min(est.value, r.f_value);
  est.certificate_gap = res.trace.back().duality_gap;
  est.iterations = res.trace.back().k;
  return est;
}

inline double read_reference_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open reference file " + path);
  std::string tok;
  in >> tok;
  double v = 0.0;
  if (!detail::parse_double(tok, v)) throw Error(ErrorKind::ConfigError, path + ": expected a number");
  return v;
}

/// f* estimate according to cfg.reference; none when the mode is None.
inline std::optional<ReferenceEstimate> compute_reference(const ExperimentConfig& cfg) {
  switch (cfg.reference.mode) {
    case ReferenceMode::None: return std::nullopt;
    case ReferenceMode::File: return ReferenceEstimate{read_reference_file(cfg.reference.path), 0.0, 0};
    case ReferenceMode::LongRun:
      return with_problem(cfg, [&](const auto& p) {
        return long_run_reference(p.objective, cfg.constraint, p.x0, cfg);
      });
  }
  return std::nullopt;
}

inline std::filesystem::path trace_path(const ExperimentConfig& cfg, Method m) {
  return std::filesystem::path(cfg.output_dir) /
         (std::string(to_string(cfg.task)) + "_" + std::string(to_string(m)) + "_" +
          std::to_string(cfg.seed) + ".csv");
}

/// Runs every configured method against a shared reference and writes one
/// trace file per method.
inline std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  std::filesystem::create_directories(cfg.output_dir);
  return with_problem(cfg, [&](const auto& p) {
    using Point = std::decay_t<decltype(p.x0)>;
    std::optional<ReferenceEstimate> ref;
    if (cfg.reference.mode == ReferenceMode::LongRun) {
      ref = long_run_reference(p.objective, cfg.constraint, p.x0, cfg);
    } else if (cfg.reference.mode == ReferenceMode::File) {
      ref = ReferenceEstimate{read_reference_file(cfg.reference.path), 0.0, 0};
    }

    std::vector<RunSummary> out;
    for (const auto method : cfg.methods) {
      RunHooks<Point> hooks;
      if (ref) hooks.reference = ref->value;
      hooks.monitor = p.monitor;
      hooks.smoothness = p.smoothness;
      const auto res = run(p.objective, cfg.constraint, p.x0, solver_config(cfg, method, cfg.max_iters), hooks);

      RunSummary s;
      s.method = method;
      const auto& last = res.trace.back();
      s.final_f = last.f_value;
      s.final_gap = last.duality_gap;
      s.final_subopt = last.subopt;
      s.final_normalized_error = last.normalized_error;
      s.iterations = last.k;
      s.wall_ms = last.wall_ms;
      s.warnings = res.warnings;
      for (const auto& r : res.trace) s.feasibility_max_slack = std::max(s.feasibility_max_slack, r.feasibility_slack);
      if (ref) {
        try {
          s.rate_slope = rate_slope(res.trace, std::max(1, last.k / 10), last.k);
        } catch (const Error&) {
          // too few positive suboptimality values; leave the slope empty
        }
      }
      const auto path = trace_path(cfg, method);
      write_trace(path, res.trace, opts.timing);
      s.trace_path = path.string();
      out.push_back(std::move(s));
    }
    return out;
  });
}

inline std::string format_summary(const RunSummary& s) {
  std::ostringstream out;
  out << "method=" << to_string(s.method) << " iterations=" << s.iterations
      << " final_f=" << detail::fmt(s.final_f) << " final_gap=" << detail::fmt(s.final_gap);
  if (s.final_subopt) out << " final_subopt=" << detail::fmt(*s.final_subopt);
  if (s.final_normalized_error) out << " final_normalized_error=" << detail::fmt(*s.final_normalized_error);
  if (s.rate_slope) out << " rate_slope=" << detail::fmt(*s.rate_slope);
  out << " wall_ms=" << detail::fmt(s.wall_ms)
      << " feasibility_max_slack=" << detail::fmt(s.feasibility_max_slack) << " trace=" << s.trace_path;
  return out.str();
}

}  // namespace jfw
