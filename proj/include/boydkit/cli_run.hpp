#pragma once
// Command core shared by the CLI binary and the CLI tests: a RunConfig is
// validated and executed against streams, so every code path is testable
// without spawning a process.  All numeric output goes through format_real,
// grids are deterministic, and parallel sections write by index; reruns of
// the same config are byte identical.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "boydkit/acceptance.hpp"
#include "boydkit/boyd.hpp"
#include "boydkit/hardy.hpp"
#include "boydkit/interp.hpp"
#include "boydkit/json_io.hpp"
#include "boydkit/piecewise.hpp"
#include "boydkit/reals.hpp"
#include "boydkit/spaces.hpp"

namespace boydkit {

enum class Command { Rearrange, Norm, Hardy, Boyd, Kfunc, Theorem7, Verify };

struct RunConfig {
  Command command = Command::Rearrange;
  std::string input_path;            // --input, function JSON
  std::string space_arg;             // --space, file path or compact spelling
  std::string kind_arg;              // --kind, file path or compact spelling
  std::vector<double> t;             // --t, repeatable
  int grid = 64;                     // --grid, sample and cut grid size
  double tol = 1e-9;                 // --tol, reserved (tolerances are pinned)
  std::uint64_t seed = 0;            // --seed, reserved (streams are pinned)
  std::string out_path;              // --out, empty = stdout
  std::string format = "csv";        // --format, csv | json
};

namespace detail_cli {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline PiecewiseFn load_function(const std::string& path) {
  try {
    return function_from_json(load_json_file(path));
  } catch (const ParseError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw ParseError(path + ": " + what);
  }
}

inline bool looks_compact(const std::string& arg) {
  return arg.find(':') != std::string::npos;
}

inline SpaceSpec resolve_space(const std::string& arg) {
  if (looks_compact(arg)) return space_from_string(arg);
  try {
    return space_from_json(load_json_file(arg), "space");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    if (what.rfind(arg, 0) == 0) throw;
    throw ParseError(arg + ": " + what);
  }
}

inline HardyKind resolve_kind(const std::string& arg) {
  if (looks_compact(arg)) return kind_from_string(arg);
  try {
    return kind_from_json(load_json_file(arg), "kind");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    if (what.rfind(arg, 0) == 0) throw;
    throw ParseError(arg + ": " + what);
  }
}

// Log-spaced sample grid anchored to the rearranged breakpoints, three
// decades of margin either side; [1e-3, 1e3] for functions without finite
// interior structure.
inline std::vector<double> sample_grid(const PiecewiseFn& fstar, int n) {
  const auto bps = fstar.breakpoints();
  double lo = 1e-3, hi = 1e3;
  if (!bps.empty()) {
    lo = bps.front() * 1e-3;
    hi = bps.back() * 1e3;
  }
  std::vector<double> g;
  g.reserve(n);
  for (int i = 0; i < n; ++i)
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

inline int thread_budget(std::size_t tasks) {
  long requested = 0;
  if (const char* env = std::getenv("BOYDKIT_THREADS")) {
    char* end = nullptr;
    requested = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || requested < 0)
      throw std::invalid_argument(
          "BOYDKIT_THREADS: expected a nonnegative integer");
  }
  if (requested == 0)
    requested = static_cast<long>(std::thread::hardware_concurrency());
  if (requested < 1) requested = 1;
  if (static_cast<std::size_t>(requested) > tasks)
    requested = static_cast<long>(tasks);
  return static_cast<int>(requested);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline void validate(const RunConfig& cfg) {
  require(cfg.grid >= 8, "grid: must be at least 8");
  require(cfg.tol > 0.0 && cfg.tol <= 1e-3, "tol: must lie in (0, 1e-3]");
  require(cfg.format == "csv" || cfg.format == "json",
          "format: must be csv or json");
  const bool needs_input =
      cfg.command == Command::Rearrange || cfg.command == Command::Norm ||
      cfg.command == Command::Hardy || cfg.command == Command::Kfunc ||
      cfg.command == Command::Theorem7;
  if (needs_input) require(!cfg.input_path.empty(), "--input is required");
  if (cfg.command == Command::Norm || cfg.command == Command::Boyd ||
      cfg.command == Command::Kfunc || cfg.command == Command::Theorem7)
    require(!cfg.space_arg.empty(), "--space is required");
  if (cfg.command == Command::Hardy)
    require(!cfg.kind_arg.empty(), "--kind is required");
  for (double v : cfg.t)
    require(v > 0.0 && is_finite(v), "--t: values must be finite positive");
}

inline void write_samples_csv(std::ostream& os,
                              const std::vector<double>& ts,
                              const std::vector<double>& vs) {
  os << "t,value\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    os << format_real(ts[i]) << "," << format_real(vs[i]) << "\n";
}

inline nlohmann::json samples_json(const std::vector<double>& ts,
                                   const std::vector<double>& vs) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < ts.size(); ++i)
    arr.push_back({{"t", real_to_json(ts[i])}, {"value", real_to_json(vs[i])}});
  return arr;
}

inline int cmd_rearrange(const RunConfig& cfg, std::ostream& out) {
  const PiecewiseFn fstar = rearrange(load_function(cfg.input_path));
  if (cfg.format == "json") {
    out << function_to_json(fstar).dump(2) << "\n";
    return 0;
  }
  const auto ts = sample_grid(fstar, cfg.grid);
  std::vector<double> vs;
  vs.reserve(ts.size());
  for (double t : ts) vs.push_back(evaluate(fstar, t));
  write_samples_csv(out, ts, vs);
  return 0;
}

inline int cmd_norm(const RunConfig& cfg, std::ostream& out) {
  const SpaceSpec X = resolve_space(cfg.space_arg);
  const double v = space_norm(X, load_function(cfg.input_path));
  if (cfg.format == "json") {
    out << nlohmann::json{{"norm", real_to_json(v)}}.dump(2) << "\n";
  } else {
    out << "norm\n" << format_real(v) << "\n";
  }
  return 0;
}

inline int cmd_hardy(const RunConfig& cfg, std::ostream& out) {
  const HardyKind kind = resolve_kind(cfg.kind_arg);
  const PiecewiseFn f = load_function(cfg.input_path);
  const HardyTransform h = apply(kind, f);
  const auto ts = sample_grid(rearrange(f), cfg.grid);
  std::vector<double> vs;
  vs.reserve(ts.size());
  for (double t : ts) vs.push_back(h(t));
  if (cfg.format == "json") {
    out << nlohmann::json{{"samples", samples_json(ts, vs)}}.dump(2) << "\n";
  } else {
    write_samples_csv(out, ts, vs);
  }
  return 0;
}

inline int cmd_boyd(const RunConfig& cfg, std::ostream& out) {
  const SpaceSpec X = resolve_space(cfg.space_arg);
  const TestFamily family =
      X.is_lorentz() ? TestFamily{} : default_probe_family(X);
  const BoydReport rep = estimate_indices(X, default_dilation_grid(), family);
  if (cfg.format == "json") {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& [a, h] : rep.samples)
      samples.push_back({{"a", real_to_json(a)}, {"h", real_to_json(h)}});
    out << nlohmann::json{{"samples", samples},
                          {"lowerIndex", real_to_json(rep.lower_index)},
                          {"upperIndex", real_to_json(rep.upper_index)},
                          {"fitResidual", real_to_json(rep.fit_residual)},
                          {"exactDilationLaw", rep.exact_dilation_law},
                          {"note", rep.note}}
                 .dump(2)
          << "\n";
    return 0;
  }
  out << "a,h,lower_index,upper_index,fit_residual\n";
  for (const auto& [a, h] : rep.samples)
    out << format_real(a) << "," << format_real(h) << ",,,\n";
  out << ",," << format_real(rep.lower_index) << ","
      << format_real(rep.upper_index) << "," << format_real(rep.fit_residual)
      << "\n";
  return 0;
}

// The K command wants a compatibility couple: a sum space whose legs are
// both Lorentz.
inline void sum_legs(const SpaceSpec& X, double* p, double* r, double* q,
                     double* s) {
  if (X.kind != SpaceSpec::Kind::Sum || !X.x->is_lorentz() ||
      !X.y->is_lorentz())
    throw std::invalid_argument(
        "--space: expected a sum of two Lorentz spaces (sum:p,r,q,s)");
  *p = X.x->p;
  *r = X.x->q;
  *q = X.y->p;
  *s = X.y->q;
}

inline int cmd_kfunc(const RunConfig& cfg, std::ostream& out) {
  const SpaceSpec X = resolve_space(cfg.space_arg);
  double p = 0, r = 0, q = 0, s = 0;
  sum_legs(X, &p, &r, &q, &s);
  const PiecewiseFn f = load_function(cfg.input_path);
  std::vector<double> ts = cfg.t;
  if (ts.empty()) {
    for (int i = 0; i < cfg.grid; ++i)
      ts.push_back(1e-3 *
                   std::pow(1e6, static_cast<double>(i) / (cfg.grid - 1)));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<KReport> reports(ts.size());
  const int workers = thread_budget(ts.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      for (std::size_t i = next.fetch_add(1); i < ts.size();
           i = next.fetch_add(1))
        reports[i] = k_bruteforce(f, ts[i], p, r, q, s, cfg.grid);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (cfg.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    double lo = kInf, hi = 0.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const KReport& kr = reports[i];
      arr.push_back({{"t", real_to_json(kr.t)},
                     {"bruteInf", real_to_json(kr.brute_inf)},
                     {"operatorSum", real_to_json(kr.operator_sum)},
                     {"ratio", real_to_json(kr.ratio)},
                     {"argCut", real_to_json(kr.arg_cut)}});
      lo = std::min(lo, kr.ratio);
      hi = std::max(hi, kr.ratio);
    }
    out << nlohmann::json{{"reports", arr},
                          {"minRatio", real_to_json(lo)},
                          {"maxRatio", real_to_json(hi)}}
               .dump(2)
        << "\n";
    return 0;
  }
  out << "t,brute_inf,operator_sum,ratio,arg_cut\n";
  for (const KReport& kr : reports)
    out << format_real(kr.t) << "," << format_real(kr.brute_inf) << ","
        << format_real(kr.operator_sum) << "," << format_real(kr.ratio) << ","
        << format_real(kr.arg_cut) << "\n";
  return 0;
}

inline int cmd_theorem7(const RunConfig& cfg, std::ostream& out) {
  const SpaceSpec S = resolve_space(cfg.space_arg);
  if (S.kind != SpaceSpec::Kind::Sum)
    throw std::invalid_argument("--space: expected a sum space (sum:p,r,q,s)");
  const PiecewiseFn f = load_function(cfg.input_path);
  const Theorem7Report rep = theorem7_verify(*S.x, *S.y, f, cfg.grid);
  if (cfg.format == "json") {
    out << nlohmann::json{{"c1", real_to_json(rep.c1)},
                          {"c2", real_to_json(rep.c2)},
                          {"c3", real_to_json(rep.c3)},
                          {"normSum", real_to_json(rep.norm_sum)},
                          {"normH", real_to_json(rep.norm_h)},
                          {"chainOk", rep.chain_ok}}
               .dump(2)
        << "\n";
  } else {
    out << "c1,c2,c3,norm_sum,norm_h,chain_ok\n";
    out << format_real(rep.c1) << "," << format_real(rep.c2) << ","
        << format_real(rep.c3) << "," << format_real(rep.norm_sum) << ","
        << format_real(rep.norm_h) << "," << (rep.chain_ok ? 1 : 0) << "\n";
  }
  return rep.chain_ok ? 0 : 2;
}

}  // namespace detail_cli

// Executes cfg against the given streams.  Exit codes: 0 success, 1 input
// error (bad flags, unreadable or malformed files, invalid specs), 2
// invariant failure (acceptance criteria red, divergent or failed chains).
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    detail_cli::validate(cfg);
    switch (cfg.command) {
      case Command::Rearrange:
        return detail_cli::cmd_rearrange(cfg, out);
      case Command::Norm:
        return detail_cli::cmd_norm(cfg, out);
      case Command::Hardy:
        return detail_cli::cmd_hardy(cfg, out);
      case Command::Boyd:
        return detail_cli::cmd_boyd(cfg, out);
      case Command::Kfunc:
        return detail_cli::cmd_kfunc(cfg, out);
      case Command::Theorem7:
        return detail_cli::cmd_theorem7(cfg, out);
      case Command::Verify:
        return acceptance::run_table(out) ? 0 : 2;
    }
    err << "boydkit: unknown command\n";
    return 1;
  } catch (const Divergent& e) {
    err << "boydkit: " << e.what() << "\n";
    return 2;
  } catch (const HypothesisFailed& e) {
    err << "boydkit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "boydkit: " << e.what() << "\n";
    return 1;
  }
}

// Same, resolving out_path; an empty path writes to stdout_like.
inline int run_to_path(const RunConfig& cfg, std::ostream& stdout_like,
                       std::ostream& err) {
  if (cfg.out_path.empty()) return run(cfg, stdout_like, err);
  std::ofstream file(cfg.out_path);
  if (!file) {
    err << "boydkit: " << cfg.out_path << ": cannot open for writing\n";
    return 1;
  }
  return run(cfg, file, err);
}

}  // namespace boydkit
