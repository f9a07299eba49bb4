// modbpdn: Monte Carlo sweeps of modified-BPDN error bounds, and bound
// evaluation on user-supplied data.
//
//   modbpdn run --m 1024 --support-size 15 --n 0.2,0.3,0.5 --delta 0,5,10,15 \
//               --noise-var 0.0003 --trials 50 --seed 42 --out results/sweep15
//   modbpdn check --matrix A.csv --y y.csv --support T.csv --delta D.csv
//
// Exit codes: 0 success, 2 nothing applicable, 1 error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modbpdn/bounds.hpp"
#include "modbpdn/errors.hpp"
#include "modbpdn/harness.hpp"
#include "modbpdn/solver.hpp"

namespace {

using namespace modbpdn;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotApplicable = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ArgumentError("bad number '" + s + "' in " + what);
  return v;
}

Index parse_count(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v < 0 || v != std::floor(v)) throw ArgumentError("bad count '" + s + "' in " + what);
  return static_cast<Index>(v);
}

std::vector<Index> parse_counts(const std::string& text, const std::string& what) {
  std::vector<Index> out;
  for (const std::string& s : split_list(text)) out.push_back(parse_count(s, what));
  return out;
}

// Values below 1 are fractions of m, everything else an absolute count.
std::vector<Index> parse_measurements(const std::string& text, Index m) {
  std::vector<Index> out;
  for (const std::string& s : split_list(text)) {
    const double v = parse_double(s, "--n");
    if (v > 0.0 && v < 1.0) {
      out.push_back(measurements_for_fraction(v, m));
    } else {
      out.push_back(parse_count(s, "--n"));
    }
  }
  return out;
}

// Plain `key=value` lines; `#` starts a comment. Keys are long option names
// without the leading dashes.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto lb = s.find_first_not_of(" \t\r\"");
      const auto le = s.find_last_not_of(" \t\r\"");
      return lb == std::string::npos ? std::string() : s.substr(lb, le - lb + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// Finds `--config <path>` or `--config=<path>` before CLI11 parses, so that
// file values become defaults that explicit flags override.
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

struct RunArgs {
  std::string m = "1024";
  std::string supportSize = "15";
  std::string n = "0.2,0.3,0.5";
  std::string delta = "0,5,10,15";
  std::string deltaE = "0";
  std::string noiseVar = "0.0003";
  std::string signalVar = "100";
  std::string trials = "50";
  std::string seed = "42";
  std::string gammaSlack = "1.0";
  std::string workers = "1";
  std::string out = "results/modbpdn";
  bool boundsOnly = false;
};

struct CheckArgs {
  std::string matrix;
  std::string y;
  std::string support;
  std::string delta;
  std::string gamma;
  std::string noiseL2 = "0";
  std::string noiseLinf = "0";
};

void apply_config(const std::map<std::string, std::string>& cfg, RunArgs& run, CheckArgs& check) {
  const std::map<std::string, std::string*> keys = {
      {"m", &run.m},
      {"support-size", &run.supportSize},
      {"n", &run.n},
      {"delta", &run.delta},
      {"delta-e", &run.deltaE},
      {"noise-var", &run.noiseVar},
      {"signal-var", &run.signalVar},
      {"trials", &run.trials},
      {"seed", &run.seed},
      {"gamma-slack", &run.gammaSlack},
      {"workers", &run.workers},
      {"out", &run.out},
      {"matrix", &check.matrix},
      {"y", &check.y},
      {"support", &check.support},
      {"gamma", &check.gamma},
      {"noise-l2", &check.noiseL2},
      {"noise-linf", &check.noiseLinf},
  };
  for (const auto& [key, value] : cfg) {
    if (key == "bounds-only") {
      run.boundsOnly = value == "1" || value == "true";
    } else if (key == "delta") {
      run.delta = value;
      check.delta = value;
    } else if (const auto it = keys.find(key); it != keys.end()) {
      *it->second = value;
    } else {
      throw ArgumentError("unknown config key '" + key + "'");
    }
  }
}

// Dense numeric CSV, row-major; a first line that does not parse as numbers
// is treated as a header.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    for (char& ch : line) {
      if (ch == ';' || ch == '\t' || ch == ' ' || ch == '\r') ch = ',';
    }
    std::vector<double> row;
    bool numeric = true;
    for (const std::string& cell : split_list(line)) {
      if (cell.empty()) continue;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ArgumentError(path + ": non-numeric row '" + line + "'");
    }
    first = false;
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd read_matrix(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  if (rows.empty()) throw ArgumentError(path + ": empty matrix");
  MatrixXd a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw ArgumentError(path + ": ragged row " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      a(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return a;
}

std::vector<double> read_flat(const std::string& path) {
  std::vector<double> out;
  for (const auto& row : read_numeric_csv(path)) out.insert(out.end(), row.begin(), row.end());
  return out;
}

// 1-based indices on disk, 0-based in memory.
IndexSet read_index_set(const std::string& path, Index m) {
  IndexSet out;
  if (path.empty()) return out;
  for (double v : read_flat(path)) {
    if (v != std::floor(v) || v < 1 || v > static_cast<double>(m)) {
      throw ArgumentError(path + ": index " + std::to_string(v) + " outside [1, " +
                          std::to_string(m) + "]");
    }
    out.push_back(static_cast<Index>(v) - 1);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int do_run(const RunArgs& args) {
  ExperimentConfig cfg;
  cfg.m = parse_count(args.m, "--m");
  cfg.sizeN = parse_count(args.supportSize, "--support-size");
  cfg.nValues = parse_measurements(args.n, cfg.m);
  cfg.deltaValues = parse_counts(args.delta, "--delta");
  cfg.deltaEValues = parse_counts(args.deltaE, "--delta-e");
  cfg.sigmaW2 = parse_double(args.noiseVar, "--noise-var");
  cfg.signalVar = parse_double(args.signalVar, "--signal-var");
  cfg.trials = static_cast<int>(parse_count(args.trials, "--trials"));
  cfg.baseSeed = static_cast<std::uint64_t>(std::stoull(args.seed));
  cfg.gammaSlack = parse_double(args.gammaSlack, "--gamma-slack");
  cfg.workers = static_cast<int>(parse_count(args.workers, "--workers"));
  cfg.outPath = args.out;
  cfg.solve = !args.boundsOnly;

  const ExperimentSummary summary = run_experiment(cfg);
  write_csv(summary, cfg.outPath);
  emit_plot_data(summary, cfg.outPath);

  int applicable = 0;
  std::cout << "n,sizeDelta,sizeDeltaE,applicable/total,mean_errLinfVsC,mean_boundLinf,"
               "mean_errL2VsX,mean_boundL2\n";
  for (const PointSummary& p : summary.points) {
    applicable += p.countApplicable;
    auto mean = [](const FieldStats& s) { return s.count ? fmt(s.mean) : std::string("-"); };
    std::cout << p.point.n << ',' << p.point.sizeDelta << ',' << p.point.sizeDeltaE << ','
              << p.countApplicable << '/' << p.countTotal << ',' << mean(p.errLinfVsC) << ','
              << mean(p.boundLinf) << ',' << mean(p.errL2VsX) << ',' << mean(p.boundL2) << '\n';
  }
  std::cout << "wrote " << with_suffix(cfg.outPath, ".trials.csv").string() << " and "
            << with_suffix(cfg.outPath, ".summary.csv").string() << '\n';
  return applicable > 0 || summary.points.empty() ? kExitOk : kExitNotApplicable;
}

int do_check(const CheckArgs& args) {
  const SensingMatrix a = SensingMatrix::from_entries(read_matrix(args.matrix));
  const std::vector<double> yv = read_flat(args.y);
  if (static_cast<Index>(yv.size()) != a.n()) {
    throw ArgumentError("y has " + std::to_string(yv.size()) + " entries, A has " +
                        std::to_string(a.n()) + " rows");
  }
  const VectorXd y = Eigen::Map<const VectorXd>(yv.data(), static_cast<Index>(yv.size()));
  const SupportPartition part = SupportPartition::from_known(
      a.m(), read_index_set(args.support, a.m()), read_index_set(args.delta, a.m()));

  std::optional<double> gamma;
  if (!args.gamma.empty()) gamma = parse_double(args.gamma, "--gamma");
  const double w2 = parse_double(args.noiseL2, "--noise-l2");
  const double winf = parse_double(args.noiseLinf, "--noise-linf");
  const BoundReport r = evaluate_bounds(a, y, part, gamma, winf, w2);

  std::cout << "n=" << a.n() << "\nm=" << a.m() << "\nsizeT=" << part.known().size()
            << "\nsizeDelta=" << part.unknown().size()
            << "\nconditionFactor=" << fmt(r.conditionFactor)
            << "\nlhsCondition=" << fmt(r.lhsCondition) << "\napplicable=" << r.applicable
            << "\ngammaStar=" << (r.gammaStar ? fmt(*r.gammaStar) : std::string()) << '\n';
  if (gamma || r.gammaStar) {
    const double g = gamma.value_or(*r.gammaStar);
    std::cout << "gamma=" << fmt(g) << "\nlinfBound=" << fmt(r.linfBound)
              << "\nl2Bound=" << fmt(r.l2Bound) << '\n';
    if (gamma && r.applicable) {
      std::cout << "globalCondition=" << check_global_condition(a, y, part, *gamma) << '\n';
    }
  }
  return r.applicable ? kExitOk : kExitNotApplicable;
}

}  // namespace

int main(int argc, char** argv) {
  RunArgs run;
  CheckArgs check;
  try {
    if (const std::string path = find_config_arg(argc, argv); !path.empty()) {
      apply_config(read_config(path), run, check);
    }
  } catch (const std::exception& e) {
    std::cerr << "modbpdn: " << e.what() << '\n';
    return kExitError;
  }

  CLI::App app{"Modified basis pursuit denoising: error bounds and Monte Carlo sweeps"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value file of option defaults");

  CLI::App* run_cmd = app.add_subcommand("run", "Monte Carlo sweep over n, |Delta|, |Delta_e|");
  run_cmd->add_option("--m", run.m, "signal length")->capture_default_str();
  run_cmd->add_option("--support-size", run.supportSize, "|N|")->capture_default_str();
  run_cmd->add_option("--n", run.n, "measurement counts; values < 1 are fractions of m")
      ->capture_default_str();
  run_cmd->add_option("--delta", run.delta, "|Delta| values")->capture_default_str();
  run_cmd->add_option("--delta-e", run.deltaE, "|Delta_e| values")->capture_default_str();
  run_cmd->add_option("--noise-var", run.noiseVar, "noise variance")->capture_default_str();
  run_cmd->add_option("--signal-var", run.signalVar, "variance of nonzero entries")
      ->capture_default_str();
  run_cmd->add_option("--trials", run.trials, "trials per sweep point")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "base seed")->capture_default_str();
  run_cmd->add_option("--gamma-slack", run.gammaSlack, "gamma = slack * gamma*")
      ->capture_default_str();
  run_cmd->add_option("--workers", run.workers, "worker threads")->capture_default_str();
  run_cmd->add_option("--out", run.out, "output path prefix")->capture_default_str();
  run_cmd->add_flag("--bounds-only", run.boundsOnly, "skip reconstruction");
  run_cmd->add_option("--config", config_path, "key=value file of option defaults");

  CLI::App* check_cmd = app.add_subcommand("check", "evaluate gamma* and bounds on given data");
  check_cmd->add_option("--matrix", check.matrix, "dense CSV sensing matrix")->required();
  check_cmd->add_option("--y", check.y, "measurement vector CSV")->required();
  check_cmd->add_option("--support", check.support, "known support T, 1-based indices");
  check_cmd->add_option("--delta", check.delta, "unknown support Delta, 1-based indices");
  check_cmd->add_option("--gamma", check.gamma, "evaluate bounds at this gamma");
  check_cmd->add_option("--noise-l2", check.noiseL2, "||w||_2 for the noise term");
  check_cmd->add_option("--noise-linf", check.noiseLinf, "||w||_inf for the noise term");
  check_cmd->add_option("--config", config_path, "key=value file of option defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run_cmd) return do_run(run);
    return do_check(check);
  } catch (const NotApplicableError& e) {
    std::cerr << "modbpdn: " << e.what() << '\n';
    return kExitNotApplicable;
  } catch (const std::exception& e) {
    std::cerr << "modbpdn: " << e.what() << '\n';
    return kExitError;
  }
}
