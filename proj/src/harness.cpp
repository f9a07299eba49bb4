#include "modbpdn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "modbpdn/bounds.hpp"
#include "modbpdn/errors.hpp"
#include "modbpdn/rng.hpp"

namespace modbpdn {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kMatrixStream = hash_name("sensing-matrix");
constexpr std::uint64_t kTrialStream = hash_name("trial");

// The divisor for the penalty weight used when no gamma* exists.
constexpr double kFallbackGammaDivisor = 100.0;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void prepare_output(const fs::path& base) {
  const fs::path dir = base.parent_path();
  if (!dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
  for (const char* suffix : {".trials.csv", ".summary.csv"}) {
    const fs::path p = with_suffix(base, suffix);
    std::ofstream probe(p, std::ios::binary | std::ios::app);
    if (!probe) throw IoError("output path not writable: " + p.string());
  }
}

template <typename Field>
FieldStats stats_of(const std::vector<const TrialRecord*>& rows, Field field) {
  FieldStats s;
  double sum = 0.0;
  for (const TrialRecord* r : rows) {
    if (const std::optional<double> v = field(*r)) {
      ++s.count;
      sum += *v;
    }
  }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (const TrialRecord* r : rows) {
      if (const std::optional<double> v = field(*r)) ss += (*v - s.mean) * (*v - s.mean);
    }
    s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (m < 1) throw ArgumentError("m must be positive");
  if (sizeN < 1 || sizeN > m) throw ArgumentError("support size must lie in [1, m]");
  if (trials < 1) throw ArgumentError("trials must be >= 1");
  if (workers < 1) throw ArgumentError("workers must be >= 1");
  if (!(sigmaW2 >= 0.0)) throw ArgumentError("noise variance must be non-negative");
  if (!(signalVar > 0.0)) throw ArgumentError("signal variance must be positive");
  if (!(gammaSlack > 0.0)) throw ArgumentError("gamma slack must be positive");
  for (Index n : nValues) {
    if (n < 1 || n >= m) {
      throw ArgumentError("measurement count " + std::to_string(n) + " must lie in [1, m)");
    }
  }
  for (Index d : deltaValues) {
    if (d < 0 || d > sizeN) {
      throw ArgumentError("|Delta| = " + std::to_string(d) + " must lie in [0, |N|]");
    }
  }
  for (Index e : deltaEValues) {
    if (e < 0 || sizeN + e > m) {
      throw ArgumentError("|Delta_e| = " + std::to_string(e) + " must lie in [0, m - |N|]");
    }
  }
  solver.validate();
}

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out += suffix;
  return out;
}

std::uint64_t matrix_seed(std::uint64_t base_seed, Index m, Index n) {
  return hash_seed(hash_seed(hash_seed(base_seed, kMatrixStream), static_cast<std::uint64_t>(m)),
                   static_cast<std::uint64_t>(n));
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index) {
  return hash_seed(hash_seed(base_seed, kTrialStream), static_cast<std::uint64_t>(trial_index));
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  for (Index n : cfg.nValues)
    for (Index e : cfg.deltaEValues)
      for (Index d : cfg.deltaValues) points.push_back({n, d, e});
  return points;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const SensingMatrix& a, const SweepPoint& point,
                      int trial_index) {
  TrialRecord rec;
  rec.point = point;
  rec.trialIndex = trial_index;
  rec.seed = trial_seed(cfg.baseSeed, trial_index);

  const Rng rng(rec.seed);
  Rng support_rng = rng.split("support");
  Rng signal_rng = rng.split("signal");
  Rng noise_rng = rng.split("noise");
  const SupportPartition partition =
      generate_partition(cfg.m, static_cast<std::size_t>(cfg.sizeN),
                         static_cast<std::size_t>(point.sizeDelta),
                         static_cast<std::size_t>(point.sizeDeltaE), support_rng);
  const VectorXd x = generate_signal(partition, cfg.signalVar, signal_rng);
  const Measurement meas = measure(a, x, cfg.sigmaW2, noise_rng);
  const MatrixXd& am = a.entries();

  try {
    const VectorXd c = genie_ls(a, partition.extended(), meas.y);
    const BlockSystem sys(a, partition.known(), partition.unknown());
    rec.conditionFactor = sys.condition_factor();
    const double lhs = (am.transpose() * (meas.y - am * c)).cwiseAbs().maxCoeff();
    rec.applicable = rec.conditionFactor > 0.0;
    if (rec.applicable) {
      rec.gammaStar = lhs / rec.conditionFactor;
      rec.gammaUsed = cfg.gammaSlack * *rec.gammaStar;
      const bool empty = partition.unknown().empty();
      const double size = static_cast<double>(partition.unknown().size());
      rec.boundLinf = empty ? 0.0 : rec.gammaUsed * sys.linf_coefficient();
      rec.boundL2 = pseudo_inverse_norms(a, partition.extended()).two * meas.w.norm() +
                    (empty ? 0.0 : rec.gammaUsed * std::sqrt(size) * sys.l2_coefficient());
    } else {
      rec.gammaUsed = (am.transpose() * meas.y).cwiseAbs().maxCoeff() / kFallbackGammaDivisor;
    }
    if (cfg.solve) {
      const SolverResult res =
          solve_modified_bpdn(a, meas.y, partition.known(), rec.gammaUsed, cfg.solver);
      rec.errLinfVsC = (res.bHat - c).cwiseAbs().maxCoeff();
      rec.errL2VsX = (res.bHat - x).norm();
      rec.solverIters = static_cast<double>(res.iters);
      rec.kktResidual = res.kktResidual;
    }
  } catch (const SingularityError&) {
    const std::uint64_t seed = rec.seed;
    rec = TrialRecord{};
    rec.point = point;
    rec.trialIndex = trial_index;
    rec.seed = seed;
    rec.failed = true;
  }
  return rec;
}

TrialRecord run_trial(const ExperimentConfig& cfg, Index n, Index size_delta, Index size_delta_e,
                      int trial_index) {
  cfg.validate();
  Rng rng(matrix_seed(cfg.baseSeed, cfg.m, n));
  const SensingMatrix a = generate_sensing_matrix(n, cfg.m, rng);
  return run_trial(cfg, a, SweepPoint{n, size_delta, size_delta_e}, trial_index);
}

PointSummary summarize(const ExperimentConfig& cfg, const SweepPoint& point,
                       const std::vector<TrialRecord>& records) {
  PointSummary s;
  s.m = cfg.m;
  s.sizeN = cfg.sizeN;
  s.point = point;
  std::vector<const TrialRecord*> ok;
  for (const TrialRecord& r : records) {
    ++s.countTotal;
    if (r.failed) {
      ++s.countFailed;
      continue;
    }
    if (r.applicable) ++s.countApplicable;
    ok.push_back(&r);
  }
  s.gammaStar = stats_of(ok, [](const TrialRecord& r) { return r.gammaStar; });
  s.conditionFactor = stats_of(
      ok, [](const TrialRecord& r) { return std::optional<double>(r.conditionFactor); });
  s.errLinfVsC = stats_of(ok, [](const TrialRecord& r) { return r.errLinfVsC; });
  s.errL2VsX = stats_of(ok, [](const TrialRecord& r) { return r.errL2VsX; });
  s.boundLinf = stats_of(ok, [](const TrialRecord& r) { return r.boundLinf; });
  s.boundL2 = stats_of(ok, [](const TrialRecord& r) { return r.boundL2; });
  s.solverIters = stats_of(ok, [](const TrialRecord& r) { return r.solverIters; });
  s.kktResidual = stats_of(ok, [](const TrialRecord& r) { return r.kktResidual; });
  return s;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.outPath.empty()) prepare_output(cfg.outPath);

  std::map<Index, SensingMatrix> matrices;
  for (Index n : cfg.nValues) {
    if (matrices.count(n)) continue;
    Rng rng(matrix_seed(cfg.baseSeed, cfg.m, n));
    matrices.emplace(n, generate_sensing_matrix(n, cfg.m, rng));
  }

  const std::vector<SweepPoint> points = sweep_points(cfg);
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t tasks = points.size() * trials;
  std::vector<TrialRecord> records(tasks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      try {
        const SweepPoint& p = points[i / trials];
        records[i] = run_trial(cfg, matrices.at(p.n), p, static_cast<int>(i % trials));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = tasks;
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers),
                                              std::max<std::size_t>(tasks, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  ExperimentSummary summary;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const std::vector<TrialRecord> slice(records.begin() + static_cast<std::ptrdiff_t>(p * trials),
                                         records.begin() +
                                             static_cast<std::ptrdiff_t>((p + 1) * trials));
    summary.points.push_back(summarize(cfg, points[p], slice));
  }
  summary.records = std::move(records);
  return summary;
}

void write_csv(const ExperimentSummary& summary, const fs::path& path) {
  // m and |N| are per experiment; take them from the point summaries.
  std::map<std::tuple<Index, Index, Index>, const PointSummary*> by_point;
  for (const PointSummary& p : summary.points) {
    by_point[{p.point.n, p.point.sizeDelta, p.point.sizeDeltaE}] = &p;
  }

  const fs::path trials_path = with_suffix(path, ".trials.csv");
  std::ofstream trials = open_for_write(trials_path);
  trials << kTrialsHeader << '\n';
  for (const TrialRecord& r : summary.records) {
    if (r.failed) continue;
    const auto it = by_point.find({r.point.n, r.point.sizeDelta, r.point.sizeDeltaE});
    const Index m = it == by_point.end() ? 0 : it->second->m;
    const Index size_n = it == by_point.end() ? 0 : it->second->sizeN;
    trials << m << ',' << r.point.n << ',' << size_n << ',' << r.point.sizeDelta << ','
           << r.point.sizeDeltaE << ',' << r.trialIndex << ',' << r.seed << ','
           << (r.applicable ? 1 : 0) << ',' << format_optional(r.gammaStar) << ','
           << format_double(r.conditionFactor) << ',' << format_optional(r.errLinfVsC) << ','
           << format_optional(r.errL2VsX) << ',' << format_optional(r.boundLinf) << ','
           << format_optional(r.boundL2) << ',' << format_optional(r.solverIters) << ','
           << format_optional(r.kktResidual) << '\n';
  }
  finish(trials, trials_path);

  const fs::path summary_path = with_suffix(path, ".summary.csv");
  std::ofstream out = open_for_write(summary_path);
  static constexpr const char* kFields[] = {"gammaStar", "conditionFactor", "errLinfVsC",
                                            "errL2VsX",  "boundLinf",       "boundL2",
                                            "solverIters", "kktResidual"};
  out << "m,n,sizeN,sizeDelta,sizeDeltaE,countTotal,countApplicable,countFailed";
  for (const char* f : kFields) out << ",mean_" << f << ",std_" << f;
  out << '\n';
  for (const PointSummary& p : summary.points) {
    out << p.m << ',' << p.point.n << ',' << p.sizeN << ',' << p.point.sizeDelta << ','
        << p.point.sizeDeltaE << ',' << p.countTotal << ',' << p.countApplicable << ','
        << p.countFailed;
    for (const FieldStats* s : {&p.gammaStar, &p.conditionFactor, &p.errLinfVsC, &p.errL2VsX,
                                &p.boundLinf, &p.boundL2, &p.solverIters, &p.kktResidual}) {
      if (s->count == 0) {
        out << ",,";
      } else {
        out << ',' << format_double(s->mean) << ',' << format_double(s->stddev);
      }
    }
    out << '\n';
  }
  finish(out, summary_path);
}

std::vector<fs::path> emit_plot_data(const ExperimentSummary& summary, const fs::path& path) {
  std::map<Index, std::vector<const PointSummary*>> by_n;
  for (const PointSummary& p : summary.points) by_n[p.point.n].push_back(&p);

  std::vector<fs::path> written;
  for (const auto& [n, pts] : by_n) {
    const fs::path file = with_suffix(path, ".n" + std::to_string(n) + ".dat");
    std::ofstream out = open_for_write(file);
    out << "# m=" << pts.front()->m << " n=" << n << " sizeN=" << pts.front()->sizeN << '\n';
    out << "# columns: |Delta|/|N| mean_boundL2 mean_errL2VsX\n";
    std::optional<Index> block;
    for (const PointSummary* p : pts) {
      if (block != p->point.sizeDeltaE) {
        // Blank-line pairs separate blocks for gnuplot's `index`.
        if (block) out << "\n\n";
        block = p->point.sizeDeltaE;
        out << "# sizeDeltaE=" << *block << '\n';
      }
      if (p->boundL2.count == 0) {
        out << "# sizeDelta=" << p->point.sizeDelta << " not applicable\n";
        continue;
      }
      const double frac = static_cast<double>(p->point.sizeDelta) / static_cast<double>(p->sizeN);
      out << format_double(frac) << ' ' << format_double(p->boundL2.mean) << ' '
          << (p->errL2VsX.count ? format_double(p->errL2VsX.mean) : std::string("NaN")) << '\n';
    }
    finish(out, file);
    written.push_back(file);
  }
  return written;
}

}  // namespace modbpdn
