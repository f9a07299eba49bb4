#pragma once

// Monte Carlo sweeps over (n, |Delta|, |Delta_e|): per sweep point, draw
// support, signal, noise and support estimate for each trial, compute gamma*,
// reconstruct, and compare the reconstruction error with the computable
// bounds.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "modbpdn/linalg.hpp"
#include "modbpdn/model.hpp"
#include "modbpdn/solver.hpp"

namespace modbpdn {

struct ExperimentConfig {
  Index m = 1024;
  Index sizeN = 15;
  std::vector<Index> nValues;
  std::vector<Index> deltaValues;
  std::vector<Index> deltaEValues{0};
  double sigmaW2 = 0.0;
  double signalVar = 100.0;
  int trials = 50;
  std::uint64_t baseSeed = 0;
  double gammaSlack = 1.0;
  std::filesystem::path outPath;
  /// When false only gamma* and the bounds are computed; error fields are
  /// left empty.
  bool solve = true;
  /// Worker threads; results do not depend on this.
  int workers = 1;
  SolverOptions solver;

  /// Throws ArgumentError on the first violated constraint.
  void validate() const;
};

struct SweepPoint {
  Index n = 0;
  Index sizeDelta = 0;
  Index sizeDeltaE = 0;
};

struct TrialRecord {
  SweepPoint point;
  int trialIndex = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  bool applicable = false;
  std::optional<double> gammaStar;
  double gammaUsed = 0.0;
  double conditionFactor = 0.0;
  std::optional<double> errLinfVsC;
  std::optional<double> errL2VsX;
  std::optional<double> boundLinf;
  std::optional<double> boundL2;
  std::optional<double> solverIters;
  std::optional<double> kktResidual;
};

/// Mean and sample standard deviation over the trials where a field exists.
struct FieldStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct PointSummary {
  Index m = 0;
  Index sizeN = 0;
  SweepPoint point;
  int countTotal = 0;
  int countApplicable = 0;
  int countFailed = 0;
  FieldStats gammaStar;
  FieldStats conditionFactor;
  FieldStats errLinfVsC;
  FieldStats errL2VsX;
  FieldStats boundLinf;
  FieldStats boundL2;
  FieldStats solverIters;
  FieldStats kktResidual;
};

struct ExperimentSummary {
  std::vector<PointSummary> points;
  /// All trials, in sweep-point then trial-index order. Failed trials are
  /// kept here with failed = true but are excluded from the statistics and
  /// the trials CSV.
  std::vector<TrialRecord> records;
};

/// Seed of the matrix shared by every trial at a given n.
std::uint64_t matrix_seed(std::uint64_t base_seed, Index m, Index n);

/// Seed of one trial. Depends only on the base seed and the trial index so
/// that every sweep point sees the same supports, signals and noise draws.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index);

/// Sweep points in output order: n outer, then |Delta_e|, then |Delta|.
std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg);

/// One trial at `point` with the matrix for `point.n`.
TrialRecord run_trial(const ExperimentConfig& cfg, const SensingMatrix& a, const SweepPoint& point,
                      int trial_index);

/// Convenience overload that generates the matrix for `n` itself.
TrialRecord run_trial(const ExperimentConfig& cfg, Index n, Index size_delta, Index size_delta_e,
                      int trial_index);

/// Aggregates the trials of one sweep point.
PointSummary summarize(const ExperimentConfig& cfg, const SweepPoint& point,
                       const std::vector<TrialRecord>& records);

/// Runs every sweep point. When cfg.outPath is set, checks that the output
/// files can be created before doing any work (IoError otherwise); it does
/// not write them.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// `<path>.trials.csv` and `<path>.summary.csv`.
void write_csv(const ExperimentSummary& summary, const std::filesystem::path& path);

/// One whitespace-delimited file per n, `<path>.n<n>.dat`, returning the
/// paths written.
std::vector<std::filesystem::path> emit_plot_data(const ExperimentSummary& summary,
                                                  const std::filesystem::path& path);

/// Header of the trials CSV.
inline constexpr const char* kTrialsHeader =
    "m,n,sizeN,sizeDelta,sizeDeltaE,trial,seed,applicable,gammaStar,conditionFactor,"
    "errLinfVsC,errL2VsX,boundLinf,boundL2,solverIters,kktResidual";

/// `path` with `suffix` appended to the file name.
std::filesystem::path with_suffix(const std::filesystem::path& path, const std::string& suffix);

}  // namespace modbpdn
