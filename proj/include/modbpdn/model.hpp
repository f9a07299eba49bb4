#pragma once

// Random problem generation: Gaussian sensing matrices with unit-norm
// columns, sparse signals, support partitions and noisy measurements.

#include <cstddef>
#include <utility>

#include "modbpdn/linalg.hpp"
#include "modbpdn/rng.hpp"

namespace modbpdn {

/// Partition of the signal index range [0, m) induced by a support estimate.
///
///   support     N   true support of the signal
///   known       T   support estimate, (N u Delta_e) \ Delta
///   unknown     Delta  part of N missing from T
///   erroneous   Delta_e  part of T outside N
///   extended    N_e = T u Delta = N u Delta_e
///
/// All sets are sorted, 0-based. The constructor checks every relation above
/// and throws ArgumentError on violation.
class SupportPartition {
 public:
  SupportPartition(Index m, IndexSet support, IndexSet unknown, IndexSet erroneous);

  /// Partition for user data where only T and Delta are known; N is taken as
  /// T u Delta and Delta_e as empty. The bounds only depend on T and Delta.
  static SupportPartition from_known(Index m, IndexSet known, IndexSet unknown);

  Index m() const { return m_; }
  const IndexSet& support() const { return support_; }
  const IndexSet& known() const { return known_; }
  const IndexSet& unknown() const { return unknown_; }
  const IndexSet& erroneous() const { return erroneous_; }
  const IndexSet& extended() const { return extended_; }

 private:
  Index m_;
  IndexSet support_;
  IndexSet known_;
  IndexSet unknown_;
  IndexSet erroneous_;
  IndexSet extended_;
};

/// n x m real matrix with unit Euclidean column norms.
class SensingMatrix {
 public:
  /// Takes ownership of `entries` and rescales every column to unit norm.
  /// Zero columns are rejected with ArgumentError.
  static SensingMatrix normalized(MatrixXd entries);

  /// Wraps `entries` as-is, for user-supplied matrices and tests that need
  /// specific structure. No normalization is applied.
  static SensingMatrix from_entries(MatrixXd entries);

  const MatrixXd& entries() const { return entries_; }
  Index n() const { return entries_.rows(); }
  Index m() const { return entries_.cols(); }

 private:
  explicit SensingMatrix(MatrixXd entries) : entries_(std::move(entries)) {}
  MatrixXd entries_;
};

struct Measurement {
  VectorXd y;
  VectorXd w;
};

struct ProblemInstance {
  SensingMatrix matA;
  VectorXd x;
  VectorXd w;
  VectorXd y;
  SupportPartition partition;
  double sigmaW2 = 0.0;
  double signalVar = 0.0;
};

/// i.i.d. standard normal entries, then unit-norm columns.
SensingMatrix generate_sensing_matrix(Index n, Index m, Rng& rng);

/// Uniform random k-subset of `candidates` by partial Fisher-Yates, sorted.
IndexSet sample_subset(IndexSet candidates, std::size_t k, Rng& rng);

/// Draws N uniformly from [0, m), then Delta from N, then Delta_e from the
/// complement of N, in that order on the same stream.
SupportPartition generate_partition(Index m, std::size_t size_support, std::size_t size_unknown,
                                    std::size_t size_erroneous, Rng& rng);

/// Zero-mean Gaussian entries of the given variance on N, zero elsewhere.
VectorXd generate_signal(const SupportPartition& partition, double variance, Rng& rng);

/// w ~ N(0, sigma_w2 I), y = A x + w.
Measurement measure(const SensingMatrix& a, const VectorXd& x, double sigma_w2, Rng& rng);

/// n for a fractional measurement count: round(fraction * m).
Index measurements_for_fraction(double fraction, Index m);

}  // namespace modbpdn
