#include "modbpdn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "modbpdn/errors.hpp"

namespace modbpdn {
namespace {

void check_index_set(const IndexSet& s, Index m, const char* name) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= m) {
      throw ArgumentError(std::string(name) + ": index " + std::to_string(s[i]) +
                          " outside [0, " + std::to_string(m) + ")");
    }
    if (i > 0 && s[i] <= s[i - 1]) {
      throw ArgumentError(std::string(name) + ": indices must be sorted and distinct");
    }
  }
}

}  // namespace

SupportPartition::SupportPartition(Index m, IndexSet support, IndexSet unknown,
                                   IndexSet erroneous)
    : m_(m),
      support_(std::move(support)),
      unknown_(std::move(unknown)),
      erroneous_(std::move(erroneous)) {
  if (m < 1) throw ArgumentError("SupportPartition: m must be positive");
  check_index_set(support_, m, "support N");
  check_index_set(unknown_, m, "unknown part Delta");
  check_index_set(erroneous_, m, "erroneous part Delta_e");
  if (set_difference(unknown_, support_).size() != 0) {
    throw ArgumentError("SupportPartition: Delta must be a subset of N");
  }
  if (!set_intersection(erroneous_, support_).empty()) {
    throw ArgumentError("SupportPartition: Delta_e must be disjoint from N");
  }
  known_ = set_difference(set_union(support_, erroneous_), unknown_);
  extended_ = set_union(known_, unknown_);
  // N_e = T u Delta = N u Delta_e, |N_e| = |N| + |Delta_e|.
  if (extended_ != set_union(support_, erroneous_) ||
      extended_.size() != support_.size() + erroneous_.size() ||
      !set_intersection(known_, unknown_).empty()) {
    throw ArgumentError("SupportPartition: inconsistent set algebra");
  }
}

SupportPartition SupportPartition::from_known(Index m, IndexSet known, IndexSet unknown) {
  check_index_set(known, m, "known part T");
  check_index_set(unknown, m, "unknown part Delta");
  if (!set_intersection(known, unknown).empty()) {
    throw ArgumentError("SupportPartition: T and Delta must be disjoint");
  }
  IndexSet support = set_union(known, unknown);
  return SupportPartition(m, std::move(support), std::move(unknown), {});
}

SensingMatrix SensingMatrix::normalized(MatrixXd entries) {
  for (Index j = 0; j < entries.cols(); ++j) {
    const double norm = entries.col(j).norm();
    if (!(norm > 0.0)) throw ArgumentError("SensingMatrix: zero column " + std::to_string(j));
    entries.col(j) /= norm;
  }
  return SensingMatrix(std::move(entries));
}

SensingMatrix SensingMatrix::from_entries(MatrixXd entries) {
  return SensingMatrix(std::move(entries));
}

SensingMatrix generate_sensing_matrix(Index n, Index m, Rng& rng) {
  if (n < 1 || m < 1) throw ArgumentError("generate_sensing_matrix: n and m must be positive");
  MatrixXd a(n, m);
  // Column-major fill so the draw order matches the storage order.
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) a(i, j) = rng.normal();
  }
  return SensingMatrix::normalized(std::move(a));
}

IndexSet sample_subset(IndexSet candidates, std::size_t k, Rng& rng) {
  if (k > candidates.size()) {
    throw ArgumentError("sample_subset: requested " + std::to_string(k) + " of " +
                        std::to_string(candidates.size()) + " candidates");
  }
  const std::size_t size = candidates.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform(i, size - 1));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(k);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

SupportPartition generate_partition(Index m, std::size_t size_support, std::size_t size_unknown,
                                    std::size_t size_erroneous, Rng& rng) {
  if (m < 1) throw ArgumentError("generate_partition: m must be positive");
  if (size_unknown > size_support) {
    throw ArgumentError("generate_partition: |Delta| exceeds |N|");
  }
  if (size_support + size_erroneous > static_cast<std::size_t>(m)) {
    throw ArgumentError("generate_partition: |N| + |Delta_e| exceeds m");
  }
  IndexSet all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Index{0});
  IndexSet support = sample_subset(all, size_support, rng);
  IndexSet unknown = sample_subset(support, size_unknown, rng);
  IndexSet erroneous = sample_subset(complement(support, m), size_erroneous, rng);
  return SupportPartition(m, std::move(support), std::move(unknown), std::move(erroneous));
}

VectorXd generate_signal(const SupportPartition& partition, double variance, Rng& rng) {
  if (!(variance > 0.0)) throw ArgumentError("generate_signal: variance must be positive");
  const double sd = std::sqrt(variance);
  VectorXd x = VectorXd::Zero(partition.m());
  for (Index i : partition.support()) x(i) = sd * rng.normal();
  return x;
}

Measurement measure(const SensingMatrix& a, const VectorXd& x, double sigma_w2, Rng& rng) {
  if (x.size() != a.m()) throw ArgumentError("measure: signal length does not match A");
  if (!(sigma_w2 >= 0.0)) throw ArgumentError("measure: noise variance must be non-negative");
  const double sd = std::sqrt(sigma_w2);
  VectorXd w(a.n());
  for (Index i = 0; i < w.size(); ++i) w(i) = sd * rng.normal();
  // With sigma_w2 = 0 the draws still happen so the stream advances identically.
  if (sigma_w2 == 0.0) w.setZero();
  return {a.entries() * x + w, w};
}

Index measurements_for_fraction(double fraction, Index m) {
  return static_cast<Index>(std::llround(fraction * static_cast<double>(m)));
}

}  // namespace modbpdn
