#include "modbpdn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "modbpdn/errors.hpp"
#include "modbpdn/solver.hpp"

namespace modbpdn {
namespace {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Visits every k-subset of `pool` in lexicographic order.
template <typename Visit>
void for_each_subset(const IndexSet& pool, Index k, Visit&& visit) {
  const auto n = static_cast<Index>(pool.size());
  if (k > n) return;
  std::vector<Index> pos(static_cast<std::size_t>(k));
  std::iota(pos.begin(), pos.end(), Index{0});
  IndexSet subset(static_cast<std::size_t>(k));
  while (true) {
    for (Index j = 0; j < k; ++j) subset[j] = pool[pos[j]];
    visit(subset);
    Index j = k - 1;
    while (j >= 0 && pos[j] == n - k + j) --j;
    if (j < 0) return;
    ++pos[j];
    for (Index l = j + 1; l < k; ++l) pos[l] = pos[l - 1] + 1;
  }
}

IndexSet iota_set(Index m) {
  IndexSet s(static_cast<std::size_t>(m));
  std::iota(s.begin(), s.end(), Index{0});
  return s;
}

MatrixXd symmetrized(const MatrixXd& k) { return 0.5 * (k + k.transpose()); }

}  // namespace

BlockSystem::BlockSystem(const SensingMatrix& a, const IndexSet& known, const IndexSet& unknown)
    : a_(&a), known_(known), unknown_(unknown) {
  if (!set_intersection(known_, unknown_).empty()) {
    throw ArgumentError("BlockSystem: T and Delta must be disjoint");
  }
  for (Index i : set_union(known_, unknown_)) {
    if (i < 0 || i >= a.m()) throw ArgumentError("BlockSystem: index out of range");
  }
  const MatrixXd& am = a.entries();
  known_cols_ = columns(am, known_);
  const MatrixXd unknown_cols = columns(am, unknown_);
  known_gram_inv_ = spd_inverse(known_cols_.transpose() * known_cols_, "A_T'A_T");
  const MatrixXd cross = known_cols_.transpose() * unknown_cols;  // A_T'A_D
  projected_unknown_ = unknown_cols - known_cols_ * (known_gram_inv_ * cross);
  schur_ = symmetrized(unknown_cols.transpose() * projected_unknown_);
  schur_inv_ = spd_inverse(schur_, "A_D'MA_D");
  coupling_ = known_gram_inv_ * cross * schur_inv_;
}

VectorXd BlockSystem::project(const VectorXd& v) const {
  if (known_.empty()) return v;
  return v - known_cols_ * (known_gram_inv_ * (known_cols_.transpose() * v));
}

double BlockSystem::linf_coefficient() const {
  return std::max(norm_inf(coupling_), norm_inf(schur_inv_));
}

double BlockSystem::l2_coefficient() const {
  const double p = spectral_norm(coupling_);
  const double k = spectral_norm(schur_inv_);
  return std::sqrt(p * p + k * k);
}

double BlockSystem::condition_factor() const {
  if (unknown_.empty()) return 1.0;
  const MatrixXd& am = a_->entries();
  // Column w of `coef` is K^{-1} (M A_D)' A_w = K^{-1} A_D' M A_w.
  const MatrixXd coef = schur_inv_ * (projected_unknown_.transpose() * am);
  const Eigen::RowVectorXd l1 = coef.cwiseAbs().colwise().sum();
  const IndexSet extended = set_union(known_, unknown_);
  double worst = 0.0;
  auto it = extended.begin();
  for (Index w = 0; w < am.cols(); ++w) {
    if (it != extended.end() && *it == w) {
      ++it;
      continue;
    }
    worst = std::max(worst, l1(w));
  }
  return 1.0 - worst;
}

MatrixXd complement_projector(const SensingMatrix& a, const IndexSet& known) {
  const Index n = a.n();
  MatrixXd m = MatrixXd::Identity(n, n);
  if (known.empty()) return m;
  const MatrixXd at = columns(a.entries(), known);
  const MatrixXd gram_inv = spd_inverse(at.transpose() * at, "A_T'A_T");
  m.noalias() -= at * gram_inv * at.transpose();
  return m;
}

double linf_bound(const SensingMatrix& a, const IndexSet& known, const IndexSet& unknown,
                  double gamma) {
  if (unknown.empty()) return 0.0;
  return gamma * BlockSystem(a, known, unknown).linf_coefficient();
}

PseudoInverseNorms pseudo_inverse_norms(const SensingMatrix& a, const IndexSet& extended) {
  if (extended.empty()) return {};
  const MatrixXd block = columns(a.entries(), extended);
  const MatrixXd gram = block.transpose() * block;
  const MatrixXd pinv = spd_inverse(gram, "A_{N_e}'A_{N_e}") * block.transpose();
  const EigenRange range = eigen_range(gram);
  return {norm_inf(pinv), 1.0 / std::sqrt(range.min)};
}

double linf_bound_with_noise(const SensingMatrix& a, const SupportPartition& partition,
                             double gamma, double w_inf_norm) {
  const double noise =
      w_inf_norm == 0.0 ? 0.0 : pseudo_inverse_norms(a, partition.extended()).inf * w_inf_norm;
  return linf_bound(a, partition.known(), partition.unknown(), gamma) + noise;
}

double l2_bound(const SensingMatrix& a, const SupportPartition& partition, double gamma,
                double w2_norm) {
  const double noise =
      w2_norm == 0.0 ? 0.0 : pseudo_inverse_norms(a, partition.extended()).two * w2_norm;
  if (partition.unknown().empty()) return noise;
  const BlockSystem sys(a, partition.known(), partition.unknown());
  const double size = static_cast<double>(partition.unknown().size());
  return noise + gamma * std::sqrt(size) * sys.l2_coefficient();
}

double rip_l2_bound(double delta_known, double delta_unknown, double delta_extended, double theta,
                    Index size_unknown, double gamma, double w2_norm) {
  if (!(delta_known < 1.0) || !(delta_extended < 1.0)) {
    throw NotApplicableError("rip_l2_bound: restricted isometry constant must be below 1");
  }
  const double coupling = theta * theta / (1.0 - delta_known);
  const double denom = 1.0 - delta_unknown - coupling;
  if (!(denom > 0.0)) {
    throw NotApplicableError("rip_l2_bound: 1 - delta_D - theta^2/(1 - delta_T) is not positive");
  }
  const double ratio = theta / (1.0 - delta_known);
  const double gamma_term =
      gamma * std::sqrt(static_cast<double>(size_unknown)) * std::sqrt(ratio * ratio + 1.0) / denom;
  return gamma_term + w2_norm / std::sqrt(1.0 - delta_extended);
}

double bpdn_l2_bound(double delta_support, Index size_support, double gamma, double w2_norm) {
  if (!(delta_support < 1.0)) {
    throw NotApplicableError("bpdn_l2_bound: restricted isometry constant must be below 1");
  }
  return gamma * std::sqrt(static_cast<double>(size_support)) / (1.0 - delta_support) +
         w2_norm / std::sqrt(1.0 - delta_support);
}

double condition_factor(const SensingMatrix& a, const SupportPartition& partition) {
  if (partition.unknown().empty()) return 1.0;
  return BlockSystem(a, partition.known(), partition.unknown()).condition_factor();
}

double condition_lhs(const SensingMatrix& a, const VectorXd& y,
                     const SupportPartition& partition) {
  const VectorXd c = genie_ls(a, partition.extended(), y);
  const VectorXd corr = a.entries().transpose() * (y - a.entries() * c);
  return corr.cwiseAbs().maxCoeff();
}

double gamma_star(const SensingMatrix& a, const VectorXd& y, const SupportPartition& partition) {
  const double cf = condition_factor(a, partition);
  if (!(cf > 0.0)) {
    throw NotApplicableError("gamma_star: condition factor " + std::to_string(cf) +
                             " is not positive");
  }
  return condition_lhs(a, y, partition) / cf;
}

bool check_global_condition(const SensingMatrix& a, const VectorXd& y,
                            const SupportPartition& partition, double gamma) {
  const double cf = condition_factor(a, partition);
  if (!(cf > 0.0)) {
    throw NotApplicableError("check_global_condition: condition factor " + std::to_string(cf) +
                             " is not positive");
  }
  // Same expression as gamma_star so the threshold is exact at gamma = gamma*.
  return gamma > condition_lhs(a, y, partition) / cf;
}

BoundReport evaluate_bounds(const SensingMatrix& a, const VectorXd& y,
                            const SupportPartition& partition, std::optional<double> gamma,
                            double w_inf_norm, double w2_norm) {
  BoundReport r;
  const IndexSet& unknown = partition.unknown();
  const BlockSystem sys(a, partition.known(), unknown);
  r.conditionFactor = sys.condition_factor();
  r.lhsCondition = condition_lhs(a, y, partition);
  r.applicable = r.conditionFactor > 0.0;
  if (r.applicable) r.gammaStar = r.lhsCondition / r.conditionFactor;
  const std::optional<double> g = gamma ? gamma : r.gammaStar;
  if (!g) return r;

  const PseudoInverseNorms pinv = (w_inf_norm != 0.0 || w2_norm != 0.0)
                                      ? pseudo_inverse_norms(a, partition.extended())
                                      : PseudoInverseNorms{};
  const double size = static_cast<double>(unknown.size());
  const double linf_gamma = unknown.empty() ? 0.0 : *g * sys.linf_coefficient();
  const double l2_gamma = unknown.empty() ? 0.0 : *g * std::sqrt(size) * sys.l2_coefficient();
  r.linfBound = linf_gamma + pinv.inf * w_inf_norm;
  r.l2Bound = l2_gamma + pinv.two * w2_norm;
  return r;
}

double exact_ric(const SensingMatrix& a, Index s) {
  if (s < 0 || s > a.m()) throw ArgumentError("exact_ric: S must lie in [0, m]");
  if (s == 0) return 0.0;
  if (binomial(a.m(), s) > kMaxEnumeration) {
    throw FeasibilityError("exact_ric: C(" + std::to_string(a.m()) + ", " + std::to_string(s) +
                           ") subsets exceed the enumeration limit");
  }
  const MatrixXd gram = a.entries().transpose() * a.entries();
  double delta = 0.0;
  MatrixXd block(s, s);
  for_each_subset(iota_set(a.m()), s, [&](const IndexSet& sub) {
    for (Index i = 0; i < s; ++i)
      for (Index j = 0; j < s; ++j) block(i, j) = gram(sub[i], sub[j]);
    const EigenRange r = eigen_range(block);
    delta = std::max({delta, r.max - 1.0, 1.0 - r.min});
  });
  return delta;
}

double exact_roc(const SensingMatrix& a, Index s1, Index s2) {
  if (s1 < 0 || s2 < 0 || s1 + s2 > a.m()) {
    throw ArgumentError("exact_roc: need S1, S2 >= 0 and S1 + S2 <= m");
  }
  if (s1 == 0 || s2 == 0) return 0.0;
  if (binomial(a.m(), s1) * binomial(a.m() - s1, s2) > kMaxEnumeration) {
    throw FeasibilityError("exact_roc: subset pairs exceed the enumeration limit");
  }
  const MatrixXd gram = a.entries().transpose() * a.entries();
  const IndexSet all = iota_set(a.m());
  double theta = 0.0;
  MatrixXd block(s1, s2);
  for_each_subset(all, s1, [&](const IndexSet& first) {
    const IndexSet rest = set_difference(all, first);
    for_each_subset(rest, s2, [&](const IndexSet& second) {
      for (Index i = 0; i < s1; ++i)
        for (Index j = 0; j < s2; ++j) block(i, j) = gram(first[i], second[j]);
      theta = std::max(theta, spectral_norm(block));
    });
  });
  return theta;
}

}  // namespace modbpdn
