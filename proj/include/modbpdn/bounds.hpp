#pragma once

// Computable error bounds for the restricted minimizer, the sufficient
// condition for it to be the unique global minimizer, the smallest penalty
// weight gamma* meeting that condition, and exact restricted isometry /
// orthogonality constants for small matrices.
//
// Notation: T known part, D unknown part (Delta), N_e = T u D,
//   M = I - A_T (A_T'A_T)^{-1} A_T'       complement projector
//   K = A_D' M A_D                        Schur complement of A_{N_e}'A_{N_e}
//   P = (A_T'A_T)^{-1} A_T'A_D K^{-1}     T-block coupling
//
// Empty sets: D empty makes every gamma term 0 and the condition factor 1;
// T empty makes M = I and P an empty (zero-norm) matrix.

#include <optional>

#include "modbpdn/linalg.hpp"
#include "modbpdn/model.hpp"

namespace modbpdn {

/// Precomputed block quantities for one (A, T, D) triple. Every bound below
/// is a cheap function of these.
class BlockSystem {
 public:
  /// Throws SingularityError when A_T'A_T or K cannot be inverted. `a` must
  /// outlive the BlockSystem.
  BlockSystem(const SensingMatrix& a, const IndexSet& known, const IndexSet& unknown);

  const MatrixXd& known_gram_inverse() const { return known_gram_inv_; }  // (A_T'A_T)^{-1}
  const MatrixXd& projected_unknown() const { return projected_unknown_; }  // M A_D
  const MatrixXd& schur() const { return schur_; }                          // K
  const MatrixXd& schur_inverse() const { return schur_inv_; }              // K^{-1}
  const MatrixXd& coupling() const { return coupling_; }                    // P

  /// M v without forming M.
  VectorXd project(const VectorXd& v) const;

  /// max(||P||_inf, ||K^{-1}||_inf)
  double linf_coefficient() const;
  /// sqrt(||P||_2^2 + ||K^{-1}||_2^2)
  double l2_coefficient() const;

  /// 1 - max over columns w outside N_e of ||K^{-1} A_D' M A_w||_1.
  double condition_factor() const;

 private:
  const SensingMatrix* a_;
  IndexSet known_;
  IndexSet unknown_;
  MatrixXd known_cols_;
  MatrixXd known_gram_inv_;
  MatrixXd projected_unknown_;
  MatrixXd schur_;
  MatrixXd schur_inv_;
  MatrixXd coupling_;
};

struct BoundReport {
  double linfBound = 0.0;
  double l2Bound = 0.0;
  double conditionFactor = 0.0;
  double lhsCondition = 0.0;
  std::optional<double> gammaStar;
  bool applicable = false;
};

/// M = I - A_T (A_T'A_T)^{-1} A_T' as an explicit n x n matrix.
MatrixXd complement_projector(const SensingMatrix& a, const IndexSet& known);

/// gamma * max(||P||_inf, ||K^{-1}||_inf); ||b~ - c||_inf is at most this.
double linf_bound(const SensingMatrix& a, const IndexSet& known, const IndexSet& unknown,
                  double gamma);

/// linf_bound plus ||(A_{N_e}'A_{N_e})^{-1} A_{N_e}'||_inf * ||w||_inf.
double linf_bound_with_noise(const SensingMatrix& a, const SupportPartition& partition,
                             double gamma, double w_inf_norm);

/// ||(A_{N_e}'A_{N_e})^{-1} A_{N_e}'||_2 ||w||_2 + gamma sqrt(|D|) sqrt(||P||_2^2 + ||K^{-1}||_2^2).
double l2_bound(const SensingMatrix& a, const SupportPartition& partition, double gamma,
                double w2_norm);

/// ||(A_{N_e}'A_{N_e})^{-1} A_{N_e}'|| in the induced infinity and spectral norms.
struct PseudoInverseNorms {
  double inf = 0.0;
  double two = 0.0;
};
PseudoInverseNorms pseudo_inverse_norms(const SensingMatrix& a, const IndexSet& extended);

/// l2 bound in terms of restricted isometry / orthogonality constants:
///   gamma sqrt(|D|) sqrt(theta^2/(1-dT)^2 + 1) / (1 - dD - theta^2/(1-dT)) + ||w||_2/sqrt(1-dNe)
/// Throws NotApplicableError when a denominator is not positive.
double rip_l2_bound(double delta_known, double delta_unknown, double delta_extended, double theta,
                    Index size_unknown, double gamma, double w2_norm);

/// BPDN l2 bound gamma sqrt(|N|)/(1-dN) + ||w||_2/sqrt(1-dN).
double bpdn_l2_bound(double delta_support, Index size_support, double gamma, double w2_norm);

double condition_factor(const SensingMatrix& a, const SupportPartition& partition);

/// ||A'(y - A_{N_e} c_{N_e})||_inf with c the genie least-squares estimate.
double condition_lhs(const SensingMatrix& a, const VectorXd& y, const SupportPartition& partition);

/// Smallest gamma satisfying the global-uniqueness condition (as an infimum).
/// Throws NotApplicableError when the condition factor is not positive.
double gamma_star(const SensingMatrix& a, const VectorXd& y, const SupportPartition& partition);

/// True iff condition_lhs < gamma * condition_factor (strict).
bool check_global_condition(const SensingMatrix& a, const VectorXd& y,
                            const SupportPartition& partition, double gamma);

/// Everything above in one pass. When `gamma` is empty the report is
/// evaluated at gamma* (if applicable; otherwise bound fields stay 0).
BoundReport evaluate_bounds(const SensingMatrix& a, const VectorXd& y,
                            const SupportPartition& partition, std::optional<double> gamma,
                            double w_inf_norm, double w2_norm);

/// Limit on the number of subsets visited by exact_ric / exact_roc.
inline constexpr double kMaxEnumeration = 1e6;

/// Exact S-restricted isometry constant by enumerating all S-column subsets.
double exact_ric(const SensingMatrix& a, Index s);

/// Exact (S1, S2)-restricted orthogonality constant by enumerating all
/// disjoint subset pairs.
double exact_roc(const SensingMatrix& a, Index s1, Index s2);

}  // namespace modbpdn
