#pragma once

// Modified basis pursuit denoising:
//
//   minimize  L(b) = 1/2 ||y - A b||_2^2 + gamma ||b restricted to T^c||_1
//
// solved by accelerated proximal gradient with function-value restart. The
// proximal map is the identity on coordinates in T and soft thresholding by
// gamma * step elsewhere.

#include <vector>

#include "modbpdn/linalg.hpp"
#include "modbpdn/model.hpp"

namespace modbpdn {

struct SolverOptions {
  int maxIters = 50000;
  /// Stop once ||b_k - b_{k-1}|| <= relTol * ||b_k||.
  double relTol = 1e-10;
  /// Converged when the optimality residual is at most this.
  double kktTol = 1e-6;
  /// After the iterations, re-solve the optimality system on the detected
  /// support with fixed signs and keep the result if it is at least as good.
  bool polish = true;
  /// Record L(b) at every accepted iterate in SolverResult::history.
  bool recordHistory = false;

  void validate() const;
};

struct SolverResult {
  VectorXd bHat;
  int iters = 0;
  double objective = 0.0;
  double kktResidual = 0.0;
  bool converged = false;
  std::vector<double> history;
};

/// L(b) for the given known set.
double modified_bpdn_objective(const MatrixXd& a, const VectorXd& y, const IndexSet& known,
                               double gamma, const VectorXd& b);

/// Default zero threshold for a solution: 1e-7 * ||b||_inf, floored at 1e-12.
double default_zero_tol(const VectorXd& b);

/// Largest violation of the optimality system of L at `b`, with g = A'(Ab - y):
///   |g_i|                          for i in T
///   |g_i + gamma sign(b_i)|        for i in T^c, |b_i| > zeroTol
///   max(0, |g_i| - gamma)          for i in T^c, |b_i| <= zeroTol
double kkt_residual(const MatrixXd& a, const VectorXd& y, const IndexSet& known, double gamma,
                    const VectorXd& b, double zero_tol);

/// Global minimizer of L over R^m. Throws ArgumentError for gamma < 0 or bad
/// dimensions. Non-convergence is reported through `converged`.
SolverResult solve_modified_bpdn(const SensingMatrix& a, const VectorXd& y, const IndexSet& known,
                                 double gamma, const SolverOptions& opts = {});

/// Minimizer of L over vectors supported on N_e, computed on the extracted
/// column block A_{N_e}. The result is zero outside N_e and its KKT residual
/// refers to the restricted problem. Throws SingularityError when A_{N_e} is
/// rank deficient.
SolverResult solve_restricted(const SensingMatrix& a, const VectorXd& y,
                              const SupportPartition& partition, double gamma,
                              const SolverOptions& opts = {});

/// Least squares on the columns N_e, zero elsewhere. Throws SingularityError
/// when A_{N_e} is rank deficient or too ill-conditioned.
VectorXd genie_ls(const SensingMatrix& a, const IndexSet& extended, const VectorXd& y);

}  // namespace modbpdn
