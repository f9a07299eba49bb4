#pragma once

// Dense helpers shared by the solver and the bound computations.

#include <vector>

#include <Eigen/Dense>

namespace modbpdn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Sorted, duplicate-free, 0-based column indices.
using IndexSet = std::vector<Index>;

/// Matrices whose condition number exceeds this are treated as singular.
inline constexpr double kMaxCondition = 1e12;

/// Columns of `a` listed in `set`, in order.
MatrixXd columns(const MatrixXd& a, const IndexSet& set);

/// Entries of `v` listed in `set`, in order.
VectorXd gather(const VectorXd& v, const IndexSet& set);

/// Length-`size` vector, zero except `values` placed at `set`.
VectorXd scatter(const VectorXd& values, const IndexSet& set, Index size);

/// Sorted complement of `set` within [0, size).
IndexSet complement(const IndexSet& set, Index size);

IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);

/// Induced infinity norm: max absolute row sum.
double norm_inf(const MatrixXd& a);

/// Induced 1-norm: max absolute column sum.
double norm_1(const MatrixXd& a);

/// Spectral norm from a full symmetric eigensolve of the smaller Gram matrix.
/// Zero for empty matrices.
double spectral_norm(const MatrixXd& a);

/// Largest eigenvalue of A'A (squared spectral norm) by power iteration,
/// iterated until successive estimates agree to `rel_tol`.
double squared_norm_power(const MatrixXd& a, double rel_tol = 1e-10,
                          int max_iters = 10000);

/// Inverse of a symmetric positive definite matrix through its
/// eigendecomposition. Throws SingularityError when the smallest eigenvalue
/// is not positive or the condition number exceeds kMaxCondition. `what`
/// names the matrix in the error message.
MatrixXd spd_inverse(const MatrixXd& gram, const char* what);

/// Smallest and largest eigenvalue of a symmetric matrix.
struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};
EigenRange eigen_range(const MatrixXd& symmetric);

}  // namespace modbpdn
