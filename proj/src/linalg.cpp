#include "modbpdn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "modbpdn/errors.hpp"

namespace modbpdn {

MatrixXd columns(const MatrixXd& a, const IndexSet& set) {
  MatrixXd out(a.rows(), static_cast<Index>(set.size()));
  for (std::size_t j = 0; j < set.size(); ++j) out.col(static_cast<Index>(j)) = a.col(set[j]);
  return out;
}

VectorXd gather(const VectorXd& v, const IndexSet& set) {
  VectorXd out(static_cast<Index>(set.size()));
  for (std::size_t j = 0; j < set.size(); ++j) out(static_cast<Index>(j)) = v(set[j]);
  return out;
}

VectorXd scatter(const VectorXd& values, const IndexSet& set, Index size) {
  VectorXd out = VectorXd::Zero(size);
  for (std::size_t j = 0; j < set.size(); ++j) out(set[j]) = values(static_cast<Index>(j));
  return out;
}

IndexSet complement(const IndexSet& set, Index size) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(size) - std::min<std::size_t>(set.size(), size));
  auto it = set.begin();
  for (Index i = 0; i < size; ++i) {
    if (it != set.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

double norm_inf(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double norm_1(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

double spectral_norm(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const MatrixXd gram = a.rows() <= a.cols() ? MatrixXd(a * a.transpose())
                                             : MatrixXd(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double squared_norm_power(const MatrixXd& a, double rel_tol, int max_iters) {
  if (a.size() == 0) return 0.0;
  // Fixed, non-symmetric start so the result does not depend on any RNG.
  VectorXd v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    VectorXd w = a.transpose() * (a * v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

MatrixXd spd_inverse(const MatrixXd& gram, const char* what) {
  if (gram.size() == 0) return MatrixXd(0, 0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
  const VectorXd& lambda = es.eigenvalues();
  const double lo = lambda.minCoeff();
  const double hi = lambda.maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw SingularityError(std::string(what) + " is singular or ill-conditioned (eigenvalues in [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "])");
  }
  const MatrixXd& v = es.eigenvectors();
  return v * lambda.cwiseInverse().asDiagonal() * v.transpose();
}

EigenRange eigen_range(const MatrixXd& symmetric) {
  if (symmetric.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace modbpdn
