#include "modbpdn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modbpdn/errors.hpp"

namespace modbpdn {
namespace {

using Mask = std::vector<char>;

Mask penalized_mask(Index m, const IndexSet& known) {
  Mask pen(static_cast<std::size_t>(m), 1);
  for (Index i : known) {
    if (i < 0 || i >= m) throw ArgumentError("known set index out of range");
    pen[static_cast<std::size_t>(i)] = 0;
  }
  return pen;
}

double penalty(const Mask& pen, const VectorXd& b) {
  double s = 0.0;
  for (Index i = 0; i < b.size(); ++i) {
    if (pen[static_cast<std::size_t>(i)]) s += std::abs(b(i));
  }
  return s;
}

double kkt_from_gradient(const VectorXd& g, const Mask& pen, double gamma, const VectorXd& b,
                         double zero_tol) {
  double worst = 0.0;
  for (Index i = 0; i < b.size(); ++i) {
    double v;
    if (!pen[static_cast<std::size_t>(i)]) {
      v = std::abs(g(i));
    } else if (std::abs(b(i)) > zero_tol) {
      v = std::abs(g(i) + (b(i) > 0.0 ? gamma : -gamma));
    } else {
      v = std::max(0.0, std::abs(g(i)) - gamma);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double kkt_masked(const MatrixXd& a, const VectorXd& y, const Mask& pen, double gamma,
                  const VectorXd& b, double zero_tol) {
  const VectorXd g = a.transpose() * (a * b - y);
  return kkt_from_gradient(g, pen, gamma, b, zero_tol);
}

double objective_masked(const MatrixXd& a, const VectorXd& y, const Mask& pen, double gamma,
                        const VectorXd& b) {
  return 0.5 * (a * b - y).squaredNorm() + gamma * penalty(pen, b);
}

// Solves the optimality system on the current support with the current
// signs held fixed; drops coordinates whose sign flips and retries.
bool polish(const MatrixXd& a, const VectorXd& y, const Mask& pen, double gamma, VectorXd& b,
            double& objective, double& kkt) {
  const double zero_tol = default_zero_tol(b);
  IndexSet active;
  for (Index i = 0; i < b.size(); ++i) {
    if (!pen[static_cast<std::size_t>(i)] || std::abs(b(i)) > zero_tol) active.push_back(i);
  }
  VectorXd signs = b.cwiseSign();
  for (int round = 0; round < 5 && !active.empty(); ++round) {
    if (static_cast<Index>(active.size()) > a.rows()) return false;
    const MatrixXd block = columns(a, active);
    VectorXd rhs = block.transpose() * y;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const auto i = static_cast<std::size_t>(active[j]);
      if (pen[i]) rhs(static_cast<Index>(j)) -= gamma * signs(active[j]);
    }
    Eigen::LLT<MatrixXd> llt(block.transpose() * block);
    if (llt.info() != Eigen::Success) return false;
    const VectorXd z = llt.solve(rhs);
    IndexSet kept;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const auto i = static_cast<std::size_t>(active[j]);
      if (!pen[i] || z(static_cast<Index>(j)) * signs(active[j]) > 0.0) kept.push_back(active[j]);
    }
    if (kept.size() != active.size()) {
      active = std::move(kept);
      continue;
    }
    const VectorXd candidate = scatter(z, active, b.size());
    const double cand_obj = objective_masked(a, y, pen, gamma, candidate);
    const double cand_kkt = kkt_masked(a, y, pen, gamma, candidate, default_zero_tol(candidate));
    if (cand_kkt < kkt && cand_obj <= objective + 1e-13 * std::max(1.0, std::abs(objective))) {
      b = candidate;
      objective = std::min(objective, cand_obj);
      kkt = cand_kkt;
      return true;
    }
    return false;
  }
  return false;
}

SolverResult accelerated_prox_grad(const MatrixXd& a, const VectorXd& y, const Mask& pen,
                                   double gamma, const SolverOptions& opts) {
  constexpr int kCheckEvery = 10;
  const Index m = a.cols();
  double lipschitz = squared_norm_power(a);
  if (!(lipschitz > 0.0)) lipschitz = 1.0;
  const double step = 1.0 / lipschitz;
  const double thresh = gamma * step;

  auto prox = [&](VectorXd& v) {
    for (Index i = 0; i < m; ++i) {
      if (!pen[static_cast<std::size_t>(i)]) continue;
      const double u = v(i);
      v(i) = u > thresh ? u - thresh : (u < -thresh ? u + thresh : 0.0);
    }
  };
  auto objective = [&](const VectorXd& b, const VectorXd& ab) {
    return 0.5 * (ab - y).squaredNorm() + gamma * penalty(pen, b);
  };

  SolverResult res;
  VectorXd x = VectorXd::Zero(m);
  VectorXd ax = VectorXd::Zero(a.rows());
  VectorXd z = x;
  VectorXd az = ax;
  double t = 1.0;
  double fx = objective(x, ax);
  bool z_is_x = true;
  double kkt = std::numeric_limits<double>::infinity();
  bool kkt_current = false;
  if (opts.recordHistory) res.history.push_back(fx);

  int k = 0;
  while (k < opts.maxIters) {
    ++k;
    VectorXd xn = z - step * (a.transpose() * (az - y));
    prox(xn);
    VectorXd axn = a * xn;
    const double fn = objective(xn, axn);
    if (fn > fx) {
      // A proximal step from the last accepted iterate that still increases
      // L means we are at the rounding floor.
      if (z_is_x) break;
      z = x;
      az = ax;
      t = 1.0;
      z_is_x = true;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tn;
    const double diff = (xn - x).norm();
    const double rel = diff / std::max(xn.norm(), std::numeric_limits<double>::min());
    z = xn + beta * (xn - x);
    az = axn + beta * (axn - ax);
    z_is_x = beta == 0.0;
    x = std::move(xn);
    ax = std::move(axn);
    fx = fn;
    t = tn;
    kkt_current = false;
    if (opts.recordHistory) res.history.push_back(fx);

    if (rel <= opts.relTol || k % kCheckEvery == 0) {
      const VectorXd g = a.transpose() * (ax - y);
      kkt = kkt_from_gradient(g, pen, gamma, x, default_zero_tol(x));
      kkt_current = true;
      if (kkt <= opts.kktTol || rel <= opts.relTol) break;
    }
  }
  if (!kkt_current) kkt = kkt_masked(a, y, pen, gamma, x, default_zero_tol(x));

  if (opts.polish && kkt > 0.0 && polish(a, y, pen, gamma, x, fx, kkt)) {
    if (opts.recordHistory) res.history.push_back(fx);
  }

  res.bHat = std::move(x);
  res.iters = k;
  res.objective = objective_masked(a, y, pen, gamma, res.bHat);
  res.kktResidual = kkt;
  res.converged = kkt <= opts.kktTol;
  return res;
}

void check_inputs(const SensingMatrix& a, const VectorXd& y, double gamma,
                  const SolverOptions& opts) {
  opts.validate();
  if (!(gamma >= 0.0)) throw ArgumentError("penalty weight gamma must be non-negative");
  if (y.size() != a.n()) throw ArgumentError("measurement length does not match A");
}

}  // namespace

void SolverOptions::validate() const {
  if (maxIters < 1) throw ArgumentError("SolverOptions: maxIters must be >= 1");
  if (!(relTol > 0.0)) throw ArgumentError("SolverOptions: relTol must be positive");
  if (!(kktTol > 0.0)) throw ArgumentError("SolverOptions: kktTol must be positive");
}

double default_zero_tol(const VectorXd& b) {
  const double scale = b.size() == 0 ? 0.0 : b.cwiseAbs().maxCoeff();
  return std::max(1e-7 * scale, 1e-12);
}

double modified_bpdn_objective(const MatrixXd& a, const VectorXd& y, const IndexSet& known,
                               double gamma, const VectorXd& b) {
  return objective_masked(a, y, penalized_mask(a.cols(), known), gamma, b);
}

double kkt_residual(const MatrixXd& a, const VectorXd& y, const IndexSet& known, double gamma,
                    const VectorXd& b, double zero_tol) {
  return kkt_masked(a, y, penalized_mask(a.cols(), known), gamma, b, zero_tol);
}

SolverResult solve_modified_bpdn(const SensingMatrix& a, const VectorXd& y, const IndexSet& known,
                                 double gamma, const SolverOptions& opts) {
  check_inputs(a, y, gamma, opts);
  return accelerated_prox_grad(a.entries(), y, penalized_mask(a.m(), known), gamma, opts);
}

SolverResult solve_restricted(const SensingMatrix& a, const VectorXd& y,
                              const SupportPartition& partition, double gamma,
                              const SolverOptions& opts) {
  check_inputs(a, y, gamma, opts);
  if (partition.m() != a.m()) throw ArgumentError("partition size does not match A");
  const IndexSet& ext = partition.extended();
  const MatrixXd block = columns(a.entries(), ext);
  const EigenRange range = eigen_range(block.transpose() * block);
  if (!ext.empty() && (!(range.min > 0.0) || range.max / range.min > kMaxCondition)) {
    throw SingularityError("solve_restricted: A restricted to N_e is rank deficient");
  }
  // Within N_e the penalized coordinates are exactly Delta.
  Mask pen(ext.size(), 0);
  for (std::size_t j = 0; j < ext.size(); ++j) {
    pen[j] = std::binary_search(partition.unknown().begin(), partition.unknown().end(), ext[j]);
  }
  SolverResult res = accelerated_prox_grad(block, y, pen, gamma, opts);
  res.bHat = scatter(res.bHat, ext, a.m());
  return res;
}

VectorXd genie_ls(const SensingMatrix& a, const IndexSet& extended, const VectorXd& y) {
  if (y.size() != a.n()) throw ArgumentError("genie_ls: measurement length does not match A");
  if (extended.empty()) return VectorXd::Zero(a.m());
  const MatrixXd block = columns(a.entries(), extended);
  const EigenRange range = eigen_range(block.transpose() * block);
  if (!(range.min > 0.0) || range.max / range.min > kMaxCondition) {
    throw SingularityError("genie_ls: A restricted to N_e is rank deficient (" +
                           std::to_string(extended.size()) + " columns)");
  }
  const VectorXd coef = block.colPivHouseholderQr().solve(y);
  return scatter(coef, extended, a.m());
}

}  // namespace modbpdn
