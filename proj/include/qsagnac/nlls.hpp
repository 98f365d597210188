#pragma once

// Damped Gauss-Newton (Levenberg-Marquardt) least squares.
//
// A problem is any callable
//   void(const Eigen::VectorXd& x, Eigen::VectorXd& residuals,
//        Eigen::MatrixXd* jacobian)
// that fills the (already weighted) residual vector and, when `jacobian` is
// non-null, its Jacobian d r / d x. The cost is ||r||^2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace qsagnac::analysis {

struct LmOptions {
  double lambda0 = 1e-3;
  double lambda_factor = 10.0;
  double relative_tolerance = 1e-12;
  int max_iterations = 200;
  double lambda_max = 1e16;
};

enum class LmStatus {
  Converged,
  MaxIterations,  // iteration budget exhausted
  Singular,       // normal equations could not be solved at the optimum
};

std::string to_string(LmStatus status);

struct LmResult {
  Eigen::VectorXd params;
  double cost = 0.0;
  int iterations = 0;
  LmStatus status = LmStatus::MaxIterations;
  // J^T J at the returned parameters (weighted residuals).
  Eigen::MatrixXd normal_matrix;

  bool converged() const { return status == LmStatus::Converged; }

  // (J^T J)^-1; empty when the normal matrix is singular.
  Eigen::MatrixXd covariance() const;
};

// Inverse of a symmetric positive semi-definite matrix after Jacobi scaling,
// so parameters of wildly different magnitude do not read as singular.
// Returns false when the scaled matrix is rank deficient.
inline bool scaled_inverse(const Eigen::MatrixXd& m, Eigen::MatrixXd* inverse) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(m(i, i) > 0.0) || !std::isfinite(m(i, i))) return false;
    d(i) = 1.0 / std::sqrt(m(i, i));
  }
  const Eigen::MatrixXd scaled = d.asDiagonal() * m * d.asDiagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
  if (!lu.isInvertible()) return false;
  if (inverse) *inverse = d.asDiagonal() * lu.inverse() * d.asDiagonal();
  return true;
}

template <class Problem>
LmResult levenberg_marquardt(Problem&& problem, Eigen::VectorXd x0,
                             const LmOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  LmResult out;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  problem(x0, r, &jac);
  double cost = r.squaredNorm();
  double lambda = opt.lambda0;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd r_new;

  out.status = LmStatus::MaxIterations;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (!std::isfinite(cost)) break;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (cost == 0.0 || grad.lpNorm<Eigen::Infinity>() == 0.0) {
      out.status = LmStatus::Converged;
      break;
    }

    bool accepted = false;
    bool stagnated = false;
    while (!accepted) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = jtj(i, i) > 0.0 ? jtj(i, i) : 1.0;
        damped(i, i) += lambda * d;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      Eigen::VectorXd step;
      if (ldlt.info() == Eigen::Success) step = -ldlt.solve(grad);
      if (step.size() == n && step.allFinite()) {
        const Eigen::VectorXd x_new = x + step;
        problem(x_new, r_new, nullptr);
        const double cost_new = r_new.squaredNorm();
        if (std::isfinite(cost_new) && cost_new < cost) {
          const double rel = (cost - cost_new) / cost;
          x = x_new;
          r = r_new;
          cost = cost_new;
          problem(x, r, &jac);
          lambda = std::max(lambda / opt.lambda_factor, 1e-15);
          accepted = true;
          if (rel < opt.relative_tolerance) stagnated = true;
          break;
        }
      }
      lambda *= opt.lambda_factor;
      if (lambda > opt.lambda_max) {
        // No descent direction left at working precision.
        stagnated = true;
        break;
      }
    }
    if (stagnated) {
      out.status = LmStatus::Converged;
      ++it;
      break;
    }
  }

  out.params = std::move(x);
  out.cost = cost;
  out.iterations = it;
  out.normal_matrix = jac.transpose() * jac;
  if (out.status == LmStatus::Converged) {
    if (!scaled_inverse(out.normal_matrix, nullptr))
      out.status = LmStatus::Singular;
  }
  return out;
}

}  // namespace qsagnac::analysis
