#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "roelab/errors.hpp"

namespace roelab {

struct BoxLeastSquares {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;  // b - A x
  int iterations = 0;
};

/// Bounded-variable least squares, min ||A x - b||_2 subject to 0 <= x <= 1
/// (Stark & Parker active-set method; free subproblems solved in the
/// minimum-norm sense so rank-deficient free sets are handled).
///
/// At the returned point the KKT conditions hold: with w = A^T (b - A x),
/// w_i <= 0 where x_i = 0, w_i >= 0 where x_i = 1, w_i = 0 where 0 < x_i < 1.
inline BoxLeastSquares bounded_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index n = A.cols();
  if (b.size() != A.rows()) throw DomainError("bounded_least_squares: dimension mismatch");

  enum State : char { at_lower, at_upper, free_var };
  std::vector<State> state(static_cast<std::size_t>(n), at_lower);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());
  const double grad_tol = 1e-13 * scale * static_cast<double>(std::max<Eigen::Index>(1, A.rows()));
  const int max_outer = static_cast<int>(5 * n + 50);

  BoxLeastSquares out;
  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  for (int outer = 0; outer < max_outer; ++outer) {
    out.iterations = outer;
    const Eigen::VectorXd r = b - A * x;
    const Eigen::VectorXd w = A.transpose() * r;

    Eigen::Index enter = -1;
    double best = grad_tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (skip[static_cast<std::size_t>(i)]) continue;
      const State s = state[static_cast<std::size_t>(i)];
      const double gain = s == at_lower ? w(i) : (s == at_upper ? -w(i) : 0.0);
      if (gain > best) {
        best = gain;
        enter = i;
      }
    }
    if (enter < 0) {
      out.x = x;
      out.residual = r;
      return out;
    }
    std::fill(skip.begin(), skip.end(), 0);
    state[static_cast<std::size_t>(enter)] = free_var;

    for (int inner = 0; inner <= n + 1; ++inner) {
      std::vector<Eigen::Index> freeset;
      for (Eigen::Index i = 0; i < n; ++i)
        if (state[static_cast<std::size_t>(i)] == free_var) freeset.push_back(i);
      if (freeset.empty()) break;

      Eigen::VectorXd rhs = b;
      for (Eigen::Index i = 0; i < n; ++i)
        if (state[static_cast<std::size_t>(i)] == at_upper) rhs -= A.col(i);
      const Eigen::MatrixXd Af = A(Eigen::all, freeset);
      const Eigen::VectorXd z = Af.completeOrthogonalDecomposition().solve(rhs);

      bool inside = true;
      for (std::size_t k = 0; k < freeset.size(); ++k) {
        if (z(static_cast<Eigen::Index>(k)) < 0.0 || z(static_cast<Eigen::Index>(k)) > 1.0) inside = false;
      }
      if (inside) {
        for (std::size_t k = 0; k < freeset.size(); ++k) x(freeset[k]) = z(static_cast<Eigen::Index>(k));
        break;
      }

      double alpha = 1.0;
      for (std::size_t k = 0; k < freeset.size(); ++k) {
        const Eigen::Index i = freeset[k];
        const double zi = z(static_cast<Eigen::Index>(k));
        if (zi < 0.0) alpha = std::min(alpha, x(i) / (x(i) - zi));
        if (zi > 1.0) alpha = std::min(alpha, (1.0 - x(i)) / (zi - x(i)));
      }
      alpha = std::max(alpha, 0.0);
      bool moved_any = false;
      for (std::size_t k = 0; k < freeset.size(); ++k) {
        const Eigen::Index i = freeset[k];
        const double zi = z(static_cast<Eigen::Index>(k));
        x(i) += alpha * (zi - x(i));
        const bool hit_lower = zi < 0.0 && x(i) <= 1e-15;
        const bool hit_upper = zi > 1.0 && x(i) >= 1.0 - 1e-15;
        if (hit_lower || x(i) <= 0.0) {
          x(i) = 0.0;
          state[static_cast<std::size_t>(i)] = at_lower;
          moved_any = true;
        } else if (hit_upper || x(i) >= 1.0) {
          x(i) = 1.0;
          state[static_cast<std::size_t>(i)] = at_upper;
          moved_any = true;
        }
      }
      if (!moved_any) break;
      // The entering variable was blocked immediately: do not re-select it
      // until some other variable has entered.
      if (alpha == 0.0 && state[static_cast<std::size_t>(enter)] != free_var) skip[static_cast<std::size_t>(enter)] = 1;
    }
  }
  throw NumericError("bounded_least_squares: active-set iteration limit reached", 0.0, (b - A * x).norm());
}

}  // namespace roelab
