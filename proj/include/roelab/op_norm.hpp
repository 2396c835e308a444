#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "roelab/errors.hpp"

namespace roelab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform in [-1, 1), bit-identical on every platform.
inline double signed_unit(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
}

inline Vector seeded_start(Eigen::Index n, std::uint64_t seed) {
  Vector v(n);
  std::uint64_t state = seed;
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(signed_unit(state), signed_unit(state));
  return v.normalized();
}

}  // namespace detail

struct OpNormOptions {
  double tol = 1e-10;
  int max_iterations = 10000;
  std::uint64_t seed = 0x5eed0f0ddULL;
  int power_phase = 150;  // power steps before switching to the Krylov phase
};

namespace detail {

/// Lanczos on b = a^* a with full reorthogonalization, started from v.
/// Stops when the top Ritz pair residual beta_j |s_j| is <= tol * theta
/// (some eigenvalue of b lies within it) or the Krylov space is invariant.
/// Returns the top Ritz value, or nullopt within the step budget.
template <class Derived>
std::optional<double> lanczos_top(const Eigen::MatrixBase<Derived>& a, const Vector& v, double tol, int budget,
                                  double* last_theta) {
  const Eigen::Index n = a.cols();
  const Eigen::Index max_dim = std::min<Eigen::Index>(n, budget);
  Matrix q(n, max_dim);
  std::vector<double> alpha, beta;
  q.col(0) = v.normalized();
  double scale = 0.0;
  for (Eigen::Index j = 0; j < max_dim; ++j) {
    Vector w = a.adjoint() * (a * q.col(j));
    const double aj = q.col(j).dot(w).real();
    alpha.push_back(aj);
    w -= aj * q.col(j);
    if (j > 0) w -= beta.back() * q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(j + 1) * (q.leftCols(j + 1).adjoint() * w);
    const double bj = w.norm();

    const Eigen::Index m = j + 1;
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1)) : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> t;
    t.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double theta = t.eigenvalues()(m - 1);
    scale = std::max(scale, std::abs(theta));
    *last_theta = theta;
    const double residual = bj * std::abs(t.eigenvectors()(m - 1, m - 1));
    if (residual <= tol * theta || bj <= 64.0 * std::numeric_limits<double>::epsilon() * scale || m == n) return theta;
    if (j + 1 < max_dim) q.col(j + 1) = w / bj;
    beta.push_back(bj);
  }
  return std::nullopt;
}

}  // namespace detail

/// Largest singular value by power iteration on a^* a.
///
/// The Rayleigh quotient of a^* a increases monotonically toward sigma_max^2.
/// The power phase runs until the geometric tail estimate of the remaining
/// increase drops below tol (relative) or its step budget runs out; either way
/// the iterate then seeds a Lanczos continuation that stops on the Ritz
/// residual. The tail estimate alone is not trusted: with a near-degenerate top
/// pair the early steps decay fast and it undershoots. On failure throws
/// NumericError carrying [sqrt(best Rayleigh quotient), min(Frobenius, sqrt(|a|_1 |a|_inf))].
template <class Derived>
double op_norm(const Eigen::MatrixBase<Derived>& a, const OpNormOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw DomainError("op_norm: tolerance must be positive");
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const double fro = a.norm();
  if (fro == 0.0) return 0.0;

  Vector v = detail::seeded_start(a.cols(), opt.seed);
  double lambda_prev = 0.0;
  double step_prev = std::numeric_limits<double>::infinity();
  const int power_steps = std::min(opt.max_iterations, opt.power_phase);
  int used = 0;
  bool settled = false;
  for (int it = 0; it < power_steps && !settled; ++it, ++used) {
    const Vector w = a * v;
    const double lambda = w.squaredNorm();
    Vector z = a.adjoint() * w;
    const double nz = z.norm();
    if (nz == 0.0) {
      // v landed in the kernel; reseed deterministically.
      v = detail::seeded_start(a.cols(), opt.seed + static_cast<std::uint64_t>(it) + 1);
      continue;
    }
    v = z / nz;

    const double step = lambda - lambda_prev;
    lambda_prev = std::max(lambda_prev, lambda);
    if (it >= 1) {
      const double ratio = step_prev > 0.0 ? step / step_prev : 1.0;
      settled = step <= 4.0 * std::numeric_limits<double>::epsilon() * lambda ||
                (ratio < 1.0 && step <= opt.tol * lambda && step * ratio / (1.0 - ratio) <= opt.tol * lambda);
    }
    step_prev = step;
  }
  lambda_prev = std::max(lambda_prev, (a * v).squaredNorm());

  const int krylov_budget = opt.max_iterations - used;
  if (krylov_budget <= 0 && settled) return std::sqrt(lambda_prev);
  if (krylov_budget > 0) {
    double theta = lambda_prev;
    const auto top = detail::lanczos_top(a, v, opt.tol, krylov_budget, &theta);
    if (top) return std::sqrt(std::max(*top, lambda_prev));
    lambda_prev = std::max(lambda_prev, theta);
  }

  const double l1 = a.cwiseAbs().colwise().sum().maxCoeff();
  const double linf = a.cwiseAbs().rowwise().sum().maxCoeff();
  throw NumericError("op_norm: power iteration did not converge", std::sqrt(lambda_prev),
                     std::min(fro, std::sqrt(l1 * linf)));
}

/// Spectral norm of a small block (fiber-sized). Used for block magnitudes.
template <class Derived>
double block_norm(const Eigen::MatrixBase<Derived>& b) {
  if (b.rows() == 1 && b.cols() == 1) return std::abs(b(0, 0));
  if (b.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(b.eval());
  return svd.singularValues()(0);
}

}  // namespace roelab
