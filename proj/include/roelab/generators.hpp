#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "roelab/banded_operator.hpp"
#include "roelab/coarse_map.hpp"
#include "roelab/metric_space.hpp"
#include "roelab/op_norm.hpp"
#include "roelab/projection_family.hpp"
#include "roelab/rigidity.hpp"
#include "roelab/vector_measure.hpp"

// Seeded random instances for tests, the acceptance suite and the CLI.
namespace roelab::random {

using Rng = std::mt19937_64;

inline Complex gaussian_complex(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gaussian_complex(rng);
  return m;
}

inline Vector unit_vector(Eigen::Index n, Rng& rng) {
  Vector v = gaussian_matrix(n, 1, rng).col(0);
  return v / v.norm();
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
inline Matrix haar_unitary(Eigen::Index n, Rng& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

/// Hermitian H with propagation <= s and operator norm exactly `norm`
/// (unless H vanishes).
inline BandedOperator banded_hermitian(SpacePtr space, std::size_t d, double s, double norm, Rng& rng) {
  const std::size_t n = space->size();
  const auto dd = static_cast<Eigen::Index>(d);
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(n * d), static_cast<Eigen::Index>(n * d));
  for (Point x = 0; x < n; ++x) {
    for (Point y = x; y < n; ++y) {
      if (space->dist(x, y) > s) continue;
      const Matrix b = gaussian_matrix(dd, dd, rng);
      h.block(static_cast<Eigen::Index>(x) * dd, static_cast<Eigen::Index>(y) * dd, dd, dd) = b;
      h.block(static_cast<Eigen::Index>(y) * dd, static_cast<Eigen::Index>(x) * dd, dd, dd) = b.adjoint();
    }
  }
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  const double current = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (current > 0) h *= norm / current;
  return BandedOperator(std::move(space), d, std::move(h));
}

/// exp(i H) for Hermitian H.
inline Matrix exp_i(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd lam = eig.eigenvalues();
  Vector phase(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) phase(k) = std::polar(1.0, lam(k));
  return eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
}

inline std::vector<Point> permutation(std::size_t n, Rng& rng) {
  std::vector<Point> p(n);
  std::iota(p.begin(), p.end(), Point{0});
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Family {v p_x v^*} of conjugated coordinate projections (d = 1) or
/// {v (chi_x (x) 1_d) v^*} for d > 1.
inline ProjectionFamily conjugated_coordinates(SpacePtr space, std::size_t d, const Matrix& v) {
  return ProjectionFamily::from_column_groups(std::move(space), d, v, d);
}

/// Unitary u = exp(iH) (w (x) 1_d) with w the permutation of a bijection f and
/// H banded Hermitian on the target with ||H|| = h_norm.
inline SpatialUnitary perturbed_bijection(const CoarseMap& f, std::size_t d, double s, double h_norm, Rng& rng) {
  const SpatialUnitary w = SpatialUnitary::from_bijection(f, d);
  const BandedOperator h = banded_hermitian(f.target_ptr(), d, s, h_norm, rng);
  return SpatialUnitary(f.source_ptr(), f.target_ptr(), d, exp_i(h.matrix()) * w.matrix());
}

/// m x n atoms with independent standard normal entries.
inline AtomicVectorMeasure gaussian_measure(std::size_t m, std::size_t n, NormKind norm, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = g(rng);
  return AtomicVectorMeasure(std::move(a), norm);
}

/// Weights uniform in [0,1]^n.
inline Eigen::VectorXd uniform_weights(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd t(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = u(rng);
  return t;
}

/// Orthogonal projection onto a random subspace of the given rank.
inline Matrix random_projection(Eigen::Index n, Eigen::Index rank, Rng& rng) {
  const Matrix q = haar_unitary(n, rng).leftCols(rank);
  return q * q.adjoint();
}

}  // namespace roelab::random
