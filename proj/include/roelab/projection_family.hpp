#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roelab/banded_operator.hpp"
#include "roelab/errors.hpp"
#include "roelab/index_set.hpp"
#include "roelab/metric_space.hpp"
#include "roelab/op_norm.hpp"

namespace roelab {

inline constexpr double kProjectionTol = 1e-10;

/// ||m|| <= bound, using the Frobenius norm as a cheap sufficient test first.
template <class Derived>
bool norm_at_most(const Eigen::MatrixBase<Derived>& m, double bound) {
  if (m.norm() <= bound) return true;
  return op_norm(m) <= bound;
}

/// Mutually orthogonal projections p_1..p_N on l2(X, C^d).
///
/// Each member is held through an orthonormal basis V_n of its range
/// (p_n = V_n V_n^*), so families of N rank-one projections on hundreds of
/// points stay small. Orthonormality of every V_n and orthogonality of distinct
/// ranges are checked at construction to kProjectionTol.
class ProjectionFamily {
 public:
  static ProjectionFamily from_ranges(SpacePtr space, std::size_t d, std::vector<Matrix> ranges) {
    return ProjectionFamily(std::move(space), d, std::move(ranges));
  }

  /// Members given as operators; each must be a self-adjoint idempotent to kProjectionTol.
  static ProjectionFamily from_operators(const std::vector<BandedOperator>& ops) {
    if (ops.empty()) throw DomainError("ProjectionFamily: no members");
    std::vector<Matrix> ranges;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const auto& p = ops[i];
      if (!p.compatible(ops.front())) throw DomainError("ProjectionFamily: members live on different spaces");
      const Matrix& m = p.matrix();
      if (!norm_at_most(m - m.adjoint(), kProjectionTol)) {
        throw DomainError("ProjectionFamily: member " + std::to_string(i) + " is not self-adjoint");
      }
      if (!norm_at_most(m * m - m, kProjectionTol)) {
        throw DomainError("ProjectionFamily: member " + std::to_string(i) + " is not idempotent");
      }
      Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.adjoint()));
      std::vector<Eigen::Index> cols;
      for (Eigen::Index k = 0; k < m.rows(); ++k)
        if (eig.eigenvalues()(k) > 0.5) cols.push_back(k);
      ranges.push_back(eig.eigenvectors()(Eigen::all, cols));
    }
    return ProjectionFamily(ops.front().space_ptr(), ops.front().fiber_dim(), std::move(ranges));
  }

  /// Members spanned by consecutive groups of `group` columns of an isometry w.
  /// With w = u and group = d this is {u (chi_x (x) 1_d) u^*}; with group = 1 and
  /// w = u (1 (x) xi) it is {u (chi_x (x) p_xi) u^*}.
  static ProjectionFamily from_column_groups(SpacePtr space, std::size_t d, const Matrix& w, std::size_t group) {
    if (group == 0 || static_cast<std::size_t>(w.cols()) % group != 0) {
      throw DomainError("ProjectionFamily: column count not divisible by group size");
    }
    std::vector<Matrix> ranges;
    const auto g = static_cast<Eigen::Index>(group);
    for (Eigen::Index c = 0; c < w.cols(); c += g) ranges.push_back(w.middleCols(c, g));
    return ProjectionFamily(std::move(space), d, std::move(ranges));
  }

  std::size_t size() const noexcept { return ranges_.size(); }
  const MetricSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  std::size_t fiber_dim() const noexcept { return d_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(space_->size() * d_); }
  const Matrix& range(std::size_t i) const { return ranges_.at(i); }

  BandedOperator member(std::size_t i) const {
    const Matrix& v = ranges_.at(i);
    return BandedOperator(space_, d_, v * v.adjoint());
  }

  /// p_A = sum_{n in A} p_n.
  BandedOperator subset_sum(const IndexSet& A) const {
    if (A.universe() != size()) throw DomainError("subset_sum: index set universe mismatch");
    Matrix m = Matrix::Zero(dim(), dim());
    for (std::size_t n : A) m.noalias() += ranges_[n] * ranges_[n].adjoint();
    return BandedOperator(space_, d_, std::move(m));
  }

  /// ||p_n v|| = ||V_n^* v||.
  double member_norm(std::size_t n, const Vector& v) const { return (ranges_.at(n).adjoint() * v).norm(); }

  /// ||sum_n p_n - 1||.
  double identity_defect() const {
    Matrix all(dim(), total_rank());
    Eigen::Index c = 0;
    for (const auto& v : ranges_) {
      all.middleCols(c, v.cols()) = v;
      c += v.cols();
    }
    const Matrix defect = all * all.adjoint() - Matrix::Identity(dim(), dim());
    if (defect.norm() <= 1e-12) return defect.norm();
    return op_norm(defect);
  }

  Eigen::Index total_rank() const {
    Eigen::Index r = 0;
    for (const auto& v : ranges_) r += v.cols();
    return r;
  }

 private:
  ProjectionFamily(SpacePtr space, std::size_t d, std::vector<Matrix> ranges)
      : space_(std::move(space)), d_(d), ranges_(std::move(ranges)) {
    if (!space_) throw DomainError("ProjectionFamily: null space");
    if (d_ == 0) throw DomainError("ProjectionFamily: fiber dimension must be >= 1");
    for (std::size_t i = 0; i < ranges_.size(); ++i) {
      const Matrix& v = ranges_[i];
      if (v.rows() != dim()) throw DomainError("ProjectionFamily: member " + std::to_string(i) + " has wrong length");
      const Matrix gram = v.adjoint() * v;
      if (!norm_at_most(gram - Matrix::Identity(v.cols(), v.cols()), kProjectionTol)) {
        throw DomainError("ProjectionFamily: member " + std::to_string(i) + " is not a projection within tolerance");
      }
    }
    for (std::size_t i = 0; i < ranges_.size(); ++i) {
      for (std::size_t j = i + 1; j < ranges_.size(); ++j) {
        if (ranges_[i].cols() == 0 || ranges_[j].cols() == 0) continue;
        const Matrix cross = ranges_[i].adjoint() * ranges_[j];
        if (!norm_at_most(cross, kProjectionTol)) {
          throw DomainError("ProjectionFamily: members " + std::to_string(i) + " and " + std::to_string(j) +
                            " are not orthogonal");
        }
      }
    }
  }

  SpacePtr space_;
  std::size_t d_;
  std::vector<Matrix> ranges_;
};

/// Majorant K_xy >= sum_n ||(p_n)_xy||, with K = C C^T and C_xn = ||V_n[x-block]||_F.
/// Exact when every member has rank one.
inline Eigen::MatrixXd family_block_majorant(const ProjectionFamily& ps) {
  const std::size_t n = ps.space().size();
  const auto d = static_cast<Eigen::Index>(ps.fiber_dim());
  Eigen::MatrixXd C(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ps.size()));
  for (std::size_t m = 0; m < ps.size(); ++m) {
    const Matrix& v = ps.range(m);
    for (std::size_t x = 0; x < n; ++x) {
      C(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(m)) =
          v.middleRows(static_cast<Eigen::Index>(x) * d, d).norm();
    }
  }
  return C * C.transpose();
}

namespace detail {

inline double schur_tail(const MetricSpace& X, const Eigen::MatrixXd& K, double r) {
  const std::size_t n = X.size();
  double rows = 0.0;
  double cols = 0.0;
  for (Point x = 0; x < n; ++x) {
    double rs = 0.0;
    double cs = 0.0;
    for (Point y = 0; y < n; ++y) {
      if (X.dist(x, y) > r) {
        rs += K(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
        cs += K(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
      }
    }
    rows = std::max(rows, rs);
    cols = std::max(cols, cs);
  }
  return std::max(rows, cols);
}

}  // namespace detail

/// Schur-test bound, uniform over all A, on ||p_A - truncate(p_A, r)||.
/// Every p_A is therefore (value)-r-approximable.
inline double family_tail_bound(const ProjectionFamily& ps, double r) {
  if (!(r >= 0.0)) throw DomainError("family_tail_bound: negative radius");
  return detail::schur_tail(ps.space(), family_block_majorant(ps), r);
}

/// (r, family_tail_bound(ps, r)) over all realized distances.
inline std::vector<std::pair<double, double>> family_tail_profile(const ProjectionFamily& ps) {
  const Eigen::MatrixXd K = family_block_majorant(ps);
  std::vector<std::pair<double, double>> out;
  for (double r : ps.space().realized_distances()) out.emplace_back(r, detail::schur_tail(ps.space(), K, r));
  return out;
}

/// Smallest realized radius whose family tail bound is <= epsilon.
inline std::optional<double> certify_radius(const ProjectionFamily& ps, double epsilon) {
  const Eigen::MatrixXd K = family_block_majorant(ps);
  for (double r : ps.space().realized_distances()) {
    if (detail::schur_tail(ps.space(), K, r) <= epsilon) return r;
  }
  return std::nullopt;
}

}  // namespace roelab
