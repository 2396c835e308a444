#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "roelab/errors.hpp"
#include "roelab/index_set.hpp"
#include "roelab/metric_space.hpp"
#include "roelab/op_norm.hpp"

namespace roelab {

/// Operator on l2(X, C^d) stored densely as an (n d) x (n d) complex matrix,
/// viewed as n x n blocks a_xy of size d x d. Coordinate (x, i) has index x*d + i.
class BandedOperator {
 public:
  BandedOperator(SpacePtr space, std::size_t fiber_dim, Matrix entries)
      : space_(std::move(space)), fiber_(fiber_dim), m_(std::move(entries)) {
    if (!space_) throw DomainError("BandedOperator: null space");
    if (fiber_ == 0) throw DomainError("BandedOperator: fiber dimension must be >= 1");
    const auto dim = static_cast<Eigen::Index>(space_->size() * fiber_);
    if (m_.rows() != dim || m_.cols() != dim) {
      throw DomainError("BandedOperator: matrix is " + std::to_string(m_.rows()) + "x" +
                        std::to_string(m_.cols()) + ", expected " + std::to_string(dim) + " square");
    }
  }

  static BandedOperator zero(SpacePtr space, std::size_t d = 1) {
    const auto dim = static_cast<Eigen::Index>(space->size() * d);
    return BandedOperator(std::move(space), d, Matrix::Zero(dim, dim));
  }

  static BandedOperator identity(SpacePtr space, std::size_t d = 1) {
    const auto dim = static_cast<Eigen::Index>(space->size() * d);
    return BandedOperator(std::move(space), d, Matrix::Identity(dim, dim));
  }

  /// e_xy (tensored with 1_d when d > 1): sends delta_y to delta_x.
  static BandedOperator matrix_unit(SpacePtr space, Point x, Point y, std::size_t d = 1) {
    space->check_point(x);
    space->check_point(y);
    BandedOperator out = zero(std::move(space), d);
    out.block(x, y).setIdentity();
    return out;
  }

  /// chi_S tensored with 1_d.
  static BandedOperator indicator(SpacePtr space, const IndexSet& set, std::size_t d = 1) {
    if (set.universe() != space->size()) throw DomainError("indicator: set universe mismatch");
    BandedOperator out = zero(std::move(space), d);
    for (Point x : set) out.block(x, x).setIdentity();
    return out;
  }

  const MetricSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  std::size_t fiber_dim() const noexcept { return fiber_; }
  std::size_t points() const noexcept { return space_->size(); }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }

  Eigen::Block<const Matrix> block(Point x, Point y) const {
    const auto d = static_cast<Eigen::Index>(fiber_);
    return m_.block(static_cast<Eigen::Index>(x) * d, static_cast<Eigen::Index>(y) * d, d, d);
  }
  Eigen::Block<Matrix> block(Point x, Point y) {
    const auto d = static_cast<Eigen::Index>(fiber_);
    return m_.block(static_cast<Eigen::Index>(x) * d, static_cast<Eigen::Index>(y) * d, d, d);
  }

  bool compatible(const BandedOperator& o) const {
    return fiber_ == o.fiber_ && same_space(*space_, *o.space_);
  }

  BandedOperator adjoint() const { return BandedOperator(space_, fiber_, m_.adjoint()); }

  Vector apply(const Vector& v) const {
    if (v.size() != m_.cols()) throw DomainError("apply: vector length mismatch");
    return m_ * v;
  }

  BandedOperator& operator+=(const BandedOperator& o) {
    require_compatible(o, "add");
    m_ += o.m_;
    return *this;
  }
  BandedOperator& operator-=(const BandedOperator& o) {
    require_compatible(o, "subtract");
    m_ -= o.m_;
    return *this;
  }
  BandedOperator& operator*=(Complex s) {
    m_ *= s;
    return *this;
  }

  friend BandedOperator operator+(BandedOperator a, const BandedOperator& b) { return a += b; }
  friend BandedOperator operator-(BandedOperator a, const BandedOperator& b) { return a -= b; }
  friend BandedOperator operator*(Complex s, BandedOperator a) { return a *= s; }
  friend BandedOperator operator*(const BandedOperator& a, const BandedOperator& b) {
    a.require_compatible(b, "multiply");
    return BandedOperator(a.space_, a.fiber_, a.m_ * b.m_);
  }

 private:
  void require_compatible(const BandedOperator& o, const char* op) const {
    if (!compatible(o)) throw DomainError(std::string(op) + ": space or fiber mismatch");
  }

  SpacePtr space_;
  std::size_t fiber_;
  Matrix m_;
};

inline double block_norm(const BandedOperator& a, Point x, Point y) { return block_norm(a.block(x, y)); }

/// max{ d(x,y) : ||a_xy||_max > zero_tol }; 0 for the zero operator.
/// The default tolerance treats only exact zeros as zero.
inline double propagation(const BandedOperator& a, double zero_tol = 0.0) {
  const auto& X = a.space();
  const std::size_t n = a.points();
  double best = 0.0;
  for (Point x = 0; x < n; ++x) {
    for (Point y = 0; y < n; ++y) {
      const double dxy = X.dist(x, y);
      if (dxy <= best) continue;
      if (a.block(x, y).cwiseAbs().maxCoeff() > zero_tol) best = dxy;
    }
  }
  return best;
}

/// Keeps the blocks with d(x,y) <= r and zeroes the rest.
inline BandedOperator truncate(const BandedOperator& a, double r) {
  if (!(r >= 0.0)) throw DomainError("truncate: negative radius");
  BandedOperator out = a;
  const auto& X = a.space();
  for (Point x = 0; x < a.points(); ++x)
    for (Point y = 0; y < a.points(); ++y)
      if (X.dist(x, y) > r) out.block(x, y).setZero();
  return out;
}

inline double op_norm(const BandedOperator& a, const OpNormOptions& opt = {}) {
  return op_norm(a.matrix(), opt);
}

/// Rows/columns of the dense matrix belonging to the points of a set (all fiber coordinates).
inline std::vector<Eigen::Index> fiber_indices(const IndexSet& set, std::size_t d) {
  std::vector<Eigen::Index> idx;
  idx.reserve(set.size() * d);
  for (Point x : set)
    for (std::size_t i = 0; i < d; ++i) idx.push_back(static_cast<Eigen::Index>(x * d + i));
  return idx;
}

/// Support of a vector on l2(X, C^d): points whose fiber block has an entry
/// with magnitude > rel_tol * ||v||.
inline IndexSet vector_support(const Vector& v, std::size_t points, std::size_t d, double rel_tol = 1e-12) {
  if (static_cast<std::size_t>(v.size()) != points * d) throw DomainError("vector_support: length mismatch");
  const double cutoff = rel_tol * v.norm();
  std::vector<Point> out;
  for (Point x = 0; x < points; ++x) {
    const auto seg = v.segment(static_cast<Eigen::Index>(x * d), static_cast<Eigen::Index>(d));
    if (seg.cwiseAbs().maxCoeff() > cutoff) out.push_back(x);
  }
  return IndexSet(points, std::move(out));
}

/// delta_x tensored with a fiber vector (default: first basis vector).
inline Vector point_vector(std::size_t points, std::size_t d, Point x, const Vector& fiber = Vector()) {
  if (x >= points) throw DomainError("point_vector: unknown point");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(points * d));
  if (fiber.size() == 0) {
    v(static_cast<Eigen::Index>(x * d)) = 1.0;
  } else {
    if (static_cast<std::size_t>(fiber.size()) != d) throw DomainError("point_vector: fiber length mismatch");
    v.segment(static_cast<Eigen::Index>(x * d), static_cast<Eigen::Index>(d)) = fiber;
  }
  return v;
}

}  // namespace roelab
