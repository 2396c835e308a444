#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "roelab/errors.hpp"
#include "roelab/metric_space.hpp"

namespace roelab {

/// Total function between the point sets of two finite metric spaces.
class CoarseMap {
 public:
  CoarseMap(SpacePtr source, SpacePtr target, std::vector<Point> assignment)
      : source_(std::move(source)), target_(std::move(target)), assignment_(std::move(assignment)) {
    if (!source_ || !target_) throw DomainError("CoarseMap: null space");
    if (assignment_.size() != source_->size()) {
      throw DomainError("CoarseMap: assignment must be defined on every source point");
    }
    for (Point y : assignment_) target_->check_point(y);
  }

  static CoarseMap identity(const SpacePtr& space) {
    std::vector<Point> id(space->size());
    for (Point x = 0; x < id.size(); ++x) id[x] = x;
    return CoarseMap(space, space, std::move(id));
  }

  const MetricSpace& source() const noexcept { return *source_; }
  const MetricSpace& target() const noexcept { return *target_; }
  const SpacePtr& source_ptr() const noexcept { return source_; }
  const SpacePtr& target_ptr() const noexcept { return target_; }
  const std::vector<Point>& assignment() const noexcept { return assignment_; }

  Point operator()(Point x) const {
    source_->check_point(x);
    return assignment_[x];
  }

 private:
  SpacePtr source_;
  SpacePtr target_;
  std::vector<Point> assignment_;
};

/// omega_f(r) = max{ d_Y(f x, f x') : d_X(x, x') <= r }.
inline double expansion_modulus(const CoarseMap& f, double r) {
  if (!(r >= 0.0)) throw DomainError("expansion_modulus: negative radius");
  const auto& X = f.source();
  const auto& Y = f.target();
  const auto& a = f.assignment();
  double best = 0.0;
  for (Point x = 0; x < X.size(); ++x) {
    for (Point x2 = x + 1; x2 < X.size(); ++x2) {
      if (X.dist(x, x2) <= r) best = std::max(best, Y.dist(a[x], a[x2]));
    }
  }
  return best;
}

/// (r, omega_f(r)) for every realized distance r of the source.
inline std::vector<std::pair<double, double>> expansion_table(const CoarseMap& f) {
  const auto& X = f.source();
  const auto& Y = f.target();
  const auto& a = f.assignment();
  const auto& radii = X.realized_distances();
  // One pass over pairs: bucket each pair's image distance by its source distance.
  std::vector<double> per_radius(radii.size(), 0.0);
  for (Point x = 0; x < X.size(); ++x) {
    for (Point x2 = x + 1; x2 < X.size(); ++x2) {
      const auto it = std::lower_bound(radii.begin(), radii.end(), X.dist(x, x2));
      auto& slot = per_radius[static_cast<std::size_t>(it - radii.begin())];
      slot = std::max(slot, Y.dist(a[x], a[x2]));
    }
  }
  std::vector<std::pair<double, double>> table;
  double running = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    running = std::max(running, per_radius[i]);
    table.emplace_back(radii[i], running);
  }
  return table;
}

/// max_x d_X(x, g(f(x))). Requires g : target(f) -> source(f).
inline double closeness_defect(const CoarseMap& f, const CoarseMap& g) {
  if (!same_space(f.target(), g.source()) || !same_space(g.target(), f.source())) {
    throw DomainError("closeness_defect: g must map target(f) back to source(f)");
  }
  double best = 0.0;
  for (Point x = 0; x < f.source().size(); ++x) {
    best = std::max(best, f.source().dist(x, g.assignment()[f.assignment()[x]]));
  }
  return best;
}

}  // namespace roelab
