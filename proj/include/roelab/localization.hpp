#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "roelab/banded_operator.hpp"
#include "roelab/errors.hpp"
#include "roelab/metric_space.hpp"
#include "roelab/op_norm.hpp"

namespace roelab {

/// Constants for localizing a projection p near a propagation-s operator a.
struct LocalizationParams {
  double epsilon = 0.0;  // target defect: ||p xi|| >= 1 - epsilon
  double delta = 0.0;    // witness level: ||p zeta|| >= delta
  double s = 0.0;        // propagation of a
  double t = 0.0;        // diameter of supp zeta
  int k = 0;             // minimal k with (delta/2)^(1/k) > 1 - epsilon
  double gamma = 0.0;    // admissible ||p - a||
  double r = 0.0;        // 4 k s + t

  double ratio_threshold() const { return std::pow(delta / 2.0, 1.0 / k); }
};

namespace detail {

/// k g (1 + g)^(k-1): bound on ||p - a^k|| when ||p - a|| <= g and p is a projection.
inline double power_perturbation(int k, double g) { return k * g * std::pow(1.0 + g, k - 1); }

}  // namespace detail

inline LocalizationParams derive_params(double epsilon, double delta, double s, double t) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("derive_params: epsilon must lie in (0,1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("derive_params: delta must lie in (0,1]");
  if (!(s >= 0.0) || !(t >= 0.0)) throw DomainError("derive_params: s and t must be >= 0");

  LocalizationParams p{epsilon, delta, s, t, 0, 0.0, 0.0};
  const double half = delta / 2.0;
  int k = 1;
  // (delta/2)^(1/k) -> 1 as k grows, so the strict inequality is eventually met.
  while (!(std::pow(half, 1.0 / k) > 1.0 - epsilon)) {
    if (++k > 100'000'000) throw DomainError("derive_params: no admissible power count");
  }
  p.k = k;

  const double slack = std::pow(half, 1.0 / k) - 1.0 + epsilon;
  double lo = 0.0;
  double hi = half / k;  // k g (1+g)^(k-1) >= k g
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::power_perturbation(k, mid) <= half) lo = mid;
    else hi = mid;
  }
  p.gamma = 0.99 * std::min(slack, lo);
  p.r = 4.0 * k * s + t;
  return p;
}

struct LocalizationResult {
  Vector xi;
  IndexSet support;
  double diameter = 0.0;
  double defect = 0.0;           // 1 - ||p xi||
  int power_index = 0;           // j with xi = a^j zeta / ||a^j zeta||
  std::vector<double> power_norms;  // ||a^i zeta||, i = 0..k
  double bound_r = 0.0;          // 4 k s + t
  double chain_diameter = 0.0;   // 2 j s + t, the finer bound for this j

  bool guarantees_hold(const LocalizationParams& p) const {
    return 1.0 - defect >= 1.0 - p.epsilon && diameter <= p.r;
  }
};

/// Precondition measurements, exposed so callers can report which bound failed.
struct LocalizationChecks {
  double approximation = 0.0;  // ||p - a||
  double propagation = 0.0;    // prop(a)
  double witness_diameter = 0.0;
  double witness_level = 0.0;  // ||p zeta|| = ||p q||
  double zeta_norm = 0.0;
};

inline LocalizationChecks measure_localization_preconditions(const BandedOperator& p, const BandedOperator& a,
                                                              const Vector& zeta) {
  LocalizationChecks c;
  c.approximation = op_norm(p - a);
  c.propagation = propagation(a);
  c.zeta_norm = zeta.norm();
  c.witness_diameter = diameter(p.space(), vector_support(zeta, p.points(), p.fiber_dim()));
  c.witness_level = p.apply(zeta).norm();
  return c;
}

/// From a projection p, an approximant a with prop(a) <= s and ||p - a|| <= gamma,
/// and a unit witness zeta with ||p zeta|| >= delta and diam(supp zeta) <= t,
/// returns xi = a^j zeta / ||a^j zeta|| with ||p xi|| >= 1 - epsilon and
/// diam(supp xi) <= 4 k s + t.
///
/// j is the first index with ||a^{j+1} zeta|| >= (delta/2)^(1/k) ||a^j zeta||;
/// one exists because the ratios telescope to ||a^k zeta|| >= delta/2.
inline LocalizationResult localize(const BandedOperator& p, const BandedOperator& a, const Vector& zeta,
                                   const LocalizationParams& params) {
  if (!p.compatible(a)) throw DomainError("localize: p and a live on different spaces");
  if (zeta.size() != p.dim()) throw DomainError("localize: witness has wrong length");

  const LocalizationChecks c = measure_localization_preconditions(p, a, zeta);
  if (std::abs(c.zeta_norm - 1.0) > 1e-9) throw DomainError("localize: witness is not a unit vector");
  if (!(c.approximation <= params.gamma)) {
    throw DomainError("localize: ||p - a|| = " + std::to_string(c.approximation) + " exceeds gamma = " +
                      std::to_string(params.gamma));
  }
  if (!(c.propagation <= params.s)) {
    throw DomainError("localize: prop(a) = " + std::to_string(c.propagation) + " exceeds s = " + std::to_string(params.s));
  }
  if (!(c.witness_diameter <= params.t)) {
    throw DomainError("localize: diam(supp zeta) = " + std::to_string(c.witness_diameter) + " exceeds t = " +
                      std::to_string(params.t));
  }
  if (!(c.witness_level >= params.delta)) {
    throw DomainError("localize: ||p q|| = " + std::to_string(c.witness_level) + " is below delta = " +
                      std::to_string(params.delta));
  }

  const double threshold = params.ratio_threshold();
  LocalizationResult out;
  out.bound_r = params.r;
  std::vector<Vector> powers{zeta};
  out.power_norms.push_back(zeta.norm());
  int chosen = -1;
  for (int j = 0; j < params.k; ++j) {
    powers.push_back(a.apply(powers.back()));
    out.power_norms.push_back(powers.back().norm());
    if (chosen < 0 && out.power_norms[static_cast<std::size_t>(j) + 1] >= threshold * out.power_norms[static_cast<std::size_t>(j)]) {
      chosen = j;
    }
  }
  if (chosen < 0) {
    throw InvariantViolation("localize: no power index meets the telescoping ratio bound (||a^k zeta|| = " +
                             std::to_string(out.power_norms.back()) + ")");
  }
  const auto& w = powers[static_cast<std::size_t>(chosen)];
  out.power_index = chosen;
  out.xi = w / w.norm();
  out.support = vector_support(out.xi, p.points(), p.fiber_dim());
  out.diameter = diameter(p.space(), out.support);
  out.defect = 1.0 - p.apply(out.xi).norm();
  out.chain_diameter = 2.0 * chosen * params.s + params.t;
  return out;
}

/// t = 0 case: the witness is delta_x (tensored with a fiber vector when d > 1).
inline LocalizationResult localize_at_point(const BandedOperator& p, const BandedOperator& a, Point x,
                                            const LocalizationParams& params, const Vector& fiber = Vector()) {
  return localize(p, a, point_vector(p.points(), p.fiber_dim(), x, fiber), params);
}

}  // namespace roelab
