#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "roelab/banded_operator.hpp"
#include "roelab/errors.hpp"
#include "roelab/index_set.hpp"
#include "roelab/metric_space.hpp"
#include "roelab/op_norm.hpp"

namespace roelab {

enum class CertificateKind { truncation_upper, separated_lower, schur_family };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::truncation_upper: return "truncation_upper";
    case CertificateKind::separated_lower: return "separated_lower";
    case CertificateKind::schur_family: return "schur_family";
  }
  return "?";
}

/// Numeric evidence about the distance from an operator to the propagation-<=r operators.
/// Upper-bound kinds witness epsilon-r-approximability when value <= epsilon.
struct ApproximabilityCertificate {
  double epsilon = 0.0;
  double r = 0.0;
  CertificateKind kind = CertificateKind::truncation_upper;
  double value = 0.0;

  bool witnesses() const noexcept { return kind != CertificateKind::separated_lower && value <= epsilon; }
};

/// value = ||a - truncate(a, r)||.
inline ApproximabilityCertificate truncation_certificate(const BandedOperator& a, double epsilon, double r,
                                                         const OpNormOptions& opt = {}) {
  if (!(epsilon >= 0.0)) throw DomainError("truncation_certificate: epsilon must be >= 0");
  const BandedOperator tail = a - truncate(a, r);
  return {epsilon, r, CertificateKind::truncation_upper, op_norm(tail, opt)};
}

struct SeparatedWitness {
  double value = 0.0;
  Point center = 0;
  double radius = 0.0;  // A = ball(center, radius)
  bool transposed = false;  // true when the maximum came from chi_B a chi_A
};

/// Lower bound on inf{ ||a - b|| : prop(b) <= r }.
///
/// For every center x and realized radius s, A = B_s(x) and B = {y : d(y, A) > r}
/// are r-separated, so chi_A b chi_B = 0 for every b of propagation <= r and
/// ||chi_A a chi_B|| <= ||a - b||. Both orientations are tried.
inline SeparatedWitness separated_lower_witness(const BandedOperator& a, double r, const OpNormOptions& opt = {}) {
  if (!(r >= 0.0)) throw DomainError("separated_lower_bound: negative radius");
  const auto& X = a.space();
  const std::size_t n = X.size();
  const std::size_t d = a.fiber_dim();
  SeparatedWitness best;
  for (Point x = 0; x < n; ++x) {
    for (double s : X.realized_distances()) {
      const IndexSet A = ball(X, x, s);
      std::vector<Point> far;
      for (Point y = 0; y < n; ++y)
        if (dist_to_set(X, y, A) > r) far.push_back(y);
      if (far.empty()) break;
      const IndexSet B(n, std::move(far));
      const auto ia = fiber_indices(A, d);
      const auto ib = fiber_indices(B, d);
      const double ab = op_norm(a.matrix()(ia, ib), opt);
      const double ba = op_norm(a.matrix()(ib, ia), opt);
      if (ab > best.value) best = {ab, x, s, false};
      if (ba > best.value) best = {ba, x, s, true};
    }
  }
  return best;
}

inline double separated_lower_bound(const BandedOperator& a, double r, const OpNormOptions& opt = {}) {
  return separated_lower_witness(a, r, opt).value;
}

inline ApproximabilityCertificate separated_certificate(const BandedOperator& a, double epsilon, double r,
                                                        const OpNormOptions& opt = {}) {
  return {epsilon, r, CertificateKind::separated_lower, separated_lower_bound(a, r, opt)};
}

/// ||chi_A a chi_B|| for explicit sets; a is epsilon-r-quasi-local iff this is
/// < epsilon for every r-separated pair.
inline double corner_norm(const BandedOperator& a, const IndexSet& rows, const IndexSet& cols,
                          const OpNormOptions& opt = {}) {
  const auto ir = fiber_indices(rows, a.fiber_dim());
  const auto ic = fiber_indices(cols, a.fiber_dim());
  return op_norm(a.matrix()(ir, ic), opt);
}

/// Ghost profile along an increasing exhaustion E_1 <= E_2 <= ...:
/// entry k is max{ ||a_xy|| : x not in E_k or y not in E_k } (0 when E_k is everything).
inline std::vector<double> ghost_profile(const BandedOperator& a, const std::vector<IndexSet>& exhaustion) {
  const std::size_t n = a.points();
  for (std::size_t k = 0; k < exhaustion.size(); ++k) {
    if (exhaustion[k].universe() != n) throw DomainError("ghost_profile: exhaustion set has wrong universe");
    if (k > 0 && !exhaustion[k - 1].is_subset_of(exhaustion[k])) {
      throw DomainError("ghost_profile: exhaustion is not increasing at stage " + std::to_string(k));
    }
  }
  Eigen::MatrixXd norms(n, n);
  for (Point x = 0; x < n; ++x)
    for (Point y = 0; y < n; ++y) norms(x, y) = block_norm(a, x, y);

  std::vector<double> profile;
  profile.reserve(exhaustion.size());
  for (const auto& E : exhaustion) {
    double best = 0.0;
    for (Point x = 0; x < n; ++x) {
      const bool x_out = !E.contains(x);
      for (Point y = 0; y < n; ++y) {
        if (x_out || !E.contains(y)) best = std::max(best, norms(x, y));
      }
    }
    profile.push_back(best);
  }
  return profile;
}

/// Balls B_0(c) <= B_1(c) <= ... over the realized distances from c, ending at X.
inline std::vector<IndexSet> ball_exhaustion(const MetricSpace& space, Point center) {
  std::vector<double> radii;
  for (Point y = 0; y < space.size(); ++y) radii.push_back(space.dist(center, y));
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  std::vector<IndexSet> out;
  for (double r : radii) out.push_back(ball(space, center, r));
  return out;
}

}  // namespace roelab
