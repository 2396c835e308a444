#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <tuple>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roelab/bvls.hpp"
#include "roelab/errors.hpp"
#include "roelab/index_set.hpp"

namespace roelab {

enum class NormKind { l1, l2, linf };

inline const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::l1: return "l1";
    case NormKind::l2: return "l2";
    case NormKind::linf: return "linf";
  }
  return "?";
}

inline NormKind parse_norm_kind(const std::string& s) {
  if (s == "l1") return NormKind::l1;
  if (s == "l2") return NormKind::l2;
  if (s == "linf") return NormKind::linf;
  throw DomainError("unknown norm '" + s + "' (expected l1, l2 or linf)");
}

inline double vector_norm(const Eigen::VectorXd& v, NormKind k) {
  switch (k) {
    case NormKind::l1: return v.lpNorm<1>();
    case NormKind::l2: return v.norm();
    case NormKind::linf: return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
  }
  return 0.0;
}

/// mu(A) = sum_{i in A} atoms[i] in R^m. Atoms are the columns of an m x n matrix.
class AtomicVectorMeasure {
 public:
  explicit AtomicVectorMeasure(Eigen::MatrixXd atoms, NormKind norm = NormKind::l2)
      : atoms_(std::move(atoms)), norm_(norm) {
    if (atoms_.rows() == 0) throw DomainError("AtomicVectorMeasure: dimension m must be >= 1");
    if (!atoms_.allFinite()) throw DomainError("AtomicVectorMeasure: non-finite atom");
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(atoms_.rows()); }
  std::size_t atom_count() const noexcept { return static_cast<std::size_t>(atoms_.cols()); }
  NormKind norm_kind() const noexcept { return norm_; }
  const Eigen::MatrixXd& atoms() const noexcept { return atoms_; }
  auto atom(std::size_t i) const { return atoms_.col(static_cast<Eigen::Index>(i)); }

  double norm(const Eigen::VectorXd& v) const { return vector_norm(v, norm_); }

  Eigen::VectorXd measure(const IndexSet& A) const {
    if (A.universe() != atom_count()) throw DomainError("measure: index set universe mismatch");
    Eigen::VectorXd s = Eigen::VectorXd::Zero(atoms_.rows());
    for (std::size_t i : A) s += atom(i);
    return s;
  }

  Eigen::VectorXd total() const { return atoms_.rowwise().sum(); }

  Eigen::VectorXd weighted(const Eigen::VectorXd& t) const {
    if (static_cast<std::size_t>(t.size()) != atom_count()) throw DomainError("weighted: length mismatch");
    return atoms_ * t;
  }

  AtomicVectorMeasure restrict_to(const IndexSet& M) const {
    if (M.universe() != atom_count()) throw DomainError("restrict_to: index set universe mismatch");
    std::vector<Eigen::Index> cols(M.begin(), M.end());
    return AtomicVectorMeasure(atoms_(Eigen::all, cols), norm_);
  }

 private:
  Eigen::MatrixXd atoms_;
  NormKind norm_;
};

inline constexpr double kHullTol = 1e-9;
inline constexpr double kFractionalTol = 1e-9;

/// Tagged result of the zonotope membership test. When in_hull, weights t in
/// [0,1]^n reproduce v to kHullTol. Otherwise separator w satisfies
/// w.v - sum_i max(0, w.atom_i) = margin > 0, i.e. w.v exceeds the support
/// function of conv(range mu).
struct HullMembership {
  bool in_hull = false;
  Eigen::VectorXd weights;
  double residual = 0.0;
  Eigen::VectorXd separator;
  double margin = 0.0;
};

/// conv(range mu) = { sum t_i atom_i : t in [0,1]^n } (a zonotope). Solved as a
/// box-constrained least-squares problem whose optimality residual doubles as
/// the dual certificate.
inline HullMembership hull_membership(const AtomicVectorMeasure& mu, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != mu.dim()) throw DomainError("hull_membership: target dimension mismatch");
  HullMembership out;
  if (mu.atom_count() == 0) {
    out.weights = Eigen::VectorXd();
    out.residual = v.norm();
    out.in_hull = out.residual <= kHullTol;
    if (!out.in_hull) {
      out.separator = v;
      out.margin = v.squaredNorm();
    }
    return out;
  }
  const BoxLeastSquares ls = bounded_least_squares(mu.atoms(), v);
  out.weights = ls.x;
  out.residual = (mu.weighted(ls.x) - v).norm();
  if (out.residual <= kHullTol) {
    out.in_hull = true;
    return out;
  }
  out.separator = v - mu.weighted(ls.x);
  const Eigen::VectorXd scores = mu.atoms().transpose() * out.separator;
  out.margin = out.separator.dot(v) - scores.cwiseMax(0.0).sum();
  if (!(out.margin > 0.0)) {
    throw NumericError("hull_membership: optimum residual does not separate", 0.0, out.residual);
  }
  return out;
}

/// Thrown by the rounding operations when the target lies outside the hull.
class NotInHull : public std::runtime_error {
 public:
  explicit NotInHull(HullMembership witness)
      : std::runtime_error("target is not in the convex hull of the range"), witness_(std::move(witness)) {}
  const HullMembership& witness() const noexcept { return witness_; }

 private:
  HullMembership witness_;
};

struct PivotStep {
  std::size_t fractional_before = 0;
  std::size_t blocked_index = 0;
  double step = 0.0;
  double new_value = 0.0;
};

inline bool is_fractional(double t) { return t > kFractionalTol && t < 1.0 - kFractionalTol; }

inline std::vector<std::size_t> fractional_indices(const Eigen::VectorXd& t) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (is_fractional(t(i))) out.push_back(static_cast<std::size_t>(i));
  return out;
}

/// Extreme-point pivoting inside { t in [0,1]^n : A t = const }.
///
/// While more than m coordinates are fractional, a kernel vector h of the
/// m x (m+1) atom submatrix on m+1 fractional coordinates exists (rank-nullity);
/// t moves along h until one of those coordinates reaches 0 or 1. This is the
/// finite form of the Shapley-Folkman step: at most m summands stay off their
/// vertex sets {0, atom_i}.
inline Eigen::VectorXd pivot_to_sparse(const AtomicVectorMeasure& mu, Eigen::VectorXd t,
                                       std::vector<PivotStep>* trace = nullptr) {
  const auto m = static_cast<Eigen::Index>(mu.dim());
  if (static_cast<std::size_t>(t.size()) != mu.atom_count()) throw DomainError("pivot_to_sparse: length mismatch");
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (!(t(i) >= -1e-12 && t(i) <= 1.0 + 1e-12)) throw DomainError("pivot_to_sparse: weights leave [0,1]");
    t(i) = std::clamp(t(i), 0.0, 1.0);
  }

  for (;;) {
    const auto frac = fractional_indices(t);
    if (frac.size() <= static_cast<std::size_t>(m)) break;

    std::vector<Eigen::Index> E(frac.begin(), frac.begin() + m + 1);
    const Eigen::MatrixXd S = mu.atoms()(Eigen::all, E);
    Eigen::VectorXd h;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    if (lu.dimensionOfKernel() > 0) h = lu.kernel().col(0);
    const double scale = std::max(S.norm(), 1e-300);
    if (h.size() == 0 || h.cwiseAbs().maxCoeff() == 0.0 ||
        (S * h).norm() > 1e-12 * scale * h.norm()) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
      h = svd.matrixV().col(m);
    }
    h /= h.cwiseAbs().maxCoeff();
    if ((S * h).norm() > 1e-10 * std::max(scale, 1.0)) {
      throw InvariantViolation("pivot_to_sparse: no kernel vector for " + std::to_string(m + 1) + " fractional atoms");
    }

    double alpha = std::numeric_limits<double>::infinity();
    Eigen::Index blocked = -1;
    double target = 0.0;
    for (Eigen::Index k = 0; k <= m; ++k) {
      const double ti = t(E[static_cast<std::size_t>(k)]);
      const double hk = h(k);
      if (hk > 0.0 && (1.0 - ti) / hk < alpha) {
        alpha = (1.0 - ti) / hk;
        blocked = k;
        target = 1.0;
      } else if (hk < 0.0 && ti / (-hk) < alpha) {
        alpha = ti / (-hk);
        blocked = k;
        target = 0.0;
      }
    }
    if (blocked < 0) throw InvariantViolation("pivot_to_sparse: zero kernel direction");
    for (Eigen::Index k = 0; k <= m; ++k) {
      auto& tk = t(E[static_cast<std::size_t>(k)]);
      tk = std::clamp(tk + alpha * h(k), 0.0, 1.0);
    }
    t(E[static_cast<std::size_t>(blocked)]) = target;
    if (trace) {
      trace->push_back({frac.size(), static_cast<std::size_t>(E[static_cast<std::size_t>(blocked)]), alpha, target});
    }
  }
  return t;
}

/// max{ ||mu(C)|| : |C| <= m }, enumerated when the number of subsets is at
/// most `max_subsets`; otherwise the sum of the m largest atom norms, which
/// dominates it by the triangle inequality. Returns {value, exact}.
inline std::pair<double, bool> small_subset_bound(const AtomicVectorMeasure& mu, std::size_t max_subsets = 2'000'000) {
  const std::size_t n = mu.atom_count();
  const std::size_t m = std::min(mu.dim(), n);
  double count = 0.0;
  double binom = 1.0;
  for (std::size_t k = 0; k <= m; ++k) {
    count += binom;
    binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  if (count <= static_cast<double>(max_subsets)) {
    double best = 0.0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mu.dim()));
    // Depth-first over increasing index sequences of length <= m.
    auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
      best = std::max(best, mu.norm(acc));
      if (depth == m) return;
      for (std::size_t i = start; i < n; ++i) {
        acc += mu.atom(i);
        self(self, i + 1, depth + 1);
        acc -= mu.atom(i);
      }
    };
    rec(rec, 0, 0);
    return {best, true};
  }
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = mu.norm(mu.atom(i));
  std::sort(norms.begin(), norms.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += norms[i];
  return {s, false};
}

struct RoundingOptions {
  std::size_t max_enumeration_bits = 20;
  std::size_t max_bound_subsets = 2'000'000;
};

struct RoundingResult {
  IndexSet subset;
  Eigen::VectorXd target;
  Eigen::VectorXd achieved;  // mu(subset)
  double error = 0.0;        // ||mu(F) - v||
  double bound = 0.0;        // max_{|C|<=m} ||mu(C)|| (or its majorant, see bound_exact)
  bool bound_exact = true;
  bool completion_exhaustive = true;
  Eigen::VectorXd weights;   // sparse fractional weights after pivoting
  std::vector<PivotStep> fractional_trace;
};

namespace detail {

/// Chooses the best 0/1 completion of the fractional coordinates of t.
inline void complete_weights(const AtomicVectorMeasure& mu, const Eigen::VectorXd& v, const Eigen::VectorXd& t,
                             const RoundingOptions& opt, RoundingResult& out) {
  const std::size_t n = mu.atom_count();
  std::vector<char> chosen(n, 0);
  Eigen::VectorXd base = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mu.dim()));
  for (std::size_t i = 0; i < n; ++i) {
    if (t(static_cast<Eigen::Index>(i)) >= 1.0 - kFractionalTol) {
      chosen[i] = 1;
      base += mu.atom(i);
    }
  }
  const auto frac = fractional_indices(t);
  std::vector<char> best_pick(frac.size(), 0);
  double best_err = mu.norm(base - v);

  if (frac.size() <= opt.max_enumeration_bits) {
    // Gray-code walk: one atom toggled per step.
    std::vector<char> pick(frac.size(), 0);
    Eigen::VectorXd acc = base;
    const std::uint64_t total = std::uint64_t{1} << frac.size();
    for (std::uint64_t k = 1; k < total; ++k) {
      const auto bit = static_cast<std::size_t>(std::countr_zero(k));
      pick[bit] ^= 1;
      if (pick[bit]) acc += mu.atom(frac[bit]);
      else acc -= mu.atom(frac[bit]);
      const double err = mu.norm(acc - v);
      if (err < best_err) {
        best_err = err;
        best_pick = pick;
      }
    }
  } else {
    // Greedy descent from the all-zero completion, which already meets the bound.
    out.completion_exhaustive = false;
    Eigen::VectorXd acc = base;
    for (bool improved = true; improved;) {
      improved = false;
      std::size_t flip = frac.size();
      double flip_err = best_err;
      for (std::size_t b = 0; b < frac.size(); ++b) {
        const Eigen::VectorXd cand = best_pick[b] ? Eigen::VectorXd(acc - mu.atom(frac[b]))
                                                  : Eigen::VectorXd(acc + mu.atom(frac[b]));
        const double err = mu.norm(cand - v);
        if (err < flip_err) {
          flip_err = err;
          flip = b;
        }
      }
      if (flip < frac.size()) {
        acc = best_pick[flip] ? Eigen::VectorXd(acc - mu.atom(frac[flip])) : Eigen::VectorXd(acc + mu.atom(frac[flip]));
        best_pick[flip] ^= 1;
        best_err = flip_err;
        improved = true;
      }
    }
  }
  for (std::size_t b = 0; b < frac.size(); ++b)
    if (best_pick[b]) chosen[frac[b]] = 1;

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < n; ++i)
    if (chosen[i]) members.push_back(i);
  out.subset = IndexSet(n, std::move(members));
  out.achieved = mu.measure(out.subset);
  out.error = mu.norm(out.achieved - v);
}

}  // namespace detail

/// Hull membership, then pivoting to at most m fractional weights, then the
/// best of the 2^(#fractional) completions. The all-zero completion leaves a
/// remainder inside the sub-zonotope of the fractional atoms, so
/// error <= max_{|C|<=m} ||mu(C)|| (+ hull tolerance).
inline RoundingResult round_to_subset(const AtomicVectorMeasure& mu, const Eigen::VectorXd& v,
                                      const RoundingOptions& opt = {}) {
  HullMembership hull = hull_membership(mu, v);
  if (!hull.in_hull) throw NotInHull(std::move(hull));
  RoundingResult out;
  out.target = v;
  out.weights = pivot_to_sparse(mu, hull.weights, &out.fractional_trace);
  detail::complete_weights(mu, v, out.weights, opt, out);
  std::tie(out.bound, out.bound_exact) = small_subset_bound(mu, opt.max_bound_subsets);
  return out;
}

/// Rounds mu(M)/2 to a subset of M. Weights t = 1/2 on M are feasible by
/// construction, so no membership solve is needed.
inline RoundingResult approximate_halving(const AtomicVectorMeasure& mu, const IndexSet& M,
                                          const RoundingOptions& opt = {}) {
  if (M.universe() != mu.atom_count()) throw DomainError("approximate_halving: index set universe mismatch");
  const AtomicVectorMeasure sub = mu.restrict_to(M);
  const Eigen::VectorXd v = 0.5 * sub.total();
  RoundingResult local;
  local.target = v;
  local.weights = pivot_to_sparse(sub, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(M.size()), 0.5),
                                  &local.fractional_trace);
  detail::complete_weights(sub, v, local.weights, opt, local);
  std::tie(local.bound, local.bound_exact) = small_subset_bound(sub, opt.max_bound_subsets);

  // Map local indices back to the ground set.
  RoundingResult out = std::move(local);
  std::vector<std::size_t> members;
  for (std::size_t k : out.subset) members.push_back(M[k]);
  out.subset = IndexSet(mu.atom_count(), std::move(members));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mu.atom_count()));
  for (std::size_t k = 0; k < M.size(); ++k) w(static_cast<Eigen::Index>(M[k])) = out.weights(static_cast<Eigen::Index>(k));
  out.weights = std::move(w);
  for (auto& step : out.fractional_trace) step.blocked_index = M[step.blocked_index];
  return out;
}

struct OracleResult {
  IndexSet subset;
  double error = 0.0;
};

/// Exhaustive min ||mu(F) - v|| over all 2^n subsets (Gray-code order; the
/// first minimizer found wins). Refuses n > max_n.
inline OracleResult brute_force_oracle(const AtomicVectorMeasure& mu, const Eigen::VectorXd& v, std::size_t max_n = 22) {
  const std::size_t n = mu.atom_count();
  if (n > max_n) {
    throw DomainError("brute_force_oracle: " + std::to_string(n) + " atoms exceeds limit " + std::to_string(max_n));
  }
  if (static_cast<std::size_t>(v.size()) != mu.dim()) throw DomainError("brute_force_oracle: target dimension mismatch");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mu.dim()));
  std::uint64_t gray = 0;
  std::uint64_t best_mask = 0;
  double best = mu.norm(acc - v);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(k));
    gray ^= std::uint64_t{1} << bit;
    if (gray >> bit & 1U) acc += mu.atom(bit);
    else acc -= mu.atom(bit);
    const double err = mu.norm(acc - v);
    if (err < best) {
      best = err;
      best_mask = gray;
    }
  }
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask >> i & 1U) members.push_back(i);
  OracleResult out{IndexSet(n, std::move(members)), 0.0};
  out.error = mu.norm(mu.measure(out.subset) - v);
  return out;
}

}  // namespace roelab
