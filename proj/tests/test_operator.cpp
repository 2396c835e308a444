#include <gtest/gtest.h>

#include <random>

#include "roelab/approximation.hpp"
#include "roelab/banded_operator.hpp"
#include "roelab/generators.hpp"
#include "roelab/metric_space.hpp"
#include "roelab/op_norm.hpp"
#include "roelab/projection_family.hpp"

using namespace roelab;

namespace {

double svd_norm(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues()(0); }

// Propagation oracle straight from the definition.
double propagation_oracle(const BandedOperator& a) {
  double best = 0;
  for (Point x = 0; x < a.points(); ++x)
    for (Point y = 0; y < a.points(); ++y)
      if (a.block(x, y).cwiseAbs().maxCoeff() != 0.0) best = std::max(best, a.space().dist(x, y));
  return best;
}

BandedOperator random_banded(const SpacePtr& s, std::size_t d, double prop, random::Rng& rng) {
  BandedOperator a = BandedOperator::zero(s, d);
  for (Point x = 0; x < s->size(); ++x)
    for (Point y = 0; y < s->size(); ++y)
      if (s->dist(x, y) <= prop) a.block(x, y) = random::gaussian_matrix(Eigen::Index(d), Eigen::Index(d), rng);
  return a;
}

}  // namespace

TEST(Propagation, Examples) {
  const auto p5 = share(generate::path(5));
  EXPECT_EQ(propagation(BandedOperator::identity(p5)), 0.0);
  EXPECT_EQ(propagation(BandedOperator::zero(p5)), 0.0);
  EXPECT_EQ(propagation(BandedOperator::matrix_unit(p5, 0, 3)), 3.0);
  Matrix tri = Matrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i) {
    tri(i, i) = 2;
    if (i + 1 < 5) tri(i, i + 1) = tri(i + 1, i) = -1;
  }
  EXPECT_EQ(propagation(BandedOperator(p5, 1, tri)), 1.0);
}

TEST(Propagation, SumAndProductBounds) {
  random::Rng rng(11);
  const auto c = share(generate::cycle(24));
  for (int trial = 0; trial < 20; ++trial) {
    const double pa = double(rng() % 5), pb = double(rng() % 5);
    const auto a = random_banded(c, 1 + trial % 2, pa, rng);
    const auto b = random_banded(c, 1 + trial % 2, pb, rng);
    EXPECT_EQ(propagation(a), propagation_oracle(a));
    EXPECT_LE(propagation(a + b), std::max(propagation(a), propagation(b)));
    EXPECT_LE(propagation(a * b, 1e-12), propagation(a) + propagation(b));
  }
}

TEST(OpNorm, Examples) {
  const auto p5 = share(generate::path(5));
  EXPECT_NEAR(op_norm(BandedOperator::identity(p5)), 1.0, 1e-12);
  Matrix m(2, 2);
  m << 0, 2, 0, 0;
  EXPECT_NEAR(op_norm(m), 2.0, 1e-12);
  EXPECT_EQ(op_norm(Matrix::Zero(3, 3)), 0.0);
  EXPECT_THROW(op_norm(m, OpNormOptions{0.0}), DomainError);
}

TEST(OpNorm, AgreesWithSvd) {
  random::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random::gaussian_matrix(64, 64, rng);
    const double ref = svd_norm(a);
    EXPECT_NEAR(op_norm(a), ref, 1e-8 * ref);
  }
}

TEST(OpNorm, DeterministicAndInvariant) {
  random::Rng rng(6);
  const Matrix a = random::gaussian_matrix(30, 30, rng);
  const Matrix b = random::gaussian_matrix(30, 30, rng);
  EXPECT_EQ(op_norm(a), op_norm(a));
  EXPECT_LE(op_norm(a * b), op_norm(a) * op_norm(b) * (1 + 1e-8));
  const Matrix u = random::haar_unitary(30, rng);
  EXPECT_NEAR(op_norm(u * a * u.adjoint()), op_norm(a), 1e-8 * op_norm(a));
}

TEST(OpNorm, NearDegenerateTopPairs) {
  // Two close pairs over a fast-decaying bulk.
  random::Rng rng(12);
  std::uniform_real_distribution<double> bulk(0.0, 0.26);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 60;
    Eigen::VectorXd s(n);
    s(0) = 1;
    s(1) = 1 - 1.3e-5;
    s(2) = 0.5516;
    s(3) = 0.5516 - 3e-5;
    for (Eigen::Index i = 4; i < n; ++i) s(i) = bulk(rng);
    const Matrix a = random::haar_unitary(n, rng) * s.cast<Complex>().asDiagonal() * random::haar_unitary(n, rng).adjoint();
    EXPECT_NEAR(op_norm(a), 1.0, 1e-9);
  }
}

TEST(OpNorm, NonConvergenceCarriesBracket) {
  random::Rng rng(8);
  const Matrix a = random::gaussian_matrix(40, 40, rng);
  OpNormOptions opt;
  opt.max_iterations = 2;
  try {
    op_norm(a, opt);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const double ref = svd_norm(a);
    EXPECT_LE(e.lower(), ref + 1e-9);
    EXPECT_GE(e.upper(), ref - 1e-9);
  }
}

TEST(Truncate, Examples) {
  const auto p5 = share(generate::path(5));
  random::Rng rng(2);
  const auto a = random_banded(p5, 2, 1, rng);
  EXPECT_TRUE(truncate(a, 1).matrix() == a.matrix());
  const auto full = random_banded(p5, 1, 4, rng);
  const auto diag = truncate(full, 0);
  for (Point x = 0; x < 5; ++x)
    for (Point y = 0; y < 5; ++y) EXPECT_EQ(diag.matrix()(x, y), x == y ? full.matrix()(x, y) : Complex(0));
  EXPECT_EQ(op_norm(truncate(BandedOperator::matrix_unit(p5, 0, 3), 2)), 0.0);
  EXPECT_LE(propagation(truncate(full, 2)), 2.0);
}

TEST(Certificates, TruncationExamples) {
  const auto p5 = share(generate::path(5));
  random::Rng rng(3);
  const auto a = random_banded(p5, 1, 2, rng);
  EXPECT_EQ(truncation_certificate(a, 0.0, 2).value, 0.0);
  EXPECT_TRUE(truncation_certificate(a, 0.0, 2).witnesses());
  const auto b = BandedOperator::matrix_unit(p5, 0, 3) + BandedOperator::identity(p5);
  EXPECT_NEAR(truncation_certificate(b, 0.5, 2).value, 1.0, 1e-12);
  EXPECT_FALSE(truncation_certificate(b, 0.5, 2).witnesses());
}

TEST(Certificates, TruncationDecaysForExpIH) {
  const auto c = share(generate::cycle(20));
  random::Rng rng(4);
  const auto h = random::banded_hermitian(c, 1, 1, 1.0, rng);
  const BandedOperator u(c, 1, random::exp_i(h.matrix()));
  double prev = std::numeric_limits<double>::infinity();
  for (double r = 0; r <= 10; r += 1) {
    const double v = truncation_certificate(u, 0.1, r).value;
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(Certificates, SeparatedExamples) {
  const auto p5 = share(generate::path(5));
  random::Rng rng(12);
  const auto a = random_banded(p5, 1, 1, rng);
  EXPECT_EQ(separated_lower_bound(a, 1), 0.0);
  EXPECT_NEAR(separated_lower_bound(BandedOperator::matrix_unit(p5, 0, 3), 2), 1.0, 1e-12);
  EXPECT_EQ(separated_lower_bound(BandedOperator::identity(p5), 0), 0.0);
  EXPECT_FALSE(separated_certificate(a, 1.0, 1).witnesses());
}

TEST(Certificates, SeparatedSandwich) {
  random::Rng rng(13);
  const auto g = share(generate::grid(3, 4));
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_banded(g, 1 + trial % 2, 5, rng);
    for (double r : {0.0, 1.0, 2.0, 3.0}) {
      const double lo = separated_lower_bound(a, r);
      const double hi = truncation_certificate(a, 0, r).value;
      EXPECT_LE(lo, hi + 1e-9);
      // Each witness pair is r-separated: any propagation-r b has zero corner.
      const auto w = separated_lower_witness(a, r);
      if (w.value > 0) {
        const IndexSet A = ball(*g, w.center, w.radius);
        std::vector<Point> far;
        for (Point y = 0; y < g->size(); ++y)
          if (dist_to_set(*g, y, A) > r) far.push_back(y);
        const IndexSet B(g->size(), far);
        const auto b = truncate(a, r);
        EXPECT_EQ(w.transposed ? corner_norm(b, B, A) : corner_norm(b, A, B), 0.0);
      }
    }
  }
}

TEST(Algebra, Examples) {
  const auto p5 = share(generate::path(5));
  const auto exy = BandedOperator::matrix_unit(p5, 1, 2);
  const auto eyz = BandedOperator::matrix_unit(p5, 2, 4);
  EXPECT_TRUE((exy * eyz).matrix() == BandedOperator::matrix_unit(p5, 1, 4).matrix());
  random::Rng rng(14);
  const auto c = share(generate::cycle(8));
  const auto a = random_banded(c, 2, 2, rng);
  const auto b = random_banded(c, 2, 3, rng);
  EXPECT_TRUE((a + BandedOperator::zero(c, 2)).matrix() == a.matrix());
  EXPECT_LE(((a * b).adjoint() - b.adjoint() * a.adjoint()).matrix().cwiseAbs().maxCoeff(), 1e-12);
  const Vector v = random::unit_vector(16, rng);
  EXPECT_LE((a.apply(v) - a.matrix() * v).norm(), 1e-12);
  EXPECT_THROW(a + BandedOperator::zero(c, 1), DomainError);
  EXPECT_THROW(a * BandedOperator::zero(share(generate::cycle(8)), 1), DomainError);
  EXPECT_THROW(a.apply(Vector::Zero(3)), DomainError);
}

TEST(Ghost, ProfileExamples) {
  const auto c = share(generate::cycle(8));
  const auto ex = ball_exhaustion(*c, 0);
  // supported in E_1 x E_1
  const auto a = BandedOperator::matrix_unit(c, 0, 1) + BandedOperator::matrix_unit(c, 7, 0);
  const auto pa = ghost_profile(a, ex);
  for (std::size_t k = 1; k < pa.size(); ++k) EXPECT_EQ(pa[k], 0.0);
  const BandedOperator rank1(c, 1, Matrix::Constant(8, 8, 1.0 / 8));
  const auto pr = ghost_profile(rank1, ex);
  for (std::size_t k = 0; k + 1 < pr.size(); ++k) EXPECT_NEAR(pr[k], 1.0 / 8, 1e-15);
  EXPECT_EQ(pr.back(), 0.0);
  const auto pi = ghost_profile(BandedOperator::identity(c), ex);
  for (std::size_t k = 0; k + 1 < pi.size(); ++k) EXPECT_EQ(pi[k], 1.0);
  EXPECT_EQ(pi.back(), 0.0);
  std::vector<IndexSet> bad{IndexSet(8, {0, 1}), IndexSet(8, {0})};
  EXPECT_THROW(ghost_profile(a, bad), DomainError);
}

TEST(ProjectionFamily, RejectsNonProjections) {
  const auto p3 = share(generate::path(3));
  Matrix half = Matrix::Zero(3, 3);
  half(0, 0) = 0.5;
  EXPECT_THROW(ProjectionFamily::from_operators({BandedOperator(p3, 1, half)}), DomainError);
  Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
  a(0, 0) = 1;
  b(0, 0) = 0.5; b(0, 1) = 0.5; b(1, 0) = 0.5; b(1, 1) = 0.5;
  EXPECT_THROW(ProjectionFamily::from_operators({BandedOperator(p3, 1, a), BandedOperator(p3, 1, b)}), DomainError);
  const auto ok = ProjectionFamily::from_operators({BandedOperator(p3, 1, a), BandedOperator(p3, 1, Matrix::Identity(3, 3) - a)});
  EXPECT_LE(ok.identity_defect(), 1e-12);
}

TEST(FamilyTail, Examples) {
  const auto c = share(generate::cycle(16));
  const auto coords = random::conjugated_coordinates(c, 1, Matrix::Identity(16, 16));
  for (double r : {0.0, 1.0, 3.0}) EXPECT_EQ(family_tail_bound(coords, r), 0.0);

  // Conjugation by a propagation-1 unitary (a banded block rotation).
  Matrix u = Matrix::Zero(16, 16);
  const double cs = std::cos(0.3), sn = std::sin(0.3);
  for (int i = 0; i < 16; i += 2) {
    u(i, i) = cs; u(i, i + 1) = -sn; u(i + 1, i) = sn; u(i + 1, i + 1) = cs;
  }
  const auto fam = random::conjugated_coordinates(c, 1, u);
  EXPECT_GT(family_tail_bound(fam, 0), 0.0);
  EXPECT_EQ(family_tail_bound(fam, 2), 0.0);

  random::Rng rng(21);
  const auto h = random::banded_hermitian(c, 1, 1, 1.0, rng);
  const auto ex = random::conjugated_coordinates(c, 1, random::exp_i(h.matrix()));
  const auto prof = family_tail_profile(ex);
  for (std::size_t k = 1; k < prof.size(); ++k) EXPECT_LE(prof[k].second, prof[k - 1].second + 1e-15);
  EXPECT_EQ(certify_radius(coords, 0.1).value(), 0.0);
}

TEST(FamilyTail, SoundOnRandomSubsets) {
  random::Rng rng(22);
  for (std::size_t d : {1, 2}) {
    const auto c = share(generate::cycle(12));
    const auto h = random::banded_hermitian(c, d, 1, 0.8, rng);
    const auto fam = random::conjugated_coordinates(c, d, random::exp_i(h.matrix()));
    for (double r : {0.0, 1.0, 2.0, 3.0}) {
      const double bound = family_tail_bound(fam, r);
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> members;
        for (std::size_t n = 0; n < fam.size(); ++n)
          if (rng() & 1) members.push_back(n);
        const auto pa = fam.subset_sum(IndexSet(fam.size(), members));
        EXPECT_LE(svd_norm((pa - truncate(pa, r)).matrix()), bound + 1e-9);
      }
    }
  }
}

TEST(FamilyTail, MajorantExactForRankOne) {
  random::Rng rng(23);
  const auto c = share(generate::cycle(10));
  const auto fam = random::conjugated_coordinates(c, 1, random::haar_unitary(10, rng));
  const auto K = family_block_majorant(fam);
  for (Point x = 0; x < 10; ++x)
    for (Point y = 0; y < 10; ++y) {
      double s = 0;
      for (std::size_t n = 0; n < fam.size(); ++n) s += std::abs(fam.member(n).matrix()(x, y));
      EXPECT_NEAR(K(x, y), s, 1e-12);
    }
}
