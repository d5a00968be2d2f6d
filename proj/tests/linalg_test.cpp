#include "latinia/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace latinia {
namespace {

using testing::random_matrix;
using testing::random_unitary;
using testing::random_vector;

TEST(Eig, IdentityHasUnitEigenvalues) {
  const auto pairs = eig(ComplexMatrix::Identity(4, 4));
  ASSERT_EQ(pairs.size(), 4u);
  for (const auto& p : pairs) {
    EXPECT_NEAR(std::abs(p.value - Complex(1.0, 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(p.vector.norm(), 1.0, 1e-12);
  }
}

TEST(Eig, DiagonalSortedByMagnitude) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = -1.0;
  const auto pairs = eig(a);
  EXPECT_NEAR(std::abs(pairs[0].value - Complex(2.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(pairs[1].value - Complex(-1.0)), 0.0, 1e-14);
  // Phase convention makes the dominant entry real positive, so e1 / e2 exactly.
  EXPECT_NEAR((pairs[0].vector - ComplexVector::Unit(2, 0)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((pairs[1].vector - ComplexVector::Unit(2, 1)).norm(), 0.0, 1e-14);
}

TEST(Eig, RandomResidualsWithinTolerance) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);  // 2..8
    const ComplexMatrix a = random_matrix(n, n, 100 + seed);
    const auto pairs = eig(a);
    ASSERT_EQ(pairs.size(), static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& p = pairs[k];
      EXPECT_LE((a * p.vector - p.value * p.vector).norm(), 1e-8 * a.norm());
      EXPECT_NEAR(p.vector.norm(), 1.0, 1e-12);
      if (k) EXPECT_GE(std::abs(pairs[k - 1].value), std::abs(p.value));
    }
  }
}

TEST(Eig, PhaseConventionAndDeterminism) {
  const ComplexMatrix a = random_matrix(6, 6, 7);
  const auto first = eig(a);
  const auto second = eig(a);
  for (std::size_t k = 0; k < first.size(); ++k) {
    EXPECT_EQ(first[k].value, second[k].value);
    EXPECT_TRUE(first[k].vector == second[k].vector);
    Eigen::Index idx;
    first[k].vector.cwiseAbs().maxCoeff(&idx);
    EXPECT_EQ(first[k].vector(idx).imag(), 0.0);
    EXPECT_GT(first[k].vector(idx).real(), 0.0);
  }
}

TEST(Eig, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(eig(ComplexMatrix::Zero(2, 3)), Error);
  ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
  bad(0, 1) = Complex(std::nan(""), 0.0);
  EXPECT_THROW(eig(bad), Error);
}

TEST(Inverse, IdentityAndDiagonal) {
  EXPECT_TRUE(inverse(ComplexMatrix::Identity(3, 3)).isApprox(ComplexMatrix::Identity(3, 3)));
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  const ComplexMatrix inv = inverse(d);
  EXPECT_NEAR(std::abs(inv(0, 0) - Complex(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(inv(1, 1) - Complex(0.25)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(inv(0, 1)), 0.0, 1e-15);
}

TEST(Inverse, RandomRoundTrip) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 2 * (3 + static_cast<int>(seed % 3));
    const ComplexMatrix a = random_matrix(n, n, 300 + seed);
    if (cond_number(a) > 1e6) continue;
    const ComplexMatrix prod = a * inverse(a);
    EXPECT_LE((prod - ComplexMatrix::Identity(n, n)).norm(), 1e-8);
  }
}

TEST(Inverse, SingularRaises) {
  ComplexMatrix s = ComplexMatrix::Zero(3, 3);
  s(0, 0) = 1.0;
  s(1, 1) = 1.0;
  try {
    inverse(s);
    FAIL() << "expected SingularMatrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::singular_matrix);
  }
  const ComplexVector u = random_vector(4, 9);
  EXPECT_THROW(inverse(u * u.adjoint()), Error);
}

TEST(SingularValues, UnitaryAndDiagonal) {
  const RealVector s = singular_values(random_unitary(5, 11));
  for (Eigen::Index k = 0; k < s.size(); ++k) EXPECT_NEAR(s(k), 1.0, 1e-12);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  const RealVector sd = singular_values(d);
  EXPECT_NEAR(sd(0), 3.0, 1e-15);
  EXPECT_NEAR(sd(1), 0.0, 1e-15);
}

TEST(SingularValues, FrobeniusIdentityAndOrdering) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix a = random_matrix(6, 6, 500 + seed);
    const RealVector s = singular_values(a);
    EXPECT_NEAR(s.squaredNorm(), a.squaredNorm(), 1e-9 * a.squaredNorm());
    for (Eigen::Index k = 1; k < s.size(); ++k) {
      EXPECT_GE(s(k - 1), s(k));
      EXPECT_GE(s(k), 0.0);
    }
  }
}

TEST(SingularValues, InvariantUnderColumnPermutationAndPhase) {
  const ComplexMatrix a = random_matrix(6, 6, 21);
  ComplexMatrix b(6, 6);
  const int perm[6] = {3, 0, 5, 1, 4, 2};
  for (int c = 0; c < 6; ++c) b.col(c) = a.col(perm[c]) * std::polar(1.0, 0.7 * c);
  EXPECT_LE((singular_values(a) - singular_values(b)).norm(), 1e-12 * a.norm());
}

TEST(CondNumber, KnownValues) {
  EXPECT_NEAR(cond_number(random_unitary(6, 31)), 1.0, 1e-12);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 2.0;
  EXPECT_NEAR(cond_number(d), 2.0, 1e-15);
  const ComplexMatrix a = random_matrix(5, 5, 33);
  const RealVector s = singular_values(a);
  EXPECT_DOUBLE_EQ(cond_number(a), s(0) / s(s.size() - 1));
}

TEST(CondNumber, RankDeficientIsInfinite) {
  const ComplexVector u = random_vector(4, 41);
  const double c = cond_number(u * u.adjoint());
  EXPECT_TRUE(is_rank_deficient(c));
  try {
    cond_number_checked(u * u.adjoint());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::rank_deficient);
  }
}

TEST(CondNumber, UnitaryInvariance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix a = random_matrix(6, 6, 600 + seed);
    const ComplexMatrix u = random_unitary(6, 700 + seed);
    const ComplexMatrix v = random_unitary(6, 800 + seed);
    const double c = cond_number(a);
    EXPECT_NEAR(cond_number(u * a * v), c, 1e-9 * c);
  }
}

TEST(GramSchmidt, SimpleBasis) {
  std::vector<ComplexVector> in{ComplexVector::Unit(3, 0),
                                ComplexVector::Unit(3, 0) + ComplexVector::Unit(3, 1)};
  const ComplexMatrix q = gram_schmidt(in);
  EXPECT_NEAR(std::abs(q(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(q(1, 1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(q(0, 1)), 0.0, 1e-15);
}

TEST(GramSchmidt, OrthonormalInputUnchanged) {
  const ComplexMatrix u = random_unitary(5, 51);
  EXPECT_LE((gram_schmidt(u) - u).norm(), 1e-12);
}

TEST(GramSchmidt, RandomOrthonormalityAndSpan) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix a = random_matrix(6, 6, 900 + seed);
    const ComplexMatrix q = gram_schmidt(a);
    EXPECT_LT((q.adjoint() * q - ComplexMatrix::Identity(6, 6)).norm(), 1e-9);
    for (int c = 0; c < 6; ++c) {
      const ComplexVector proj = q * (q.adjoint() * a.col(c));
      EXPECT_LT((a.col(c) - proj).norm() / a.col(c).norm(), 1e-10);
    }
  }
  // Tall input: span of 3 vectors in dimension 6.
  const ComplexMatrix tall = random_matrix(6, 3, 999);
  const ComplexMatrix qt = gram_schmidt(tall);
  EXPECT_LT((qt.adjoint() * qt - ComplexMatrix::Identity(3, 3)).norm(), 1e-10);
}

TEST(GramSchmidt, DependentInputRaises) {
  ComplexMatrix a = random_matrix(4, 3, 61);
  a.col(2) = 2.0 * a.col(0) - Complex(0, 1) * a.col(1);
  try {
    gram_schmidt(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dependent_input);
  }
}

TEST(NumericalRank, Cases) {
  EXPECT_EQ(numerical_rank(ComplexMatrix::Zero(4, 4), 1e-6), 0);
  const ComplexVector u = random_vector(5, 71);
  const ComplexVector v = random_vector(5, 72);
  EXPECT_EQ(numerical_rank(u * v.adjoint(), 1e-6), 1);
  EXPECT_EQ(numerical_rank(random_matrix(6, 6, 73), 1e-6), 6);
  EXPECT_THROW(numerical_rank(ComplexMatrix::Identity(2, 2), 0.0), Error);
  EXPECT_THROW(numerical_rank(ComplexMatrix::Identity(2, 2), 1.0), Error);
}

TEST(Collinearity, KnownValues) {
  const ComplexVector e1 = ComplexVector::Unit(3, 0);
  const ComplexVector e2 = ComplexVector::Unit(3, 1);
  EXPECT_NEAR(collinearity_residual(e1, Complex(0, 3) * e1), 0.0, 1e-15);
  EXPECT_NEAR(collinearity_residual(e1, e2), 1.0, 1e-15);
  // sqrt(1 - |<e1, e1+e2>|^2 / (1 * 2)) = sqrt(1/2), evaluated by hand.
  EXPECT_NEAR(collinearity_residual(e1, e1 + e2), 0.70710678118654752, 1e-15);
}

TEST(Collinearity, MatchesClosedFormOnRandomPairs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexVector u = random_vector(6, 1000 + seed);
    const ComplexVector v = random_vector(6, 2000 + seed);
    const double c2 = std::norm(u.dot(v)) / (u.squaredNorm() * v.squaredNorm());
    EXPECT_NEAR(collinearity_residual(u, v), std::sqrt(1.0 - c2), 1e-12);
    EXPECT_NEAR(collinearity_residual(u, v), collinearity_residual(v, u), 1e-12);
  }
}

TEST(Collinearity, ZeroVectorRaises) {
  try {
    collinearity_residual(ComplexVector::Zero(2), ComplexVector::Unit(2, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_vector);
  }
}

}  // namespace
}  // namespace latinia
