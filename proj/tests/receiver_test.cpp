#include "latinia/receiver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_util.hpp"

namespace latinia {
namespace {

struct Fixture {
  ChannelRealization ch;
  SchemeBasis basis;
};

Fixture make(int k, std::uint64_t seed, std::uint64_t draw, std::size_t square = 0) {
  Fixture f;
  f.ch = draw_channel(k, seed, draw);
  f.basis = prepare_scheme(scheme_from_columns(first_fixed_first_row(k, square + 1)[square], {0, 1, 2}), f.ch);
  return f;
}

TEST(ZeroForcing, NullsOtherColumns) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix a = testing::random_matrix(6, 6, 40 + seed);
    const auto rows = zero_forcing(a, 3);
    ASSERT_EQ(rows.size(), 3u);
    for (int j = 0; j < 3; ++j) {
      const auto& r = rows[static_cast<std::size_t>(j)];
      EXPECT_NEAR(r.norm(), 1.0, 1e-12);
      const ComplexRow g = r * a;
      for (int m = 0; m < 6; ++m) {
        if (m != j) EXPECT_LT(std::abs(g(m)), 1e-10 * a.norm());
      }
      EXPECT_GT(std::abs(g(j)), 1e-6);
    }
  }
  EXPECT_THROW(zero_forcing(ComplexMatrix::Zero(2, 3)), Error);
}

TEST(ZeroForcing, NullspaceRouteAgreesWithInverseRoute) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix a = testing::random_matrix(8, 8, 80 + seed);
    const auto rows = zero_forcing(a, 4);
    for (int j = 0; j < 4; ++j) {
      const ComplexRow ns = nullspace_decoder(a, j);
      EXPECT_NEAR(ns.norm(), 1.0, 1e-12);
      // Same one-dimensional null space, so equal up to a phase.
      EXPECT_NEAR(std::abs(ns.dot(rows[static_cast<std::size_t>(j)])), 1.0, 1e-9);
      EXPECT_NEAR(std::abs((ns * a.col(j))(0)), std::abs((rows[static_cast<std::size_t>(j)] * a.col(j))(0)),
                  1e-9 * a.norm());
    }
  }
}

TEST(StreamSnr, HandExamples) {
  ComplexRow r(2);
  r << 1.0, 0.0;
  ComplexVector v(2);
  v << 2.0, 0.0;
  const ComplexMatrix h = ComplexMatrix::Identity(2, 2);
  EXPECT_DOUBLE_EQ(stream_snr(r, h, v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(stream_snr(r, h, v, 0.5), 2.0);
  v << 0.0, 1.0;
  EXPECT_DOUBLE_EQ(stream_snr(r, h, v, 1.0), 0.0);
}

TEST(SumRate, HandExamples) {
  const std::vector<double> ones(9, 1.0);
  EXPECT_DOUBLE_EQ(sum_rate(ones), 9.0);
  const std::vector<double> zeros(9, 0.0);
  EXPECT_DOUBLE_EQ(sum_rate(zeros), 0.0);
  const std::vector<double> three{3.0};
  EXPECT_DOUBLE_EQ(sum_rate(three), 2.0);
}

TEST(SignalSpace, LayoutMatchesPairs) {
  auto f = make(3, 5, 0);
  const auto set = assemble(f.basis, 10);
  for (int i = 0; i < 3; ++i) {
    const ComplexMatrix a = signal_space_matrix(set, f.basis.scheme, f.ch, i);
    for (int j = 0; j < 3; ++j) EXPECT_TRUE(a.col(j).isApprox(f.ch(i, j) * set.v(i, j)));
    const auto pairs = alignment_pairs(f.basis.scheme, i);
    for (int n = 0; n < 3; ++n) {
      const auto& p = pairs[static_cast<std::size_t>(n)];
      EXPECT_TRUE(a.col(3 + n).isApprox(f.ch(i, p.first.transmitter) * set.v(p.first)));
    }
  }
}

TEST(SignalSpace, ZeroForcingSeparatesDesiredStreams) {
  auto f = make(3, 6, 0);
  for (std::uint64_t n = 0; n < 216; n += 7) {
    const auto set = assemble(f.basis, n);
    for (int i = 0; i < 3; ++i) {
      const auto rs = signal_space(set, f.basis.scheme, f.ch, i);
      ASSERT_FALSE(rs.degenerate);
      // Every interference beamformer arriving at i is nulled by every decoder row.
      for (int j = 0; j < 3; ++j) {
        const auto& r = rs.zf_rows[static_cast<std::size_t>(j)];
        for (int other = 0; other < 3; ++other) {
          if (other == i) continue;
          for (int t = 0; t < 3; ++t) {
            EXPECT_LT(std::abs((r * (f.ch(i, t) * set.v(other, t)))(0)), 1e-8);
          }
        }
        for (int t = 0; t < 3; ++t) {
          if (t != j) EXPECT_LT(std::abs((r * (f.ch(i, t) * set.v(i, t)))(0)), 1e-8);
        }
      }
    }
  }
}

TEST(Surrogates, InvariantUnderBeamformerPhaseAndScale) {
  auto f = make(3, 7, 0);
  const auto set = assemble(f.basis, 33);
  auto scaled = set;
  for (std::size_t n = 0; n < scaled.vectors.size(); ++n) {
    scaled.vectors[n] *= std::polar(0.3 + 0.2 * static_cast<double>(n), 0.4 * static_cast<double>(n));
  }
  for (auto kind : {Surrogate::cn, Surrogate::ocn}) {
    const auto a = receiver_kappas(set, f.basis.scheme, f.ch, kind);
    const auto b = receiver_kappas(scaled, f.basis.scheme, f.ch, kind);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)],
                                            1e-9 * a[static_cast<std::size_t>(i)]);
  }
}

TEST(Surrogates, InterferenceRepresentativeDoesNotMatter) {
  for (std::uint64_t d = 0; d < 5; ++d) {
    auto f = make(3, 8, d);
    for (std::uint64_t n = 0; n < 216; n += 11) {
      const auto set = assemble(f.basis, n);
      for (int i = 0; i < 3; ++i) {
        const auto a = signal_space(set, f.basis.scheme, f.ch, i, InterferenceRepresentative::first_member);
        const auto b = signal_space(set, f.basis.scheme, f.ch, i, InterferenceRepresentative::second_member);
        EXPECT_LT(std::abs(a.kappa - b.kappa) / a.kappa, 1e-6);
        EXPECT_LT(std::abs(a.ocn - b.ocn) / a.ocn, 1e-6);
      }
    }
  }
}

TEST(Surrogates, OcnIgnoresInterferenceColumnOrder) {
  const ComplexMatrix a = normalize_columns(testing::random_matrix(8, 8, 123));
  ComplexMatrix b = a;
  b.col(4) = a.col(7);
  b.col(5) = a.col(4);
  b.col(6) = a.col(6);
  b.col(7) = a.col(5);
  EXPECT_NEAR(ocn(a, 4), ocn(b, 4), 1e-9 * ocn(a, 4));
}

TEST(Surrogates, OcnOfOrthogonalInterferenceEqualsCn) {
  // With an orthonormal interference block already, GS is a no-op.
  const ComplexMatrix q = testing::random_unitary(6, 55);
  ComplexMatrix a(6, 6);
  a.leftCols(3) = normalize_columns(testing::random_matrix(6, 3, 56));
  a.rightCols(3) = q.leftCols(3);
  EXPECT_NEAR(ocn(a, 3), cond_number(a), 1e-9 * cond_number(a));
}

TEST(Surrogates, KappaIsCondOfNormalizedSignalSpace) {
  auto f = make(4, 9, 0);
  const auto set = assemble(f.basis, 999);
  const auto kap = receiver_kappas(set, f.basis.scheme, f.ch, Surrogate::cn);
  for (int i = 0; i < 3; ++i) {
    const ComplexMatrix a = signal_space_matrix(set, f.basis.scheme, f.ch, i);
    ComplexMatrix an = a;
    for (int c = 0; c < an.cols(); ++c) an.col(c) /= a.col(c).norm();
    const RealVector s = an.jacobiSvd().singularValues();
    EXPECT_NEAR(kap[static_cast<std::size_t>(i)], s(0) / s(s.size() - 1), 1e-9 * s(0) / s(s.size() - 1));
    EXPECT_GE(kap[static_cast<std::size_t>(i)], 1.0);
  }
}

TEST(StreamAmplitudes, CountAndAgreementWithZeroForcing) {
  for (int k : {3, 4, 5}) {
    auto f = make(k, 10, 0);
    const auto set = assemble(f.basis, 1);
    FactorizationCounter counter;
    const auto amp = stream_amplitudes(set, f.basis.scheme, f.ch, &counter);
    ASSERT_EQ(amp.size(), static_cast<std::size_t>(3 * k));
    EXPECT_EQ(counter.true_objective, static_cast<std::uint64_t>(3 * k));
    EXPECT_EQ(counter.surrogate, 0u);
    for (int i = 0; i < 3; ++i) {
      const auto rs = signal_space(set, f.basis.scheme, f.ch, i);
      for (int j = 0; j < k; ++j) {
        const double zf = std::abs((rs.zf_rows[static_cast<std::size_t>(j)] * rs.a.col(j))(0));
        EXPECT_NEAR(amp[static_cast<std::size_t>(i * k + j)], zf, 1e-8);
        EXPECT_GT(zf, 0.0);
      }
    }
    FactorizationCounter sc;
    receiver_kappas(set, f.basis.scheme, f.ch, Surrogate::cn, &sc);
    receiver_kappas(set, f.basis.scheme, f.ch, Surrogate::ocn, &sc);
    EXPECT_EQ(sc.surrogate, 6u);
  }
}

TEST(SignalSpace, DegenerateGeometryFlagged) {
  const auto ch = identity_channel(3);
  const auto scheme = scheme_from_columns(enumerate_fixed_first_row(3)[0], {0, 1, 2});
  BeamformerSet set;
  set.k = 3;
  set.vectors.assign(9, ComplexVector::Unit(6, 0));
  const auto rs = signal_space(set, scheme, ch, 0);
  EXPECT_TRUE(rs.degenerate);
  EXPECT_TRUE(std::isinf(rs.kappa));
  EXPECT_TRUE(std::isinf(rs.ocn));
  ASSERT_EQ(rs.zf_rows.size(), 3u);
  EXPECT_EQ(rs.zf_rows[0].norm(), 0.0);
  const auto kap = receiver_kappas(set, scheme, ch, Surrogate::ocn);
  EXPECT_TRUE(std::isinf(kap[0]));
}

}  // namespace
}  // namespace latinia
