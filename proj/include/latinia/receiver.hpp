#pragma once

// Per-receiver signal spaces, zero-forcing decoders and the CN / OCN
// surrogates.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "latinia/beamform.hpp"
#include "latinia/channel.hpp"
#include "latinia/latin.hpp"
#include "latinia/linalg.hpp"

namespace latinia {

/// Factorization tally. `surrogate` counts SVDs spent on CN/OCN scoring,
/// `true_objective` counts SVDs spent on decoder null spaces.
struct FactorizationCounter {
  std::uint64_t surrogate = 0;
  std::uint64_t true_objective = 0;

  FactorizationCounter& operator+=(const FactorizationCounter& o) {
    surrogate += o.surrogate;
    true_objective += o.true_objective;
    return *this;
  }
};

enum class InterferenceRepresentative { first_member, second_member };

/// A_i = [D_1 .. D_K | I_1 .. I_K]: desired columns H(i,j) v(i,j), then one
/// column per aligned pair, pairs ordered by their smaller member.
inline ComplexMatrix signal_space_matrix(
    const BeamformerSet& set, const AlignmentScheme& scheme, const ChannelRealization& ch,
    int receiver, InterferenceRepresentative rep = InterferenceRepresentative::first_member) {
  const int k = scheme.k;
  ComplexMatrix a(2 * k, 2 * k);
  for (int j = 0; j < k; ++j) a.col(j) = ch(receiver, j) * set.v(receiver, j);
  const auto pairs = alignment_pairs(scheme, receiver);
  for (int n = 0; n < k; ++n) {
    const auto& p = pairs[static_cast<std::size_t>(n)];
    const BeamformerId w = rep == InterferenceRepresentative::first_member ? p.first : p.second;
    a.col(k + n) = ch(receiver, w.transmitter) * set.v(w);
  }
  return a;
}

/// Decoder rows for the first `desired` columns of A: rows of A^-1 scaled to
/// unit norm. Raises SingularMatrix for a numerically singular A.
inline std::vector<ComplexRow> zero_forcing(const ComplexMatrix& a, int desired = -1) {
  if (desired < 0) desired = static_cast<int>(a.cols() / 2);
  if (a.rows() != a.cols() || desired > a.rows()) {
    throw Error(Errc::invalid_argument, "zero_forcing needs a square matrix");
  }
  const ComplexMatrix inv = inverse(a);
  std::vector<ComplexRow> rows;
  rows.reserve(static_cast<std::size_t>(desired));
  for (int j = 0; j < desired; ++j) {
    ComplexRow r = inv.row(j);
    rows.push_back(r / r.norm());
  }
  return rows;
}

/// Unit-norm row orthogonal to every column of A except `column`, taken
/// from the SVD of A with that column removed (one factorization).
inline ComplexRow nullspace_decoder(const ComplexMatrix& a, int column) {
  const Eigen::Index n = a.cols();
  ComplexMatrix others(a.rows(), n - 1);
  Eigen::Index c = 0;
  for (Eigen::Index m = 0; m < n; ++m) {
    if (m != column) others.col(c++) = a.col(m);
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(others, Eigen::ComputeFullU);
  return svd.matrixU().col(a.rows() - 1).adjoint();
}

/// P * |R H v|^2 with unit noise variance.
inline double stream_snr(const ComplexRow& r, const ComplexMatrix& h, const ComplexVector& v,
                         double stream_power) {
  const Complex g = (r * (h * v))(0);
  return stream_power * std::norm(g);
}

inline double sum_rate(std::span<const double> snrs) {
  double total = 0.0;
  for (double s : snrs) total += std::log2(1.0 + s);
  return total;
}

/// CN of [D_bar | Q] where Q orthonormalizes the last K columns of A_bar.
inline double ocn(const ComplexMatrix& a_bar, int k) {
  ComplexMatrix m = a_bar;
  m.rightCols(k) = gram_schmidt(ComplexMatrix(a_bar.rightCols(k)));
  return cond_number(m);
}

struct ReceiverSpaces {
  int receiver = 0;
  ComplexMatrix a;
  ComplexMatrix a_bar;
  std::vector<ComplexRow> zf_rows;
  double kappa = 1.0;
  double ocn = 1.0;
  bool degenerate = false;
};

inline ReceiverSpaces signal_space(
    const BeamformerSet& set, const AlignmentScheme& scheme, const ChannelRealization& ch,
    int receiver, InterferenceRepresentative rep = InterferenceRepresentative::first_member) {
  ReceiverSpaces rs;
  rs.receiver = receiver;
  rs.a = signal_space_matrix(set, scheme, ch, receiver, rep);
  rs.a_bar = normalize_columns(rs.a);
  rs.kappa = cond_number(rs.a_bar);
  try {
    rs.zf_rows = zero_forcing(rs.a, scheme.k);
    rs.ocn = ocn(rs.a_bar, scheme.k);
  } catch (const Error& e) {
    if (e.code() != Errc::singular_matrix && e.code() != Errc::dependent_input) throw;
    rs.degenerate = true;
  }
  if (rs.degenerate || is_rank_deficient(rs.kappa)) {
    rs.degenerate = true;
    rs.kappa = std::numeric_limits<double>::infinity();
    rs.ocn = std::numeric_limits<double>::infinity();
    rs.zf_rows.assign(static_cast<std::size_t>(scheme.k),
                      ComplexRow::Zero(static_cast<Eigen::Index>(2 * scheme.k)));
  }
  return rs;
}

/// |R_ij H_ij v_ij| for all 3K streams (receiver-major), each decoder from
/// its own null-space SVD: 3K factorizations.
inline std::vector<double> stream_amplitudes(const BeamformerSet& set, const AlignmentScheme& scheme,
                                             const ChannelRealization& ch,
                                             FactorizationCounter* counter = nullptr) {
  const int k = scheme.k;
  std::vector<double> amp(static_cast<std::size_t>(kReceivers * k));
  for (int i = 0; i < kReceivers; ++i) {
    const ComplexMatrix a = signal_space_matrix(set, scheme, ch, i);
    for (int j = 0; j < k; ++j) {
      const ComplexRow r = nullspace_decoder(a, j);
      amp[static_cast<std::size_t>(i * k + j)] = std::abs((r * a.col(j))(0));
    }
  }
  if (counter) counter->true_objective += static_cast<std::uint64_t>(kReceivers * k);
  return amp;
}

enum class Surrogate { cn, ocn };

inline const char* to_string(Surrogate s) {
  return s == Surrogate::cn ? "cn" : "ocn";
}

/// kappa_i (or OCN_i) for the three receivers: one SVD each.
inline std::array<double, kReceivers> receiver_kappas(const BeamformerSet& set,
                                                      const AlignmentScheme& scheme,
                                                      const ChannelRealization& ch, Surrogate kind,
                                                      FactorizationCounter* counter = nullptr) {
  std::array<double, kReceivers> out{};
  for (int i = 0; i < kReceivers; ++i) {
    const ComplexMatrix a_bar = normalize_columns(signal_space_matrix(set, scheme, ch, i));
    double value;
    if (kind == Surrogate::cn) {
      value = cond_number(a_bar);
    } else {
      try {
        value = ocn(a_bar, scheme.k);
      } catch (const Error& e) {
        if (e.code() != Errc::dependent_input) throw;
        value = std::numeric_limits<double>::infinity();
      }
    }
    out[static_cast<std::size_t>(i)] = value;
  }
  if (counter) counter->surrogate += kReceivers;
  return out;
}

}  // namespace latinia
