#pragma once

// Eigenvector-chain beamformer construction.
//
// Every chain of a scheme closes a cycle of three span equalities. Writing
// the chain members as (anchor a at receiver 1, b at receiver 2, c at
// receiver 3) with transmitters (ta, tb, tc), the constraints propagate
//
//   b = H(3,tb)^-1 H(3,ta) a         (aligned at receiver 3)
//   c = H(1,tc)^-1 H(1,tb) b         (aligned at receiver 1)
//   a ~ H(2,ta)^-1 H(2,tc) c         (aligned at receiver 2)
//
// so the anchor must be an eigenvector of the cycle product E. Each of the
// 2K eigenvectors yields a valid chain; picking one per chain gives one of
// the (2K)^K beamformer sets of the scheme.

#include <array>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "latinia/channel.hpp"
#include "latinia/error.hpp"
#include "latinia/latin.hpp"
#include "latinia/linalg.hpp"

namespace latinia {

struct ChainMatrix {
  Chain chain;
  ComplexMatrix e;            // cycle product acting on the anchor
  ComplexMatrix to_second;    // anchor -> members[1]
  ComplexMatrix to_third;     // anchor -> members[2]
};

/// H(r, to)^-1 H(r, from): carries `from`'s beamformer to `to`'s so that both
/// arrive collinear at receiver r.
inline ComplexMatrix transfer(const ChannelRealization& ch, int receiver, int from_tx, int to_tx) {
  return inverse(ch(receiver, to_tx)) * ch(receiver, from_tx);
}

inline ChainMatrix chain_matrix(const Chain& chain, const ChannelRealization& ch) {
  const int ta = chain.members[0].transmitter;
  const int tb = chain.members[1].transmitter;
  const int tc = chain.members[2].transmitter;
  for (int t : {ta, tb, tc}) {
    if (t < 0 || t >= ch.k) throw Error(Errc::out_of_range, "chain references a missing transmitter");
  }
  ChainMatrix cm;
  cm.chain = chain;
  cm.to_second = transfer(ch, 2, ta, tb);
  cm.to_third = transfer(ch, 1, ta, tc);
  const ComplexMatrix second_to_third = transfer(ch, 0, tb, tc);
  const ComplexMatrix third_to_anchor = transfer(ch, 1, tc, ta);
  cm.e = third_to_anchor * second_to_third * cm.to_second;
  return cm;
}

inline std::uint64_t set_space_size(int k) {
  std::uint64_t n = 1;
  for (int c = 0; c < k; ++c) n *= static_cast<std::uint64_t>(2 * k);
  return n;
}

using Choice = std::vector<int>;

/// Mixed-radix base-2K digits, choice[0] most significant.
inline Choice index_to_choice(std::uint64_t index, int k) {
  if (k < 1) throw Error(Errc::invalid_argument, "K must be positive");
  if (index >= set_space_size(k)) throw Error(Errc::out_of_range, "set index beyond (2K)^K");
  Choice choice(static_cast<std::size_t>(k));
  const auto radix = static_cast<std::uint64_t>(2 * k);
  for (int c = k - 1; c >= 0; --c) {
    choice[static_cast<std::size_t>(c)] = static_cast<int>(index % radix);
    index /= radix;
  }
  return choice;
}

inline std::uint64_t choice_to_index(const Choice& choice, int k) {
  if (static_cast<int>(choice.size()) != k) throw Error(Errc::out_of_range, "choice must have K digits");
  std::uint64_t index = 0;
  for (int digit : choice) {
    if (digit < 0 || digit >= 2 * k) throw Error(Errc::out_of_range, "choice digit beyond 2K");
    index = index * static_cast<std::uint64_t>(2 * k) + static_cast<std::uint64_t>(digit);
  }
  return index;
}

/// 3K unit-norm beamformers, stored receiver-major: v(i, j) steers s_ij.
struct BeamformerSet {
  int k = 0;
  std::uint64_t index = 0;
  Choice choice;
  std::vector<ComplexVector> vectors;

  const ComplexVector& v(int receiver, int transmitter) const {
    return vectors[static_cast<std::size_t>(receiver * k + transmitter)];
  }
  ComplexVector& v(int receiver, int transmitter) {
    return vectors[static_cast<std::size_t>(receiver * k + transmitter)];
  }
  const ComplexVector& v(BeamformerId id) const { return v(id.receiver, id.transmitter); }
  ComplexVector& v(BeamformerId id) { return v(id.receiver, id.transmitter); }
};

/// Eigen-decomposed chains of one scheme on one channel. Building any of the
/// (2K)^K sets from here costs no further factorizations.
struct SchemeBasis {
  AlignmentScheme scheme;
  std::vector<Chain> chains;
  std::vector<ChainMatrix> matrices;
  // candidates[c][e] = normalized (anchor, second, third) for eigenvector e of chain c.
  std::vector<std::vector<std::array<ComplexVector, kReceivers>>> candidates;
  std::vector<std::vector<Complex>> eigenvalues;

  int k() const { return scheme.k; }
  std::uint64_t size() const { return set_space_size(scheme.k); }
};

inline SchemeBasis prepare_scheme(const AlignmentScheme& scheme, const ChannelRealization& ch,
                                  double eig_tol = kDefaultEigTolerance) {
  if (scheme.k != ch.k) throw Error(Errc::invalid_argument, "scheme and channel disagree on K");
  SchemeBasis basis;
  basis.scheme = scheme;
  basis.chains = extract_chains(scheme);
  for (const auto& chain : basis.chains) {
    ChainMatrix cm = chain_matrix(chain, ch);
    const auto pairs = eig(cm.e, eig_tol);
    std::vector<std::array<ComplexVector, kReceivers>> cands;
    std::vector<Complex> values;
    for (const auto& p : pairs) {
      std::array<ComplexVector, kReceivers> trio{p.vector, cm.to_second * p.vector,
                                                 cm.to_third * p.vector};
      for (auto& v : trio) v.normalize();
      cands.push_back(std::move(trio));
      values.push_back(p.value);
    }
    basis.matrices.push_back(std::move(cm));
    basis.candidates.push_back(std::move(cands));
    basis.eigenvalues.push_back(std::move(values));
  }
  return basis;
}

inline BeamformerSet assemble(const SchemeBasis& basis, const Choice& choice) {
  const int k = basis.k();
  const std::uint64_t index = choice_to_index(choice, k);
  BeamformerSet set;
  set.k = k;
  set.index = index;
  set.choice = choice;
  set.vectors.assign(static_cast<std::size_t>(kReceivers * k), ComplexVector());
  for (std::size_t c = 0; c < basis.chains.size(); ++c) {
    const auto& trio = basis.candidates[c][static_cast<std::size_t>(choice[c])];
    for (int r = 0; r < kReceivers; ++r) {
      set.v(basis.chains[c].members[static_cast<std::size_t>(r)]) = trio[static_cast<std::size_t>(r)];
    }
  }
  return set;
}

inline BeamformerSet assemble(const SchemeBasis& basis, std::uint64_t index) {
  return assemble(basis, index_to_choice(index, basis.k()));
}

inline BeamformerSet build_beamformers(const AlignmentScheme& scheme, const ChannelRealization& ch,
                                       const Choice& choice) {
  return assemble(prepare_scheme(scheme, ch), choice);
}

struct ReceiverValidation {
  int receiver = 0;
  double max_pair_residual = 0.0;   // requirements i and iii
  double min_direction_sine = 1.0;  // requirement ii, among the K aligned directions
  int interference_rank = 0;
  int full_rank = 0;
};

struct ValidationReport {
  int k = 0;
  double tolerance = 0.0;
  std::array<ReceiverValidation, kReceivers> receivers;
  bool pass = false;

  double max_pair_residual() const {
    double m = 0.0;
    for (const auto& r : receivers) m = std::max(m, r.max_pair_residual);
    return m;
  }
};

inline constexpr double kRankTolerance = 1e-6;
inline constexpr double kMinDirectionSine = 1e-4;

/// Check requirements i-iii for one set at every receiver.
inline ValidationReport validate_ia(const BeamformerSet& set, const AlignmentScheme& scheme,
                                    const ChannelRealization& ch, double tol = 1e-8) {
  const int k = scheme.k;
  ValidationReport report;
  report.k = k;
  report.tolerance = tol;
  bool ok = true;
  for (int i = 0; i < kReceivers; ++i) {
    ReceiverValidation rv;
    rv.receiver = i;
    const auto pairs = alignment_pairs(scheme, i);
    std::vector<ComplexVector> directions;
    ComplexMatrix interference(2 * k, 2 * k);
    Eigen::Index col = 0;
    for (const auto& p : pairs) {
      const ComplexVector a = ch(i, p.first.transmitter) * set.v(p.first);
      const ComplexVector b = ch(i, p.second.transmitter) * set.v(p.second);
      rv.max_pair_residual = std::max(rv.max_pair_residual, collinearity_residual(a, b));
      interference.col(col++) = a;
      interference.col(col++) = b;
      directions.push_back(a);
    }
    for (std::size_t x = 0; x < directions.size(); ++x)
      for (std::size_t y = x + 1; y < directions.size(); ++y)
        rv.min_direction_sine =
            std::min(rv.min_direction_sine, collinearity_residual(directions[x], directions[y]));
    rv.interference_rank = numerical_rank(normalize_columns(interference), kRankTolerance);

    ComplexMatrix full(2 * k, 2 * k);
    for (int j = 0; j < k; ++j) full.col(j) = ch(i, j) * set.v(i, j);
    for (int n = 0; n < k; ++n) full.col(k + n) = directions[static_cast<std::size_t>(n)];
    rv.full_rank = numerical_rank(normalize_columns(full), kRankTolerance);

    ok = ok && rv.max_pair_residual < tol && rv.min_direction_sine > kMinDirectionSine &&
         rv.interference_rank == k && rv.full_rank == 2 * k;
    report.receivers[static_cast<std::size_t>(i)] = rv;
  }
  report.pass = ok;
  return report;
}

inline void write_validation_csv(std::ostream& os, const ValidationReport& report,
                                 bool header = true) {
  if (header) os << "receiver,max_pair_residual,interference_rank,full_rank\n";
  for (const auto& r : report.receivers) {
    os << (r.receiver + 1) << ',' << r.max_pair_residual << ',' << r.interference_rank << ','
       << r.full_rank << '\n';
  }
}

}  // namespace latinia
