#pragma once

// Beamformer-set selection: exhaustive search on the true objective, the
// CN/OCN shortlist (score every set with the cheap surrogate, keep the u
// best, evaluate only those), and the Random-u baseline.
//
// Ties are always broken towards the smaller set index (then the smaller
// scheme index), so a shortlist covering the whole space reproduces the
// exhaustive choice exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "latinia/beamform.hpp"
#include "latinia/receiver.hpp"
#include "latinia/rng.hpp"

namespace latinia {

enum class ObjectiveKind { minmax_snr, sum_rate };
enum class Aggregation { max, sum };

inline const char* to_string(ObjectiveKind k) {
  return k == ObjectiveKind::minmax_snr ? "minmax" : "sumrate";
}

struct Objective {
  ObjectiveKind kind = ObjectiveKind::minmax_snr;
  double stream_power = 1.0;
  Aggregation aggregation = Aggregation::max;

  static Objective minmax(double stream_power = 1.0) {
    return {ObjectiveKind::minmax_snr, stream_power, Aggregation::max};
  }
  static Objective sum_rate(double stream_power) {
    return {ObjectiveKind::sum_rate, stream_power, Aggregation::sum};
  }
};

/// min_i |R H v|_i over the 3K streams.
inline double minmax_snr(std::span<const double> amplitudes) {
  return *std::min_element(amplitudes.begin(), amplitudes.end());
}

/// Objective value from stream amplitudes: the worst stream SNR, or the
/// sum-rate in bits/s/Hz.
inline double score(const Objective& obj, std::span<const double> amplitudes) {
  if (obj.kind == ObjectiveKind::minmax_snr) {
    const double a = minmax_snr(amplitudes);
    return obj.stream_power * a * a;
  }
  double total = 0.0;
  for (double a : amplitudes) total += std::log2(1.0 + obj.stream_power * a * a);
  return total;
}

inline double aggregate(Aggregation agg, const std::array<double, kReceivers>& kappas) {
  if (agg == Aggregation::max) return *std::max_element(kappas.begin(), kappas.end());
  return kappas[0] + kappas[1] + kappas[2];
}

inline double evaluate_true(const Objective& obj, const SchemeBasis& basis,
                            const ChannelRealization& ch, std::uint64_t index,
                            FactorizationCounter* counter = nullptr) {
  const BeamformerSet set = assemble(basis, index);
  const auto amp = stream_amplitudes(set, basis.scheme, ch, counter);
  return score(obj, amp);
}

inline double evaluate_surrogate(Aggregation agg, Surrogate kind, const SchemeBasis& basis,
                                 const ChannelRealization& ch, std::uint64_t index,
                                 FactorizationCounter* counter = nullptr) {
  const BeamformerSet set = assemble(basis, index);
  return aggregate(agg, receiver_kappas(set, basis.scheme, ch, kind, counter));
}

enum class StrategyKind { exhaustive, shortlist, random };

struct Strategy {
  StrategyKind kind = StrategyKind::exhaustive;
  Surrogate surrogate = Surrogate::cn;
  std::uint64_t u = 1;
  bool force_exhaustive = false;

  static Strategy exhaustive(bool force = false) { return {StrategyKind::exhaustive, Surrogate::cn, 0, force}; }
  static Strategy shortlist(Surrogate s, std::uint64_t u) { return {StrategyKind::shortlist, s, u, false}; }
  static Strategy random(std::uint64_t u) { return {StrategyKind::random, Surrogate::cn, u, false}; }
};

/// Command-line label: optimal, cn, ocn or random.
inline std::string strategy_label(const Strategy& s) {
  switch (s.kind) {
    case StrategyKind::exhaustive: return "optimal";
    case StrategyKind::shortlist: return to_string(s.surrogate);
    case StrategyKind::random: return "random";
  }
  return "unknown";
}

struct SelectionResult {
  std::size_t scheme_index = 0;
  std::uint64_t set_index = 0;
  double objective = -std::numeric_limits<double>::infinity();
  std::uint64_t u = 0;
  FactorizationCounter counter;
  std::uint64_t candidates_evaluated = 0;
  std::uint64_t search_space = 0;
};

namespace detail {

inline bool better(double value, std::uint64_t index, const SelectionResult& best) {
  return value > best.objective || (value == best.objective && index < best.set_index);
}

inline void check_u(std::uint64_t u, std::uint64_t space) {
  if (u < 1 || u > space) throw Error(Errc::invalid_argument, "u must lie in [1, |B|]");
}

}  // namespace detail

inline constexpr int kMaxExhaustiveK = 4;

inline SelectionResult select_exhaustive(const Objective& obj, const SchemeBasis& basis,
                                         const ChannelRealization& ch, bool force = false) {
  if (basis.k() > kMaxExhaustiveK && !force) {
    throw Error(Errc::budget_exceeded, "exhaustive search refused for K >= 5 without force");
  }
  SelectionResult best;
  best.search_space = basis.size();
  best.u = basis.size();
  for (std::uint64_t idx = 0; idx < basis.size(); ++idx) {
    const double value = evaluate_true(obj, basis, ch, idx, &best.counter);
    ++best.candidates_evaluated;
    if (detail::better(value, idx, best)) {
      best.objective = value;
      best.set_index = idx;
    }
  }
  return best;
}

/// Set indices sorted by ascending surrogate aggregate, ties by index.
inline std::vector<std::uint64_t> surrogate_order(Aggregation agg, Surrogate kind,
                                                  const SchemeBasis& basis,
                                                  const ChannelRealization& ch,
                                                  FactorizationCounter* counter = nullptr,
                                                  std::vector<double>* values = nullptr) {
  const std::uint64_t n = basis.size();
  std::vector<double> score_of(n);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    score_of[idx] = evaluate_surrogate(agg, kind, basis, ch, idx, counter);
  }
  std::vector<std::uint64_t> order(n);
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    return score_of[a] < score_of[b];
  });
  if (values) *values = std::move(score_of);
  return order;
}

inline SelectionResult select_cn_shortlist(const Objective& obj, Surrogate kind, std::uint64_t u,
                                           const SchemeBasis& basis, const ChannelRealization& ch) {
  detail::check_u(u, basis.size());
  SelectionResult best;
  best.search_space = basis.size();
  best.u = u;
  const auto order = surrogate_order(obj.aggregation, kind, basis, ch, &best.counter);
  for (std::uint64_t n = 0; n < u; ++n) {
    const std::uint64_t idx = order[n];
    const double value = evaluate_true(obj, basis, ch, idx, &best.counter);
    ++best.candidates_evaluated;
    if (detail::better(value, idx, best)) {
      best.objective = value;
      best.set_index = idx;
    }
  }
  return best;
}

/// u distinct indices from [0, n), uniformly (Floyd's algorithm), ascending.
inline std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t u,
                                                  RandomStream& stream) {
  std::unordered_set<std::uint64_t> picked;
  picked.reserve(u);
  for (std::uint64_t j = n - u; j < n; ++j) {
    const std::uint64_t t = stream.below(j + 1);
    if (!picked.insert(t).second) picked.insert(j);
  }
  std::vector<std::uint64_t> out(picked.begin(), picked.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline SelectionResult select_random_u(const Objective& obj, std::uint64_t u,
                                       const SchemeBasis& basis, const ChannelRealization& ch,
                                       RandomStream& stream) {
  detail::check_u(u, basis.size());
  SelectionResult best;
  best.search_space = basis.size();
  best.u = u;
  for (std::uint64_t idx : sample_distinct(basis.size(), u, stream)) {
    const double value = evaluate_true(obj, basis, ch, idx, &best.counter);
    ++best.candidates_evaluated;
    if (detail::better(value, idx, best)) {
      best.objective = value;
      best.set_index = idx;
    }
  }
  return best;
}

inline SelectionResult select_in_scheme(const Objective& obj, const Strategy& strategy,
                                        const SchemeBasis& basis, const ChannelRealization& ch,
                                        RandomStream* stream) {
  switch (strategy.kind) {
    case StrategyKind::exhaustive:
      return select_exhaustive(obj, basis, ch, strategy.force_exhaustive);
    case StrategyKind::shortlist:
      return select_cn_shortlist(obj, strategy.surrogate, strategy.u, basis, ch);
    case StrategyKind::random:
      if (!stream) throw Error(Errc::invalid_argument, "Random-u needs a random stream");
      return select_random_u(obj, strategy.u, basis, ch, *stream);
  }
  throw Error(Errc::invalid_argument, "unknown strategy");
}

/// Apply `strategy` inside every scheme and keep the overall best; ties go
/// to the earlier scheme. Counters and search space are summed.
inline SelectionResult select_over_schemes(const Objective& obj, const Strategy& strategy,
                                           std::span<const SchemeBasis> bases,
                                           const ChannelRealization& ch,
                                           RandomStream* stream = nullptr) {
  if (bases.empty()) throw Error(Errc::invalid_argument, "no schemes to select from");
  SelectionResult overall;
  bool have = false;
  FactorizationCounter counter;
  std::uint64_t evaluated = 0, space = 0;
  for (std::size_t s = 0; s < bases.size(); ++s) {
    SelectionResult r = select_in_scheme(obj, strategy, bases[s], ch, stream);
    r.scheme_index = s;
    counter += r.counter;
    evaluated += r.candidates_evaluated;
    space += r.search_space;
    if (!have || r.objective > overall.objective) {
      overall = r;
      have = true;
    }
  }
  overall.counter = counter;
  overall.candidates_evaluated = evaluated;
  overall.search_space = space;
  return overall;
}

inline void write_selection_header(std::ostream& os) {
  os << "scheme,strategy,surrogate,u,chosen_index,objective,svd_count,eval_count\n";
}

inline void write_selection_row(std::ostream& os, const SelectionResult& r, const Strategy& s) {
  os << r.scheme_index << ',' << strategy_label(s) << ','
     << (s.kind == StrategyKind::shortlist ? to_string(s.surrogate) : "none") << ',' << r.u << ','
     << r.set_index << ',' << r.objective << ',' << r.counter.surrogate << ','
     << r.counter.true_objective << '\n';
}

}  // namespace latinia
