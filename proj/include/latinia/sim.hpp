#pragma once

// Monte-Carlo experiments: SER and sum-rate sweeps, surrogate-vs-truth
// correlation, and construction validation. Channel draws are independent
// work units; every random stream is keyed by (seed, draw index, purpose), and
// per-draw partial results are merged in draw order, so the worker count never
// changes the output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <numbers>
#include <optional>
#include <span>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "latinia/beamform.hpp"
#include "latinia/channel.hpp"
#include "latinia/latin.hpp"
#include "latinia/receiver.hpp"
#include "latinia/rng.hpp"
#include "latinia/select.hpp"

namespace latinia {

// ---------------------------------------------------------------------------
// Configuration

/// Which alignment schemes a run searches: the first square, all squares,
/// or the first N squares (column triple (0,1,2) in each case).
struct SchemeScope {
  enum class Kind { first, all, count } kind = Kind::first;
  std::size_t count = 1;

  static SchemeScope parse(const std::string& text) {
    if (text == "first") return {Kind::first, 1};
    if (text == "all") return {Kind::all, 0};
    std::size_t pos = 0;
    long long n = -1;
    try {
      n = std::stoll(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != text.size() || n < 1) {
      throw Error(Errc::config, "--schemes must be first, all or a positive integer");
    }
    return {Kind::count, static_cast<std::size_t>(n)};
  }

  std::string str() const {
    switch (kind) {
      case Kind::first: return "first";
      case Kind::all: return "all";
      case Kind::count: return std::to_string(count);
    }
    return "?";
  }
};

inline std::vector<AlignmentScheme> schemes_for_scope(int k, const SchemeScope& scope) {
  std::vector<LatinSquare> squares;
  switch (scope.kind) {
    case SchemeScope::Kind::first: squares = first_fixed_first_row(k, 1); break;
    case SchemeScope::Kind::all: squares = enumerate_fixed_first_row(k); break;
    case SchemeScope::Kind::count: squares = first_fixed_first_row(k, scope.count); break;
  }
  std::vector<AlignmentScheme> out;
  out.reserve(squares.size());
  for (std::size_t n = 0; n < squares.size(); ++n) {
    out.push_back(scheme_from_columns(squares[n], {0, 1, 2}, n));
  }
  return out;
}

struct SimConfig {
  int k = 3;
  std::uint64_t seed = 1;
  double snr_start_db = 0.0;
  double snr_stop_db = 30.0;
  double snr_step_db = 5.0;
  std::uint64_t trials = 100;
  std::uint64_t symbols = 1000;
  std::string modulation = "qpsk";
  ObjectiveKind objective = ObjectiveKind::minmax_snr;
  std::vector<Strategy> strategies{Strategy::shortlist(Surrogate::cn, 13)};
  SchemeScope scope;
  bool noise = true;
  int threads = 1;

  void validate() const {
    if (k < 3) throw Error(Errc::config, "K must be at least 3");
    if (k > kMaxLatinOrder) throw Error(Errc::config, "K must be at most 6");
    if (!(snr_step_db > 0.0)) throw Error(Errc::config, "SNR step must be positive");
    if (snr_stop_db < snr_start_db) throw Error(Errc::config, "SNR stop below start");
    if (trials < 1) throw Error(Errc::config, "trials must be at least 1");
    if (symbols < 1) throw Error(Errc::config, "symbols must be at least 1");
    if (modulation != "qpsk") throw Error(Errc::config, "only qpsk modulation is supported");
    if (strategies.empty()) throw Error(Errc::config, "at least one strategy is required");
    for (const auto& s : strategies) {
      if (s.kind != StrategyKind::exhaustive && s.u < 1) throw Error(Errc::config, "u must be >= 1");
    }
    if (threads < 1) throw Error(Errc::config, "threads must be >= 1");
  }

  std::vector<double> snr_grid() const {
    std::vector<double> grid;
    for (int n = 0;; ++n) {
      const double v = snr_start_db + n * snr_step_db;
      if (v > snr_stop_db + 1e-9) break;
      grid.push_back(v);
    }
    return grid;
  }

  /// One-line description written to every output file.
  std::string canonical() const {
    std::ostringstream os;
    os << "k=" << k << " seed=" << seed << " snr_db=" << snr_start_db << ':' << snr_stop_db << ':'
       << snr_step_db << " trials=" << trials << " symbols=" << symbols
       << " modulation=" << modulation << " objective=" << to_string(objective) << " strategies=";
    for (std::size_t n = 0; n < strategies.size(); ++n) {
      if (n) os << ',';
      os << strategy_label(strategies[n]);
      if (strategies[n].kind != StrategyKind::exhaustive) os << '/' << strategies[n].u;
    }
    os << " schemes=" << scope.str() << " noise=" << (noise ? "on" : "off")
       << " snr_axis=tx_power_db noise_var=1 power_split=equal";
    return os.str();
  }
};

/// P / 3: equal split of the per-transmitter power over its three streams.
inline double stream_power_for(double snr_db) {
  return std::pow(10.0, snr_db / 10.0) / kReceivers;
}

// ---------------------------------------------------------------------------
// Parallel draw loop

/// fn(draw) for draw in [0, n), spread over `threads` workers; results in
/// draw order. The first exception thrown by any worker is rethrown.
template <typename Fn>
auto parallel_map(std::uint64_t n, int threads, Fn&& fn) -> std::vector<decltype(fn(std::uint64_t{}))> {
  using R = decltype(fn(std::uint64_t{}));
  std::vector<std::optional<R>> slots(n);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::uint64_t d = next.fetch_add(1);
      if (d >= n) return;
      try {
        slots[d].emplace(fn(d));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    }
  };
  const int count = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(threads, 1)), std::max<std::uint64_t>(n, 1)));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Link layer

/// Gray-mapped QPSK with unit energy; symbol index bits are (I, Q).
inline Complex qpsk_symbol(unsigned bits) {
  constexpr double a = std::numbers::sqrt2 / 2.0;
  return {(bits & 1u) ? -a : a, (bits & 2u) ? -a : a};
}

inline unsigned qpsk_decide(Complex z) {
  return (z.real() < 0.0 ? 1u : 0u) | (z.imag() < 0.0 ? 2u : 0u);
}

/// The chosen set plus its zero-forcing decoders and effective gains.
struct Link {
  AlignmentScheme scheme;
  BeamformerSet set;
  std::array<std::vector<ComplexRow>, kReceivers> decoders;
  std::vector<Complex> gains;  // R_ij H_ij v_ij, receiver-major
  std::array<bool, kReceivers> degenerate{};
};

inline Link make_link(const SchemeBasis& basis, const ChannelRealization& ch, std::uint64_t index) {
  Link link;
  link.scheme = basis.scheme;
  link.set = assemble(basis, index);
  const int k = basis.k();
  link.gains.assign(static_cast<std::size_t>(kReceivers * k), Complex{});
  for (int i = 0; i < kReceivers; ++i) {
    const ReceiverSpaces rs = signal_space(link.set, link.scheme, ch, i);
    link.degenerate[static_cast<std::size_t>(i)] = rs.degenerate;
    link.decoders[static_cast<std::size_t>(i)] = rs.zf_rows;
    for (int j = 0; j < k; ++j) {
      link.gains[static_cast<std::size_t>(i * k + j)] =
          (rs.zf_rows[static_cast<std::size_t>(j)] * (ch(i, j) * link.set.v(i, j)))(0);
    }
  }
  return link;
}

/// x_j = sqrt(P_s) * sum_i v_ij s_ij for every transmitter; `symbols` is
/// receiver-major (3K entries).
inline std::vector<ComplexVector> transmit(const BeamformerSet& set, std::span<const Complex> symbols,
                                           double stream_power) {
  const double amp = std::sqrt(stream_power);
  std::vector<ComplexVector> x(static_cast<std::size_t>(set.k),
                               ComplexVector::Zero(2 * set.k));
  for (int i = 0; i < kReceivers; ++i)
    for (int j = 0; j < set.k; ++j)
      x[static_cast<std::size_t>(j)] += amp * symbols[static_cast<std::size_t>(i * set.k + j)] * set.v(i, j);
  return x;
}

inline ComplexVector receive(const ChannelRealization& ch, int receiver,
                             const std::vector<ComplexVector>& x) {
  ComplexVector y = ComplexVector::Zero(2 * ch.k);
  for (int j = 0; j < ch.k; ++j) y += ch(receiver, j) * x[static_cast<std::size_t>(j)];
  return y;
}

struct ErrorCount {
  std::uint64_t errors = 0;
  std::uint64_t symbols = 0;
};

/// Send `periods` symbol vectors over the link and count QPSK symbol errors
/// across all 3K streams.
inline ErrorCount simulate_link(const Link& link, const ChannelRealization& ch, double stream_power,
                                std::uint64_t periods, RandomStream& symbol_stream,
                                RandomStream* noise_stream) {
  const int k = link.set.k;
  const int streams = kReceivers * k;
  const double amp = std::sqrt(stream_power);
  ErrorCount count;
  std::vector<unsigned> sent(static_cast<std::size_t>(streams));
  std::vector<Complex> syms(static_cast<std::size_t>(streams));
  for (std::uint64_t t = 0; t < periods; ++t) {
    for (int n = 0; n < streams; ++n) {
      sent[static_cast<std::size_t>(n)] = static_cast<unsigned>(symbol_stream.next_u64() & 3u);
      syms[static_cast<std::size_t>(n)] = qpsk_symbol(sent[static_cast<std::size_t>(n)]);
    }
    const auto x = transmit(link.set, syms, stream_power);
    for (int i = 0; i < kReceivers; ++i) {
      ComplexVector y = receive(ch, i, x);
      if (noise_stream) y += awgn(2 * k, *noise_stream);
      for (int j = 0; j < k; ++j) {
        const auto n = static_cast<std::size_t>(i * k + j);
        ++count.symbols;
        if (link.degenerate[static_cast<std::size_t>(i)] || amp == 0.0) {
          ++count.errors;
          continue;
        }
        const Complex z = (link.decoders[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y)(0) /
                          (amp * link.gains[n]);
        if (qpsk_decide(z) != sent[n]) ++count.errors;
      }
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Experiments

namespace detail {

inline std::vector<SchemeBasis> prepare_all(const std::vector<AlignmentScheme>& schemes,
                                            const ChannelRealization& ch) {
  std::vector<SchemeBasis> bases;
  bases.reserve(schemes.size());
  for (const auto& s : schemes) bases.push_back(prepare_scheme(s, ch));
  return bases;
}

inline Objective objective_for(ObjectiveKind kind, double stream_power) {
  return kind == ObjectiveKind::minmax_snr ? Objective::minmax() : Objective::sum_rate(stream_power);
}

inline std::uint64_t reported_u(const Strategy& s, std::uint64_t space) {
  return s.kind == StrategyKind::exhaustive ? space : s.u;
}

}  // namespace detail

struct SerPoint {
  double snr_db = 0.0;
  std::string strategy;
  std::string objective;
  std::string surrogate;
  std::uint64_t u = 0;
  std::size_t schemes = 0;
  std::uint64_t errors = 0;
  std::uint64_t symbols = 0;
  double ser = 0.0;
};

struct SimStats {
  std::uint64_t degenerate_draws = 0;
};

/// Rows ordered by SNR point, then by strategy in configuration order.
inline std::vector<SerPoint> run_ser(const SimConfig& cfg, SimStats* stats = nullptr) {
  cfg.validate();
  const auto schemes = schemes_for_scope(cfg.k, cfg.scope);
  const auto grid = cfg.snr_grid();
  const std::size_t ns = cfg.strategies.size();
  std::uint64_t space = 0;
  for (const auto& s : schemes) space += set_space_size(s.k);

  struct DrawResult {
    std::vector<ErrorCount> counts;  // [snr][strategy]
    bool degenerate = false;
  };
  auto per_draw = [&](std::uint64_t d) {
    DrawResult out;
    out.counts.assign(grid.size() * ns, ErrorCount{});
    const auto ch = draw_channel(cfg.k, cfg.seed, d);
    std::vector<SchemeBasis> bases;
    try {
      bases = detail::prepare_all(schemes, ch);
    } catch (const Error& e) {
      if (e.code() != Errc::singular_matrix && e.code() != Errc::non_convergence) throw;
      out.degenerate = true;
      for (auto& c : out.counts) c = {3ull * cfg.k * cfg.symbols, 3ull * cfg.k * cfg.symbols};
      return out;
    }
    for (std::size_t s = 0; s < ns; ++s) {
      const Strategy& strat = cfg.strategies[s];
      std::optional<SelectionResult> fixed;
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const double ps = stream_power_for(grid[p]);
        SelectionResult chosen;
        if (cfg.objective == ObjectiveKind::minmax_snr && fixed) {
          chosen = *fixed;
        } else {
          RandomStream sel(cfg.seed, d, StreamPurpose::selection, s);
          chosen = select_over_schemes(detail::objective_for(cfg.objective, ps), strat, bases, ch, &sel);
          if (cfg.objective == ObjectiveKind::minmax_snr) fixed = chosen;
        }
        const Link link = make_link(bases[chosen.scheme_index], ch, chosen.set_index);
        RandomStream sym(cfg.seed, d, StreamPurpose::symbols);
        RandomStream noise(cfg.seed, d, StreamPurpose::noise, p);
        out.counts[p * ns + s] =
            simulate_link(link, ch, ps, cfg.symbols, sym, cfg.noise ? &noise : nullptr);
      }
    }
    return out;
  };
  const auto draws = parallel_map(cfg.trials, cfg.threads, per_draw);

  std::vector<SerPoint> points;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (std::size_t s = 0; s < ns; ++s) {
      const Strategy& strat = cfg.strategies[s];
      SerPoint pt;
      pt.snr_db = grid[p];
      pt.strategy = strategy_label(strat);
      pt.objective = to_string(cfg.objective);
      pt.surrogate = strat.kind == StrategyKind::shortlist ? to_string(strat.surrogate) : "none";
      pt.u = detail::reported_u(strat, space);
      pt.schemes = schemes.size();
      for (const auto& dr : draws) {
        pt.errors += dr.counts[p * ns + s].errors;
        pt.symbols += dr.counts[p * ns + s].symbols;
      }
      pt.ser = pt.symbols ? static_cast<double>(pt.errors) / static_cast<double>(pt.symbols) : 0.0;
      points.push_back(pt);
    }
  }
  if (stats) {
    for (const auto& dr : draws) stats->degenerate_draws += dr.degenerate ? 1 : 0;
  }
  return points;
}

struct SumRatePoint {
  double snr_db = 0.0;
  std::string strategy;
  std::string objective;
  std::string surrogate;
  std::uint64_t u = 0;
  std::size_t schemes = 0;
  double mean_sum_rate = 0.0;
  std::uint64_t draws = 0;
};

/// Sum-rate of a chosen set at the given per-stream power.
inline double link_sum_rate(const SchemeBasis& basis, const ChannelRealization& ch,
                            std::uint64_t index, double stream_power) {
  const BeamformerSet set = assemble(basis, index);
  const auto amp = stream_amplitudes(set, basis.scheme, ch);
  return score(Objective::sum_rate(stream_power), amp);
}

inline std::vector<SumRatePoint> run_sumrate(const SimConfig& cfg, SimStats* stats = nullptr) {
  cfg.validate();
  const auto schemes = schemes_for_scope(cfg.k, cfg.scope);
  const auto grid = cfg.snr_grid();
  const std::size_t ns = cfg.strategies.size();
  std::uint64_t space = 0;
  for (const auto& s : schemes) space += set_space_size(s.k);

  struct DrawResult {
    std::vector<double> rates;  // [snr][strategy]
    bool degenerate = false;
  };
  auto per_draw = [&](std::uint64_t d) {
    DrawResult out;
    out.rates.assign(grid.size() * ns, 0.0);
    const auto ch = draw_channel(cfg.k, cfg.seed, d);
    std::vector<SchemeBasis> bases;
    try {
      bases = detail::prepare_all(schemes, ch);
    } catch (const Error& e) {
      if (e.code() != Errc::singular_matrix && e.code() != Errc::non_convergence) throw;
      out.degenerate = true;
      return out;
    }
    for (std::size_t s = 0; s < ns; ++s) {
      std::optional<SelectionResult> fixed;
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const double ps = stream_power_for(grid[p]);
        SelectionResult chosen;
        if (cfg.objective == ObjectiveKind::minmax_snr && fixed) {
          chosen = *fixed;
        } else {
          RandomStream sel(cfg.seed, d, StreamPurpose::selection, s);
          chosen = select_over_schemes(detail::objective_for(cfg.objective, ps), cfg.strategies[s],
                                       bases, ch, &sel);
          if (cfg.objective == ObjectiveKind::minmax_snr) fixed = chosen;
        }
        out.rates[p * ns + s] = link_sum_rate(bases[chosen.scheme_index], ch, chosen.set_index, ps);
      }
    }
    return out;
  };
  const auto draws = parallel_map(cfg.trials, cfg.threads, per_draw);

  std::vector<SumRatePoint> points;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (std::size_t s = 0; s < ns; ++s) {
      const Strategy& strat = cfg.strategies[s];
      SumRatePoint pt;
      pt.snr_db = grid[p];
      pt.strategy = strategy_label(strat);
      pt.objective = to_string(cfg.objective);
      pt.surrogate = strat.kind == StrategyKind::shortlist ? to_string(strat.surrogate) : "none";
      pt.u = detail::reported_u(strat, space);
      pt.schemes = schemes.size();
      double total = 0.0;
      for (const auto& dr : draws) total += dr.rates[p * ns + s];
      pt.draws = draws.size();
      pt.mean_sum_rate = total / static_cast<double>(draws.size());
      points.push_back(pt);
    }
  }
  if (stats) {
    for (const auto& dr : draws) stats->degenerate_draws += dr.degenerate ? 1 : 0;
  }
  return points;
}

// ---------------------------------------------------------------------------
// Correlation study

/// Average ranks (1-based), ties sharing the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) rank[order[m]] = r;
    i = j + 1;
  }
  return rank;
}

/// Spearman rank correlation (Pearson on average ranks); 0 when either
/// side is constant.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::invalid_argument, "spearman needs two equal-length samples");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct CorrelationRecord {
  std::uint64_t rank = 0;                // 1-based position
  double true_metric_desc = 0.0;         // rank-th best true metric
  double surrogate_ordered_true = 0.0;   // true metric of the rank-th best surrogate
  double surrogate_value = 0.0;          // rank-th smallest surrogate
  std::uint64_t set_index = 0;           // set at that surrogate position
};

struct CorrelationResult {
  std::vector<CorrelationRecord> records;
  double spearman = 0.0;
};

/// Correlation of the surrogate ordering against the true metric from
/// precomputed per-set values. Lower surrogate is better, higher true is
/// better, so the coefficient is taken against the negated surrogate.
inline CorrelationResult correlate_values(const std::vector<double>& truth,
                                          const std::vector<double>& surrogate) {
  const std::size_t n = truth.size();
  std::vector<std::size_t> by_truth(n), by_surrogate(n);
  std::iota(by_truth.begin(), by_truth.end(), std::size_t{0});
  std::iota(by_surrogate.begin(), by_surrogate.end(), std::size_t{0});
  std::stable_sort(by_truth.begin(), by_truth.end(), [&](std::size_t a, std::size_t b) { return truth[a] > truth[b]; });
  std::stable_sort(by_surrogate.begin(), by_surrogate.end(), [&](std::size_t a, std::size_t b) { return surrogate[a] < surrogate[b]; });
  CorrelationResult result;
  result.records.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    result.records.push_back({r + 1, truth[by_truth[r]], truth[by_surrogate[r]],
                              surrogate[by_surrogate[r]], by_surrogate[r]});
  }
  std::vector<double> neg(n);
  for (std::size_t i = 0; i < n; ++i) neg[i] = -surrogate[i];
  result.spearman = spearman(truth, neg);
  return result;
}

/// One draw, first scheme of the scope, whole set space. The true metric is
/// the worst-stream SNR at unit stream power (minmax) or the sum-rate at the
/// first SNR point (sumrate); the surrogate aggregation follows the objective.
inline CorrelationResult run_correlation(const SimConfig& cfg, std::uint64_t draw_index,
                                         ObjectiveKind objective, Surrogate surrogate) {
  cfg.validate();
  const auto schemes = schemes_for_scope(cfg.k, cfg.scope);
  const auto ch = draw_channel(cfg.k, cfg.seed, draw_index);
  const SchemeBasis basis = prepare_scheme(schemes.front(), ch);
  const Objective obj = detail::objective_for(objective, stream_power_for(cfg.snr_start_db));
  const std::uint64_t n = basis.size();
  std::vector<double> truth(n), sur(n);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    const BeamformerSet set = assemble(basis, idx);
    truth[idx] = score(obj, stream_amplitudes(set, basis.scheme, ch));
    sur[idx] = aggregate(obj.aggregation, receiver_kappas(set, basis.scheme, ch, surrogate));
  }
  return correlate_values(truth, sur);
}

// ---------------------------------------------------------------------------
// Validation runs

struct ValidateOptions {
  std::optional<std::uint64_t> max_choices;  // unset: per-K default
  bool force_exhaustive = false;
  bool corrupt = false;
};

/// Desk-scale default number of checked sets per scheme.
inline std::uint64_t default_validate_choices(int k) {
  if (k <= 3) return set_space_size(k);
  if (k == 4) return 256;
  return 1000;
}

inline SchemeScope default_validate_scope(int k) {
  if (k <= 3) return {SchemeScope::Kind::all, 0};
  if (k == 4) return {SchemeScope::Kind::count, 4};
  return {SchemeScope::Kind::first, 1};
}

struct ValidationSummary {
  std::uint64_t draws = 0;
  std::size_t schemes = 0;
  std::uint64_t sets_checked = 0;
  std::uint64_t failures = 0;  // sets failing the checks (clean mode)
  std::uint64_t corrupted_detected = 0;
  std::array<ReceiverValidation, kReceivers> worst{};  // max residual, min sine, ranks furthest from target
  std::uint64_t degenerate_draws = 0;

  double max_pair_residual() const {
    double m = 0.0;
    for (const auto& r : worst) m = std::max(m, r.max_pair_residual);
    return m;
  }
};

inline BeamformerSet corrupt_one(BeamformerSet set, RandomStream& stream) {
  const auto n = stream.below(set.vectors.size());
  ComplexVector v = awgn(2 * set.k, stream);
  set.vectors[n] = v / v.norm();
  return set;
}

inline ValidationSummary run_validate(const SimConfig& cfg, const ValidateOptions& opt = {}) {
  cfg.validate();
  const auto schemes = schemes_for_scope(cfg.k, cfg.scope);
  const std::uint64_t space = set_space_size(cfg.k);
  const std::uint64_t per_scheme =
      opt.force_exhaustive ? space : std::min(space, opt.max_choices.value_or(default_validate_choices(cfg.k)));

  auto per_draw = [&](std::uint64_t d) {
    ValidationSummary part;
    part.draws = 1;
    for (int i = 0; i < kReceivers; ++i) {
      part.worst[static_cast<std::size_t>(i)] = {i, 0.0, 1.0, cfg.k, 2 * cfg.k};
    }
    const auto ch = draw_channel(cfg.k, cfg.seed, d);
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      SchemeBasis basis;
      try {
        basis = prepare_scheme(schemes[s], ch);
      } catch (const Error& e) {
        if (e.code() != Errc::singular_matrix && e.code() != Errc::non_convergence) throw;
        ++part.degenerate_draws;
        ++part.failures;
        continue;
      }
      std::vector<std::uint64_t> indices;
      if (per_scheme == space) {
        indices.resize(space);
        std::iota(indices.begin(), indices.end(), std::uint64_t{0});
      } else {
        RandomStream pick(cfg.seed, d, StreamPurpose::validation, s);
        indices = sample_distinct(space, per_scheme, pick);
      }
      RandomStream corrupt_stream(cfg.seed, d, StreamPurpose::validation, 1000003 + s);
      for (std::uint64_t idx : indices) {
        BeamformerSet set = assemble(basis, idx);
        if (opt.corrupt) set = corrupt_one(std::move(set), corrupt_stream);
        const auto report = validate_ia(set, schemes[s], ch);
        ++part.sets_checked;
        if (opt.corrupt) {
          if (!report.pass) ++part.corrupted_detected;
          else ++part.failures;
          continue;
        }
        if (!report.pass) ++part.failures;
        for (int i = 0; i < kReceivers; ++i) {
          auto& w = part.worst[static_cast<std::size_t>(i)];
          const auto& r = report.receivers[static_cast<std::size_t>(i)];
          w.max_pair_residual = std::max(w.max_pair_residual, r.max_pair_residual);
          w.min_direction_sine = std::min(w.min_direction_sine, r.min_direction_sine);
          if (std::abs(r.interference_rank - cfg.k) > std::abs(w.interference_rank - cfg.k))
            w.interference_rank = r.interference_rank;
          if (std::abs(r.full_rank - 2 * cfg.k) > std::abs(w.full_rank - 2 * cfg.k))
            w.full_rank = r.full_rank;
        }
      }
    }
    return part;
  };
  const auto parts = parallel_map(cfg.trials, cfg.threads, per_draw);

  ValidationSummary total;
  total.schemes = schemes.size();
  for (int i = 0; i < kReceivers; ++i) {
    total.worst[static_cast<std::size_t>(i)] = {i, 0.0, 1.0, cfg.k, 2 * cfg.k};
  }
  for (const auto& p : parts) {
    total.draws += p.draws;
    total.sets_checked += p.sets_checked;
    total.failures += p.failures;
    total.corrupted_detected += p.corrupted_detected;
    total.degenerate_draws += p.degenerate_draws;
    for (int i = 0; i < kReceivers; ++i) {
      auto& w = total.worst[static_cast<std::size_t>(i)];
      const auto& r = p.worst[static_cast<std::size_t>(i)];
      w.max_pair_residual = std::max(w.max_pair_residual, r.max_pair_residual);
      w.min_direction_sine = std::min(w.min_direction_sine, r.min_direction_sine);
      if (std::abs(r.interference_rank - cfg.k) > std::abs(w.interference_rank - cfg.k))
        w.interference_rank = r.interference_rank;
      if (std::abs(r.full_rank - 2 * cfg.k) > std::abs(w.full_rank - 2 * cfg.k)) w.full_rank = r.full_rank;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// CSV output

inline void write_config_line(std::ostream& os, const SimConfig& cfg) {
  os << "# config: " << cfg.canonical() << '\n';
}

inline void write_ser_csv(std::ostream& os, const SimConfig& cfg, const std::vector<SerPoint>& pts) {
  write_config_line(os, cfg);
  os << "snr_db,strategy,objective,surrogate,u,schemes,errors,symbols,ser\n";
  os << std::setprecision(10);
  for (const auto& p : pts) {
    os << p.snr_db << ',' << p.strategy << ',' << p.objective << ',' << p.surrogate << ',' << p.u
       << ',' << p.schemes << ',' << p.errors << ',' << p.symbols << ',' << p.ser << '\n';
  }
}

inline void write_sumrate_csv(std::ostream& os, const SimConfig& cfg,
                              const std::vector<SumRatePoint>& pts) {
  write_config_line(os, cfg);
  os << "snr_db,strategy,objective,surrogate,u,schemes,mean_sum_rate,draws\n";
  os << std::setprecision(10);
  for (const auto& p : pts) {
    os << p.snr_db << ',' << p.strategy << ',' << p.objective << ',' << p.surrogate << ',' << p.u
       << ',' << p.schemes << ',' << p.mean_sum_rate << ',' << p.draws << '\n';
  }
}

inline void write_correlation_csv(std::ostream& os, const SimConfig& cfg,
                                  const CorrelationResult& res) {
  write_config_line(os, cfg);
  os << "rank,true_metric_desc,surrogate_ordered_true,surrogate_value\n";
  os << std::setprecision(12);
  for (const auto& r : res.records) {
    os << r.rank << ',' << r.true_metric_desc << ',' << r.surrogate_ordered_true << ','
       << r.surrogate_value << '\n';
  }
  os << "# spearman=" << res.spearman << '\n';
}

inline void write_validation_summary_csv(std::ostream& os, const SimConfig& cfg,
                                         const ValidationSummary& sum) {
  write_config_line(os, cfg);
  os << "receiver,max_pair_residual,interference_rank,full_rank\n";
  for (const auto& r : sum.worst) {
    os << (r.receiver + 1) << ',' << r.max_pair_residual << ',' << r.interference_rank << ','
       << r.full_rank << '\n';
  }
}

}  // namespace latinia
