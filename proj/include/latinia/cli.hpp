#pragma once

// Command-line front end: validate | ser | sumrate | correlate | enumerate-latin.
// Exit status: 0 success, 1 validation failure, 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latinia/channel.hpp"
#include "latinia/latin.hpp"
#include "latinia/sim.hpp"

namespace latinia {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitConfigError = 2;

namespace detail {

struct CliOptions {
  int k = 0;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> trials;
  std::uint64_t symbols = 1000;
  double snr_start = 0.0;
  double snr_stop = 30.0;
  double snr_step = 5.0;
  std::vector<std::string> strategies;
  std::optional<std::string> objective;
  std::optional<std::uint64_t> u;
  std::optional<std::string> schemes;
  std::string out;
  std::string dump_channel;
  bool force_exhaustive = false;
  bool no_noise = false;
  bool corrupt = false;
  bool dump = false;
  int threads = 1;
  std::uint64_t draw = 0;
};

inline void add_common(CLI::App* sub, CliOptions& o) {
  sub->add_option("--k", o.k, "Number of transmitters K (antennas 2K)")->required();
  sub->add_option("--seed", o.seed, "Master RNG seed");
  sub->add_option("--trials", o.trials, "Channel draws");
  sub->add_option("--schemes", o.schemes, "Alignment schemes: first, all or N");
  sub->add_option("--out", o.out, "Output CSV path (default: stdout)");
  sub->add_option("--dump-channel", o.dump_channel, "Write draw 0's channel as CSV");
  sub->add_option("--threads", o.threads, "Worker threads");
  sub->add_flag("--force-exhaustive", o.force_exhaustive, "Allow exhaustive search at K >= 5");
}

inline void add_selection(CLI::App* sub, CliOptions& o) {
  sub->add_option("--strategy", o.strategies, "optimal, cn, ocn, random (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"optimal", "cn", "ocn", "random"}));
  sub->add_option("--objective", o.objective, "minmax or sumrate")
      ->check(CLI::IsMember({"minmax", "sumrate"}));
  sub->add_option("--u", o.u, "Shortlist / random sample size");
}

inline void add_sweep(CLI::App* sub, CliOptions& o) {
  sub->add_option("--symbols", o.symbols, "Symbol periods per draw and SNR point");
  sub->add_option("--snr-start", o.snr_start, "First SNR point (dB, per-transmitter power)");
  sub->add_option("--snr-stop", o.snr_stop, "Last SNR point (dB)");
  sub->add_option("--snr-step", o.snr_step, "SNR step (dB)");
  sub->add_flag("--no-noise", o.no_noise, "Disable receiver noise");
}

inline ObjectiveKind parse_objective(const std::optional<std::string>& text, ObjectiveKind fallback) {
  if (!text) return fallback;
  return *text == "sumrate" ? ObjectiveKind::sum_rate : ObjectiveKind::minmax_snr;
}

inline SimConfig make_config(const CliOptions& o, ObjectiveKind default_objective,
                             std::uint64_t default_trials) {
  SimConfig cfg;
  cfg.k = o.k;
  cfg.seed = o.seed;
  cfg.trials = o.trials.value_or(default_trials);
  cfg.symbols = o.symbols;
  cfg.snr_start_db = o.snr_start;
  cfg.snr_stop_db = o.snr_stop;
  cfg.snr_step_db = o.snr_step;
  cfg.objective = parse_objective(o.objective, default_objective);
  cfg.noise = !o.no_noise;
  cfg.threads = o.threads;
  if (o.schemes) cfg.scope = SchemeScope::parse(*o.schemes);

  // CN13 for the worst-stream objective, CN1 for sum-rate.
  const std::uint64_t u = o.u.value_or(cfg.objective == ObjectiveKind::minmax_snr ? 13 : 1);
  cfg.strategies.clear();
  const std::vector<std::string> names =
      o.strategies.empty() ? std::vector<std::string>{"cn"} : o.strategies;
  for (const auto& name : names) {
    if (name == "optimal") cfg.strategies.push_back(Strategy::exhaustive(o.force_exhaustive));
    else if (name == "cn") cfg.strategies.push_back(Strategy::shortlist(Surrogate::cn, u));
    else if (name == "ocn") cfg.strategies.push_back(Strategy::shortlist(Surrogate::ocn, u));
    else cfg.strategies.push_back(Strategy::random(u));
  }
  const std::uint64_t space = set_space_size(cfg.k);
  for (const auto& s : cfg.strategies) {
    if (s.kind != StrategyKind::exhaustive && s.u > space) {
      throw Error(Errc::config, "--u exceeds the per-scheme set space (2K)^K");
    }
    if (s.kind == StrategyKind::exhaustive && cfg.k > kMaxExhaustiveK && !s.force_exhaustive) {
      throw Error(Errc::config, "exhaustive search at K >= 5 needs --force-exhaustive");
    }
  }
  cfg.validate();
  return cfg;
}

/// Runs `write` against --out when given, otherwise against `out`.
template <typename Write>
void emit(const CliOptions& o, std::ostream& out, Write&& write) {
  if (o.out.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw Error(Errc::config, "cannot open --out path " + o.out);
  write(file);
}

inline void maybe_dump_channel(const CliOptions& o, const SimConfig& cfg) {
  if (o.dump_channel.empty()) return;
  std::ofstream file(o.dump_channel);
  if (!file) throw Error(Errc::config, "cannot open --dump-channel path " + o.dump_channel);
  write_channel_csv(file, draw_channel(cfg.k, cfg.seed, 0));
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latin-square interference alignment for the K x 3 MIMO X channel"};
  app.require_subcommand(1);
  detail::CliOptions o;

  auto* validate = app.add_subcommand("validate", "Check the alignment requirements on constructed sets");
  detail::add_common(validate, o);
  validate->add_flag("--corrupt", o.corrupt, "Replace one beamformer per set and expect detection");

  auto* ser = app.add_subcommand("ser", "Symbol error rate sweep");
  detail::add_common(ser, o);
  detail::add_selection(ser, o);
  detail::add_sweep(ser, o);

  auto* sumrate = app.add_subcommand("sumrate", "Mean sum-rate sweep");
  detail::add_common(sumrate, o);
  detail::add_selection(sumrate, o);
  detail::add_sweep(sumrate, o);

  auto* correlate = app.add_subcommand("correlate", "Surrogate ordering vs true metric on one draw");
  detail::add_common(correlate, o);
  detail::add_selection(correlate, o);
  correlate->add_option("--snr-start", o.snr_start, "SNR (dB) for the sum-rate metric");
  correlate->add_option("--draw", o.draw, "Channel draw index");

  auto* enumerate = app.add_subcommand("enumerate-latin", "Count Latin squares with a fixed first row");
  enumerate->add_option("--k", o.k, "Order of the square")->required();
  enumerate->add_flag("--dump", o.dump, "Print every square");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (enumerate->parsed()) {
      if (o.k < 3 || o.k > kMaxLatinOrder) {
        throw Error(Errc::config, "enumerate-latin supports 3 <= K <= 6");
      }
      if (!o.dump) {
        out << count_fixed_first_row(o.k) << '\n';
        return kExitOk;
      }
      const auto squares = enumerate_fixed_first_row(o.k);
      out << squares.size() << '\n';
      for (const auto& sq : squares) out << to_string(sq) << '\n';
      return kExitOk;
    }

    if (validate->parsed()) {
      SimConfig cfg = detail::make_config(o, ObjectiveKind::minmax_snr, 10);
      if (!o.schemes) cfg.scope = default_validate_scope(cfg.k);
      detail::maybe_dump_channel(o, cfg);
      ValidateOptions vopt;
      vopt.force_exhaustive = o.force_exhaustive;
      vopt.corrupt = o.corrupt;
      const auto summary = run_validate(cfg, vopt);
      if (!o.out.empty()) {
        detail::emit(o, out, [&](std::ostream& os) { write_validation_summary_csv(os, cfg, summary); });
      }
      out << "draws=" << summary.draws << " schemes=" << summary.schemes
          << " sets=" << summary.sets_checked << " failures=" << summary.failures
          << " max_pair_residual=" << summary.max_pair_residual();
      if (o.corrupt) out << " corrupted_detected=" << summary.corrupted_detected;
      out << '\n';
      if (o.out.empty()) write_validation_summary_csv(out, cfg, summary);
      return summary.failures == 0 ? kExitOk : kExitValidationFailure;
    }

    if (ser->parsed()) {
      const SimConfig cfg = detail::make_config(o, ObjectiveKind::minmax_snr, 100);
      detail::maybe_dump_channel(o, cfg);
      SimStats stats;
      const auto points = run_ser(cfg, &stats);
      detail::emit(o, out, [&](std::ostream& os) { write_ser_csv(os, cfg, points); });
      if (stats.degenerate_draws) err << "degenerate draws: " << stats.degenerate_draws << '\n';
      return kExitOk;
    }

    if (sumrate->parsed()) {
      const SimConfig cfg = detail::make_config(o, ObjectiveKind::sum_rate, 100);
      detail::maybe_dump_channel(o, cfg);
      SimStats stats;
      const auto points = run_sumrate(cfg, &stats);
      detail::emit(o, out, [&](std::ostream& os) { write_sumrate_csv(os, cfg, points); });
      if (stats.degenerate_draws) err << "degenerate draws: " << stats.degenerate_draws << '\n';
      return kExitOk;
    }

    if (correlate->parsed()) {
      const SimConfig cfg = detail::make_config(o, ObjectiveKind::minmax_snr, 1);
      detail::maybe_dump_channel(o, cfg);
      Surrogate surrogate = Surrogate::cn;
      for (const auto& s : cfg.strategies) {
        if (s.kind == StrategyKind::shortlist) surrogate = s.surrogate;
      }
      const auto result = run_correlation(cfg, o.draw, cfg.objective, surrogate);
      detail::emit(o, out, [&](std::ostream& os) { write_correlation_csv(os, cfg, result); });
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::config || e.code() == Errc::budget_exceeded ||
                   e.code() == Errc::invalid_argument
               ? kExitConfigError
               : kExitValidationFailure;
  }
  return kExitConfigError;
}

}  // namespace latinia
