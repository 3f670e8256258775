#pragma once

// Speed benchmark (wall-clock throughput vs. parallel instance count) and the
// agent-pair equivalence study, with their CSV formats:
//   speed.csv                 N,repeat,wall_seconds,steps_per_second
//   equivalence.csv           pair,episode,return
//   equivalence_summary.csv   pair,mean,se      (also the reference input schema)
// A pair is labelled "<blue>/<red>".

#include <algorithm>
#include <charconv>
#include <chrono>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "minicage/batch.hpp"
#include "minicage/scenario_io.hpp"
#include "minicage/stats.hpp"

namespace minicage {

// ---------------------------------------------------------------------------
// Uniform random valid actions

/// Every action index that is not a no-op in `s`.
inline void valid_red_actions(ConstStateView s, std::vector<std::int32_t>& out) {
  out.clear();
  const auto& sc = *s.scenario;
  for (std::size_t i = 0, n = red_action_count(sc); i < n; ++i)
    if (red_invalid_reason(s, decode_red_action(sc, i)) == InvalidReason::None)
      out.push_back(static_cast<std::int32_t>(i));
}

inline void valid_blue_actions(ConstStateView s, std::vector<std::int32_t>& out) {
  out.clear();
  const auto& sc = *s.scenario;
  for (std::size_t i = 0, n = blue_action_count(sc); i < n; ++i)
    if (blue_invalid_reason(s, decode_blue_action(sc, i)) == InvalidReason::None)
      out.push_back(static_cast<std::int32_t>(i));
}

// ---------------------------------------------------------------------------
// Speed

struct SpeedSample {
  std::size_t n = 0;
  int repeat = 0;
  std::uint64_t total_steps = 0;
  double wall_seconds = 0.0;
  double steps_per_second = 0.0;
};

struct SpeedRow {
  std::size_t n = 0;
  std::uint64_t total_steps = 0;  // per repeat: n * steps
  int repeats = 0;
  double mean_wall_seconds = 0.0;
  double se_wall_seconds = 0.0;
  double mean_steps_per_second = 0.0;
  double se_steps_per_second = 0.0;
};

struct SpeedReport {
  std::vector<SpeedSample> samples;
  std::vector<SpeedRow> rows;

  const SpeedRow& row(std::size_t n) const {
    for (const auto& r : rows)
      if (r.n == n) return r;
    throw std::out_of_range("no speed row for N=" + std::to_string(n));
  }
};

struct SpeedOptions {
  std::vector<std::size_t> iteration_counts{1, 10, 100, 1000};
  int steps = 100;
  int repeats = 100;
  std::uint64_t seed = 0;
  int threads = 0;
};

/// One timed run: build and reset N instances, then take `steps` uniformly
/// random valid actions on both sides. Returns wall seconds.
inline double time_random_rollout(const ScenarioPtr& scenario, std::size_t n, int steps, std::uint64_t key,
                                  int threads) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = derive_key(key, i);
  BatchState batch(scenario, seeds, {false, threads});
  std::vector<CounterRng> rngs(n);
  for (std::size_t i = 0; i < n; ++i) rngs[i] = CounterRng(derive_key(seeds[i], Stream::Bench));
  std::vector<std::int32_t> blue(n), red(n);
  for (int t = 0; t < steps; ++t) {
    batch.for_each_instance([&](std::size_t i) {
      thread_local std::vector<std::int32_t> scratch;
      auto v = batch.view(i);
      valid_blue_actions(v, scratch);
      blue[i] = scratch[rngs[i].index(scratch.size())];
      valid_red_actions(v, scratch);
      red[i] = scratch[rngs[i].index(scratch.size())];
    });
    batch.step(blue, red);
  }
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

inline SpeedReport speed_benchmark(const ScenarioConfig& config, const SpeedOptions& opt) {
  if (opt.iteration_counts.empty()) throw std::invalid_argument("iteration_counts must be nonempty");
  if (opt.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  auto scenario = with_horizon(config, opt.steps);
  SpeedReport report;
  for (std::size_t n : opt.iteration_counts) {
    if (n == 0) throw std::invalid_argument("iteration count must be >= 1");
    std::vector<double> walls, rates;
    const std::uint64_t total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(opt.steps);
    for (int r = 0; r < opt.repeats; ++r) {
      double wall = time_random_rollout(scenario, n, opt.steps, derive_key(opt.seed, Stream::Bench, n, r), opt.threads);
      wall = std::max(wall, 1e-9);
      SpeedSample s{n, r, total, wall, static_cast<double>(total) / wall};
      walls.push_back(s.wall_seconds);
      rates.push_back(s.steps_per_second);
      report.samples.push_back(s);
    }
    report.rows.push_back({n, total, opt.repeats, mean(walls), standard_error(walls), mean(rates),
                           standard_error(rates)});
  }
  return report;
}

inline void write_speed_csv(std::ostream& o, const SpeedReport& r) {
  o << "N,repeat,wall_seconds,steps_per_second\n";
  for (const auto& s : r.samples)
    o << s.n << ',' << s.repeat << ',' << detail::format_double(s.wall_seconds) << ','
      << detail::format_double(s.steps_per_second) << '\n';
}

// ---------------------------------------------------------------------------
// Equivalence

struct AgentPair {
  std::string blue;
  std::string red;

  std::string label() const { return blue + "/" + red; }
  friend bool operator==(const AgentPair&, const AgentPair&) = default;
};

/// The six defender/attacker pairs: {react_restore, react_decoy, sleep} x {bline, meander}.
inline std::vector<AgentPair> default_pairs() {
  std::vector<AgentPair> out;
  for (const char* b : {"react_restore", "react_decoy", "sleep"})
    for (const char* r : {"bline", "meander"}) out.push_back({b, r});
  return out;
}

inline std::optional<AgentPair> parse_pair(std::string_view label) {
  auto slash = label.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  return AgentPair{std::string(label.substr(0, slash)), std::string(label.substr(slash + 1))};
}

struct PairSummary {
  std::string label;
  double mean = 0.0;
  double se = 0.0;
};

struct PairResult {
  AgentPair pair;
  std::vector<double> returns;
  double mean = 0.0;
  double se = 0.0;

  PairSummary summary() const { return {pair.label(), mean, se}; }
};

struct EquivalenceOptions {
  std::vector<AgentPair> pairs = default_pairs();
  int episodes = 500;
  int steps = 100;
  std::uint64_t seed = 1;
  std::uint64_t second_seed = 2;  // self-consistency mode only
  int threads = 0;
};

struct EquivalenceReport {
  std::vector<PairResult> rows;
  std::vector<PairSummary> comparison;  // reference file rows or the second seeded run
  std::optional<PearsonResult> correlation;

  /// |mean difference| / combined standard error per pair; +inf when the
  /// means differ and both standard errors are zero, 0 when they agree exactly.
  std::vector<double> z_scores() const {
    std::vector<double> z;
    for (std::size_t i = 0; i < rows.size() && i < comparison.size(); ++i) {
      double diff = std::abs(rows[i].mean - comparison[i].mean);
      double se = std::sqrt(rows[i].se * rows[i].se + comparison[i].se * comparison[i].se);
      z.push_back(diff == 0.0 ? 0.0 : se == 0.0 ? std::numeric_limits<double>::infinity() : diff / se);
    }
    return z;
  }
};

inline std::vector<PairResult> run_pairs(const ScenarioConfig& config, const std::vector<AgentPair>& pairs,
                                         int episodes, int steps, std::uint64_t seed, int threads) {
  std::vector<PairResult> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    PairResult r{pairs[k], run_pair(config, pairs[k].blue, pairs[k].red, episodes, steps, derive_key(seed, k), threads)};
    r.mean = mean(r.returns);
    r.se = standard_error(r.returns);
    out.push_back(std::move(r));
  }
  return out;
}

class MalformedReference : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads "pair,mean,se" rows (header required).
inline std::vector<PairSummary> read_summary_csv(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || detail::trim(line) != "pair,mean,se")
    throw MalformedReference("reference: expected header 'pair,mean,se'");
  std::vector<PairSummary> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(line, ',');
    if (f.size() != 3 || !parse_pair(f[0]))
      throw MalformedReference("reference line " + std::to_string(line_no) + ": expected 'blue/red,mean,se'");
    PairSummary s{std::string(f[0]), 0.0, 0.0};
    for (auto [text, dst] : {std::pair{f[1], &s.mean}, std::pair{f[2], &s.se}}) {
      auto r = std::from_chars(text.data(), text.data() + text.size(), *dst);
      if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
        throw MalformedReference("reference line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Runs every pair and correlates the per-pair means against `reference`
/// (matched by label), or against a second run seeded with
/// `second_seed` when no reference is given.
inline EquivalenceReport equivalence_study(const ScenarioConfig& config, const EquivalenceOptions& opt,
                                           const std::optional<std::vector<PairSummary>>& reference = std::nullopt) {
  if (opt.pairs.empty()) throw std::invalid_argument("equivalence study needs at least one pair");
  for (const auto& p : opt.pairs) {
    require_agent(p.blue, Side::Blue);
    require_agent(p.red, Side::Red);
  }
  EquivalenceReport rep;
  rep.rows = run_pairs(config, opt.pairs, opt.episodes, opt.steps, opt.seed, opt.threads);
  if (reference) {
    for (const auto& row : rep.rows) {
      auto it = std::find_if(reference->begin(), reference->end(),
                             [&](const PairSummary& s) { return s.label == row.pair.label(); });
      if (it == reference->end()) throw MalformedReference("reference has no row for pair " + row.pair.label());
      rep.comparison.push_back(*it);
    }
  } else {
    for (const auto& r : run_pairs(config, opt.pairs, opt.episodes, opt.steps, opt.second_seed, opt.threads))
      rep.comparison.push_back(r.summary());
  }
  if (rep.rows.size() >= 3) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      a.push_back(rep.rows[i].mean);
      b.push_back(rep.comparison[i].mean);
    }
    try {
      rep.correlation = pearson(a, b);
    } catch (const DegenerateSample&) {
      rep.correlation.reset();
    }
  }
  return rep;
}

inline void write_equivalence_csv(std::ostream& o, const std::vector<PairResult>& rows) {
  o << "pair,episode,return\n";
  for (const auto& r : rows)
    for (std::size_t e = 0; e < r.returns.size(); ++e)
      o << r.pair.label() << ',' << e << ',' << detail::format_double(r.returns[e]) << '\n';
}

inline void write_summary_csv(std::ostream& o, const std::vector<PairSummary>& rows) {
  o << "pair,mean,se\n";
  for (const auto& r : rows)
    o << r.label << ',' << detail::format_double(r.mean) << ',' << detail::format_double(r.se) << '\n';
}

inline std::vector<PairSummary> summaries(const std::vector<PairResult>& rows) {
  std::vector<PairSummary> out;
  for (const auto& r : rows) out.push_back(r.summary());
  return out;
}

}  // namespace minicage
