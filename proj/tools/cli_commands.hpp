#pragma once

// Subcommand bodies for the minicage CLI. Each returns a process exit code and
// writes to the given streams, so the test suite can drive them without
// spawning a process.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minicage/minicage.hpp"

namespace minicage::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInvalid = 3, kRuntime = 4 };

struct Failure {
  int code;
  std::string message;
};

struct RunSpec {
  std::string scenario = "default";
  std::string blue = "sleep";
  std::string red = "bline";
  int episodes = 1;
  int steps = 100;
  std::uint64_t seed = 0;
  std::string out;  // empty: stdout
  std::string format = "csv";
  int threads = 0;
};

struct BenchSpec {
  std::string scenario = "default";
  std::vector<std::size_t> iters{1, 10, 100, 1000};
  int steps = 100;
  int repeats = 100;
  std::uint64_t seed = 0;
  std::string out = "speed.csv";
  int threads = 0;
};

struct CompareSpec {
  std::string scenario = "default";
  std::vector<std::string> pairs;  // "blue/red"; empty: the six default pairs
  int episodes = 500;
  int steps = 100;
  std::uint64_t seed = 1;
  std::uint64_t seed2 = 2;
  std::string reference;  // empty: self-consistency mode
  std::string out_dir = ".";
  int threads = 0;
};

/// "default" or a path; missing file is a usage error, a bad file a validation error.
inline ScenarioConfig load_config(const std::string& where) {
  if (where == "default") return default_scenario();
  std::ifstream in(where);
  if (!in) throw Failure{kUsage, "cannot open scenario file '" + where + "'"};
  try {
    return load_scenario(in);
  } catch (const ParseError& e) {
    throw Failure{kInvalid, where + ": " + e.what()};
  } catch (const ValidationError& e) {
    throw Failure{kInvalid, where + ": " + e.what()};
  }
}

namespace detail {

inline void check_positive(int v, const char* what) {
  if (v < 1) throw Failure{kUsage, std::string(what) + " must be >= 1"};
}

inline void check_agents(const std::string& blue, const std::string& red) {
  try {
    require_agent(blue, Side::Blue);
    require_agent(red, Side::Red);
  } catch (const UnknownAgent& e) {
    throw Failure{kUsage, e.what()};
  }
}

// Runs `body` against the --out file, or `fallback` when no path is given.
template <class F>
void with_output(const std::string& path, std::ostream& fallback, F&& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Failure{kRuntime, "cannot write '" + path + "'"};
  body(f);
  if (!f) throw Failure{kRuntime, "write failed for '" + path + "'"};
}

inline std::string fixed(double v, int digits) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace detail

inline void write_trace(std::ostream& o, const ScenarioPtr& scenario, const std::string& blue,
                        const std::string& red, std::uint64_t seed) {
  const std::uint64_t ep = episode_seed(seed, 0);
  Environment env(scenario, ep);
  ScriptedAgent b(blue, Side::Blue, scenario), r(red, Side::Red, scenario);
  b.reset(ep);
  r.reset(ep);
  const auto& sc = *scenario;
  for (int t = 0; t < sc.episode_length(); ++t) {
    auto bi = b.act(env.blue_obs());
    auto ri = r.act(env.red_obs());
    auto res = env.step(bi, ri);
    o << format_trace_line(sc, decode_red_action(sc, ri), decode_blue_action(sc, bi), res, env.events()) << '\n';
  }
}

/// Episode 0 of run_pair with the same seed, one line per step.
inline int cmd_trace(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (spec.episodes != 1) throw Failure{kUsage, "trace takes exactly one episode"};
    detail::check_positive(spec.steps, "--steps");
    detail::check_agents(spec.blue, spec.red);
    auto scenario = with_horizon(load_config(spec.scenario), spec.steps);
    detail::with_output(spec.out, out, [&](std::ostream& o) { write_trace(o, scenario, spec.blue, spec.red, spec.seed); });
    return int{kOk};
  });
}

inline int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.format == "trace") return cmd_trace(spec, out, err);
  return detail::guarded(err, [&] {
    if (spec.format != "csv" && spec.format != "summary")
      throw Failure{kUsage, "--format must be csv, trace or summary"};
    detail::check_positive(spec.episodes, "--episodes");
    detail::check_positive(spec.steps, "--steps");
    detail::check_agents(spec.blue, spec.red);
    auto config = load_config(spec.scenario);
    auto returns = run_pair(config, spec.blue, spec.red, spec.episodes, spec.steps, spec.seed, spec.threads);
    const std::string label = spec.blue + "/" + spec.red;
    const std::string summary = label + ": mean " + minicage::detail::format_double(mean(returns)) + " +/- " +
                                minicage::detail::format_double(standard_error(returns)) + " (SE) over " +
                                std::to_string(returns.size()) + " episodes";
    if (spec.format == "csv") {
      detail::with_output(spec.out, out, [&](std::ostream& o) {
        o << "episode,return\n";
        for (std::size_t e = 0; e < returns.size(); ++e)
          o << e << ',' << minicage::detail::format_double(returns[e]) << '\n';
      });
      // Keep stdout pure CSV when it carries the data.
      (spec.out.empty() ? err : out) << summary << '\n';
    } else {
      detail::with_output(spec.out, out, [&](std::ostream& o) { o << summary << '\n'; });
    }
    return int{kOk};
  });
}

inline int cmd_bench(const BenchSpec& spec, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (spec.iters.empty()) throw Failure{kUsage, "--iters must list at least one count"};
    for (auto n : spec.iters)
      if (n == 0) throw Failure{kUsage, "--iters values must be >= 1"};
    detail::check_positive(spec.steps, "--steps");
    detail::check_positive(spec.repeats, "--repeats");
    SpeedOptions opt;
    opt.iteration_counts = spec.iters;
    opt.steps = spec.steps;
    opt.repeats = spec.repeats;
    opt.seed = spec.seed;
    opt.threads = spec.threads;
    auto report = speed_benchmark(load_config(spec.scenario), opt);
    detail::with_output(spec.out, out, [&](std::ostream& o) { write_speed_csv(o, report); });
    out << "N\ttotal_steps\tmean_wall_s\tse_wall_s\tsteps_per_s\tse_steps_per_s\n";
    for (const auto& r : report.rows)
      out << r.n << '\t' << r.total_steps << '\t' << minicage::detail::format_double(r.mean_wall_seconds) << '\t'
          << minicage::detail::format_double(r.se_wall_seconds) << '\t' << detail::fixed(r.mean_steps_per_second, 0)
          << '\t' << detail::fixed(r.se_steps_per_second, 0) << '\n';
    return int{kOk};
  });
}

/// "Pearson correlation of 0.99 (p < 0.01)"; the p clause shows the value when it is not below 0.01.
inline std::string pearson_line(const PearsonResult& p) {
  return "Pearson correlation of " + detail::fixed(p.r, 2) +
         (p.p < 0.01 ? " (p < 0.01)" : " (p = " + detail::fixed(p.p, 3) + ")");
}

inline int cmd_compare(const CompareSpec& spec, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    detail::check_positive(spec.episodes, "--episodes");
    detail::check_positive(spec.steps, "--steps");
    EquivalenceOptions opt;
    if (!spec.pairs.empty()) {
      opt.pairs.clear();
      for (const auto& label : spec.pairs) {
        auto p = parse_pair(label);
        if (!p) throw Failure{kUsage, "pair '" + label + "' is not of the form blue/red"};
        detail::check_agents(p->blue, p->red);
        opt.pairs.push_back(*p);
      }
    }
    opt.episodes = spec.episodes;
    opt.steps = spec.steps;
    opt.seed = spec.seed;
    opt.second_seed = spec.seed2;
    opt.threads = spec.threads;

    std::optional<std::vector<PairSummary>> reference;
    if (!spec.reference.empty()) {
      std::ifstream in(spec.reference);
      if (!in) throw Failure{kUsage, "cannot open reference file '" + spec.reference + "'"};
      try {
        reference = read_summary_csv(in);
      } catch (const MalformedReference& e) {
        throw Failure{kInvalid, e.what()};
      }
    }
    EquivalenceReport rep;
    try {
      rep = equivalence_study(load_config(spec.scenario), opt, reference);
    } catch (const MalformedReference& e) {
      throw Failure{kInvalid, e.what()};
    }

    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    auto dir = fs::path(spec.out_dir);
    detail::with_output((dir / "equivalence.csv").string(), out,
                        [&](std::ostream& o) { write_equivalence_csv(o, rep.rows); });
    detail::with_output((dir / "equivalence_summary.csv").string(), out,
                        [&](std::ostream& o) { write_summary_csv(o, summaries(rep.rows)); });

    auto z = rep.z_scores();
    out << "pair\tmean\tse\t" << (reference ? "ref_mean\tref_se" : "mean2\tse2") << "\tz\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& a = rep.rows[i];
      const auto& b = rep.comparison[i];
      out << a.pair.label() << '\t' << detail::fixed(a.mean, 3) << '\t' << detail::fixed(a.se, 3) << '\t'
          << detail::fixed(b.mean, 3) << '\t' << detail::fixed(b.se, 3) << '\t' << detail::fixed(z[i], 2) << '\n';
    }
    if (rep.correlation)
      out << pearson_line(*rep.correlation) << '\n';
    else
      out << "Pearson correlation undefined (fewer than 3 pairs or zero variance)\n";
    return int{kOk};
  });
}

inline int cmd_validate(const std::string& where, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    ScenarioConfig c;
    if (where == "default") {
      c = default_scenario();
    } else {
      std::ifstream in(where);
      if (!in) throw Failure{kUsage, "cannot open scenario file '" + where + "'"};
      try {
        c = parse_scenario(in);
      } catch (const ParseError& e) {
        throw Failure{kInvalid, where + ": " + e.what()};
      }
    }
    auto v = validate(c);
    for (const auto& x : v) out << x.describe() << '\n';
    if (!v.empty()) {
      err << where << ": " << v.size() << " violation(s)\n";
      return int{kInvalid};
    }
    out << "ok: " << c.hosts.size() << " hosts, " << c.subnets.size() << " subnets\n";
    return int{kOk};
  });
}

}  // namespace minicage::cli
