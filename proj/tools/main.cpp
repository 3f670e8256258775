#include <CLI11.hpp>

#include "cli_commands.hpp"

namespace {

using namespace minicage::cli;

void add_run_flags(CLI::App* cmd, RunSpec& s) {
  cmd->add_option("--scenario", s.scenario, "scenario file or 'default'")->capture_default_str();
  cmd->add_option("--blue", s.blue, "blue agent: sleep, react_restore, react_decoy")->capture_default_str();
  cmd->add_option("--red", s.red, "red agent: bline, meander, sleep")->capture_default_str();
  cmd->add_option("--steps", s.steps, "steps per episode")->capture_default_str();
  cmd->add_option("--seed", s.seed, "base seed")->capture_default_str();
  cmd->add_option("--out", s.out, "output file (default stdout)");
  cmd->add_option("--threads", s.threads, "worker threads (0: MINICAGE_THREADS or all cores)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MiniCAGE: fast cyber-defence game simulator"};
  app.require_subcommand(1);

  RunSpec run;
  auto* run_cmd = app.add_subcommand("run", "play scripted episodes and report blue returns");
  add_run_flags(run_cmd, run);
  run_cmd->add_option("--episodes", run.episodes, "episodes")->capture_default_str();
  run_cmd->add_option("--format", run.format, "csv | trace | summary")->capture_default_str();

  RunSpec trace;
  auto* trace_cmd = app.add_subcommand("trace", "step-by-step trace of one episode");
  add_run_flags(trace_cmd, trace);
  trace_cmd->add_option("--episodes", trace.episodes, "must be 1")->capture_default_str();

  BenchSpec bench;
  auto* bench_cmd = app.add_subcommand("bench", "throughput vs parallel instance count");
  bench_cmd->add_option("--scenario", bench.scenario)->capture_default_str();
  bench_cmd->add_option("--iters", bench.iters, "instance counts, comma separated")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--steps", bench.steps)->capture_default_str();
  bench_cmd->add_option("--repeats", bench.repeats)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "per-repeat CSV")->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads)->capture_default_str();

  CompareSpec compare;
  bool self_consistency = false;
  auto* compare_cmd = app.add_subcommand("compare", "agent-pair equivalence study");
  compare_cmd->add_option("--scenario", compare.scenario)->capture_default_str();
  compare_cmd->add_option("--pairs", compare.pairs, "blue/red labels, comma separated (default: six pairs)")
      ->delimiter(',');
  compare_cmd->add_option("--episodes", compare.episodes)->capture_default_str();
  compare_cmd->add_option("--steps", compare.steps)->capture_default_str();
  compare_cmd->add_option("--seed", compare.seed)->capture_default_str();
  compare_cmd->add_option("--seed2", compare.seed2, "second seed in self-consistency mode")->capture_default_str();
  auto* ref_opt = compare_cmd->add_option("--reference", compare.reference, "pair,mean,se CSV to correlate against");
  compare_cmd->add_flag("--self-consistency", self_consistency, "correlate two seeded runs (the default)")
      ->excludes(ref_opt);
  compare_cmd->add_option("--out", compare.out_dir, "directory for the CSV outputs")->capture_default_str();
  compare_cmd->add_option("--threads", compare.threads)->capture_default_str();

  std::string validate_target = "default";
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
  validate_cmd->add_option("scenario", validate_target, "scenario file or 'default'")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*run_cmd) return cmd_run(run, std::cout, std::cerr);
  if (*trace_cmd) return cmd_trace(trace, std::cout, std::cerr);
  if (*bench_cmd) return cmd_bench(bench, std::cout, std::cerr);
  if (*compare_cmd) return cmd_compare(compare, std::cout, std::cerr);
  if (*validate_cmd) return cmd_validate(validate_target, std::cout, std::cerr);
  return kUsage;
}
