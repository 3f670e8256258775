#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_commands.hpp"

using namespace minicage;
using namespace minicage::cli;

namespace fs = std::filesystem;

namespace {

struct Captured {
  int code;
  std::string out, err;
};

template <class F>
Captured capture(F&& f) {
  std::ostringstream out, err;
  int code = f(out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, '\t');) v.push_back(f);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("minicage_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

RunSpec trace_spec(std::string blue, std::string red, int steps, std::uint64_t seed) {
  RunSpec s;
  s.blue = std::move(blue);
  s.red = std::move(red);
  s.steps = steps;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(CliRun, CsvReturnsAreDeterministic) {
  RunSpec s;
  s.blue = "sleep";
  s.red = "bline";
  s.episodes = 5;
  s.seed = 1;
  auto a = capture([&](auto& o, auto& e) { return cmd_run(s, o, e); });
  auto b = capture([&](auto& o, auto& e) { return cmd_run(s, o, e); });
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto l = lines(a.out);
  ASSERT_EQ(l.size(), 6u);
  EXPECT_EQ(l[0], "episode,return");
  EXPECT_NE(a.err.find("sleep/bline: mean"), std::string::npos);
  auto r = run_pair(default_scenario_ref(), "sleep", "bline", 5, 100, 1);
  EXPECT_EQ(l[1], "0," + minicage::detail::format_double(r[0]));
}

TEST(CliRun, SummaryFormat) {
  RunSpec s;
  s.blue = "react_decoy";
  s.red = "meander";
  s.episodes = 4;
  s.format = "summary";
  auto c = capture([&](auto& o, auto& e) { return cmd_run(s, o, e); });
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out.rfind("react_decoy/meander: mean ", 0), 0u);
  EXPECT_NE(c.out.find("over 4 episodes"), std::string::npos);
}

TEST(CliRun, ErrorCodes) {
  RunSpec s;
  s.scenario = "missing.scenario";
  auto c = capture([&](auto& o, auto& e) { return cmd_run(s, o, e); });
  EXPECT_EQ(c.code, 2);
  EXPECT_NE(c.err.find("missing.scenario"), std::string::npos);

  s = {};
  s.blue = "bline";
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_run(s, o, e); }).code, 2);
  s = {};
  s.episodes = 0;
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_run(s, o, e); }).code, 2);
  s = {};
  s.format = "xml";
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_run(s, o, e); }).code, 2);

  auto dir = scratch_dir("invalid");
  auto bad = dir / "bad.scenario";
  {
    std::ofstream f(bad);
    auto cfg = default_scenario();
    cfg.detection.p_detect_scan = 2.0;
    f << serialize_scenario(cfg);
  }
  s = {};
  s.scenario = bad.string();
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_run(s, o, e); }).code, 3);
  {
    std::ofstream f(dir / "garbage.scenario");
    f << "[[[ not a scenario\n";
  }
  s.scenario = (dir / "garbage.scenario").string();
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_run(s, o, e); }).code, 3);
}

TEST(CliTrace, SleepSleepThreeSteps) {
  auto c = capture([&](auto& o, auto& e) { return cmd_trace(trace_spec("sleep", "sleep", 3, 0), o, e); });
  ASSERT_EQ(c.code, 0);
  auto l = lines(c.out);
  ASSERT_EQ(l.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    auto f = fields(l[i]);
    ASSERT_EQ(f.size(), 7u);
    EXPECT_EQ(f[0], std::to_string(i + 1));
    EXPECT_EQ(f[1], "Sleep");
    EXPECT_EQ(f[3], "Sleep");
    EXPECT_EQ(f[5], "-");
    EXPECT_EQ(f[6], "0");
  }
}

TEST(CliTrace, MatchesGoldenFile) {
  auto c = capture([&](auto& o, auto& e) { return cmd_trace(trace_spec("react_decoy", "bline", 30, 7), o, e); });
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out, slurp(fs::path(MINICAGE_GOLDEN_DIR) / "react_decoy_bline_seed7.trace"));
  EXPECT_NE(c.out.find("DecoyTripped:Op_Server:decoyVsftpd"), std::string::npos);
  EXPECT_NE(c.out.find("blocked:decoyVsftpd"), std::string::npos);
}

TEST(CliTrace, ShowsDecoyTripOnScriptedGame) {
  // Red exploits User3 after blue put its first ladder decoy (Vsftpd) on it:
  // FTPDirTraversal outranks the host's own exploits and lands on port 21.
  auto sc = with_horizon(default_scenario_ref(), 5);
  Environment env(sc, 1);
  const auto& cfg = sc->config();
  const HostId u3 = cfg.host_id("User3");
  std::vector<std::pair<BlueAction, RedAction>> script = {
      {BlueAction::decoy(u3), RedAction::discover_systems(0)},
      {BlueAction::sleep(), RedAction::discover_services(u3)},
      {BlueAction::sleep(), RedAction::exploit(u3)}};
  std::string last;
  for (auto [b, r] : script) {
    auto res = env.step(b, r);
    last = format_trace_line(*sc, r, b, res, env.events());
  }
  auto f = fields(last);
  EXPECT_EQ(f[1], "ExploitRemoteService:User3");
  EXPECT_EQ(f[2], "blocked:decoyVsftpd");
  EXPECT_EQ(f[5], "DecoyTripped:User3:decoyVsftpd");
}

TEST(CliTrace, RewardsSumToRunPairEpisodeZero) {
  for (std::uint64_t seed : {3u, 11u}) {
    auto c = capture([&](auto& o, auto& e) { return cmd_trace(trace_spec("react_restore", "meander", 100, seed), o, e); });
    ASSERT_EQ(c.code, 0);
    double sum = 0.0;
    for (const auto& l : lines(c.out)) sum += std::stod(fields(l)[6]);
    auto r = run_pair(default_scenario_ref(), "react_restore", "meander", 1, 100, seed);
    EXPECT_NEAR(sum, r[0], 1e-9);
  }
}

TEST(CliTrace, IdenticalSeedsIdenticalBytes) {
  auto a = capture([&](auto& o, auto& e) { return cmd_trace(trace_spec("react_decoy", "meander", 60, 5), o, e); });
  auto b = capture([&](auto& o, auto& e) { return cmd_trace(trace_spec("react_decoy", "meander", 60, 5), o, e); });
  EXPECT_EQ(a.out, b.out);
  auto s = trace_spec("sleep", "bline", 10, 0);
  s.episodes = 2;
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_trace(s, o, e); }).code, 2);
}

TEST(CliBench, SixRowSpeedCsv) {
  auto dir = scratch_dir("bench");
  BenchSpec s;
  s.iters = {1, 10};
  s.steps = 20;
  s.repeats = 3;
  s.out = (dir / "speed.csv").string();
  auto c = capture([&](auto& o, auto& e) { return cmd_bench(s, o, e); });
  ASSERT_EQ(c.code, 0) << c.err;
  auto l = lines(slurp(dir / "speed.csv"));
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(l[0], "N,repeat,wall_seconds,steps_per_second");
  EXPECT_EQ(lines(c.out).size(), 3u);
  s.iters = {};
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_bench(s, o, e); }).code, 2);
}

TEST(CliCompare, SelfConsistencyPrintsPearson) {
  auto dir = scratch_dir("compare");
  CompareSpec s;
  s.episodes = 20;
  s.steps = 50;
  s.out_dir = dir.string();
  auto c = capture([&](auto& o, auto& e) { return cmd_compare(s, o, e); });
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("Pearson correlation of "), std::string::npos);
  EXPECT_EQ(lines(slurp(dir / "equivalence.csv")).size(), 1u + 6u * 20u);
  EXPECT_EQ(lines(slurp(dir / "equivalence_summary.csv")).size(), 7u);

  // The summary just written is a valid reference for the same run.
  s.reference = (dir / "equivalence_summary.csv").string();
  s.out_dir = (dir / "again").string();
  c = capture([&](auto& o, auto& e) { return cmd_compare(s, o, e); });
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("Pearson correlation of 1.00 (p < 0.01)"), std::string::npos);
}

TEST(CliCompare, Errors) {
  auto dir = scratch_dir("compare_err");
  CompareSpec s;
  s.episodes = 2;
  s.out_dir = dir.string();
  s.pairs = {"sleep-bline"};
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_compare(s, o, e); }).code, 2);
  s.pairs = {"sleep/nobody"};
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_compare(s, o, e); }).code, 2);
  s.pairs = {};
  s.reference = (dir / "nope.csv").string();
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_compare(s, o, e); }).code, 2);
  {
    std::ofstream f(dir / "bad.csv");
    f << "pair,mean\n";
  }
  s.reference = (dir / "bad.csv").string();
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_compare(s, o, e); }).code, 3);
}

TEST(CliValidate, DefaultAndBrokenFiles) {
  auto c = capture([&](auto& o, auto& e) { return cmd_validate("default", o, e); });
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(c.out, "ok: 13 hosts, 3 subnets\n");
  EXPECT_EQ(capture([&](auto& o, auto& e) { return cmd_validate("/nonexistent/x.scenario", o, e); }).code, 2);

  auto dir = scratch_dir("validate");
  auto cfg = default_scenario();
  cfg.hosts[cfg.host_id("Ent2")].confidentiality_weight = -1.0;
  {
    std::ofstream f(dir / "dup.scenario");
    f << serialize_scenario(cfg);
  }
  c = capture([&](auto& o, auto& e) { return cmd_validate((dir / "dup.scenario").string(), o, e); });
  EXPECT_EQ(c.code, 3);
  EXPECT_FALSE(c.out.empty());
}

#ifdef MINICAGE_CLI
TEST(CliBinary, ExitCodes) {
  auto run = [](const std::string& args) {
    int status = std::system((std::string(MINICAGE_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("validate default"), 0);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("run --episodes notanumber"), 2);
  EXPECT_EQ(run("run --scenario missing.scenario"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("run --blue sleep --red bline --episodes 2 --steps 10 --seed 1"), 0);
}
#endif
