#pragma once

// N independent instances advanced in lockstep.
//
// Layout: per-host fields are stored structure-of-arrays, one dense array per
// field of length N*H with instance i's hosts at [i*H, (i+1)*H). Observation
// outputs are instance-major rows (N x 78 blue, N x 66 red by default).
// Instance i's trajectory depends only on (scenario, seeds[i], its actions);
// sharding across worker threads never changes results.

#include <cstdlib>
#include <string>
#include <thread>

#include <oneapi/tbb/blocked_range.h>
#include <oneapi/tbb/parallel_for.h>
#include <oneapi/tbb/task_arena.h>

#include "minicage/agents.hpp"
#include "minicage/env.hpp"

namespace minicage {

/// Worker count: an explicit request wins, then MINICAGE_THREADS, then the
/// hardware concurrency. 0 means "auto" at each level.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MINICAGE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(begin, end) over [0, n) on up to `threads` workers.
class InstanceExecutor {
 public:
  explicit InstanceExecutor(int threads) : threads_(resolve_threads(threads)) {
    if (threads_ > 1) arena_.initialize(threads_);
  }

  int threads() const { return threads_; }

  template <class Fn>
  void run(std::size_t n, Fn&& fn) {
    if (threads_ <= 1 || n < 2) {
      fn(std::size_t{0}, n);
      return;
    }
    std::size_t grain = std::max<std::size_t>(1, n / (static_cast<std::size_t>(threads_) * 4));
    arena_.execute([&] {
      tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, grain),
                        [&](const tbb::blocked_range<std::size_t>& r) { fn(r.begin(), r.end()); });
    });
  }

 private:
  int threads_;
  tbb::task_arena arena_;
};

struct BatchOptions {
  bool auto_reset = false;
  int threads = 0;
};

class BatchState {
 public:
  BatchState(ScenarioPtr scenario, std::vector<std::uint64_t> seeds, BatchOptions options = {})
      : scenario_(std::move(scenario)), seeds_(std::move(seeds)), options_(options), exec_(options.threads) {
    if (seeds_.empty()) throw std::invalid_argument("batch needs at least one seed");
    const std::size_t n = seeds_.size(), h = scenario_->host_count();
    hosts_ = h;
    blue_width_ = blue_obs_size(*scenario_);
    red_width_ = red_obs_size(*scenario_);
    scalars_.resize(n);
    access_.resize(n * h);
    decoys_.resize(n * h);
    red_info_.resize(n * h);
    blue_info_.resize(n * h);
    impacted_.resize(n * h);
    events_.resize(n);
    for (auto& e : events_) e.reserve(8);
    infos_.resize(n);
    episode_index_.assign(n, 0);
    blue_obs_.resize(n * blue_width_);
    red_obs_.resize(n * red_width_);
    blue_rewards_.resize(n);
    red_rewards_.resize(n);
    done_.resize(n);
    reset();
  }

  /// Reset every instance to its seed and encode initial observations.
  void reset() {
    std::fill(episode_index_.begin(), episode_index_.end(), 0u);
    exec_.run(size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) reset_instance(i, seeds_[i]);
    });
  }

  /// Advance every instance by one step. Action arrays hold encoded indices.
  void step(std::span<const std::int32_t> blue_actions, std::span<const std::int32_t> red_actions) {
    const std::size_t n = size();
    if (blue_actions.size() != n || red_actions.size() != n)
      throw std::invalid_argument("action arrays must have length " + std::to_string(n));
    const auto nb = static_cast<std::int32_t>(blue_action_count(*scenario_));
    const auto nr = static_cast<std::int32_t>(red_action_count(*scenario_));
    for (std::size_t i = 0; i < n; ++i) {
      if (blue_actions[i] < 0 || blue_actions[i] >= nb)
        throw std::out_of_range("blue action " + std::to_string(blue_actions[i]) + " out of range at " + std::to_string(i));
      if (red_actions[i] < 0 || red_actions[i] >= nr)
        throw std::out_of_range("red action " + std::to_string(red_actions[i]) + " out of range at " + std::to_string(i));
    }
    exec_.run(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) step_instance(i, blue_actions[i], red_actions[i]);
    });
  }

  /// Run fn(i) for every instance on the batch's workers.
  template <class Fn>
  void for_each_instance(Fn&& fn) {
    exec_.run(size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) fn(i);
    });
  }

  std::size_t size() const { return seeds_.size(); }
  const CompiledScenario& scenario() const { return *scenario_; }
  const ScenarioPtr& scenario_ptr() const { return scenario_; }
  int threads() const { return exec_.threads(); }
  std::size_t blue_width() const { return blue_width_; }
  std::size_t red_width() const { return red_width_; }

  std::span<const float> blue_obs() const { return blue_obs_; }
  std::span<const float> red_obs() const { return red_obs_; }
  std::span<const float> blue_obs(std::size_t i) const { return {blue_obs_.data() + i * blue_width_, blue_width_}; }
  std::span<const float> red_obs(std::size_t i) const { return {red_obs_.data() + i * red_width_, red_width_}; }
  std::span<const double> blue_rewards() const { return blue_rewards_; }
  std::span<const double> red_rewards() const { return red_rewards_; }
  std::span<const std::uint8_t> done() const { return done_; }
  const EventLog& events(std::size_t i) const { return events_[i]; }
  const StepInfo& info(std::size_t i) const { return infos_[i]; }
  std::uint32_t episode_index(std::size_t i) const { return episode_index_[i]; }
  std::uint64_t episode_seed(std::size_t i) const { return scalars_[i].seed; }

  StateView view(std::size_t i) {
    std::size_t o = i * hosts_;
    return {scenario_.get(),
            &scalars_[i],
            {access_.data() + o, hosts_},
            {decoys_.data() + o, hosts_},
            {red_info_.data() + o, hosts_},
            {blue_info_.data() + o, hosts_},
            {impacted_.data() + o, hosts_}};
  }
  ConstStateView view(std::size_t i) const { return const_cast<BatchState*>(this)->view(i); }

  /// Copy of instance i as an owning WorldState.
  WorldState snapshot(std::size_t i) const {
    WorldState w(scenario_);
    auto dst = w.view();
    auto src = view(i);
    *dst.scalars = *src.scalars;
    std::copy(src.access.begin(), src.access.end(), dst.access.begin());
    std::copy(src.decoys.begin(), src.decoys.end(), dst.decoys.begin());
    std::copy(src.red_info.begin(), src.red_info.end(), dst.red_info.begin());
    std::copy(src.blue_info.begin(), src.blue_info.end(), dst.blue_info.begin());
    std::copy(src.impacted.begin(), src.impacted.end(), dst.impacted.begin());
    return w;
  }

  /// Seed of episode k of an instance started from `seed` (auto-reset rule).
  static std::uint64_t derived_seed(std::uint64_t seed, std::uint32_t episode) {
    return episode == 0 ? seed : derive_key(seed, Stream::Episode, episode);
  }

 private:
  void reset_instance(std::size_t i, std::uint64_t seed) {
    auto v = view(i);
    reset_view(v, seed);
    events_[i].clear();
    infos_[i] = {};
    blue_rewards_[i] = 0.0;
    red_rewards_[i] = 0.0;
    done_[i] = 0;
    encode(i);
  }

  void encode(std::size_t i) {
    auto v = view(i);
    encode_blue_obs(v, events_[i], {blue_obs_.data() + i * blue_width_, blue_width_});
    encode_red_obs(v, events_[i], {red_obs_.data() + i * red_width_, red_width_});
  }

  void step_instance(std::size_t i, std::int32_t blue, std::int32_t red) {
    auto v = view(i);
    if (done_[i] && !options_.auto_reset) {
      events_[i].clear();
      blue_rewards_[i] = 0.0;
      red_rewards_[i] = 0.0;
      return;
    }
    const auto& sc = *scenario_;
    infos_[i] = minicage::step(v, decode_blue_action(sc, static_cast<std::size_t>(blue)),
                               decode_red_action(sc, static_cast<std::size_t>(red)), events_[i]);
    auto r = compute_reward(v, events_[i]);
    blue_rewards_[i] = r.blue;
    red_rewards_[i] = r.red;
    done_[i] = infos_[i].done ? 1 : 0;
    if (infos_[i].done && options_.auto_reset) {
      // The returned row is the first observation of the next episode.
      std::uint32_t next = ++episode_index_[i];
      reset_view(v, derived_seed(seeds_[i], next));
      events_[i].clear();
    }
    encode(i);
  }

  ScenarioPtr scenario_;
  std::vector<std::uint64_t> seeds_;
  BatchOptions options_;
  InstanceExecutor exec_;
  std::size_t hosts_ = 0, blue_width_ = 0, red_width_ = 0;

  std::vector<InstanceScalars> scalars_;
  std::vector<AccessLevel> access_;
  std::vector<DecoyMask> decoys_;
  std::vector<std::uint8_t> red_info_;
  std::vector<std::uint8_t> blue_info_;
  std::vector<std::uint8_t> impacted_;

  std::vector<EventLog> events_;
  std::vector<StepInfo> infos_;
  std::vector<std::uint32_t> episode_index_;
  std::vector<float> blue_obs_;
  std::vector<float> red_obs_;
  std::vector<double> blue_rewards_;
  std::vector<double> red_rewards_;
  std::vector<std::uint8_t> done_;
};

/// Seed of episode `e` in a run_pair / equivalence study with `base_seed`.
inline std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t e) {
  return derive_key(base_seed, Stream::Episode, e);
}

/// Copy of `config` with a different horizon, compiled.
inline ScenarioPtr with_horizon(const ScenarioConfig& config, int steps) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  ScenarioConfig c = config;
  c.episode_length = steps;
  return CompiledScenario::make(std::move(c));
}

/// Blue episode returns of `episodes` scripted games, `steps` long each.
inline std::vector<double> run_pair(const ScenarioConfig& config, std::string_view blue_agent,
                                    std::string_view red_agent, int episodes, int steps, std::uint64_t base_seed,
                                    int threads = 0) {
  AgentKind blue_kind = require_agent(blue_agent, Side::Blue);
  AgentKind red_kind = require_agent(red_agent, Side::Red);
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  auto scenario = with_horizon(config, steps);

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(episodes));
  for (std::size_t e = 0; e < seeds.size(); ++e) seeds[e] = episode_seed(base_seed, e);

  BatchState batch(scenario, seeds, {false, threads});
  std::vector<ScriptedAgent> blue, red;
  blue.reserve(seeds.size());
  red.reserve(seeds.size());
  for (std::size_t e = 0; e < seeds.size(); ++e) {
    blue.emplace_back(blue_kind, Side::Blue, scenario);
    red.emplace_back(red_kind, Side::Red, scenario);
    blue[e].reset(seeds[e]);
    red[e].reset(seeds[e]);
  }

  std::vector<std::int32_t> blue_actions(seeds.size()), red_actions(seeds.size());
  std::vector<double> returns(seeds.size(), 0.0);
  for (int t = 0; t < steps; ++t) {
    batch.for_each_instance([&](std::size_t e) {
      blue_actions[e] = static_cast<std::int32_t>(blue[e].act(batch.blue_obs(e)));
      red_actions[e] = static_cast<std::int32_t>(red[e].act(batch.red_obs(e)));
    });
    batch.step(blue_actions, red_actions);
    auto r = batch.blue_rewards();
    for (std::size_t e = 0; e < returns.size(); ++e) returns[e] += r[e];
  }
  return returns;
}

}  // namespace minicage
