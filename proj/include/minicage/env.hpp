#pragma once

#include "minicage/spaces.hpp"

namespace minicage {

struct StepResult {
  StepInfo info;
  Rewards rewards;
};

// One instance with encoded observations: the sequential reference the batch
// is checked against, and what the trace command drives.
class Environment {
 public:
  Environment(ScenarioPtr scenario, std::uint64_t seed)
      : state_(minicage::reset(scenario, seed)),
        blue_obs_(blue_obs_size(*scenario)),
        red_obs_(red_obs_size(*scenario)) {
    events_.reserve(16);
    encode();
  }

  void reset(std::uint64_t seed) {
    reset_view(state_.view(), seed);
    events_.clear();
    encode();
  }

  StepResult step(BlueAction blue, RedAction red) {
    StepResult r;
    r.info = minicage::step(state_, blue, red, events_);
    r.rewards = compute_reward(state_.view(), events_);
    encode();
    return r;
  }

  StepResult step(std::size_t blue_index, std::size_t red_index) {
    const auto& sc = state_.scenario();
    return step(decode_blue_action(sc, blue_index), decode_red_action(sc, red_index));
  }

  const WorldState& state() const { return state_; }
  const EventLog& events() const { return events_; }
  std::span<const float> blue_obs() const { return blue_obs_; }
  std::span<const float> red_obs() const { return red_obs_; }
  const CompiledScenario& scenario() const { return state_.scenario(); }

 private:
  void encode() {
    encode_blue_obs(state_.view(), events_, blue_obs_);
    encode_red_obs(state_.view(), events_, red_obs_);
  }

  WorldState state_;
  EventLog events_;
  std::vector<float> blue_obs_;
  std::vector<float> red_obs_;
};

}  // namespace minicage
