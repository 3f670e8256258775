// Minimal batched rollout: 8 instances of the default scenario, react_decoy
// defending against b-line, printing each instance's blue return.
#include <iostream>

#include "minicage/minicage.hpp"

int main() {
  using namespace minicage;
  auto scenario = CompiledScenario::make(default_scenario());
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 8; ++s) seeds.push_back(s);

  BatchState batch(scenario, seeds);
  std::vector<ScriptedAgent> blue, red;
  for (auto s : seeds) {
    blue.emplace_back("react_decoy", Side::Blue, scenario);
    red.emplace_back("bline", Side::Red, scenario);
    blue.back().reset(s);
    red.back().reset(s);
  }

  std::vector<std::int32_t> ba(seeds.size()), ra(seeds.size());
  std::vector<double> ret(seeds.size());
  for (int t = 0; t < scenario->episode_length(); ++t) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      ba[i] = static_cast<std::int32_t>(blue[i].act(batch.blue_obs(i)));
      ra[i] = static_cast<std::int32_t>(red[i].act(batch.red_obs(i)));
    }
    batch.step(ba, ra);
    for (std::size_t i = 0; i < seeds.size(); ++i) ret[i] += batch.blue_rewards()[i];
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) std::cout << "seed " << seeds[i] << ": " << ret[i] << '\n';
}
