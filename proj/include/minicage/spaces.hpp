#pragma once

// Frozen vector layouts. H = host count, S = subnet count (13 and 3 by default).
//
// Blue observation, H x 6 floats, host-major:
//   [0..2] activity one-hot {none, scan, exploit} from this step's detected
//          events (a tripped decoy counts as exploit activity)
//   [3]    compromise code {none, unknown, user, privileged} -> {0, 1/3, 2/3, 1}
//   [4]    detected-scan flag, cumulative over the episode
//   [5]    deployed decoys / ladder length (0 for an empty ladder)
//
// Red observation, H x 5 + 1 floats:
//   per host [discovered, scanned, access_none, access_user, access_priv],
//   then last_action_succeeded.
//
// Blue actions, 1 + 4H:  0 Sleep | Analyse(h) | Remove(h) | Restore(h) | Decoy(h)
// Red actions, 1 + S + 4H: 0 Sleep | DiscoverRemoteSystems(s) |
//   DiscoverNetworkServices(h) | ExploitRemoteService(h) | PrivilegeEscalate(h) | Impact(h)

#include <stdexcept>

#include "minicage/engine.hpp"

namespace minicage {

inline constexpr std::size_t kBlueHostWidth = 6;
inline constexpr std::size_t kRedHostWidth = 5;

constexpr std::size_t blue_obs_size(std::size_t hosts) { return hosts * kBlueHostWidth; }
constexpr std::size_t red_obs_size(std::size_t hosts) { return hosts * kRedHostWidth + 1; }
constexpr std::size_t blue_action_count(std::size_t hosts) { return 1 + 4 * hosts; }
constexpr std::size_t red_action_count(std::size_t hosts, std::size_t subnets) { return 1 + subnets + 4 * hosts; }

inline std::size_t blue_obs_size(const CompiledScenario& s) { return blue_obs_size(s.host_count()); }
inline std::size_t red_obs_size(const CompiledScenario& s) { return red_obs_size(s.host_count()); }
inline std::size_t blue_action_count(const CompiledScenario& s) { return blue_action_count(s.host_count()); }
inline std::size_t red_action_count(const CompiledScenario& s) {
  return red_action_count(s.host_count(), s.subnet_count());
}

// ---------------------------------------------------------------------------
// Actions

inline BlueAction decode_blue_action(const CompiledScenario& s, std::size_t index) {
  const std::size_t n = s.host_count();
  if (index >= blue_action_count(n))
    throw std::out_of_range("blue action index " + std::to_string(index) + " out of range");
  if (index == 0) return BlueAction::sleep();
  std::size_t k = index - 1;
  return {static_cast<BlueActionType>(1 + k / n), static_cast<HostId>(k % n)};
}

inline std::size_t encode_blue_action(const CompiledScenario& s, BlueAction a) {
  if (a.type == BlueActionType::Sleep) return 0;
  if (a.target >= s.host_count()) throw std::out_of_range("blue action target out of range");
  return 1 + (static_cast<std::size_t>(a.type) - 1) * s.host_count() + a.target;
}

inline RedAction decode_red_action(const CompiledScenario& s, std::size_t index) {
  const std::size_t n = s.host_count(), m = s.subnet_count();
  if (index >= red_action_count(n, m))
    throw std::out_of_range("red action index " + std::to_string(index) + " out of range");
  if (index == 0) return RedAction::sleep();
  if (index <= m) return RedAction::discover_systems(index - 1);
  std::size_t k = index - 1 - m;
  return {static_cast<RedActionType>(2 + k / n), static_cast<std::uint16_t>(k % n)};
}

inline std::size_t encode_red_action(const CompiledScenario& s, RedAction a) {
  const std::size_t n = s.host_count(), m = s.subnet_count();
  switch (a.type) {
    case RedActionType::Sleep:
      return 0;
    case RedActionType::DiscoverRemoteSystems:
      if (a.target >= m) throw std::out_of_range("red action subnet out of range");
      return 1 + a.target;
    default:
      if (a.target >= n) throw std::out_of_range("red action target out of range");
      return 1 + m + (static_cast<std::size_t>(a.type) - 2) * n + a.target;
  }
}

// ---------------------------------------------------------------------------
// Observations

/// Writes blue_obs_size(H) floats into `out`.
inline void encode_blue_obs(ConstStateView s, const EventLog& events, std::span<float> out) {
  const std::size_t n = s.host_count();
  for (std::size_t h = 0; h < n; ++h) {
    float* row = out.data() + h * kBlueHostWidth;
    row[0] = 1.0f;
    row[1] = 0.0f;
    row[2] = 0.0f;
    row[3] = static_cast<float>(static_cast<int>(s.blue_code(static_cast<HostId>(h)))) / 3.0f;
    row[4] = s.blue_scanned_ever(static_cast<HostId>(h)) ? 1.0f : 0.0f;
    auto ladder = s.scenario->ladder(static_cast<HostId>(h)).size();
    row[5] = ladder == 0 ? 0.0f
                         : static_cast<float>(std::popcount(static_cast<unsigned>(s.decoys[h]))) /
                               static_cast<float>(ladder);
  }
  for (const auto& e : events) {
    if (!e.detected) continue;
    float* row = out.data() + e.host * kBlueHostWidth;
    if (e.kind == EventKind::ScanObserved && row[2] == 0.0f) {
      row[0] = 0.0f;
      row[1] = 1.0f;
    } else if (e.kind == EventKind::ExploitObserved || e.kind == EventKind::DecoyTripped) {
      row[0] = 0.0f;
      row[1] = 0.0f;
      row[2] = 1.0f;
    }
  }
}

/// Writes red_obs_size(H) floats into `out`.
inline void encode_red_obs(ConstStateView s, const EventLog& /*events*/, std::span<float> out) {
  const std::size_t n = s.host_count();
  for (std::size_t h = 0; h < n; ++h) {
    float* row = out.data() + h * kRedHostWidth;
    row[0] = s.discovered(static_cast<HostId>(h)) ? 1.0f : 0.0f;
    row[1] = s.scanned(static_cast<HostId>(h)) ? 1.0f : 0.0f;
    row[2] = s.access[h] == AccessLevel::None ? 1.0f : 0.0f;
    row[3] = s.access[h] == AccessLevel::User ? 1.0f : 0.0f;
    row[4] = s.access[h] == AccessLevel::Privileged ? 1.0f : 0.0f;
  }
  out[n * kRedHostWidth] = s.scalars->last_red_success ? 1.0f : 0.0f;
}

inline std::vector<float> encode_blue_obs(ConstStateView s, const EventLog& events) {
  std::vector<float> v(blue_obs_size(s.host_count()));
  encode_blue_obs(s, events, v);
  return v;
}

inline std::vector<float> encode_red_obs(ConstStateView s, const EventLog& events) {
  std::vector<float> v(red_obs_size(s.host_count()));
  encode_red_obs(s, events, v);
  return v;
}

// ---------------------------------------------------------------------------
// Rewards

struct RewardWeightsView {
  std::span<const double> confidentiality;  // per host
  std::span<const double> availability;     // per host
  double impact_penalty = 0.0;
  double restore_cost = 0.0;

  static RewardWeightsView of(const CompiledScenario& s) {
    const auto& r = s.config().rewards;
    return {s.confidentiality_weights(), s.availability_weights(), r.impact_penalty, r.restore_cost};
  }
};

struct Rewards {
  double blue = 0.0;
  double red = 0.0;
};

// red  = sum of confidentiality weights over Privileged hosts
//      + impact_penalty * availability weight of each impacted host
// blue = -red - restore_cost per restore this step
inline Rewards compute_reward(ConstStateView s, const EventLog& events, const RewardWeightsView& w) {
  double red = 0.0;
  for (std::size_t h = 0; h < s.host_count(); ++h)
    if (s.access[h] == AccessLevel::Privileged) red += w.confidentiality[h];
  double restore = 0.0;
  for (const auto& e : events) {
    if (e.kind == EventKind::ImpactSucceeded) red += w.impact_penalty * w.availability[e.host];
    if (e.kind == EventKind::Restored) restore += w.restore_cost;
  }
  return {0.0 - red - restore, red};
}

inline Rewards compute_reward(ConstStateView s, const EventLog& events) {
  return compute_reward(s, events, RewardWeightsView::of(*s.scenario));
}

}  // namespace minicage
