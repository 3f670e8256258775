#pragma once

// Scripted policies: red `bline` and `meander`, blue `react_restore` and
// `react_decoy`, and `sleep` for either side. Agents read only their own
// side's observation vector plus static scenario facts (topology, weights,
// ladder sizes).

#include <optional>
#include <string_view>
#include <variant>

#include "minicage/spaces.hpp"

namespace minicage {

enum class Side : std::uint8_t { Blue, Red };
enum class AgentKind : std::uint8_t { Sleep, BLine, Meander, ReactRestore, ReactDecoy };

inline constexpr std::array<std::string_view, 5> kAgentNames = {"sleep", "bline", "meander", "react_restore",
                                                                 "react_decoy"};

constexpr std::string_view to_string(AgentKind k) { return kAgentNames[static_cast<std::size_t>(k)]; }
constexpr std::string_view to_string(Side s) { return s == Side::Blue ? "blue" : "red"; }

inline std::optional<AgentKind> parse_agent(std::string_view name) {
  return detail::lookup<AgentKind>(kAgentNames, name);
}

constexpr bool plays(AgentKind k, Side s) {
  switch (k) {
    case AgentKind::Sleep: return true;
    case AgentKind::BLine:
    case AgentKind::Meander: return s == Side::Red;
    default: return s == Side::Blue;
  }
}

class UnknownAgent : public std::invalid_argument {
 public:
  UnknownAgent(std::string_view name, Side side)
      : std::invalid_argument("unknown " + std::string(to_string(side)) + " agent '" + std::string(name) + "'") {}
};

inline AgentKind require_agent(std::string_view name, Side side) {
  auto k = parse_agent(name);
  if (!k || !plays(*k, side)) throw UnknownAgent(name, side);
  return *k;
}

namespace detail {

// Subnet indices in breadth-first order from the foothold's subnet.
inline std::vector<std::size_t> subnet_route(const CompiledScenario& sc) {
  std::vector<std::size_t> order{sc.subnet_of(sc.foothold())};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t s = 0; s < sc.subnet_count(); ++s)
      if ((sc.reach_mask(order[i]) & (1u << s)) && std::find(order.begin(), order.end(), s) == order.end())
        order.push_back(s);
  return order;
}

// The host an attacker ultimately wants: highest availability weight in the
// deepest subnet (Op_Server by default).
inline HostId final_target(const CompiledScenario& sc) {
  auto route = subnet_route(sc);
  auto members = sc.members(route.back());
  HostId best = members.front();
  for (HostId h : members)
    if (sc.availability(h) > sc.availability(best)) best = h;
  return best;
}

struct RedView {
  std::span<const float> obs;
  bool discovered(HostId h) const { return obs[h * kRedHostWidth] > 0.5f; }
  bool scanned(HostId h) const { return obs[h * kRedHostWidth + 1] > 0.5f; }
  AccessLevel access(HostId h) const {
    if (obs[h * kRedHostWidth + 4] > 0.5f) return AccessLevel::Privileged;
    if (obs[h * kRedHostWidth + 3] > 0.5f) return AccessLevel::User;
    return AccessLevel::None;
  }
  bool last_succeeded() const { return obs.back() > 0.5f; }
  // Subnets red can act on according to its own access columns.
  std::uint8_t reachable(const CompiledScenario& sc) const {
    std::uint8_t held = 0, m = 0;
    for (HostId h = 0; h < sc.host_count(); ++h)
      if (access(h) != AccessLevel::None) held |= static_cast<std::uint8_t>(1u << sc.subnet_of(h));
    for (std::size_t s = 0; s < sc.subnet_count(); ++s)
      if (held & (1u << s)) m |= sc.reach_mask(s);
    return m;
  }
};

struct BlueView {
  std::span<const float> obs;
  const float* row(HostId h) const { return obs.data() + h * kBlueHostWidth; }
  bool scan_activity(HostId h) const { return row(h)[1] > 0.5f; }
  bool exploit_activity(HostId h) const { return row(h)[2] > 0.5f; }
  int compromise(HostId h) const { return static_cast<int>(row(h)[3] * 3.0f + 0.5f); }
  float decoy_fraction(HostId h) const { return row(h)[5]; }
};

// Highest confidentiality weight among hosts satisfying `pred`; ties go to the
// lower host id.
template <class Pred>
std::optional<HostId> heaviest(const CompiledScenario& sc, Pred&& pred) {
  std::optional<HostId> best;
  for (HostId h = 0; h < sc.host_count(); ++h)
    if (pred(h) && (!best || sc.confidentiality(h) > sc.confidentiality(*best))) best = h;
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// b-line

// Straight route to the final target: for each subnet on the route, discover
// it, then scan, exploit and escalate on one host, then Impact forever. A
// failed action drops back one phase; repeated failures against a
// non-final host re-pick that stage's host.
struct BLineMemory {
  static constexpr HostId kUnset = 0xffff;
  static constexpr int kRetarget = 3;

  int phase = 0;
  std::vector<HostId> target_chain;  // one host per route stage
  int retry_count = 0;
  bool acted = false;

  friend bool operator==(const BLineMemory&, const BLineMemory&) = default;
};

namespace detail {
inline HostId pick_stage_host(const CompiledScenario& sc, std::size_t subnet, CounterRng& rng, HostId avoid) {
  std::vector<HostId> pool;
  for (HostId h : sc.members(subnet))
    if (h != sc.foothold() && h != avoid && !sc.config().hosts[h].exploits.empty()) pool.push_back(h);
  if (pool.empty())
    for (HostId h : sc.members(subnet))
      if (h != sc.foothold() && !sc.config().hosts[h].exploits.empty()) pool.push_back(h);
  if (pool.empty()) return sc.members(subnet).front();
  return pool[rng.index(pool.size())];
}
}  // namespace detail

inline std::size_t bline_act(const CompiledScenario& sc, std::span<const float> obs, BLineMemory& mem,
                             CounterRng& rng) {
  detail::RedView view{obs};
  auto route = detail::subnet_route(sc);
  const int stages = static_cast<int>(route.size());
  const int terminal = 4 * stages;
  if (mem.target_chain.size() != route.size()) mem.target_chain.assign(route.size(), BLineMemory::kUnset);
  mem.target_chain.back() = detail::final_target(sc);

  if (mem.acted) {
    if (view.last_succeeded()) {
      // A successful re-scan is part of the retry loop, not progress.
      if (mem.phase % 4 != 1) mem.retry_count = 0;
      mem.phase = std::min(mem.phase + 1, terminal);
    } else {
      mem.phase = std::max(mem.phase - 1, 0);
      ++mem.retry_count;
      int stage = mem.phase / 4;
      if (mem.retry_count >= BLineMemory::kRetarget && stage < stages - 1 && mem.phase % 4 == 1) {
        HostId old = mem.target_chain[stage];
        mem.target_chain[stage] = detail::pick_stage_host(sc, route[stage], rng, old);
        mem.retry_count = 0;
      }
    }
  }
  mem.acted = true;

  HostId goal = mem.target_chain.back();
  if (view.access(goal) == AccessLevel::Privileged) mem.phase = terminal;
  else if (mem.phase == terminal) mem.phase = terminal - 1;

  if (mem.phase == terminal) return encode_red_action(sc, RedAction::impact(goal));
  int stage = mem.phase / 4;
  // A restore somewhere on the chain can cut the way in: resume at the
  // deepest stage still reachable, from its exploit step.
  if (stage > 0 && !(view.reachable(sc) & (1u << route[stage]))) {
    while (stage > 0 && !(view.reachable(sc) & (1u << route[stage]))) --stage;
    mem.phase = 4 * stage + (view.scanned(mem.target_chain[stage]) ? 2 : 1);
    mem.retry_count = 0;
  }
  HostId& target = mem.target_chain[stage];
  if (mem.phase % 4 == 3 && target != BLineMemory::kUnset && view.access(target) == AccessLevel::None)
    mem.phase = 4 * stage + 2;
  if (target == BLineMemory::kUnset) target = detail::pick_stage_host(sc, route[stage], rng, BLineMemory::kUnset);
  switch (mem.phase % 4) {
    case 0: return encode_red_action(sc, RedAction::discover_systems(route[stage]));
    case 1: return encode_red_action(sc, RedAction::discover_services(target));
    case 2: return encode_red_action(sc, RedAction::exploit(target));
    default: return encode_red_action(sc, RedAction::escalate(target));
  }
}

// ---------------------------------------------------------------------------
// meander

// Sweeps subnets in breadth-first order. Within the shallowest subnet that
// still has incomplete hosts: discover it, scan every unscanned host, exploit
// every uncompromised one, escalate every user-level one, choosing uniformly
// at random within each class. Hosts whose exploit failed are set aside.
struct MeanderMemory {
  std::vector<std::uint8_t> set_aside;  // per host
  std::optional<RedAction> last;

  friend bool operator==(const MeanderMemory&, const MeanderMemory&) = default;
};

inline std::size_t meander_act(const CompiledScenario& sc, std::span<const float> obs, MeanderMemory& mem,
                               CounterRng& rng) {
  detail::RedView view{obs};
  const std::size_t n = sc.host_count();
  if (mem.set_aside.size() != n) mem.set_aside.assign(n, 0);
  if (mem.last && mem.last->type == RedActionType::ExploitRemoteService && !view.last_succeeded())
    mem.set_aside[mem.last->target] = 1;

  auto emit = [&](RedAction a) {
    mem.last = a;
    return encode_red_action(sc, a);
  };
  auto choose = [&](const std::vector<HostId>& pool) { return pool[rng.index(pool.size())]; };

  const std::uint8_t reach = view.reachable(sc);

  for (int attempt = 0; attempt < 2; ++attempt) {
    for (std::size_t subnet : detail::subnet_route(sc)) {
      auto members = sc.members(subnet);
      bool all_known = std::all_of(members.begin(), members.end(), [&](HostId h) { return view.discovered(h); });
      if (!all_known) {
        if (reach & (1u << subnet)) return emit(RedAction::discover_systems(subnet));
        break;  // frontier not reachable yet
      }
      std::vector<HostId> unscanned, uncompromised, user_level;
      for (HostId h : members) {
        if (mem.set_aside[h] || view.access(h) == AccessLevel::Privileged) continue;
        if (!view.scanned(h)) unscanned.push_back(h);
        else if (view.access(h) == AccessLevel::None) uncompromised.push_back(h);
        else user_level.push_back(h);
      }
      if (!unscanned.empty()) return emit(RedAction::discover_services(choose(unscanned)));
      if (!uncompromised.empty()) return emit(RedAction::exploit(choose(uncompromised)));
      if (!user_level.empty()) return emit(RedAction::escalate(choose(user_level)));
    }
    HostId goal = detail::final_target(sc);
    if (view.access(goal) == AccessLevel::Privileged) return emit(RedAction::impact(goal));
    // Stuck behind hosts set aside earlier: give them another try.
    if (std::find(mem.set_aside.begin(), mem.set_aside.end(), 1) == mem.set_aside.end()) break;
    std::fill(mem.set_aside.begin(), mem.set_aside.end(), 0);
  }
  return emit(RedAction::sleep());
}

// ---------------------------------------------------------------------------
// Blue policies

constexpr std::size_t sleep_act() { return 0; }

/// Restore the heaviest host showing exploit activity or a nonzero compromise code.
inline std::size_t react_restore_act(const CompiledScenario& sc, std::span<const float> obs) {
  detail::BlueView view{obs};
  auto target = detail::heaviest(sc, [&](HostId h) {
    return sc.config().hosts[h].restorable && (view.exploit_activity(h) || view.compromise(h) >= 1);
  });
  return target ? encode_blue_action(sc, BlueAction::restore(*target)) : sleep_act();
}

inline std::size_t react_decoy_act(const CompiledScenario& sc, std::span<const float> obs) {
  detail::BlueView view{obs};
  auto has_room = [&](HostId h) { return !sc.ladder(h).empty() && view.decoy_fraction(h) < 1.0f - 1e-6f; };
  auto restorable = [&](HostId h) { return sc.config().hosts[h].restorable; };

  if (auto h = detail::heaviest(sc, [&](HostId x) { return view.scan_activity(x) && has_room(x); }))
    return encode_blue_action(sc, BlueAction::decoy(*h));
  if (auto h = detail::heaviest(sc, [&](HostId x) { return view.compromise(x) >= 2 && restorable(x); }))
    return encode_blue_action(sc, BlueAction::restore(*h));
  // An unconfirmed compromise is analysed so the rule above can act on it.
  if (auto h = detail::heaviest(sc, [&](HostId x) { return view.compromise(x) == 1 && restorable(x); }))
    return encode_blue_action(sc, BlueAction::analyse(*h));
  if (auto h = detail::heaviest(sc, has_room)) return encode_blue_action(sc, BlueAction::decoy(*h));
  return sleep_act();
}

// ---------------------------------------------------------------------------

using AgentMemory = std::variant<std::monostate, BLineMemory, MeanderMemory>;

/// A named policy bound to one side of one environment instance.
class ScriptedAgent {
 public:
  ScriptedAgent(AgentKind kind, Side side, ScenarioPtr scenario)
      : kind_(kind), side_(side), scenario_(std::move(scenario)) {
    if (!plays(kind, side)) throw UnknownAgent(to_string(kind), side);
    reset(0);
  }

  ScriptedAgent(std::string_view name, Side side, ScenarioPtr scenario)
      : ScriptedAgent(require_agent(name, side), side, std::move(scenario)) {}

  void reset(std::uint64_t seed) {
    rng_ = CounterRng(derive_key(seed, side_ == Side::Blue ? Stream::BlueAgent : Stream::RedAgent));
    switch (kind_) {
      case AgentKind::BLine: memory_ = BLineMemory{}; break;
      case AgentKind::Meander: memory_ = MeanderMemory{}; break;
      default: memory_ = std::monostate{}; break;
    }
  }

  std::size_t act(std::span<const float> obs) {
    const auto& sc = *scenario_;
    switch (kind_) {
      case AgentKind::Sleep: return sleep_act();
      case AgentKind::BLine: return bline_act(sc, obs, std::get<BLineMemory>(memory_), rng_);
      case AgentKind::Meander: return meander_act(sc, obs, std::get<MeanderMemory>(memory_), rng_);
      case AgentKind::ReactRestore: return react_restore_act(sc, obs);
      case AgentKind::ReactDecoy: return react_decoy_act(sc, obs);
    }
    return sleep_act();
  }

  AgentKind kind() const { return kind_; }
  Side side() const { return side_; }
  const AgentMemory& memory() const { return memory_; }

 private:
  AgentKind kind_;
  Side side_;
  ScenarioPtr scenario_;
  CounterRng rng_;
  AgentMemory memory_;
};

}  // namespace minicage
