#pragma once

// Scenario builders and an independent reference model of the game rules,
// written directly from the rule text against ScenarioConfig (no compiled
// tables, no bitmasks) so engine results can be checked against it.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "minicage/minicage.hpp"

namespace testing_support {

using namespace minicage;

/// The default exploit/decoy tables with no hosts, subnets or adjacency.
inline ScenarioConfig empty_scenario() {
  ScenarioConfig c = default_scenario();
  c.hosts.clear();
  c.subnets.clear();
  c.adjacency.clear();
  c.foothold = 0;
  return c;
}

struct HostArgs {
  std::string name;
  SubnetId subnet = SubnetId::User;
  Os os = Os::Linux;
  std::vector<Port> ports;
  std::vector<DecoyId> ladder;
  std::vector<ExploitId> exploits;
  double confidentiality = 0.0;
  double availability = 0.0;
  bool restorable = true;
};

inline HostId add_host(ScenarioConfig& c, const HostArgs& a) {
  HostSpec h;
  h.name = a.name;
  h.subnet = a.subnet;
  h.os = a.os;
  h.open_ports = a.ports;
  h.decoy_ladder = a.ladder;
  for (auto e : a.exploits) h.exploits.push_back({e, c.exploit(e).priority});
  h.confidentiality_weight = a.confidentiality;
  h.availability_weight = a.availability;
  h.restorable = a.restorable;
  auto id = static_cast<HostId>(c.hosts.size());
  c.hosts.push_back(std::move(h));
  auto it = std::find_if(c.subnets.begin(), c.subnets.end(), [&](const Subnet& s) { return s.id == a.subnet; });
  if (it == c.subnets.end()) {
    c.subnets.push_back({a.subnet, {}});
    it = std::prev(c.subnets.end());
  }
  it->members.push_back(id);
  return id;
}

inline HostId add_foothold(ScenarioConfig& c, SubnetId subnet = SubnetId::User) {
  HostId f = add_host(c, {.name = "Foothold", .subnet = subnet, .os = Os::Windows, .restorable = false});
  c.foothold = f;
  return f;
}

/// Ports that satisfy an exploit's requirement on their own: all of
/// `all_of` plus the first `any_of` port.
inline std::vector<Port> satisfying_ports(const ExploitDef& e) {
  std::vector<Port> p = e.ports.all_of;
  if (!e.ports.any_of.empty()) p.push_back(e.ports.any_of.front());
  return p;
}

/// Foothold plus one host per exploit type, each exposing only that
/// exploit's ports, all with confidentiality weight 1.
inline ScenarioConfig one_host_per_exploit() {
  ScenarioConfig c = empty_scenario();
  add_foothold(c);
  for (std::size_t i = 0; i < kExploitCount; ++i) {
    auto e = static_cast<ExploitId>(i);
    add_host(c, {.name = "T_" + std::string(to_string(e)),
                 .ports = satisfying_ports(c.exploit(e)),
                 .exploits = {e},
                 .confidentiality = 1.0});
  }
  return c;
}

/// Three hosts: the foothold and A in User, B in Enterprise, one-way
/// User>Enterprise reachability. A's Vsftpd decoy opens port 21, enabling
/// FTPDirTraversal against it; B runs EternalBlue's port.
inline ScenarioConfig three_host() {
  ScenarioConfig c = empty_scenario();
  add_foothold(c);
  add_host(c, {.name = "A", .ports = {22}, .ladder = {DecoyId::Vsftpd}, .exploits = {ExploitId::SSHBruteForce},
               .confidentiality = 0.5});
  add_host(c, {.name = "B",
               .subnet = SubnetId::Enterprise,
               .os = Os::Windows,
               .ports = {139},
               .ladder = {DecoyId::Femitter, DecoyId::Svchost},
               .exploits = {ExploitId::EternalBlue},
               .confidentiality = 1.0,
               .availability = 1.0});
  c.adjacency = {{SubnetId::User, SubnetId::Enterprise}};
  c.episode_length = 10;
  return c;
}

// ---------------------------------------------------------------------------
// Reference exploit selection

struct RefChoice {
  ExploitId exploit{};
  std::set<Port> engaged;
  std::optional<DecoyId> tripped;
};

inline std::optional<RefChoice> ref_select(const ScenarioConfig& c, HostId h, const std::set<DecoyId>& deployed) {
  const auto& host = c.hosts[h];
  std::set<Port> live(host.open_ports.begin(), host.open_ports.end());
  std::map<Port, DecoyId> decoy_at;
  for (auto d : deployed) {
    live.insert(c.decoy(d).port);
    decoy_at[c.decoy(d).port] = d;
  }
  std::vector<ExploitId> cands;
  for (const auto& r : host.exploits) cands.push_back(r.exploit);
  for (auto d : deployed)
    for (const auto& e : c.exploit_defs)
      if (std::count(e.countered_by.begin(), e.countered_by.end(), d) &&
          !std::count(cands.begin(), cands.end(), e.id))
        cands.push_back(e.id);

  std::optional<RefChoice> best;
  double best_prio = 0;
  Port best_port = 0;
  for (auto id : cands) {
    const auto& e = c.exploit(id);
    bool ok = std::all_of(e.ports.all_of.begin(), e.ports.all_of.end(), [&](Port p) { return live.count(p) > 0; });
    std::set<Port> engaged(e.ports.all_of.begin(), e.ports.all_of.end());
    if (!e.ports.any_of.empty()) {
      std::optional<Port> lowest;
      for (Port p : e.ports.any_of)
        if (live.count(p) && (!lowest || p < *lowest)) lowest = p;
      if (!lowest) ok = false;
      else engaged.insert(*lowest);
    }
    if (!ok) continue;
    Port first = *engaged.begin();
    if (!best || e.priority > best_prio || (e.priority == best_prio && first < best_port)) {
      best = RefChoice{id, engaged, std::nullopt};
      best_prio = e.priority;
      best_port = first;
    }
  }
  if (best)
    for (Port p : best->engaged)
      if (decoy_at.count(p)) {
        best->tripped = decoy_at[p];
        break;
      }
  return best;
}

// ---------------------------------------------------------------------------
// Reference game with detection probability 1 (no randomness)

struct RefState {
  std::vector<AccessLevel> access;
  std::vector<std::vector<DecoyId>> decoys;  // deployment order
  std::set<HostId> discovered, scanned;
  std::vector<int> code;  // 0 none, 1 unknown, 2 user, 3 privileged
  std::vector<bool> scanned_ever;
  bool last_red_success = true;
};

struct RefStep {
  OutcomeStatus red = OutcomeStatus::Ok;
  OutcomeStatus blue = OutcomeStatus::Ok;
  double blue_reward = 0.0;
  double red_reward = 0.0;
};

class RefGame {
 public:
  explicit RefGame(ScenarioConfig c) : c_(std::move(c)) {
    const std::size_t n = c_.hosts.size();
    s_.access.assign(n, AccessLevel::None);
    s_.decoys.assign(n, {});
    s_.code.assign(n, 0);
    s_.scanned_ever.assign(n, false);
    s_.access[c_.foothold] = AccessLevel::Privileged;
    s_.discovered.insert(c_.foothold);
  }

  const RefState& state() const { return s_; }

  RefStep step(BlueAction blue, RedAction red) {
    RefStep out;
    std::vector<bool> impacted(c_.hosts.size(), false);
    std::vector<HostId> scans, exploits;

    out.red = red_move(red, impacted, scans, exploits);
    double restore_cost = 0.0;
    std::optional<HostId> fresh;
    out.blue = blue_move(blue, restore_cost, fresh);

    for (HostId h : scans) s_.scanned_ever[h] = true;
    for (HostId h : exploits)
      if (h != fresh && s_.code[h] == 0) s_.code[h] = 1;
    s_.last_red_success = out.red == OutcomeStatus::Ok;

    double red_reward = 0.0;
    for (std::size_t h = 0; h < c_.hosts.size(); ++h) {
      if (s_.access[h] == AccessLevel::Privileged) red_reward += c_.hosts[h].confidentiality_weight;
      if (impacted[h]) red_reward += c_.rewards.impact_penalty * c_.hosts[h].availability_weight;
    }
    out.red_reward = red_reward;
    out.blue_reward = -red_reward - restore_cost;
    return out;
  }

 private:
  bool subnet_reachable(SubnetId target) const {
    for (std::size_t h = 0; h < c_.hosts.size(); ++h) {
      if (s_.access[h] == AccessLevel::None) continue;
      SubnetId held = c_.hosts[h].subnet;
      if (held == target) return true;
      for (auto [a, b] : c_.adjacency)
        if (a == held && b == target) return true;
    }
    return false;
  }

  std::set<DecoyId> deployed(HostId h) const { return {s_.decoys[h].begin(), s_.decoys[h].end()}; }

  OutcomeStatus red_move(RedAction a, std::vector<bool>& impacted, std::vector<HostId>& scans,
                         std::vector<HostId>& exploits) {
    HostId h = a.target;
    switch (a.type) {
      case RedActionType::Sleep:
        return OutcomeStatus::Ok;
      case RedActionType::DiscoverRemoteSystems: {
        SubnetId id = c_.subnets.at(a.target).id;
        if (!subnet_reachable(id)) return OutcomeStatus::Invalid;
        for (HostId m : c_.subnets[a.target].members) s_.discovered.insert(m);
        return OutcomeStatus::Ok;
      }
      case RedActionType::DiscoverNetworkServices:
        if (!s_.discovered.count(h)) return OutcomeStatus::Invalid;
        s_.scanned.insert(h);
        scans.push_back(h);
        return OutcomeStatus::Ok;
      case RedActionType::ExploitRemoteService: {
        if (!s_.scanned.count(h) || !subnet_reachable(c_.hosts[h].subnet)) return OutcomeStatus::Invalid;
        auto choice = ref_select(c_, h, deployed(h));
        if (!choice) return OutcomeStatus::Invalid;
        if (choice->tripped) return OutcomeStatus::Blocked;
        s_.access[h] = std::max(s_.access[h], AccessLevel::User);
        exploits.push_back(h);
        return OutcomeStatus::Ok;
      }
      case RedActionType::PrivilegeEscalate:
        if (s_.access[h] != AccessLevel::User) return OutcomeStatus::Invalid;
        s_.access[h] = AccessLevel::Privileged;
        return OutcomeStatus::Ok;
      case RedActionType::Impact:
        if (s_.access[h] != AccessLevel::Privileged) return OutcomeStatus::Invalid;
        impacted[h] = true;
        return OutcomeStatus::Ok;
    }
    return OutcomeStatus::Invalid;
  }

  OutcomeStatus blue_move(BlueAction a, double& restore_cost, std::optional<HostId>& fresh) {
    HostId h = a.target;
    switch (a.type) {
      case BlueActionType::Sleep:
        return OutcomeStatus::Ok;
      case BlueActionType::Analyse:
        s_.code[h] = s_.access[h] == AccessLevel::Privileged ? 3 : s_.access[h] == AccessLevel::User ? 2 : 0;
        fresh = h;
        return OutcomeStatus::Ok;
      case BlueActionType::Remove:
        if (s_.access[h] != AccessLevel::User) return OutcomeStatus::NoEffect;
        s_.access[h] = AccessLevel::None;
        if (s_.code[h] == 2) s_.code[h] = 0;
        return OutcomeStatus::Ok;
      case BlueActionType::Restore:
        if (!c_.hosts[h].restorable) return OutcomeStatus::Invalid;
        s_.access[h] = AccessLevel::None;
        s_.decoys[h].clear();
        s_.code[h] = 0;
        restore_cost = c_.rewards.restore_cost;
        fresh = h;
        return OutcomeStatus::Ok;
      case BlueActionType::Decoy: {
        std::set<Port> live(c_.hosts[h].open_ports.begin(), c_.hosts[h].open_ports.end());
        for (auto d : s_.decoys[h]) live.insert(c_.decoy(d).port);
        for (auto d : c_.hosts[h].decoy_ladder) {
          if (std::count(s_.decoys[h].begin(), s_.decoys[h].end(), d)) continue;
          if (live.count(c_.decoy(d).port)) continue;
          s_.decoys[h].push_back(d);
          return OutcomeStatus::Ok;
        }
        return OutcomeStatus::Invalid;
      }
    }
    return OutcomeStatus::Invalid;
  }

  ScenarioConfig c_;
  RefState s_;
};

}  // namespace testing_support
