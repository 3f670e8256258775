#pragma once

// Step trace: one tab-separated line per step,
//
//   t  red_action  red_outcome  blue_action  blue_outcome  detected_events  reward_blue
//
// t          step number after the step (1-based)
// *_action   Sleep | <ActionType>:<host or subnet name>
// *_outcome  ok | ok:<exploit used or decoy deployed> | blocked:<decoy> |
//            no_effect | invalid:<reason>
// detected   comma-separated Scan:<host>, Exploit:<host>,
//            DecoyTripped:<host>:<decoy>, or "-" when blue saw nothing
// reward     shortest round-trip decimal

#include <ostream>
#include <string>

#include "minicage/env.hpp"
#include "minicage/scenario_io.hpp"

namespace minicage {

inline std::string format_action(const CompiledScenario& sc, RedAction a) {
  if (a.type == RedActionType::Sleep) return "Sleep";
  std::string target = a.type == RedActionType::DiscoverRemoteSystems
                           ? std::string(to_string(sc.config().subnets.at(a.target).id))
                           : sc.config().hosts.at(a.target).name;
  return std::string(to_string(a.type)) + ":" + target;
}

inline std::string format_action(const CompiledScenario& sc, BlueAction a) {
  if (a.type == BlueActionType::Sleep) return "Sleep";
  return std::string(to_string(a.type)) + ":" + sc.config().hosts.at(a.target).name;
}

inline std::string format_outcome(const ActionOutcome& o, Actor actor, bool is_exploit) {
  switch (o.status) {
    case OutcomeStatus::Ok:
      if (o.detail == ActionOutcome::kNoDetail) return "ok";
      if (actor == Actor::Red && is_exploit) return "ok:" + std::string(to_string(static_cast<ExploitId>(o.detail)));
      return "ok:" + std::string(to_string(static_cast<DecoyId>(o.detail)));
    case OutcomeStatus::NoEffect:
      return "no_effect";
    case OutcomeStatus::Blocked:
      return "blocked:" + std::string(to_string(static_cast<DecoyId>(o.detail)));
    case OutcomeStatus::Invalid:
      return "invalid:" + std::string(to_string(o.reason));
  }
  return "?";
}

inline std::string format_detected(const CompiledScenario& sc, const EventLog& events) {
  std::string s;
  for (const auto& e : events) {
    if (!e.detected) continue;
    if (!s.empty()) s += ',';
    s += std::string(to_string(e.kind)) + ":" + sc.config().hosts.at(e.host).name;
    if (e.kind == EventKind::DecoyTripped) s += ":" + std::string(to_string(static_cast<DecoyId>(e.detail)));
  }
  return s.empty() ? "-" : s;
}

inline std::string format_trace_line(const CompiledScenario& sc, RedAction red, BlueAction blue,
                                     const StepResult& r, const EventLog& events) {
  std::string line = std::to_string(r.info.t);
  line += '\t' + format_action(sc, red);
  line += '\t' + format_outcome(r.info.red, Actor::Red, red.type == RedActionType::ExploitRemoteService);
  line += '\t' + format_action(sc, blue);
  line += '\t' + format_outcome(r.info.blue, Actor::Blue, false);
  line += '\t' + format_detected(sc, events);
  line += '\t' + detail::format_double(r.rewards.blue);
  return line;
}

}  // namespace minicage
