#pragma once

// Per-step state transition for one game instance.
//
// A step resolves in a fixed order:
//   1. the red action against the pre-step state,
//   2. the blue action against the post-red state,
//   3. detection sampling for this step's scan/exploit events,
//   4. the step counter increments.
// Invalid actions are no-ops that emit an ActionInvalid event.

#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "minicage/compiled_scenario.hpp"
#include "minicage/rng.hpp"

namespace minicage {

// ---------------------------------------------------------------------------
// Actions

enum class RedActionType : std::uint8_t {
  Sleep,
  DiscoverRemoteSystems,    // target = subnet index
  DiscoverNetworkServices,  // target = host
  ExploitRemoteService,
  PrivilegeEscalate,
  Impact,
};

enum class BlueActionType : std::uint8_t { Sleep, Analyse, Remove, Restore, Decoy };

struct RedAction {
  RedActionType type = RedActionType::Sleep;
  std::uint16_t target = 0;

  static constexpr RedAction sleep() { return {}; }
  static constexpr RedAction discover_systems(std::size_t subnet) {
    return {RedActionType::DiscoverRemoteSystems, static_cast<std::uint16_t>(subnet)};
  }
  static constexpr RedAction discover_services(HostId h) { return {RedActionType::DiscoverNetworkServices, h}; }
  static constexpr RedAction exploit(HostId h) { return {RedActionType::ExploitRemoteService, h}; }
  static constexpr RedAction escalate(HostId h) { return {RedActionType::PrivilegeEscalate, h}; }
  static constexpr RedAction impact(HostId h) { return {RedActionType::Impact, h}; }

  friend constexpr bool operator==(const RedAction&, const RedAction&) = default;
};

struct BlueAction {
  BlueActionType type = BlueActionType::Sleep;
  HostId target = 0;

  static constexpr BlueAction sleep() { return {}; }
  static constexpr BlueAction analyse(HostId h) { return {BlueActionType::Analyse, h}; }
  static constexpr BlueAction remove(HostId h) { return {BlueActionType::Remove, h}; }
  static constexpr BlueAction restore(HostId h) { return {BlueActionType::Restore, h}; }
  static constexpr BlueAction decoy(HostId h) { return {BlueActionType::Decoy, h}; }

  friend constexpr bool operator==(const BlueAction&, const BlueAction&) = default;
};

inline constexpr std::array<std::string_view, 6> kRedActionNames = {
    "Sleep", "DiscoverRemoteSystems", "DiscoverNetworkServices", "ExploitRemoteService", "PrivilegeEscalate", "Impact"};
inline constexpr std::array<std::string_view, 5> kBlueActionNames = {"Sleep", "Analyse", "Remove", "Restore", "Decoy"};

constexpr std::string_view to_string(RedActionType t) { return kRedActionNames[static_cast<std::size_t>(t)]; }
constexpr std::string_view to_string(BlueActionType t) { return kBlueActionNames[static_cast<std::size_t>(t)]; }

// ---------------------------------------------------------------------------
// Events and outcomes

enum class EventKind : std::uint8_t {
  ScanObserved,
  ExploitObserved,
  DecoyTripped,
  ExploitSucceeded,  // truth only
  PrivEsc,           // truth only
  ImpactSucceeded,   // truth only
  ActionInvalid,
  Restored,          // blue's own action, feeds the restore cost
};

enum class Actor : std::uint8_t { Red, Blue };

enum class InvalidReason : std::uint8_t {
  None,
  UnknownTarget,
  NoPresence,
  NotDiscovered,
  NotScanned,
  Unreachable,
  NoApplicableExploit,
  NotUserAccess,
  NotPrivileged,
  NotRestorable,
  LadderExhausted,
};

inline constexpr std::array<std::string_view, 8> kEventNames = {
    "Scan", "Exploit", "DecoyTripped", "ExploitSucceeded", "PrivEsc", "Impact", "ActionInvalid", "Restored"};
inline constexpr std::array<std::string_view, 11> kInvalidReasonNames = {
    "none",          "unknown_target", "no_presence",   "not_discovered", "not_scanned",     "unreachable",
    "no_exploit",    "not_user",       "not_privileged", "not_restorable", "ladder_exhausted"};

constexpr std::string_view to_string(EventKind k) { return kEventNames[static_cast<std::size_t>(k)]; }
constexpr std::string_view to_string(InvalidReason r) { return kInvalidReasonNames[static_cast<std::size_t>(r)]; }

struct Event {
  EventKind kind{};
  HostId host = 0;
  std::uint8_t detail = 0;  // ExploitId, DecoyId or InvalidReason depending on kind
  bool detected = false;
  Actor actor = Actor::Red;

  friend constexpr bool operator==(const Event&, const Event&) = default;
};

using EventLog = std::vector<Event>;

enum class OutcomeStatus : std::uint8_t { Ok, NoEffect, Invalid, Blocked };

struct ActionOutcome {
  OutcomeStatus status = OutcomeStatus::Ok;
  InvalidReason reason = InvalidReason::None;
  std::uint8_t detail = kNoDetail;  // exploit used, decoy tripped or decoy deployed

  static constexpr std::uint8_t kNoDetail = 0xff;

  static constexpr ActionOutcome ok(std::uint8_t detail = kNoDetail) { return {OutcomeStatus::Ok, InvalidReason::None, detail}; }
  static constexpr ActionOutcome invalid(InvalidReason r) { return {OutcomeStatus::Invalid, r, kNoDetail}; }

  bool succeeded() const { return status == OutcomeStatus::Ok; }

  friend constexpr bool operator==(const ActionOutcome&, const ActionOutcome&) = default;
};

struct StepInfo {
  ActionOutcome red;
  ActionOutcome blue;
  int t = 0;  // step counter after the increment
  bool done = false;
};

class EpisodeFinished : public std::logic_error {
 public:
  EpisodeFinished() : std::logic_error("step called on a finished episode") {}
};

// ---------------------------------------------------------------------------
// State

struct InstanceScalars {
  std::uint64_t seed = 0;
  std::uint32_t t = 0;
  std::uint32_t draws = 0;               // environment draws consumed this step
  std::uint8_t discovered_subnets = 0;   // bit per subnet index
  std::uint8_t last_red_success = 1;

  friend constexpr bool operator==(const InstanceScalars&, const InstanceScalars&) = default;
};

// red_info bits
inline constexpr std::uint8_t kRedDiscovered = 1;
inline constexpr std::uint8_t kRedScanned = 2;
// blue_info: low two bits hold the compromise code, then the scan flag
inline constexpr std::uint8_t kBlueCodeMask = 3;
inline constexpr std::uint8_t kBlueScannedEver = 4;

enum class CompromiseCode : std::uint8_t { None = 0, Unknown = 1, User = 2, Privileged = 3 };

// Non-owning view of one instance; WorldState and BatchState both hand these
// out so the same transition code runs on either layout.
template <bool IsConst>
struct BasicStateView {
  template <class T>
  using ref_t = std::conditional_t<IsConst, const T, T>;

  const CompiledScenario* scenario = nullptr;
  ref_t<InstanceScalars>* scalars = nullptr;
  std::span<ref_t<AccessLevel>> access;
  std::span<ref_t<DecoyMask>> decoys;
  std::span<ref_t<std::uint8_t>> red_info;
  std::span<ref_t<std::uint8_t>> blue_info;
  std::span<ref_t<std::uint8_t>> impacted;

  operator BasicStateView<true>() const
    requires(!IsConst)
  {
    return {scenario, scalars, access, decoys, red_info, blue_info, impacted};
  }

  std::size_t host_count() const { return access.size(); }
  PortMask live_ports(HostId h) const { return scenario->live_ports(h, decoys[h]); }
  bool discovered(HostId h) const { return red_info[h] & kRedDiscovered; }
  bool scanned(HostId h) const { return red_info[h] & kRedScanned; }
  CompromiseCode blue_code(HostId h) const { return static_cast<CompromiseCode>(blue_info[h] & kBlueCodeMask); }
  bool blue_scanned_ever(HostId h) const { return blue_info[h] & kBlueScannedEver; }

  // Subnets holding at least one host with >= User red access.
  std::uint8_t held_subnets() const {
    std::uint8_t m = 0;
    for (HostId h = 0; h < access.size(); ++h)
      if (access[h] != AccessLevel::None) m |= static_cast<std::uint8_t>(1u << scenario->subnet_of(h));
    return m;
  }
  // Subnets red can act on: held subnets plus their neighbours.
  std::uint8_t reachable_subnets() const {
    std::uint8_t held = held_subnets(), m = 0;
    for (std::size_t s = 0; s < scenario->subnet_count(); ++s)
      if (held & (1u << s)) m |= scenario->reach_mask(s);
    return m;
  }
};

using StateView = BasicStateView<false>;
using ConstStateView = BasicStateView<true>;

/// Full game state of one instance, owning its per-host arrays.
class WorldState {
 public:
  WorldState() = default;
  explicit WorldState(ScenarioPtr scenario) : scenario_(std::move(scenario)) {
    std::size_t n = scenario_->host_count();
    access_.assign(n, AccessLevel::None);
    decoys_.assign(n, 0);
    red_info_.assign(n, 0);
    blue_info_.assign(n, 0);
    impacted_.assign(n, 0);
  }

  StateView view() { return {scenario_.get(), &scalars_, access_, decoys_, red_info_, blue_info_, impacted_}; }
  ConstStateView view() const {
    return {scenario_.get(), &scalars_, access_, decoys_, red_info_, blue_info_, impacted_};
  }

  const CompiledScenario& scenario() const { return *scenario_; }
  const ScenarioPtr& scenario_ptr() const { return scenario_; }
  const InstanceScalars& scalars() const { return scalars_; }
  int t() const { return static_cast<int>(scalars_.t); }
  bool done() const { return scalars_.t >= static_cast<std::uint32_t>(scenario_->episode_length()); }

  AccessLevel red_access(HostId h) const { return access_[h]; }
  DecoyMask decoy_mask(HostId h) const { return decoys_[h]; }
  bool impacted(HostId h) const { return impacted_[h] != 0; }
  bool discovered(HostId h) const { return red_info_[h] & kRedDiscovered; }
  bool scanned(HostId h) const { return red_info_[h] & kRedScanned; }
  bool subnet_discovered(std::size_t s) const { return scalars_.discovered_subnets & (1u << s); }
  CompromiseCode blue_code(HostId h) const { return view().blue_code(h); }

  /// Deployed decoys in deployment (ladder) order.
  std::vector<DecoyId> deployed_decoys(HostId h) const {
    std::vector<DecoyId> out;
    for (DecoyId d : scenario_->ladder(h))
      if (decoys_[h] & decoy_bit(d)) out.push_back(d);
    return out;
  }

  std::vector<Port> live_ports(HostId h) const { return scenario_->ports_of(view().live_ports(h)); }

  friend bool operator==(const WorldState& a, const WorldState& b) {
    return a.scenario_->config() == b.scenario_->config() && a.scalars_ == b.scalars_ && a.access_ == b.access_ &&
           a.decoys_ == b.decoys_ && a.red_info_ == b.red_info_ && a.blue_info_ == b.blue_info_ &&
           a.impacted_ == b.impacted_;
  }

 private:
  ScenarioPtr scenario_;
  InstanceScalars scalars_;
  std::vector<AccessLevel> access_;
  std::vector<DecoyMask> decoys_;
  std::vector<std::uint8_t> red_info_;
  std::vector<std::uint8_t> blue_info_;
  std::vector<std::uint8_t> impacted_;
};

// ---------------------------------------------------------------------------
// Transition

/// Initialise a view to the start-of-episode state for `seed`.
inline void reset_view(StateView s, std::uint64_t seed) {
  const auto& sc = *s.scenario;
  *s.scalars = InstanceScalars{};
  s.scalars->seed = seed;
  std::fill(s.access.begin(), s.access.end(), AccessLevel::None);
  std::fill(s.decoys.begin(), s.decoys.end(), DecoyMask{0});
  std::fill(s.red_info.begin(), s.red_info.end(), std::uint8_t{0});
  std::fill(s.blue_info.begin(), s.blue_info.end(), std::uint8_t{0});
  std::fill(s.impacted.begin(), s.impacted.end(), std::uint8_t{0});
  HostId foot = sc.foothold();
  s.access[foot] = AccessLevel::Privileged;
  s.red_info[foot] = kRedDiscovered;
  s.scalars->discovered_subnets = static_cast<std::uint8_t>(1u << sc.subnet_of(foot));
}

inline WorldState reset(ScenarioPtr scenario, std::uint64_t seed) {
  WorldState w(std::move(scenario));
  reset_view(w.view(), seed);
  return w;
}

struct ExploitChoice {
  ExploitId exploit{};
  PortMask engaged = 0;                  // ports the exploit connects to
  std::optional<DecoyId> tripped_decoy;  // set when an engaged port is a decoy
};

/// Highest-priority candidate exploit whose port requirement is met by the
/// host's live ports (real ports plus deployed decoy ports).
inline std::optional<ExploitChoice> select_exploit(ConstStateView s, HostId target) {
  const auto& sc = *s.scenario;
  DecoyMask deployed = s.decoys[target];
  PortMask decoy_live = sc.decoy_ports(deployed);
  PortMask live = sc.real_ports(target) | decoy_live;
  for (const auto& c : sc.candidates(target)) {
    if (c.enabled_by != 0 && !(c.enabled_by & deployed)) continue;
    if ((live & c.all_of) != c.all_of) continue;
    PortMask any_live = live & c.any_of;
    if (c.any_of != 0 && any_live == 0) continue;
    ExploitChoice choice{c.exploit, c.all_of | (any_live & (~any_live + 1)), std::nullopt};
    if (PortMask hit = choice.engaged & decoy_live) {
      PortMask lowest = hit & (~hit + 1);
      for (DecoyId d : sc.ladder(target))
        if ((deployed & decoy_bit(d)) && sc.decoy_port(d) == lowest) {
          choice.tripped_decoy = d;
          break;
        }
    }
    return choice;
  }
  return std::nullopt;
}

/// Why `a` would be a no-op in state `s`, or InvalidReason::None.
inline InvalidReason red_invalid_reason(ConstStateView s, RedAction a) {
  const auto& sc = *s.scenario;
  if (a.type == RedActionType::Sleep) return InvalidReason::None;
  if (a.type == RedActionType::DiscoverRemoteSystems) {
    if (a.target >= sc.subnet_count()) return InvalidReason::UnknownTarget;
    return (s.reachable_subnets() & (1u << a.target)) ? InvalidReason::None : InvalidReason::NoPresence;
  }
  if (a.target >= s.host_count()) return InvalidReason::UnknownTarget;
  HostId h = a.target;
  switch (a.type) {
    case RedActionType::DiscoverNetworkServices:
      return s.discovered(h) ? InvalidReason::None : InvalidReason::NotDiscovered;
    case RedActionType::ExploitRemoteService:
      if (!s.scanned(h)) return InvalidReason::NotScanned;
      if (!(s.reachable_subnets() & (1u << sc.subnet_of(h)))) return InvalidReason::Unreachable;
      if (!select_exploit(s, h)) return InvalidReason::NoApplicableExploit;
      return InvalidReason::None;
    case RedActionType::PrivilegeEscalate:
      return s.access[h] == AccessLevel::User ? InvalidReason::None : InvalidReason::NotUserAccess;
    case RedActionType::Impact:
      return s.access[h] == AccessLevel::Privileged ? InvalidReason::None : InvalidReason::NotPrivileged;
    default:
      return InvalidReason::None;
  }
}

/// Strongest ladder decoy not yet deployed whose listen port is free.
inline std::optional<DecoyId> next_decoy(ConstStateView s, HostId h) {
  const auto& sc = *s.scenario;
  PortMask live = s.live_ports(h);
  for (DecoyId d : sc.ladder(h)) {
    if (s.decoys[h] & decoy_bit(d)) continue;
    if (live & sc.decoy_port(d)) continue;
    return d;
  }
  return std::nullopt;
}

inline InvalidReason blue_invalid_reason(ConstStateView s, BlueAction a) {
  if (a.type == BlueActionType::Sleep) return InvalidReason::None;
  if (a.target >= s.host_count()) return InvalidReason::UnknownTarget;
  switch (a.type) {
    case BlueActionType::Restore:
      return s.scenario->config().hosts[a.target].restorable ? InvalidReason::None : InvalidReason::NotRestorable;
    case BlueActionType::Decoy:
      return next_decoy(s, a.target) ? InvalidReason::None : InvalidReason::LadderExhausted;
    default:
      return InvalidReason::None;
  }
}

inline ActionOutcome apply_red(StateView s, RedAction a, EventLog& events) {
  if (auto why = red_invalid_reason(s, a); why != InvalidReason::None) {
    events.push_back({EventKind::ActionInvalid, a.target, static_cast<std::uint8_t>(why), false, Actor::Red});
    return ActionOutcome::invalid(why);
  }
  const auto& sc = *s.scenario;
  HostId h = a.target;
  switch (a.type) {
    case RedActionType::Sleep:
      break;
    case RedActionType::DiscoverRemoteSystems:
      s.scalars->discovered_subnets |= static_cast<std::uint8_t>(1u << a.target);
      for (HostId m : sc.members(a.target)) s.red_info[m] |= kRedDiscovered;
      break;
    case RedActionType::DiscoverNetworkServices:
      s.red_info[h] |= kRedScanned;
      events.push_back({EventKind::ScanObserved, h, 0, false, Actor::Red});
      break;
    case RedActionType::ExploitRemoteService: {
      auto choice = *select_exploit(s, h);
      auto exploit_id = static_cast<std::uint8_t>(choice.exploit);
      if (choice.tripped_decoy) {
        auto decoy_id = static_cast<std::uint8_t>(*choice.tripped_decoy);
        events.push_back({EventKind::DecoyTripped, h, decoy_id, true, Actor::Red});
        return {OutcomeStatus::Blocked, InvalidReason::None, decoy_id};
      }
      AccessLevel grant = sc.config().exploit(choice.exploit).grants;
      if (s.access[h] < grant) s.access[h] = grant;
      events.push_back({EventKind::ExploitSucceeded, h, exploit_id, false, Actor::Red});
      events.push_back({EventKind::ExploitObserved, h, exploit_id, false, Actor::Red});
      return ActionOutcome::ok(exploit_id);
    }
    case RedActionType::PrivilegeEscalate:
      s.access[h] = AccessLevel::Privileged;
      events.push_back({EventKind::PrivEsc, h, 0, false, Actor::Red});
      break;
    case RedActionType::Impact:
      s.impacted[h] = 1;
      events.push_back({EventKind::ImpactSucceeded, h, 0, false, Actor::Red});
      break;
  }
  return ActionOutcome::ok();
}

namespace detail {
inline void set_blue_code(StateView s, HostId h, CompromiseCode c) {
  s.blue_info[h] = static_cast<std::uint8_t>((s.blue_info[h] & ~kBlueCodeMask) | static_cast<std::uint8_t>(c));
}
inline CompromiseCode code_for(AccessLevel a) {
  switch (a) {
    case AccessLevel::User: return CompromiseCode::User;
    case AccessLevel::Privileged: return CompromiseCode::Privileged;
    default: return CompromiseCode::None;
  }
}
}  // namespace detail

inline ActionOutcome apply_blue(StateView s, BlueAction a, EventLog& events) {
  if (auto why = blue_invalid_reason(s, a); why != InvalidReason::None) {
    events.push_back({EventKind::ActionInvalid, a.target, static_cast<std::uint8_t>(why), false, Actor::Blue});
    return ActionOutcome::invalid(why);
  }
  HostId h = a.target;
  switch (a.type) {
    case BlueActionType::Sleep:
      break;
    case BlueActionType::Analyse:
      detail::set_blue_code(s, h, detail::code_for(s.access[h]));
      break;
    case BlueActionType::Remove:
      if (s.access[h] != AccessLevel::User) return {OutcomeStatus::NoEffect, InvalidReason::None, ActionOutcome::kNoDetail};
      s.access[h] = AccessLevel::None;
      if (s.blue_code(h) == CompromiseCode::User) detail::set_blue_code(s, h, CompromiseCode::None);
      break;
    case BlueActionType::Restore:
      s.access[h] = AccessLevel::None;
      s.decoys[h] = 0;
      detail::set_blue_code(s, h, CompromiseCode::None);
      events.push_back({EventKind::Restored, h, 0, false, Actor::Blue});
      break;
    case BlueActionType::Decoy: {
      DecoyId d = *next_decoy(s, h);
      s.decoys[h] |= decoy_bit(d);
      return ActionOutcome::ok(static_cast<std::uint8_t>(d));
    }
  }
  return ActionOutcome::ok();
}

/// Sample detection for this step's scan/exploit events and fold detected
/// events into blue's per-host knowledge. Hosts blue analysed or restored this
/// step keep the knowledge that action produced.
inline void finalize_detection(StateView s, EventLog& events, std::optional<HostId> fresh_blue_host = std::nullopt) {
  const auto& det = s.scenario->config().detection;
  CounterRng rng(derive_key(s.scalars->seed, Stream::Environment, s.scalars->t), s.scalars->draws);
  for (auto& e : events) {
    if (e.kind == EventKind::ScanObserved) {
      e.detected = rng.bernoulli(det.p_detect_scan);
      if (e.detected) s.blue_info[e.host] |= kBlueScannedEver;
    } else if (e.kind == EventKind::ExploitObserved) {
      e.detected = rng.bernoulli(det.p_detect_exploit);
      if (e.detected && e.host != fresh_blue_host && s.blue_code(e.host) == CompromiseCode::None)
        detail::set_blue_code(s, e.host, CompromiseCode::Unknown);
    }
  }
  s.scalars->draws = static_cast<std::uint32_t>(rng.counter());
}

/// Advance one step. Throws EpisodeFinished when t has reached the episode length.
inline StepInfo step(StateView s, BlueAction blue, RedAction red, EventLog& events) {
  const auto& sc = *s.scenario;
  if (s.scalars->t >= static_cast<std::uint32_t>(sc.episode_length())) throw EpisodeFinished();
  events.clear();
  s.scalars->draws = 0;
  std::fill(s.impacted.begin(), s.impacted.end(), std::uint8_t{0});

  StepInfo info;
  info.red = apply_red(s, red, events);
  info.blue = apply_blue(s, blue, events);

  std::optional<HostId> fresh;
  if (info.blue.succeeded() && (blue.type == BlueActionType::Analyse || blue.type == BlueActionType::Restore))
    fresh = blue.target;
  finalize_detection(s, events, fresh);

  s.scalars->last_red_success = info.red.succeeded() ? 1 : 0;
  ++s.scalars->t;
  info.t = static_cast<int>(s.scalars->t);
  info.done = info.t >= sc.episode_length();
  return info;
}

inline StepInfo step(WorldState& w, BlueAction blue, RedAction red, EventLog& events) {
  return step(w.view(), blue, red, events);
}

}  // namespace minicage
