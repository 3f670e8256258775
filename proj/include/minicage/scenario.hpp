#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace minicage {

using HostId = std::uint16_t;
using Port = std::uint16_t;

enum class SubnetId : std::uint8_t { User, Enterprise, Operational };
inline constexpr std::size_t kSubnetKinds = 3;

enum class Os : std::uint8_t { Windows, Linux };

enum class ExploitId : std::uint8_t {
  EternalBlue,
  BlueKeep,
  HTTPRFI,
  HTTPSRFI,
  SSHBruteForce,
  SQLInjection,
  HarakaRCE,
  FTPDirTraversal,
};
inline constexpr std::size_t kExploitCount = 8;

enum class DecoyId : std::uint8_t {
  Smss,
  Svchost,
  Apache,
  Tomcat,
  SSHD,
  HarakaSMTP,
  Femitter,
  Vsftpd,
};
inline constexpr std::size_t kDecoyCount = 8;

enum class AccessLevel : std::uint8_t { None = 0, User = 1, Privileged = 2 };

// ---------------------------------------------------------------------------
// Names

inline constexpr std::array<std::string_view, kSubnetKinds> kSubnetNames = {
    "User", "Enterprise", "Operational"};
inline constexpr std::array<std::string_view, 2> kOsNames = {"Windows", "Linux"};
inline constexpr std::array<std::string_view, kExploitCount> kExploitNames = {
    "EternalBlue", "BlueKeep",     "HTTPRFI",   "HTTPSRFI",
    "SSHBruteForce", "SQLInjection", "HarakaRCE", "FTPDirTraversal"};
inline constexpr std::array<std::string_view, kDecoyCount> kDecoyNames = {
    "decoySmss", "decoySvchost",    "decoyApache",   "decoyTomcat",
    "decoySSHD", "decoyHarakaSMTP", "decoyFemitter", "decoyVsftpd"};
inline constexpr std::array<std::string_view, 3> kAccessNames = {"None", "User", "Privileged"};

namespace detail {
template <class E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<E>(i);
  return std::nullopt;
}
}  // namespace detail

constexpr std::string_view to_string(SubnetId v) { return kSubnetNames[static_cast<std::size_t>(v)]; }
constexpr std::string_view to_string(Os v) { return kOsNames[static_cast<std::size_t>(v)]; }
constexpr std::string_view to_string(ExploitId v) { return kExploitNames[static_cast<std::size_t>(v)]; }
constexpr std::string_view to_string(DecoyId v) { return kDecoyNames[static_cast<std::size_t>(v)]; }
constexpr std::string_view to_string(AccessLevel v) { return kAccessNames[static_cast<std::size_t>(v)]; }

inline std::optional<SubnetId> parse_subnet(std::string_view s) { return detail::lookup<SubnetId>(kSubnetNames, s); }
inline std::optional<Os> parse_os(std::string_view s) { return detail::lookup<Os>(kOsNames, s); }
inline std::optional<ExploitId> parse_exploit(std::string_view s) { return detail::lookup<ExploitId>(kExploitNames, s); }
inline std::optional<DecoyId> parse_decoy(std::string_view s) { return detail::lookup<DecoyId>(kDecoyNames, s); }
inline std::optional<AccessLevel> parse_access(std::string_view s) { return detail::lookup<AccessLevel>(kAccessNames, s); }

// ---------------------------------------------------------------------------
// Data model

// Satisfied when every port in all_of is live and, if any_of is nonempty, at
// least one port of any_of is live.
struct PortRequirement {
  std::vector<Port> all_of;
  std::vector<Port> any_of;

  template <class IsLive>
  bool satisfied_by(IsLive&& live) const {
    if (!std::all_of(all_of.begin(), all_of.end(), live)) return false;
    return any_of.empty() || std::any_of(any_of.begin(), any_of.end(), live);
  }

  bool mentions(Port p) const {
    return std::find(all_of.begin(), all_of.end(), p) != all_of.end() ||
           std::find(any_of.begin(), any_of.end(), p) != any_of.end();
  }

  friend bool operator==(const PortRequirement&, const PortRequirement&) = default;
};

struct ExploitDef {
  ExploitId id{};
  std::string process;
  PortRequirement ports;
  double priority = 0.0;
  std::vector<DecoyId> countered_by;
  AccessLevel grants = AccessLevel::User;

  friend bool operator==(const ExploitDef&, const ExploitDef&) = default;
};

struct DecoyDef {
  DecoyId id{};
  std::string process;
  Port port = 0;
  double strength = 0.0;
  std::vector<Os> os;

  friend bool operator==(const DecoyDef&, const DecoyDef&) = default;
};

struct ProcessSpec {
  std::string name;
  std::string user;
  std::vector<Port> ports;

  friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;
};

struct ExploitRow {
  ExploitId exploit{};
  double priority = 0.0;

  friend bool operator==(const ExploitRow&, const ExploitRow&) = default;
};

struct HostSpec {
  std::string name;
  Os os = Os::Linux;
  SubnetId subnet = SubnetId::User;
  std::vector<Port> open_ports;
  std::vector<ProcessSpec> processes;
  std::vector<DecoyId> decoy_ladder;  // descending strength
  std::vector<ExploitRow> exploits;   // the host's own exploit order
  double confidentiality_weight = 0.0;
  double availability_weight = 0.0;
  bool restorable = true;

  bool has_port(Port p) const {
    return std::find(open_ports.begin(), open_ports.end(), p) != open_ports.end();
  }

  friend bool operator==(const HostSpec&, const HostSpec&) = default;
};

struct Subnet {
  SubnetId id{};
  std::vector<HostId> members;

  friend bool operator==(const Subnet&, const Subnet&) = default;
};

struct Detection {
  double p_detect_scan = 0.9;
  double p_detect_exploit = 0.95;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Per-host confidentiality and availability weights live on HostSpec.
struct RewardWeights {
  double impact_penalty = 10.0;
  double restore_cost = 1.0;

  friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

inline constexpr int kDefaultEpisodeLength = 100;

struct ScenarioConfig {
  std::vector<HostSpec> hosts;
  std::vector<Subnet> subnets;
  std::vector<std::pair<SubnetId, SubnetId>> adjacency;
  HostId foothold = 0;
  std::vector<ExploitDef> exploit_defs;  // indexed by ExploitId
  std::vector<DecoyDef> decoy_defs;      // indexed by DecoyId
  Detection detection;
  RewardWeights rewards;
  int episode_length = kDefaultEpisodeLength;

  std::optional<HostId> find_host(std::string_view name) const {
    for (std::size_t i = 0; i < hosts.size(); ++i)
      if (hosts[i].name == name) return static_cast<HostId>(i);
    return std::nullopt;
  }

  HostId host_id(std::string_view name) const {
    if (auto id = find_host(name)) return *id;
    throw std::out_of_range("unknown host '" + std::string(name) + "'");
  }

  const HostSpec& host(std::string_view name) const { return hosts[host_id(name)]; }
  HostSpec& host(std::string_view name) { return hosts[host_id(name)]; }

  const ExploitDef& exploit(ExploitId id) const { return exploit_defs.at(static_cast<std::size_t>(id)); }
  ExploitDef& exploit(ExploitId id) { return exploit_defs.at(static_cast<std::size_t>(id)); }
  const DecoyDef& decoy(DecoyId id) const { return decoy_defs.at(static_cast<std::size_t>(id)); }
  DecoyDef& decoy(DecoyId id) { return decoy_defs.at(static_cast<std::size_t>(id)); }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationCode : std::uint8_t {
  SUBNET_OVERLAP,
  SUBNET_MISSING,
  SUBNET_MISMATCH,
  SUBNET_DUPLICATE,
  ADJACENCY_INVALID,
  HOST_NAME_DUPLICATE,
  HOST_COUNT,
  FOOTHOLD_INVALID,
  PROBABILITY_RANGE,
  EPISODE_LENGTH,
  NEGATIVE_WEIGHT,
  DEF_TABLE_INVALID,
  DECOY_EXPLOIT_MISMATCH,
  DECOY_STRENGTH_MISMATCH,
  DECOY_UNMAPPED,
  DECOY_PORT_COLLISION,
  DECOY_OS_MISMATCH,
  LADDER_ORDER,
  LADDER_DUPLICATE,
  EXPLOIT_PRIORITY_MISMATCH,
  EXPLOIT_DUPLICATE,
  PORT_LIMIT,
};

inline constexpr std::array<std::string_view, 22> kViolationNames = {
    "SUBNET_OVERLAP",         "SUBNET_MISSING",          "SUBNET_MISMATCH",
    "SUBNET_DUPLICATE",       "ADJACENCY_INVALID",       "HOST_NAME_DUPLICATE",
    "HOST_COUNT",             "FOOTHOLD_INVALID",        "PROBABILITY_RANGE",
    "EPISODE_LENGTH",         "NEGATIVE_WEIGHT",         "DEF_TABLE_INVALID",
    "DECOY_EXPLOIT_MISMATCH", "DECOY_STRENGTH_MISMATCH", "DECOY_UNMAPPED",
    "DECOY_PORT_COLLISION",   "DECOY_OS_MISMATCH",       "LADDER_ORDER",
    "LADDER_DUPLICATE",       "EXPLOIT_PRIORITY_MISMATCH", "EXPLOIT_DUPLICATE",
    "PORT_LIMIT"};

constexpr std::string_view to_string(ViolationCode c) { return kViolationNames[static_cast<std::size_t>(c)]; }

struct Violation {
  ViolationCode code{};
  std::string entity;  // e.g. "host.User0", "decoy.decoyVsftpd"
  std::string detail;

  std::string describe() const {
    return std::string(to_string(code)) + " " + entity + (detail.empty() ? "" : ": " + detail);
  }
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> v)
      : std::runtime_error(summarize(v)), violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    std::string s = "scenario validation failed (" + std::to_string(v.size()) + " violation(s))";
    for (const auto& x : v) s += "\n  " + x.describe();
    return s;
  }
  std::vector<Violation> violations_;
};

// At most 64 distinct port numbers per scenario (port sets compile to bitmasks).
inline constexpr std::size_t kMaxDistinctPorts = 64;
// Host ids fit in the compiled tables; also bounds the action space.
inline constexpr std::size_t kMaxHosts = 1024;

inline std::vector<Violation> validate(const ScenarioConfig& c) {
  std::vector<Violation> out;
  auto add = [&](ViolationCode code, std::string entity, std::string detail = {}) {
    out.push_back({code, std::move(entity), std::move(detail)});
  };
  auto host_entity = [&](std::size_t h) { return "host." + c.hosts[h].name; };
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };

  if (c.hosts.empty() || c.hosts.size() > kMaxHosts)
    add(ViolationCode::HOST_COUNT, "scenario", std::to_string(c.hosts.size()) + " hosts");

  for (std::size_t i = 0; i < c.hosts.size(); ++i)
    for (std::size_t j = i + 1; j < c.hosts.size(); ++j)
      if (c.hosts[i].name == c.hosts[j].name) add(ViolationCode::HOST_NAME_DUPLICATE, host_entity(j));

  // Subnet membership: every host in exactly one subnet, consistent with HostSpec::subnet.
  std::array<int, kSubnetKinds> seen_subnet{};
  for (const auto& s : c.subnets)
    if (++seen_subnet[static_cast<std::size_t>(s.id)] == 2)
      add(ViolationCode::SUBNET_DUPLICATE, "subnet." + std::string(to_string(s.id)));

  std::vector<std::vector<SubnetId>> membership(c.hosts.size());
  for (const auto& s : c.subnets) {
    for (HostId h : s.members) {
      if (h >= c.hosts.size()) {
        add(ViolationCode::SUBNET_MISSING, "subnet." + std::string(to_string(s.id)),
            "member index " + std::to_string(h) + " out of range");
        continue;
      }
      membership[h].push_back(s.id);
    }
  }
  for (std::size_t h = 0; h < c.hosts.size(); ++h) {
    const auto& m = membership[h];
    if (m.empty()) {
      add(ViolationCode::SUBNET_MISSING, host_entity(h), "not a member of any subnet");
    } else if (m.size() > 1) {
      std::string names;
      for (auto s : m) names += (names.empty() ? "" : ", ") + std::string(to_string(s));
      add(ViolationCode::SUBNET_OVERLAP, host_entity(h), "member of " + names);
    } else if (m.front() != c.hosts[h].subnet) {
      add(ViolationCode::SUBNET_MISMATCH, host_entity(h),
          "declares " + std::string(to_string(c.hosts[h].subnet)) + " but listed under " +
              std::string(to_string(m.front())));
    }
  }

  for (const auto& [a, b] : c.adjacency) {
    bool known_a = seen_subnet[static_cast<std::size_t>(a)] > 0;
    bool known_b = seen_subnet[static_cast<std::size_t>(b)] > 0;
    if (a == b || !known_a || !known_b)
      add(ViolationCode::ADJACENCY_INVALID, "topology",
          std::string(to_string(a)) + ">" + std::string(to_string(b)));
  }

  if (c.foothold >= c.hosts.size()) {
    add(ViolationCode::FOOTHOLD_INVALID, "topology", "foothold index out of range");
  } else if (c.hosts[c.foothold].restorable) {
    add(ViolationCode::FOOTHOLD_INVALID, host_entity(c.foothold), "foothold must not be restorable");
  }

  if (!prob_ok(c.detection.p_detect_scan))
    add(ViolationCode::PROBABILITY_RANGE, "detection", "p_detect_scan");
  if (!prob_ok(c.detection.p_detect_exploit))
    add(ViolationCode::PROBABILITY_RANGE, "detection", "p_detect_exploit");
  if (c.episode_length <= 0) add(ViolationCode::EPISODE_LENGTH, "scenario", std::to_string(c.episode_length));
  if (!(c.rewards.impact_penalty >= 0.0)) add(ViolationCode::NEGATIVE_WEIGHT, "rewards", "impact_penalty");
  if (!(c.rewards.restore_cost >= 0.0)) add(ViolationCode::NEGATIVE_WEIGHT, "rewards", "restore_cost");

  // Exploit and decoy tables must be complete and indexed by id.
  bool tables_ok = c.exploit_defs.size() == kExploitCount && c.decoy_defs.size() == kDecoyCount;
  for (std::size_t i = 0; tables_ok && i < kExploitCount; ++i)
    tables_ok = static_cast<std::size_t>(c.exploit_defs[i].id) == i;
  for (std::size_t i = 0; tables_ok && i < kDecoyCount; ++i)
    tables_ok = static_cast<std::size_t>(c.decoy_defs[i].id) == i;
  if (!tables_ok) {
    add(ViolationCode::DEF_TABLE_INVALID, "scenario", "exploit/decoy tables must list all 8 entries in id order");
    return out;
  }

  // Decoy <-> exploit mapping: each decoy counters exactly one exploit, listens on a
  // port that exploit engages, and has the exploit's priority as its strength.
  std::array<std::vector<ExploitId>, kDecoyCount> countered{};
  for (const auto& e : c.exploit_defs)
    for (DecoyId d : e.countered_by) countered[static_cast<std::size_t>(d)].push_back(e.id);
  for (const auto& d : c.decoy_defs) {
    const auto& cs = countered[static_cast<std::size_t>(d.id)];
    std::string entity = "decoy." + std::string(to_string(d.id));
    if (cs.empty()) {
      add(ViolationCode::DECOY_UNMAPPED, entity, "counters no exploit");
      continue;
    }
    if (cs.size() > 1) {
      add(ViolationCode::DECOY_EXPLOIT_MISMATCH, entity, "counters more than one exploit");
      continue;
    }
    const auto& e = c.exploit(cs.front());
    if (!e.ports.mentions(d.port))
      add(ViolationCode::DECOY_EXPLOIT_MISMATCH, entity,
          "listens on port " + std::to_string(d.port) + " which " + std::string(to_string(e.id)) +
              " does not use");
    if (d.strength != e.priority)
      add(ViolationCode::DECOY_STRENGTH_MISMATCH, entity,
          "strength differs from " + std::string(to_string(e.id)) + " priority");
  }
  for (const auto& e : c.exploit_defs) {
    if (e.grants == AccessLevel::None)
      add(ViolationCode::DEF_TABLE_INVALID, "exploit." + std::string(to_string(e.id)), "grants no access");
    if (e.ports.all_of.empty() && e.ports.any_of.empty())
      add(ViolationCode::DEF_TABLE_INVALID, "exploit." + std::string(to_string(e.id)), "no port requirement");
  }

  // Per-host decoy ladders and exploit rows.
  std::vector<Port> distinct;
  auto note_port = [&](Port p) {
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  };
  for (const auto& d : c.decoy_defs) note_port(d.port);
  for (const auto& e : c.exploit_defs) {
    for (Port p : e.ports.all_of) note_port(p);
    for (Port p : e.ports.any_of) note_port(p);
  }

  for (std::size_t h = 0; h < c.hosts.size(); ++h) {
    const auto& host = c.hosts[h];
    for (Port p : host.open_ports) note_port(p);
    if (!(host.confidentiality_weight >= 0.0))
      add(ViolationCode::NEGATIVE_WEIGHT, host_entity(h), "confidentiality_weight");
    if (!(host.availability_weight >= 0.0))
      add(ViolationCode::NEGATIVE_WEIGHT, host_entity(h), "availability_weight");

    for (std::size_t i = 0; i < host.decoy_ladder.size(); ++i) {
      const auto& d = c.decoy(host.decoy_ladder[i]);
      std::string name(to_string(d.id));
      for (std::size_t j = 0; j < i; ++j)
        if (host.decoy_ladder[j] == d.id) add(ViolationCode::LADDER_DUPLICATE, host_entity(h), name);
      if (host.has_port(d.port))
        add(ViolationCode::DECOY_PORT_COLLISION, host_entity(h),
            "port " + std::to_string(d.port) + " is already open (" + name + ")");
      if (std::find(d.os.begin(), d.os.end(), host.os) == d.os.end())
        add(ViolationCode::DECOY_OS_MISMATCH, host_entity(h), name + " does not run on " + std::string(to_string(host.os)));
      if (i > 0 && c.decoy(host.decoy_ladder[i - 1]).strength < d.strength)
        add(ViolationCode::LADDER_ORDER, host_entity(h), name + " is stronger than its predecessor");
    }
    for (std::size_t i = 0; i < host.exploits.size(); ++i) {
      const auto& row = host.exploits[i];
      std::string name(to_string(row.exploit));
      for (std::size_t j = 0; j < i; ++j)
        if (host.exploits[j].exploit == row.exploit) add(ViolationCode::EXPLOIT_DUPLICATE, host_entity(h), name);
      if (row.priority != c.exploit(row.exploit).priority)
        add(ViolationCode::EXPLOIT_PRIORITY_MISMATCH, host_entity(h), name);
    }
  }
  if (distinct.size() > kMaxDistinctPorts)
    add(ViolationCode::PORT_LIMIT, "scenario", std::to_string(distinct.size()) + " distinct ports");

  return out;
}

inline void ensure_valid(const ScenarioConfig& c) {
  if (auto v = validate(c); !v.empty()) throw ValidationError(std::move(v));
}

}  // namespace minicage
