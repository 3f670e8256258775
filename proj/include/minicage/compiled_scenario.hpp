#pragma once

#include <bit>
#include <memory>
#include <span>

#include "minicage/scenario.hpp"

namespace minicage {

using PortMask = std::uint64_t;
using DecoyMask = std::uint8_t;  // bit i = DecoyId i

constexpr DecoyMask decoy_bit(DecoyId d) { return static_cast<DecoyMask>(1u << static_cast<unsigned>(d)); }

// Lookup tables derived once from a validated ScenarioConfig. Port sets become
// bitmasks over the scenario's distinct port numbers, with bit order equal to
// ascending port number so the lowest set bit is the lowest port.
class CompiledScenario {
 public:
  // One exploit red may select on a host. Rows from the host's own exploit
  // order are always candidates; exploits countered by a ladder decoy become
  // candidates while that decoy is deployed (the decoy emulates the service).
  struct Candidate {
    ExploitId exploit{};
    DecoyMask enabled_by = 0;  // 0 = always a candidate
    PortMask all_of = 0;
    PortMask any_of = 0;
  };

  explicit CompiledScenario(ScenarioConfig config) : config_(std::move(config)) {
    ensure_valid(config_);
    build();
  }

  static std::shared_ptr<const CompiledScenario> make(ScenarioConfig config) {
    return std::make_shared<const CompiledScenario>(std::move(config));
  }

  const ScenarioConfig& config() const noexcept { return config_; }
  std::size_t host_count() const noexcept { return config_.hosts.size(); }
  std::size_t subnet_count() const noexcept { return config_.subnets.size(); }
  HostId foothold() const noexcept { return config_.foothold; }
  int episode_length() const noexcept { return config_.episode_length; }

  std::size_t subnet_of(HostId h) const { return host_subnet_[h]; }
  std::span<const HostId> members(std::size_t subnet) const { return config_.subnets[subnet].members; }
  std::optional<std::size_t> subnet_index(SubnetId id) const {
    for (std::size_t i = 0; i < config_.subnets.size(); ++i)
      if (config_.subnets[i].id == id) return i;
    return std::nullopt;
  }
  // Bit j set iff subnet j is the same as or adjacent to subnet i.
  std::uint8_t reach_mask(std::size_t subnet) const { return reach_[subnet]; }

  PortMask real_ports(HostId h) const { return real_ports_[h]; }
  PortMask decoy_port(DecoyId d) const { return decoy_port_[static_cast<std::size_t>(d)]; }
  PortMask decoy_ports(DecoyMask deployed) const {
    PortMask m = 0;
    for (unsigned b = 0; b < kDecoyCount; ++b)
      if (deployed & (1u << b)) m |= decoy_port_[b];
    return m;
  }
  PortMask live_ports(HostId h, DecoyMask deployed) const { return real_ports_[h] | decoy_ports(deployed); }

  std::span<const Candidate> candidates(HostId h) const { return candidates_[h]; }
  std::span<const DecoyId> ladder(HostId h) const { return config_.hosts[h].decoy_ladder; }
  DecoyMask ladder_mask(HostId h) const { return ladder_mask_[h]; }

  Port port_number(unsigned bit) const { return ports_[bit]; }
  PortMask port_bit(Port p) const {
    for (std::size_t i = 0; i < ports_.size(); ++i)
      if (ports_[i] == p) return PortMask{1} << i;
    return 0;
  }
  std::vector<Port> ports_of(PortMask m) const {
    std::vector<Port> out;
    for (; m; m &= m - 1) out.push_back(ports_[static_cast<unsigned>(std::countr_zero(m))]);
    return out;
  }

  double confidentiality(HostId h) const { return confidentiality_[h]; }
  double availability(HostId h) const { return availability_[h]; }
  std::span<const double> confidentiality_weights() const { return confidentiality_; }
  std::span<const double> availability_weights() const { return availability_; }

 private:
  void build() {
    const auto& c = config_;
    // Distinct ports, ascending.
    auto note = [&](Port p) {
      if (std::find(ports_.begin(), ports_.end(), p) == ports_.end()) ports_.push_back(p);
    };
    for (const auto& h : c.hosts)
      for (Port p : h.open_ports) note(p);
    for (const auto& d : c.decoy_defs) note(d.port);
    for (const auto& e : c.exploit_defs) {
      for (Port p : e.ports.all_of) note(p);
      for (Port p : e.ports.any_of) note(p);
    }
    std::sort(ports_.begin(), ports_.end());
    auto mask_of = [&](const std::vector<Port>& ps) {
      PortMask m = 0;
      for (Port p : ps) m |= port_bit(p);
      return m;
    };

    for (std::size_t d = 0; d < kDecoyCount; ++d) decoy_port_[d] = port_bit(c.decoy_defs[d].port);

    host_subnet_.resize(c.hosts.size());
    for (std::size_t s = 0; s < c.subnets.size(); ++s)
      for (HostId h : c.subnets[s].members) host_subnet_[h] = s;

    reach_.assign(c.subnets.size(), 0);
    for (std::size_t s = 0; s < c.subnets.size(); ++s) reach_[s] |= static_cast<std::uint8_t>(1u << s);
    for (const auto& [a, b] : c.adjacency) {
      auto ia = subnet_index(a), ib = subnet_index(b);
      reach_[*ia] |= static_cast<std::uint8_t>(1u << *ib);
    }

    std::array<std::optional<ExploitId>, kDecoyCount> countered{};
    for (const auto& e : c.exploit_defs)
      for (DecoyId d : e.countered_by) countered[static_cast<std::size_t>(d)] = e.id;

    for (HostId h = 0; h < c.hosts.size(); ++h) {
      const auto& host = c.hosts[h];
      real_ports_.push_back(mask_of(host.open_ports));
      confidentiality_.push_back(host.confidentiality_weight);
      availability_.push_back(host.availability_weight);
      DecoyMask lm = 0;
      for (DecoyId d : host.decoy_ladder) lm |= decoy_bit(d);
      ladder_mask_.push_back(lm);

      std::vector<Candidate> cands;
      auto add = [&](ExploitId id, DecoyMask enabled_by) {
        for (auto& existing : cands) {
          if (existing.exploit != id) continue;
          if (existing.enabled_by != 0) existing.enabled_by = enabled_by == 0 ? 0 : existing.enabled_by | enabled_by;
          return;
        }
        const auto& e = c.exploit(id);
        cands.push_back({id, enabled_by, mask_of(e.ports.all_of), mask_of(e.ports.any_of)});
      };
      for (const auto& row : host.exploits) add(row.exploit, 0);
      for (DecoyId d : host.decoy_ladder)
        if (auto e = countered[static_cast<std::size_t>(d)]) add(*e, decoy_bit(d));

      // Highest priority first; ties go to the exploit engaging the lowest port.
      std::stable_sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
        double pa = c.exploit(a.exploit).priority, pb = c.exploit(b.exploit).priority;
        if (pa != pb) return pa > pb;
        return std::countr_zero(a.all_of | a.any_of) < std::countr_zero(b.all_of | b.any_of);
      });
      candidates_.push_back(std::move(cands));
    }
  }

  ScenarioConfig config_;
  std::vector<Port> ports_;
  std::array<PortMask, kDecoyCount> decoy_port_{};
  std::vector<std::size_t> host_subnet_;
  std::vector<std::uint8_t> reach_;
  std::vector<PortMask> real_ports_;
  std::vector<DecoyMask> ladder_mask_;
  std::vector<std::vector<Candidate>> candidates_;
  std::vector<double> confidentiality_;
  std::vector<double> availability_;
};

using ScenarioPtr = std::shared_ptr<const CompiledScenario>;

}  // namespace minicage
