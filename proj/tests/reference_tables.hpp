#pragma once

// Reference rows transcribed from the published host and exploit tables,
// plus a checker listing every disagreement with a scenario.

#include <set>
#include <string>
#include <vector>

#include "minicage/scenario.hpp"

namespace testing_support {

using namespace minicage;

// Host reference rows transcribed from the published host table: OS, local
// ports, decoy ladder with its order numbers, and the exploit order.
struct TableRow {
  const char* host;
  Os os;
  std::vector<Port> ports;
  std::vector<std::pair<DecoyId, double>> decoys;  // as listed in the "Decoy Order" column
  std::vector<std::pair<ExploitId, double>> exploits;
};

inline const std::vector<TableRow>& host_table() {
  using D = DecoyId;
  using E = ExploitId;
  static const std::vector<TableRow> rows = {
      {"User0", Os::Windows, {21, 22}, {{D::Svchost, 1}, {D::Smss, 2}, {D::Apache, 3}, {D::Tomcat, 4}},
       {{E::FTPDirTraversal, 7}, {E::SSHBruteForce, 0.1}}},
      {"User1", Os::Windows, {21, 22}, {{D::Svchost, 1}, {D::Smss, 2}, {D::Apache, 3}, {D::Tomcat, 4}},
       {{E::FTPDirTraversal, 7}, {E::SSHBruteForce, 0.1}}},
      {"User2", Os::Windows, {445, 139, 135, 3389}, {{D::SSHD, 0.1}, {D::Apache, 3}, {D::Tomcat, 4}, {D::Femitter, 7}},
       {{E::EternalBlue, 2}, {E::BlueKeep, 1}}},
      {"User3", Os::Linux, {25, 80, 443, 3390}, {{D::SSHD, 0.1}, {D::Vsftpd, 7}},
       {{E::HarakaRCE, 6}, {E::SQLInjection, 5}, {E::HTTPSRFI, 4}, {E::HTTPRFI, 3}, {E::BlueKeep, 1}}},
      {"User4", Os::Linux, {22, 80, 3390, 443, 25}, {{D::Vsftpd, 7}},
       {{E::HarakaRCE, 6}, {E::SQLInjection, 5}, {E::HTTPSRFI, 4}, {E::HTTPRFI, 3}, {E::BlueKeep, 1}}},
      {"Ent0", Os::Linux, {22}, {{D::Apache, 3}, {D::Tomcat, 4}, {D::Vsftpd, 7}, {D::HarakaSMTP, 6}},
       {{E::SSHBruteForce, 0.1}}},
      {"Ent1", Os::Windows, {22, 135, 3389, 445, 139, 80, 443}, {{D::Femitter, 7}},
       {{E::HTTPSRFI, 4}, {E::HTTPRFI, 3}, {E::EternalBlue, 2}, {E::BlueKeep, 1}, {E::SSHBruteForce, 0.1}}},
      {"Ent2", Os::Windows, {22, 135, 3389, 445, 139, 80, 443}, {{D::Femitter, 7}}, {{E::SSHBruteForce, 0.1}}},
      {"Op_host0", Os::Linux, {22}, {{D::Vsftpd, 7}, {D::HarakaSMTP, 6}, {D::Tomcat, 4}, {D::Apache, 3}},
       {{E::SSHBruteForce, 0.1}}},
      {"Op_host1", Os::Linux, {22}, {{D::Vsftpd, 7}, {D::HarakaSMTP, 6}, {D::Tomcat, 4}, {D::Apache, 3}},
       {{E::SSHBruteForce, 0.1}}},
      {"Op_host2", Os::Linux, {22}, {{D::Vsftpd, 7}, {D::HarakaSMTP, 6}, {D::Tomcat, 4}, {D::Apache, 3}},
       {{E::SSHBruteForce, 0.1}}},
      {"Op_Server", Os::Linux, {22}, {{D::Vsftpd, 7}, {D::HarakaSMTP, 6}, {D::Tomcat, 4}, {D::Apache, 3}},
       {{E::SSHBruteForce, 0.1}}},
  };
  return rows;
}

// Exploit <-> decoy <-> process rows from the exploit reference table.
struct MappingRow {
  ExploitId exploit;
  std::vector<DecoyId> decoys;
  const char* process;
};

inline const std::vector<MappingRow>& mapping_table() {
  using D = DecoyId;
  using E = ExploitId;
  static const std::vector<MappingRow> rows = {
      {E::EternalBlue, {D::Smss}, "smss.exe"},
      {E::BlueKeep, {D::Svchost}, "svchost.exe"},
      {E::HTTPRFI, {D::Apache}, "apache2"},
      {E::HTTPSRFI, {D::Tomcat}, "tomcat8.exe"},
      {E::SSHBruteForce, {D::SSHD}, "sshd.exe/sshd"},
      {E::SQLInjection, {}, "mysql"},
      {E::HarakaRCE, {D::HarakaSMTP}, "smtp"},
      {E::FTPDirTraversal, {D::Femitter, D::Vsftpd}, "femitter.exe"},
  };
  return rows;
}

/// Every disagreement between `c` and the reference tables; empty on a match.
inline std::vector<std::string> table_mismatches(const ScenarioConfig& c) {
  std::vector<std::string> out;
  auto as_set = [](const std::vector<Port>& v) { return std::set<Port>(v.begin(), v.end()); };
  if (c.hosts.size() != 13) out.push_back("host count");
  // Defender is the one host the table leaves out: nothing to exploit or decoy.
  if (!c.host("Defender").exploits.empty() || !c.host("Defender").decoy_ladder.empty()) out.push_back("Defender: rows");
  for (const auto& row : host_table()) {
    const std::string name = row.host;
    const auto& h = c.host(row.host);
    if (h.os != row.os) out.push_back(name + ": os");
    if (as_set(h.open_ports) != as_set(row.ports)) out.push_back(name + ": ports");
    std::set<DecoyId> want, have(h.decoy_ladder.begin(), h.decoy_ladder.end());
    for (auto [d, strength] : row.decoys) {
      want.insert(d);
      if (c.decoy(d).strength != strength) out.push_back(name + ": strength of " + std::string(to_string(d)));
    }
    if (have != want || h.decoy_ladder.size() != row.decoys.size()) out.push_back(name + ": decoys");
    if (h.exploits.size() != row.exploits.size()) {
      out.push_back(name + ": exploit count");
      continue;
    }
    for (std::size_t i = 0; i < row.exploits.size(); ++i)
      if (h.exploits[i].exploit != row.exploits[i].first || h.exploits[i].priority != row.exploits[i].second)
        out.push_back(name + ": exploit row " + std::to_string(i));
  }
  if (c.exploit_defs.size() != 8 || c.decoy_defs.size() != 8) out.push_back("exploit/decoy definition count");
  for (const auto& row : mapping_table()) {
    const std::string name = std::string(to_string(row.exploit));
    const auto& e = c.exploit(row.exploit);
    if (e.process != row.process) out.push_back(name + ": process");
    if (std::set<DecoyId>(e.countered_by.begin(), e.countered_by.end()) !=
        std::set<DecoyId>(row.decoys.begin(), row.decoys.end()))
      out.push_back(name + ": countering decoys");
  }
  // decoyVsftpd counters FTPDirTraversal and nothing else.
  for (const auto& e : c.exploit_defs) {
    bool has = std::count(e.countered_by.begin(), e.countered_by.end(), DecoyId::Vsftpd) > 0;
    if (has != (e.id == ExploitId::FTPDirTraversal)) out.push_back("decoyVsftpd mapped to " + std::string(to_string(e.id)));
  }
  return out;
}

}  // namespace testing_support
