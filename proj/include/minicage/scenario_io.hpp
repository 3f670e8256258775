#pragma once

// Scenario documents: UTF-8, line-oriented key/value sections.
//
//   # comment
//   episode_length = 100          (root key, optional)
//   [topology]   subnets, <subnet name> member lists, adjacency, foothold
//   [detection]  p_detect_scan, p_detect_exploit
//   [rewards]    impact_penalty, restore_cost
//   [exploit.X]  process, ports_all, ports_any, priority, countered_by, grants
//   [decoy.X]    process, port, strength, os
//   [host.X]     os, subnet, ports, processes, decoys, exploits,
//                confidentiality, availability, restorable
//
// Hosts are numbered in the order their sections appear. Unknown sections or
// keys are parse errors.

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "minicage/scenario.hpp"

namespace minicage {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, std::string field, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + (field.empty() ? "" : " [" + field + "]") + ": " + message),
        line_(line),
        field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T, class Fmt>
std::string join(const std::vector<T>& xs, std::string_view sep, Fmt&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += sep;
    s += fmt(xs[i]);
  }
  return s;
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry, std::less<>> keys;
};

class Reader {
 public:
  explicit Reader(Section& s) : s_(s) {}

  const Entry* find(std::string_view key) {
    auto it = s_.keys.find(key);
    if (it == s_.keys.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry& require(std::string_view key) {
    if (auto* e = find(key)) return *e;
    throw ParseError(s_.line, s_.name + "." + std::string(key), "missing required key");
  }

  [[noreturn]] void fail(const Entry& e, std::string_view key, const std::string& msg) const {
    throw ParseError(e.line, s_.name + "." + std::string(key), msg);
  }

  double number(std::string_view key, std::optional<double> fallback = std::nullopt) {
    const Entry* e = fallback ? find(key) : &require(key);
    if (!e) return *fallback;
    return parse_number(*e, key, e->value);
  }

  double parse_number(const Entry& e, std::string_view key, std::string_view text) const {
    text = trim(text);
    double v = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size() || !std::isfinite(v))
      fail(e, key, "invalid number '" + std::string(text) + "'");
    return v;
  }

  long long integer(const Entry& e, std::string_view key, std::string_view text, long long lo, long long hi) const {
    text = trim(text);
    long long v = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
      fail(e, key, "invalid integer '" + std::string(text) + "'");
    if (v < lo || v > hi) fail(e, key, "integer out of range '" + std::string(text) + "'");
    return v;
  }

  Port port(const Entry& e, std::string_view key, std::string_view text) const {
    return static_cast<Port>(integer(e, key, text, 0, 65535));
  }

  std::vector<Port> ports(std::string_view key, bool required = true) {
    const Entry* e = required ? &require(key) : find(key);
    std::vector<Port> out;
    if (!e) return out;
    for (auto item : split(e->value, ',')) out.push_back(port(*e, key, item));
    return out;
  }

  bool boolean(std::string_view key, bool fallback) {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    fail(*e, key, "expected true or false, got '" + e->value + "'");
  }

  template <class T, class ParseFn>
  T named(const Entry& e, std::string_view key, std::string_view text, ParseFn&& parse_fn) const {
    auto v = parse_fn(trim(text));
    if (!v) fail(e, key, "unknown name '" + std::string(trim(text)) + "'");
    return *v;
  }

  void reject_unused() const {
    for (const auto& [k, e] : s_.keys)
      if (!e.used) throw ParseError(e.line, s_.name + "." + k, "unknown key");
  }

 private:
  Section& s_;
};

inline std::vector<Section> tokenize(std::istream& in) {
  std::vector<Section> sections;
  sections.push_back({"", 0, {}});  // root
  std::set<std::string, std::less<>> names;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "", "unterminated section header");
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw ParseError(line_no, "", "empty section name");
      if (!names.insert(name).second) throw ParseError(line_no, name, "duplicate section");
      sections.push_back({name, line_no, {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, sections.back().name, "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(line_no, sections.back().name, "empty key");
    auto& keys = sections.back().keys;
    if (keys.count(key)) throw ParseError(line_no, sections.back().name + "." + key, "duplicate key");
    keys.emplace(key, Entry{std::string(trim(line.substr(eq + 1))), line_no, false});
  }
  return sections;
}

}  // namespace detail

/// Parse a scenario document without validating it.
inline ScenarioConfig parse_scenario(std::istream& in) {
  using namespace detail;
  auto sections = tokenize(in);

  ScenarioConfig c;
  c.exploit_defs.resize(kExploitCount);
  c.decoy_defs.resize(kDecoyCount);
  std::array<bool, kExploitCount> have_exploit{};
  std::array<bool, kDecoyCount> have_decoy{};

  // Root.
  {
    Reader r(sections.front());
    if (auto* e = r.find("episode_length"))
      c.episode_length = static_cast<int>(r.integer(*e, "episode_length", e->value, 1, 1'000'000'000));
    r.reject_unused();
  }

  Section* topology = nullptr;
  for (std::size_t i = 1; i < sections.size(); ++i) {
    Section& s = sections[i];
    std::string_view name = s.name;
    Reader r(s);
    auto dot = name.find('.');
    std::string_view kind = name.substr(0, dot);
    std::string_view ident = dot == std::string_view::npos ? std::string_view{} : name.substr(dot + 1);

    if (name == "topology") {
      topology = &s;  // resolved after all hosts are known
      continue;
    } else if (name == "detection") {
      c.detection.p_detect_scan = r.number("p_detect_scan");
      c.detection.p_detect_exploit = r.number("p_detect_exploit");
    } else if (name == "rewards") {
      c.rewards.impact_penalty = r.number("impact_penalty");
      c.rewards.restore_cost = r.number("restore_cost");
    } else if (kind == "exploit" && !ident.empty()) {
      auto id = parse_exploit(ident);
      if (!id) throw ParseError(s.line, s.name, "unknown exploit '" + std::string(ident) + "'");
      ExploitDef& e = c.exploit_defs[static_cast<std::size_t>(*id)];
      have_exploit[static_cast<std::size_t>(*id)] = true;
      e.id = *id;
      e.process = r.require("process").value;
      e.ports.all_of = r.ports("ports_all", false);
      e.ports.any_of = r.ports("ports_any", false);
      e.priority = r.number("priority");
      if (auto* ent = r.find("countered_by"))
        for (auto item : split(ent->value, ','))
          e.countered_by.push_back(r.named<DecoyId>(*ent, "countered_by", item, parse_decoy));
      if (auto* ent = r.find("grants")) e.grants = r.named<AccessLevel>(*ent, "grants", ent->value, parse_access);
    } else if (kind == "decoy" && !ident.empty()) {
      auto id = parse_decoy(ident);
      if (!id) throw ParseError(s.line, s.name, "unknown decoy '" + std::string(ident) + "'");
      DecoyDef& d = c.decoy_defs[static_cast<std::size_t>(*id)];
      have_decoy[static_cast<std::size_t>(*id)] = true;
      d.id = *id;
      d.process = r.require("process").value;
      const auto& pe = r.require("port");
      d.port = r.port(pe, "port", pe.value);
      d.strength = r.number("strength");
      const auto& oe = r.require("os");
      for (auto item : split(oe.value, ',')) d.os.push_back(r.named<Os>(oe, "os", item, parse_os));
    } else if (kind == "host" && !ident.empty()) {
      HostSpec h;
      h.name = std::string(ident);
      const auto& oe = r.require("os");
      h.os = r.named<Os>(oe, "os", oe.value, parse_os);
      const auto& se = r.require("subnet");
      h.subnet = r.named<SubnetId>(se, "subnet", se.value, parse_subnet);
      h.open_ports = r.ports("ports", false);
      if (auto* ent = r.find("processes")) {
        for (auto item : split(ent->value, '|')) {
          auto fields = split(item, ' ');
          std::erase_if(fields, [](std::string_view f) { return f.empty(); });
          if (fields.size() != 2 && fields.size() != 3)
            r.fail(*ent, "processes", "expected 'NAME USER [PORT[/PORT...]]', got '" + std::string(item) + "'");
          ProcessSpec p{std::string(fields[0]), std::string(fields[1]), {}};
          if (fields.size() == 3)
            for (auto pt : split(fields[2], '/')) p.ports.push_back(r.port(*ent, "processes", pt));
          h.processes.push_back(std::move(p));
        }
      }
      if (auto* ent = r.find("decoys"))
        for (auto item : split(ent->value, ','))
          h.decoy_ladder.push_back(r.named<DecoyId>(*ent, "decoys", item, parse_decoy));
      if (auto* ent = r.find("exploits")) {
        for (auto item : split(ent->value, ',')) {
          auto colon = item.rfind(':');
          if (colon == std::string_view::npos) r.fail(*ent, "exploits", "expected 'Exploit:priority', got '" + std::string(item) + "'");
          ExploitRow row;
          row.exploit = r.named<ExploitId>(*ent, "exploits", item.substr(0, colon), parse_exploit);
          row.priority = r.parse_number(*ent, "exploits", item.substr(colon + 1));
          h.exploits.push_back(row);
        }
      }
      h.confidentiality_weight = r.number("confidentiality", 0.0);
      h.availability_weight = r.number("availability", 0.0);
      h.restorable = r.boolean("restorable", true);
      c.hosts.push_back(std::move(h));
    } else {
      throw ParseError(s.line, s.name, "unknown section");
    }
    r.reject_unused();
  }

  for (std::size_t i = 0; i < kExploitCount; ++i)
    if (!have_exploit[i]) throw ParseError(0, "exploit." + std::string(kExploitNames[i]), "missing exploit section");
  for (std::size_t i = 0; i < kDecoyCount; ++i)
    if (!have_decoy[i]) throw ParseError(0, "decoy." + std::string(kDecoyNames[i]), "missing decoy section");
  if (!topology) throw ParseError(0, "topology", "missing section");

  Reader r(*topology);
  const auto& sub = r.require("subnets");
  for (auto item : split(sub.value, ',')) {
    Subnet s{r.named<SubnetId>(sub, "subnets", item, parse_subnet), {}};
    std::string key(to_string(s.id));
    if (auto* members = r.find(key)) {
      for (auto m : split(members->value, ',')) {
        auto id = c.find_host(m);
        if (!id) r.fail(*members, key, "unknown host '" + std::string(m) + "'");
        s.members.push_back(*id);
      }
    }
    c.subnets.push_back(std::move(s));
  }
  if (auto* adj = r.find("adjacency")) {
    for (auto item : split(adj->value, ',')) {
      auto gt = item.find('>');
      if (gt == std::string_view::npos) r.fail(*adj, "adjacency", "expected 'From>To', got '" + std::string(item) + "'");
      c.adjacency.emplace_back(r.named<SubnetId>(*adj, "adjacency", item.substr(0, gt), parse_subnet),
                               r.named<SubnetId>(*adj, "adjacency", item.substr(gt + 1), parse_subnet));
    }
  }
  const auto& fe = r.require("foothold");
  auto foothold = c.find_host(fe.value);
  if (!foothold) r.fail(fe, "foothold", "unknown host '" + fe.value + "'");
  c.foothold = *foothold;
  r.reject_unused();
  return c;
}

inline ScenarioConfig parse_scenario(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_scenario(in);
}

/// Parse and validate. Throws ParseError or ValidationError.
inline ScenarioConfig load_scenario(std::istream& in) {
  auto c = parse_scenario(in);
  ensure_valid(c);
  return c;
}

inline ScenarioConfig load_scenario(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_scenario(in);
}

inline std::string serialize_scenario(const ScenarioConfig& c) {
  using detail::format_double;
  using detail::join;
  std::ostringstream o;
  auto port_str = [](Port p) { return std::to_string(p); };

  o << "episode_length = " << c.episode_length << "\n\n";

  o << "[topology]\n";
  o << "subnets = " << join(c.subnets, ", ", [](const Subnet& s) { return std::string(to_string(s.id)); }) << "\n";
  for (const auto& s : c.subnets)
    o << to_string(s.id) << " = " << join(s.members, ", ", [&](HostId h) { return c.hosts.at(h).name; }) << "\n";
  o << "adjacency = "
    << join(c.adjacency, ", ",
            [](const auto& e) { return std::string(to_string(e.first)) + ">" + std::string(to_string(e.second)); })
    << "\n";
  o << "foothold = " << c.hosts.at(c.foothold).name << "\n\n";

  o << "[detection]\n";
  o << "p_detect_scan = " << format_double(c.detection.p_detect_scan) << "\n";
  o << "p_detect_exploit = " << format_double(c.detection.p_detect_exploit) << "\n\n";

  o << "[rewards]\n";
  o << "impact_penalty = " << format_double(c.rewards.impact_penalty) << "\n";
  o << "restore_cost = " << format_double(c.rewards.restore_cost) << "\n\n";

  for (const auto& e : c.exploit_defs) {
    o << "[exploit." << to_string(e.id) << "]\n";
    o << "process = " << e.process << "\n";
    if (!e.ports.all_of.empty()) o << "ports_all = " << join(e.ports.all_of, ", ", port_str) << "\n";
    if (!e.ports.any_of.empty()) o << "ports_any = " << join(e.ports.any_of, ", ", port_str) << "\n";
    o << "priority = " << format_double(e.priority) << "\n";
    if (!e.countered_by.empty())
      o << "countered_by = " << join(e.countered_by, ", ", [](DecoyId d) { return std::string(to_string(d)); }) << "\n";
    o << "grants = " << to_string(e.grants) << "\n\n";
  }

  for (const auto& d : c.decoy_defs) {
    o << "[decoy." << to_string(d.id) << "]\n";
    o << "process = " << d.process << "\n";
    o << "port = " << d.port << "\n";
    o << "strength = " << format_double(d.strength) << "\n";
    o << "os = " << join(d.os, ", ", [](Os x) { return std::string(to_string(x)); }) << "\n\n";
  }

  for (const auto& h : c.hosts) {
    o << "[host." << h.name << "]\n";
    o << "os = " << to_string(h.os) << "\n";
    o << "subnet = " << to_string(h.subnet) << "\n";
    o << "ports = " << join(h.open_ports, ", ", port_str) << "\n";
    if (!h.processes.empty())
      o << "processes = "
        << join(h.processes, " | ",
                [&](const ProcessSpec& p) { return p.name + " " + p.user + (p.ports.empty() ? "" : " " + join(p.ports, "/", port_str)); })
        << "\n";
    if (!h.decoy_ladder.empty())
      o << "decoys = " << join(h.decoy_ladder, ", ", [](DecoyId d) { return std::string(to_string(d)); }) << "\n";
    if (!h.exploits.empty())
      o << "exploits = "
        << join(h.exploits, ", ",
                [](const ExploitRow& r) { return std::string(to_string(r.exploit)) + ":" + format_double(r.priority); })
        << "\n";
    o << "confidentiality = " << format_double(h.confidentiality_weight) << "\n";
    o << "availability = " << format_double(h.availability_weight) << "\n";
    o << "restorable = " << (h.restorable ? "true" : "false") << "\n\n";
  }
  return o.str();
}

}  // namespace minicage
