#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "expo/trace_model.hpp"

namespace expo {

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, std::string why)
      : std::runtime_error("line " + std::to_string(line) + ": " + why),
        line_no(line),
        reason(std::move(why)) {}
  std::size_t line_no;
  std::string reason;
};

// BGP AS-set tokens ("{3356,1299}") have no single country; such records are
// rejected rather than guessed at.
struct AsSetUnsupportedError : ParseError {
  AsSetUnsupportedError(std::size_t line) : ParseError(line, "AS-set token unsupported") {}
};

// One traceroute hop: an IPv4 address or the unresolved marker "*".
class Hop {
 public:
  static Hop star() { return Hop(true, 0); }
  static Hop address(std::uint32_t ip) { return Hop(false, ip); }

  bool is_star() const { return star_; }
  std::uint32_t ip() const { return ip_; }

  std::string str() const {
    if (star_) return "*";
    return std::to_string(ip_ >> 24) + "." + std::to_string((ip_ >> 16) & 0xff) + "." +
           std::to_string((ip_ >> 8) & 0xff) + "." + std::to_string(ip_ & 0xff);
  }

  auto operator<=>(const Hop&) const = default;

 private:
  Hop(bool star, std::uint32_t ip) : star_(star), ip_(ip) {}
  bool star_;
  std::uint32_t ip_;
};

// Strict dotted-quad parse: four decimal octets 0..255, no leading zeros.
// Strictness keeps format(parse(line)) == line exact.
inline std::optional<std::uint32_t> parse_ipv4(std::string_view s) {
  std::uint32_t ip = 0;
  int octets = 0;
  std::size_t i = 0;
  while (i <= s.size()) {
    std::size_t j = i;
    std::uint32_t v = 0;
    while (j < s.size() && s[j] >= '0' && s[j] <= '9') {
      v = v * 10 + static_cast<std::uint32_t>(s[j] - '0');
      if (v > 255) return std::nullopt;
      ++j;
    }
    const std::size_t len = j - i;
    if (len == 0 || len > 3) return std::nullopt;
    if (len > 1 && s[i] == '0') return std::nullopt;
    ip = (ip << 8) | v;
    ++octets;
    if (j == s.size()) break;
    if (s[j] != '.') return std::nullopt;
    i = j + 1;
  }
  if (octets != 4) return std::nullopt;
  return ip;
}

struct TraceRecord {
  MonitorId monitor;
  std::vector<Hop> hops;  // length >= 1
  bool operator==(const TraceRecord&) const = default;
};

struct AsPathRecord {
  MonitorId monitor;
  std::string prefix;  // provenance only
  std::vector<std::uint32_t> asns;  // prepending already collapsed, length >= 1
  bool operator==(const AsPathRecord&) const = default;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

// Calls fn(line_no, line) for each LF-terminated line; 1-based numbering,
// trailing newline optional, '\r' stripped.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = eol + 1;
  }
}

inline bool skippable_line(std::string_view line) {
  return line.empty() || line.front() == '#';
}

}  // namespace detail

// traces format: monitor_id TAB comma-separated hops (IPv4 or "*").
inline TraceRecord parse_trace_line(std::string_view line, std::size_t line_no = 0) {
  const auto fields = detail::split(line, '\t');
  if (fields.size() != 2) throw ParseError(line_no, "expected monitor TAB hops");
  auto monitor = MonitorId::parse(fields[0]);
  if (!monitor) throw ParseError(line_no, "bad monitor id");
  if (fields[1].empty()) throw ParseError(line_no, "empty hop list");
  std::vector<Hop> hops;
  for (std::string_view tok : detail::split(fields[1], ',')) {
    if (tok == "*") {
      hops.push_back(Hop::star());
    } else if (auto ip = parse_ipv4(tok)) {
      hops.push_back(Hop::address(*ip));
    } else {
      throw ParseError(line_no, "bad hop token '" + std::string(tok) + "'");
    }
  }
  return TraceRecord{std::move(*monitor), std::move(hops)};
}

inline std::string format_trace_line(const TraceRecord& rec) {
  std::string out = rec.monitor.str();
  out.push_back('\t');
  for (std::size_t i = 0; i < rec.hops.size(); ++i) {
    if (i) out.push_back(',');
    out += rec.hops[i].str();
  }
  return out;
}

inline std::optional<std::uint32_t> parse_asn(std::string_view tok) {
  if (tok.empty() || tok.size() > 10) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  if (v < 1 || v > 0xffffffffull) return std::nullopt;
  return static_cast<std::uint32_t>(v);
}

// bgp format: monitor_id TAB prefix TAB space-separated ASNs. Prepended runs
// collapse at parse time; AS-set tokens are rejected.
inline AsPathRecord parse_bgp_line(std::string_view line, std::size_t line_no = 0) {
  const auto fields = detail::split(line, '\t');
  if (fields.size() != 3) throw ParseError(line_no, "expected monitor TAB prefix TAB as-path");
  auto monitor = MonitorId::parse(fields[0]);
  if (!monitor) throw ParseError(line_no, "bad monitor id");
  if (fields[1].empty()) throw ParseError(line_no, "empty prefix");
  std::vector<std::uint32_t> asns;
  for (std::string_view tok : detail::split(fields[2], ' ')) {
    if (tok.empty()) throw ParseError(line_no, "empty AS token");
    if (tok.find('{') != std::string_view::npos) throw AsSetUnsupportedError(line_no);
    auto asn = parse_asn(tok);
    if (!asn) throw ParseError(line_no, "bad ASN '" + std::string(tok) + "'");
    if (asns.empty() || asns.back() != *asn) asns.push_back(*asn);
  }
  if (asns.empty()) throw ParseError(line_no, "empty AS path");
  return AsPathRecord{std::move(*monitor), std::string(fields[1]), std::move(asns)};
}

inline std::string format_bgp_line(const AsPathRecord& rec) {
  std::string out = rec.monitor.str();
  out.push_back('\t');
  out += rec.prefix;
  out.push_back('\t');
  for (std::size_t i = 0; i < rec.asns.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(rec.asns[i]);
  }
  return out;
}

// monitor_id -> country assignment. One country per monitor.
class MonitorTable {
 public:
  void insert(const MonitorId& monitor, CountryCode country) {
    auto [it, fresh] = entries_.emplace(monitor, country);
    if (!fresh && it->second != country)
      throw std::invalid_argument("monitor '" + monitor.str() + "' mapped to two countries");
  }

  std::optional<CountryCode> find(const MonitorId& monitor) const {
    auto it = entries_.find(monitor);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const MonitorId& monitor) const { return entries_.count(monitor) != 0; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<MonitorId, CountryCode>& entries() const { return entries_; }

  bool operator==(const MonitorTable&) const = default;

 private:
  std::map<MonitorId, CountryCode> entries_;
};

// monitors format: monitor_id TAB country_code.
inline MonitorTable parse_monitor_table(std::string_view text) {
  MonitorTable table;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (detail::skippable_line(line)) return;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2) throw ParseError(line_no, "expected monitor TAB country");
    auto monitor = MonitorId::parse(fields[0]);
    auto country = CountryCode::parse(fields[1]);
    if (!monitor) throw ParseError(line_no, "bad monitor id");
    if (!country) throw ParseError(line_no, "bad country code");
    try {
      table.insert(*monitor, *country);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  });
  return table;
}

// Order-stable distinct filter over (monitor, country path) pairs.
class PathDeduper {
 public:
  bool insert(const MonitorId& monitor, const CountryPath& path) {
    std::string key = monitor.str();
    key.push_back('\t');
    key += path.str();
    return seen_.insert(std::move(key)).second;
  }

  std::size_t distinct() const { return seen_.size(); }

 private:
  std::unordered_set<std::string> seen_;
};

inline std::vector<std::pair<MonitorId, CountryPath>> dedup_paths(
    const std::vector<std::pair<MonitorId, CountryPath>>& stream) {
  PathDeduper dedup;
  std::vector<std::pair<MonitorId, CountryPath>> out;
  for (const auto& [monitor, path] : stream)
    if (dedup.insert(monitor, path)) out.emplace_back(monitor, path);
  return out;
}

}  // namespace expo
