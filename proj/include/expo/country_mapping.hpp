#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "expo/ingest.hpp"
#include "expo/trace_model.hpp"

namespace expo {

struct Cidr {
  std::uint32_t addr;  // host bits zero
  int length;          // 0..32
  auto operator<=>(const Cidr&) const = default;

  std::string str() const {
    return Hop::address(addr).str() + "/" + std::to_string(length);
  }
};

// "a.b.c.d/len" with host bits required zero, so each table entry denotes
// exactly the block it covers.
inline std::optional<Cidr> parse_cidr(std::string_view s) {
  const std::size_t slash = s.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto ip = parse_ipv4(s.substr(0, slash));
  if (!ip) return std::nullopt;
  const std::string_view len_tok = s.substr(slash + 1);
  if (len_tok.empty() || len_tok.size() > 2) return std::nullopt;
  int len = 0;
  for (char c : len_tok) {
    if (c < '0' || c > '9') return std::nullopt;
    len = len * 10 + (c - '0');
  }
  if (len > 32) return std::nullopt;
  const std::uint32_t mask = len == 0 ? 0 : ~std::uint32_t{0} << (32 - len);
  if ((*ip & ~mask) != 0) return std::nullopt;
  return Cidr{*ip, len};
}

// Optional country re-labeling applied while loading mapping tables, e.g.
// folding EU member states into "EU". Identity for unmapped codes.
class CountryRemap {
 public:
  void add(CountryCode from, CountryCode to) { map_.insert_or_assign(from, to); }

  CountryCode apply(CountryCode c) const {
    auto it = map_.find(c);
    return it == map_.end() ? c : it->second;
  }

  std::size_t size() const { return map_.size(); }

  // remap format: from_code TAB to_code
  static CountryRemap parse(std::string_view text) {
    CountryRemap remap;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      if (detail::skippable_line(line)) return;
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 2) throw ParseError(line_no, "expected from TAB to");
      auto from = CountryCode::parse(fields[0]);
      auto to = CountryCode::parse(fields[1]);
      if (!from || !to) throw ParseError(line_no, "bad country code");
      remap.add(*from, *to);
    });
    return remap;
  }

 private:
  std::map<CountryCode, CountryCode> map_;
};

// CIDR -> country table with longest-prefix-match lookup. Overlapping
// prefixes are fine; an identical prefix twice is a load error.
class GeoTable {
 public:
  void add(Cidr prefix, CountryCode country) {
    auto& bucket = by_length_[prefix.length];
    auto [it, fresh] = bucket.emplace(prefix.addr, country);
    if (!fresh) throw std::invalid_argument("duplicate prefix " + prefix.str());
    if (std::find(lengths_.begin(), lengths_.end(), prefix.length) == lengths_.end()) {
      lengths_.push_back(prefix.length);
      std::sort(lengths_.rbegin(), lengths_.rend());
    }
    ++size_;
  }

  std::optional<CountryCode> lookup(std::uint32_t ip) const {
    for (int len : lengths_) {
      const std::uint32_t mask = len == 0 ? 0 : ~std::uint32_t{0} << (32 - len);
      auto it = by_length_[len].find(ip & mask);
      if (it != by_length_[len].end()) return it->second;
    }
    return std::nullopt;
  }

  std::size_t size() const { return size_; }

  // geo table format: CIDR TAB country_code
  static GeoTable parse(std::string_view text, const CountryRemap* remap = nullptr) {
    GeoTable table;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      if (detail::skippable_line(line)) return;
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 2) throw ParseError(line_no, "expected CIDR TAB country");
      auto prefix = parse_cidr(fields[0]);
      auto country = CountryCode::parse(fields[1]);
      if (!prefix) throw ParseError(line_no, "bad CIDR '" + std::string(fields[0]) + "'");
      if (!country) throw ParseError(line_no, "bad country code");
      try {
        table.add(*prefix, remap ? remap->apply(*country) : *country);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
      }
    });
    return table;
  }

 private:
  std::array<std::unordered_map<std::uint32_t, CountryCode>, 33> by_length_;
  std::vector<int> lengths_;  // descending, only lengths present
  std::size_t size_ = 0;
};

// ASN -> country of registration.
class AsRegistry {
 public:
  void add(std::uint32_t asn, CountryCode country) {
    auto [it, fresh] = map_.emplace(asn, country);
    if (!fresh && it->second != country)
      throw std::invalid_argument("ASN " + std::to_string(asn) + " registered twice");
  }

  std::optional<CountryCode> lookup(std::uint32_t asn) const {
    auto it = map_.find(asn);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return map_.size(); }

  // registry format: ASN TAB country_code, "AS" prefix on the ASN accepted.
  static AsRegistry parse(std::string_view text, const CountryRemap* remap = nullptr) {
    AsRegistry reg;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      if (detail::skippable_line(line)) return;
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 2) throw ParseError(line_no, "expected ASN TAB country");
      std::string_view asn_tok = fields[0];
      if (asn_tok.size() > 2 && (asn_tok.substr(0, 2) == "AS")) asn_tok.remove_prefix(2);
      auto asn = parse_asn(asn_tok);
      auto country = CountryCode::parse(fields[1]);
      if (!asn) throw ParseError(line_no, "bad ASN '" + std::string(fields[0]) + "'");
      if (!country) throw ParseError(line_no, "bad country code");
      try {
        reg.add(*asn, remap ? remap->apply(*country) : *country);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
      }
    });
    return reg;
  }

 private:
  std::unordered_map<std::uint32_t, CountryCode> map_;
};

inline MonitorTable remap_monitor_table(const MonitorTable& table, const CountryRemap& remap) {
  MonitorTable out;
  for (const auto& [monitor, country] : table.entries()) out.insert(monitor, remap.apply(country));
  return out;
}

struct MonitorUnknownError : std::runtime_error {
  explicit MonitorUnknownError(const MonitorId& m)
      : std::runtime_error("unknown monitor '" + m.str() + "'") {}
};

// A record that failed one of the cleaning rules, with the reason.
struct Discarded {
  std::string reason;
};

using ConvertOutcome = std::variant<CountryPath, Discarded>;

inline bool was_discarded(const ConvertOutcome& o) {
  return std::holds_alternative<Discarded>(o);
}

// Router path -> country path. Each hop resolves through the geo table; a
// maximal run of unresolved hops inherits the country that flanks it on both
// sides, otherwise the trace is discarded. The monitor's country is prepended
// as the path source before compression.
inline ConvertOutcome trace_to_country_path(const TraceRecord& rec, const GeoTable& geo,
                                            const MonitorTable& monitors) {
  const auto monitor_country = monitors.find(rec.monitor);
  if (!monitor_country) throw MonitorUnknownError(rec.monitor);

  std::vector<std::optional<CountryCode>> resolved;
  resolved.reserve(rec.hops.size());
  for (const Hop& hop : rec.hops)
    resolved.push_back(hop.is_star() ? std::nullopt : geo.lookup(hop.ip()));

  std::vector<CountryCode> codes;
  codes.reserve(resolved.size() + 1);
  codes.push_back(*monitor_country);
  for (std::size_t i = 0; i < resolved.size();) {
    if (resolved[i]) {
      codes.push_back(*resolved[i]);
      ++i;
      continue;
    }
    std::size_t j = i;  // maximal unresolved run [i, j]
    while (j + 1 < resolved.size() && !resolved[j + 1]) ++j;
    if (i == 0 || j + 1 == resolved.size() || *resolved[i - 1] != *resolved[j + 1])
      return Discarded{"unflanked unresolved hop"};
    for (std::size_t k = i; k <= j; ++k) codes.push_back(*resolved[i - 1]);
    i = j + 1;
  }
  return CountryPath::normalized(codes);
}

// AS path -> country path via the registration registry.
inline ConvertOutcome aspath_to_country_path(const AsPathRecord& rec, const AsRegistry& reg) {
  std::vector<CountryCode> codes;
  codes.reserve(rec.asns.size());
  for (std::uint32_t asn : rec.asns) {
    const auto country = reg.lookup(asn);
    if (!country) return Discarded{"unregistered ASN"};
    codes.push_back(*country);
  }
  return CountryPath::normalized(codes);
}

}  // namespace expo
