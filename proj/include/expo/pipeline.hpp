#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "expo/country_mapping.hpp"
#include "expo/csv.hpp"
#include "expo/ingest.hpp"
#include "expo/parallel.hpp"
#include "expo/path_store.hpp"

namespace expo {

enum class ErrorPolicy { kSkip, kAbort };

struct IngestStats {
  std::uint64_t lines = 0;          // non-comment records seen
  std::uint64_t parse_errors = 0;
  std::uint64_t discarded = 0;      // cleaning rules (unresolved hops, unregistered ASNs)
  std::uint64_t monitor_unknown = 0;
  std::uint64_t source_mismatch = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t inserted = 0;

  IngestStats& operator+=(const IngestStats& other) {
    lines += other.lines;
    parse_errors += other.parse_errors;
    discarded += other.discarded;
    monitor_unknown += other.monitor_unknown;
    source_mismatch += other.source_mismatch;
    duplicates += other.duplicates;
    inserted += other.inserted;
    return *this;
  }
};

namespace detail {

struct LineOutcome {
  enum class Kind { kSkip, kPath, kParseError, kDiscarded, kMonitorUnknown };
  Kind kind = Kind::kSkip;
  std::size_t line_no = 0;
  std::string reason;
  std::optional<std::pair<MonitorId, CountryPath>> record;
};

}  // namespace detail

// Parses and converts one input file into the store. Lines are converted in
// parallel chunks but merged in file order, so the resulting store and the
// stats are identical for every thread count. Under kAbort the first bad
// line throws ParseError; cleaning discards are never errors.
inline IngestStats ingest_text(PathStore& store, std::string_view text, const GeoTable* geo,
                               const AsRegistry* registry, ErrorPolicy policy, int threads = 1) {
  const DatasetKind kind = store.dataset();
  if (kind == DatasetKind::kGeolocation && geo == nullptr)
    throw std::invalid_argument("geolocation ingest requires a geo table");
  if (kind == DatasetKind::kRegistration && registry == nullptr)
    throw std::invalid_argument("registration ingest requires an AS registry");

  std::vector<std::pair<std::size_t, std::string_view>> lines;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    lines.emplace_back(line_no, line);
  });

  std::vector<detail::LineOutcome> outcomes(lines.size());
  parallel_for(lines.size(), threads, [&](std::size_t i) {
    const auto [line_no, line] = lines[i];
    detail::LineOutcome& out = outcomes[i];
    out.line_no = line_no;
    if (detail::skippable_line(line)) return;
    try {
      std::optional<MonitorId> monitor;
      ConvertOutcome converted = Discarded{};
      if (kind == DatasetKind::kGeolocation) {
        TraceRecord rec = parse_trace_line(line, line_no);
        monitor = rec.monitor;
        converted = trace_to_country_path(rec, *geo, store.monitors());
      } else {
        AsPathRecord rec = parse_bgp_line(line, line_no);
        monitor = rec.monitor;
        if (!store.monitors().contains(*monitor)) throw MonitorUnknownError(*monitor);
        converted = aspath_to_country_path(rec, *registry);
      }
      if (auto* discard = std::get_if<Discarded>(&converted)) {
        out.kind = detail::LineOutcome::Kind::kDiscarded;
        out.reason = discard->reason;
      } else {
        out.kind = detail::LineOutcome::Kind::kPath;
        out.record.emplace(std::move(*monitor), std::get<CountryPath>(std::move(converted)));
      }
    } catch (const MonitorUnknownError& e) {
      out.kind = detail::LineOutcome::Kind::kMonitorUnknown;
      out.reason = e.what();
    } catch (const ParseError& e) {
      out.kind = detail::LineOutcome::Kind::kParseError;
      out.reason = e.reason;
    }
  });

  IngestStats stats;
  for (const detail::LineOutcome& out : outcomes) {
    switch (out.kind) {
      case detail::LineOutcome::Kind::kSkip:
        continue;
      case detail::LineOutcome::Kind::kParseError:
        ++stats.lines;
        ++stats.parse_errors;
        if (policy == ErrorPolicy::kAbort) throw ParseError(out.line_no, out.reason);
        break;
      case detail::LineOutcome::Kind::kMonitorUnknown:
        ++stats.lines;
        ++stats.monitor_unknown;
        if (policy == ErrorPolicy::kAbort) throw ParseError(out.line_no, out.reason);
        break;
      case detail::LineOutcome::Kind::kDiscarded:
        ++stats.lines;
        ++stats.discarded;
        break;
      case detail::LineOutcome::Kind::kPath: {
        ++stats.lines;
        try {
          if (store.insert(out.record->first, out.record->second))
            ++stats.inserted;
          else
            ++stats.duplicates;
        } catch (const SourceMismatchError& e) {
          ++stats.source_mismatch;
          if (policy == ErrorPolicy::kAbort) throw ParseError(out.line_no, e.what());
        }
        break;
      }
    }
  }
  return stats;
}

inline IngestStats ingest_file(PathStore& store, const std::filesystem::path& path,
                               const GeoTable* geo, const AsRegistry* registry,
                               ErrorPolicy policy, int threads = 1) {
  const std::string text = read_file(path);
  return ingest_text(store, text, geo, registry, policy, threads);
}

inline GeoTable load_geo_table(const std::filesystem::path& path,
                               const CountryRemap* remap = nullptr) {
  return GeoTable::parse(read_file(path), remap);
}

inline AsRegistry load_as_registry(const std::filesystem::path& path,
                                   const CountryRemap* remap = nullptr) {
  return AsRegistry::parse(read_file(path), remap);
}

inline MonitorTable load_monitor_table(const std::filesystem::path& path,
                                       const CountryRemap* remap = nullptr) {
  MonitorTable table = parse_monitor_table(read_file(path));
  return remap ? remap_monitor_table(table, *remap) : table;
}

inline CountryRemap load_country_remap(const std::filesystem::path& path) {
  return CountryRemap::parse(read_file(path));
}

}  // namespace expo
