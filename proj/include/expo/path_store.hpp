#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "expo/country_mapping.hpp"
#include "expo/csv.hpp"
#include "expo/ingest.hpp"
#include "expo/trace_model.hpp"

namespace expo {

struct SourceMismatchError : std::runtime_error {
  SourceMismatchError(const MonitorId& m, CountryCode monitor_country, CountryCode path_source)
      : std::runtime_error("monitor '" + m.str() + "' is in " + monitor_country.str() +
                           " but path starts at " + path_source.str()) {}
};

struct FormatError : std::runtime_error {
  FormatError(std::size_t line, std::string why)
      : std::runtime_error("store line " + std::to_string(line) + ": " + why), line_no(line) {}
  std::size_t line_no;
};

// Deduplicated (monitor, country path) records for one dataset, indexed by
// monitor and by (source, destination) pair. Build single-writer, then treat
// as sealed: every experiment takes a const reference.
class PathStore {
 public:
  PathStore(DatasetKind dataset, MonitorTable monitors)
      : dataset_(dataset), monitors_(std::move(monitors)) {}

  DatasetKind dataset() const { return dataset_; }
  const MonitorTable& monitors() const { return monitors_; }

  // True if the record is new. The path must start in the monitor's country.
  bool insert(const MonitorId& monitor, const CountryPath& path) {
    const auto country = monitors_.find(monitor);
    if (!country) throw MonitorUnknownError(monitor);
    if (path.source() != *country) throw SourceMismatchError(monitor, *country, path.source());
    auto [it, fresh] = by_monitor_[monitor].insert(path);
    if (!fresh) return false;
    by_pair_[{path.source(), path.destination()}].insert(path);
    for (const CountryCode& c : path.hops()) countries_.insert(c);
    ++record_count_;
    return true;
  }

  // R(W): union of the paths revealed by the monitors in W.
  std::set<CountryPath> revealed(const std::set<MonitorId>& monitors) const {
    std::set<CountryPath> out;
    for (const MonitorId& m : monitors) {
      if (!monitors_.contains(m)) throw MonitorUnknownError(m);
      auto it = by_monitor_.find(m);
      if (it == by_monitor_.end()) continue;
      out.insert(it->second.begin(), it->second.end());
    }
    return out;
  }

  // All stored paths from x to y; empty set when none recorded.
  const std::set<CountryPath>& paths_between(CountryCode x, CountryCode y) const {
    static const std::set<CountryPath> kEmpty;
    auto it = by_pair_.find({x, y});
    return it == by_pair_.end() ? kEmpty : it->second;
  }

  const std::set<CountryPath>& paths_of(const MonitorId& m) const {
    static const std::set<CountryPath> kEmpty;
    auto it = by_monitor_.find(m);
    return it == by_monitor_.end() ? kEmpty : it->second;
  }

  // Every country appearing on any stored path.
  const std::set<CountryCode>& countries() const { return countries_; }

  // Destinations y != x with at least one recorded x->y path, sorted.
  std::vector<CountryCode> targets_from(CountryCode x) const {
    std::vector<CountryCode> out;
    for (auto it = by_pair_.lower_bound({x, CountryCode("AA")});
         it != by_pair_.end() && it->first.first == x; ++it)
      if (it->first.second != x && !it->second.empty()) out.push_back(it->first.second);
    return out;
  }

  const std::map<MonitorId, std::set<CountryPath>>& by_monitor() const { return by_monitor_; }
  const std::map<std::pair<CountryCode, CountryCode>, std::set<CountryPath>>& by_pair() const {
    return by_pair_;
  }
  std::size_t record_count() const { return record_count_; }

  bool operator==(const PathStore& other) const {
    return dataset_ == other.dataset_ && monitors_ == other.monitors_ &&
           by_monitor_ == other.by_monitor_;
  }

  // Store file: header, monitor section, record section; sorted, LF, UTF-8.
  // Byte-deterministic for a given record set regardless of insertion order.
  std::string serialize() const {
    std::string out = "expo-store v1\tdataset=";
    out += dataset_label(dataset_);
    out.push_back('\n');
    for (const auto& [monitor, country] : monitors_.entries()) {
      out += "M\t";
      out += monitor.str();
      out.push_back('\t');
      out += country.str();
      out.push_back('\n');
    }
    for (const auto& [monitor, paths] : by_monitor_) {
      for (const CountryPath& p : paths) {
        out += "P\t";
        out += monitor.str();
        out.push_back('\t');
        out += p.str();
        out.push_back('\n');
      }
    }
    return out;
  }

  static PathStore deserialize(std::string_view text) {
    std::optional<PathStore> store;
    MonitorTable monitors;
    std::vector<std::pair<MonitorId, CountryPath>> records;
    bool saw_header = false;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      if (!saw_header) {
        const auto fields = detail::split(line, '\t');
        if (fields.size() != 2 || fields[0] != "expo-store v1" ||
            fields[1].substr(0, 8) != "dataset=")
          throw FormatError(line_no, "bad header");
        auto kind = dataset_from_label(fields[1].substr(8));
        if (!kind) throw FormatError(line_no, "unknown dataset label");
        store.emplace(*kind, MonitorTable{});
        saw_header = true;
        return;
      }
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 3) throw FormatError(line_no, "expected 3 tab-separated fields");
      if (fields[0] == "M") {
        auto monitor = MonitorId::parse(fields[1]);
        auto country = CountryCode::parse(fields[2]);
        if (!monitor || !country) throw FormatError(line_no, "bad monitor entry");
        try {
          monitors.insert(*monitor, *country);
        } catch (const std::invalid_argument& e) {
          throw FormatError(line_no, e.what());
        }
      } else if (fields[0] == "P") {
        auto monitor = MonitorId::parse(fields[1]);
        auto path = CountryPath::parse(fields[2]);
        if (!monitor || !path) throw FormatError(line_no, "bad path record");
        records.emplace_back(std::move(*monitor), std::move(*path));
      } else {
        throw FormatError(line_no, "unknown record tag");
      }
    });
    if (!saw_header) throw FormatError(0, "empty store file");
    PathStore out(store->dataset(), monitors);
    for (std::size_t i = 0; i < records.size(); ++i) {
      try {
        out.insert(records[i].first, records[i].second);
      } catch (const std::runtime_error& e) {
        throw FormatError(0, e.what());
      }
    }
    return out;
  }

 private:
  DatasetKind dataset_;
  MonitorTable monitors_;
  std::map<MonitorId, std::set<CountryPath>> by_monitor_;
  std::map<std::pair<CountryCode, CountryCode>, std::set<CountryPath>> by_pair_;
  std::set<CountryCode> countries_;
  std::size_t record_count_ = 0;
};

inline void save_store(const PathStore& store, const std::filesystem::path& path) {
  write_file_atomic(path, store.serialize());
}

inline PathStore load_store(const std::filesystem::path& path) {
  return PathStore::deserialize(read_file(path));
}

}  // namespace expo
