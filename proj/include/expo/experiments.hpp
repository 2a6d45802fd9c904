#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "expo/csv.hpp"
#include "expo/parallel.hpp"
#include "expo/path_store.hpp"
#include "expo/rng.hpp"
#include "expo/trace_model.hpp"

namespace expo {

struct NoPathsError : std::runtime_error {
  NoPathsError() : std::runtime_error("no recorded paths") {}
};

struct LonelyMonitorError : std::runtime_error {
  LonelyMonitorError() : std::runtime_error("country has a single monitor") {}
};

struct NoTargetsError : std::runtime_error {
  NoTargetsError() : std::runtime_error("source country reaches no targets") {}
};

struct ExcludedEndpointError : std::runtime_error {
  ExcludedEndpointError() : std::runtime_error("excluded set contains an endpoint") {}
};

// ---------------------------------------------------------------------------
// Monitor generalization: |R({x}) intersect R(M\x)| / |R({x})|.

inline double generalization_ratio(const PathStore& store, const MonitorId& x) {
  const auto country = store.monitors().find(x);
  if (!country) throw MonitorUnknownError(x);
  const auto& mine = store.paths_of(x);
  if (mine.empty()) throw NoPathsError{};

  std::set<MonitorId> rest;
  for (const auto& [monitor, c] : store.monitors().entries())
    if (c == *country && monitor != x) rest.insert(monitor);
  if (rest.empty()) throw LonelyMonitorError{};

  const std::set<CountryPath> others = store.revealed(rest);
  std::size_t shared = 0;
  for (const CountryPath& p : mine)
    if (others.count(p)) ++shared;
  return static_cast<double>(shared) / static_cast<double>(mine.size());
}

struct GeneralizationRow {
  CountryCode country;
  int monitor_count;
  double mean_ratio;
};

struct GeneralizationReport {
  std::vector<GeneralizationRow> rows;  // sorted by country
  int skipped_single_monitor = 0;       // countries with fewer than 2 monitors
  int skipped_monitor_without_paths = 0;  // countries where some monitor revealed nothing
};

// Mean generalization ratio per country with at least two monitors, each of
// which revealed at least one path. Countries failing either precondition
// are omitted and counted.
inline GeneralizationReport generalization_report(const PathStore& store, int threads = 1) {
  std::map<CountryCode, std::vector<MonitorId>> by_country;
  for (const auto& [monitor, country] : store.monitors().entries())
    by_country[country].push_back(monitor);

  std::vector<const std::pair<const CountryCode, std::vector<MonitorId>>*> countries;
  countries.reserve(by_country.size());
  for (const auto& entry : by_country) countries.push_back(&entry);

  enum class Skip { kNone, kSingleMonitor, kMonitorWithoutPaths };
  std::vector<Skip> skips(countries.size(), Skip::kNone);
  std::vector<GeneralizationRow> slots(countries.size());

  parallel_for(countries.size(), threads, [&](std::size_t i) {
    const auto& [country, monitors] = *countries[i];
    if (monitors.size() < 2) {
      skips[i] = Skip::kSingleMonitor;
      return;
    }
    std::map<CountryPath, int> multiplicity;
    for (const MonitorId& m : monitors) {
      const auto& paths = store.paths_of(m);
      if (paths.empty()) {
        skips[i] = Skip::kMonitorWithoutPaths;
        return;
      }
      for (const CountryPath& p : paths) ++multiplicity[p];
    }
    double sum = 0.0;  // monitors are sorted, so the summation order is fixed
    for (const MonitorId& m : monitors) {
      const auto& paths = store.paths_of(m);
      std::size_t shared = 0;
      for (const CountryPath& p : paths)
        if (multiplicity.find(p)->second >= 2) ++shared;
      sum += static_cast<double>(shared) / static_cast<double>(paths.size());
    }
    slots[i] = {country, static_cast<int>(monitors.size()),
                sum / static_cast<double>(monitors.size())};
  });

  GeneralizationReport report;
  for (std::size_t i = 0; i < countries.size(); ++i) {
    switch (skips[i]) {
      case Skip::kNone: report.rows.push_back(slots[i]); break;
      case Skip::kSingleMonitor: ++report.skipped_single_monitor; break;
      case Skip::kMonitorWithoutPaths: ++report.skipped_monitor_without_paths; break;
    }
  }
  return report;
}

inline std::string render_generalization_csv(const GeneralizationReport& report) {
  std::string out = "country,monitor_count,mean_ratio\n";
  for (const auto& row : report.rows) {
    out += row.country.str();
    out.push_back(',');
    out += std::to_string(row.monitor_count);
    out.push_back(',');
    out += format_fixed(row.mean_ratio);
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Involved countries I(x, y): everything on any recorded x->y path except
// the endpoints themselves.

inline std::set<CountryCode> involved(const PathStore& store, CountryCode x, CountryCode y) {
  std::set<CountryCode> out;
  for (const CountryPath& p : store.paths_between(x, y))
    for (const CountryCode& c : p.hops())
      if (c != x && c != y) out.insert(c);
  return out;
}

struct InvolvedPoint {
  CountryCode target;
  double mean_distance;  // mean over distinct paths of hop_count - 1
  int min_distance;
  int involved_count;
};

struct InvolvedCurvePoint {
  int distance_bin;  // mean_distance rounded half-up
  int target_count;
  double mean_involved;
};

struct InvolvedReport {
  CountryCode source;
  std::vector<InvolvedPoint> points;        // sorted by target
  std::vector<InvolvedCurvePoint> curves;   // sorted by bin
};

inline InvolvedReport involved_report(const PathStore& store, CountryCode source) {
  InvolvedReport report{source, {}, {}};
  std::map<int, std::pair<int, long long>> bins;  // bin -> (targets, involved sum)
  for (const CountryCode& target : store.targets_from(source)) {
    const auto& paths = store.paths_between(source, target);
    long long distance_sum = 0;
    int min_distance = std::numeric_limits<int>::max();
    for (const CountryPath& p : paths) {
      const int d = static_cast<int>(p.hop_count()) - 1;
      distance_sum += d;
      min_distance = std::min(min_distance, d);
    }
    const double mean_distance =
        static_cast<double>(distance_sum) / static_cast<double>(paths.size());
    const int count = static_cast<int>(involved(store, source, target).size());
    report.points.push_back({target, mean_distance, min_distance, count});
    auto& [targets, involved_sum] = bins[static_cast<int>(std::floor(mean_distance + 0.5))];
    ++targets;
    involved_sum += count;
  }
  for (const auto& [bin, acc] : bins)
    report.curves.push_back(
        {bin, acc.first, static_cast<double>(acc.second) / static_cast<double>(acc.first)});
  return report;
}

inline std::string render_involved_points_csv(const std::vector<InvolvedReport>& reports) {
  std::string out = "source,target,mean_distance,min_distance,involved_count\n";
  for (const auto& report : reports)
    for (const auto& p : report.points) {
      out += report.source.str();
      out.push_back(',');
      out += p.target.str();
      out.push_back(',');
      out += format_fixed(p.mean_distance);
      out.push_back(',');
      out += std::to_string(p.min_distance);
      out.push_back(',');
      out += std::to_string(p.involved_count);
      out.push_back('\n');
    }
  return out;
}

inline std::string render_involved_curves_csv(const std::vector<InvolvedReport>& reports) {
  std::string out = "source,distance_bin,target_count,mean_involved\n";
  for (const auto& report : reports)
    for (const auto& c : report.curves) {
      out += report.source.str();
      out.push_back(',');
      out += std::to_string(c.distance_bin);
      out.push_back(',');
      out += std::to_string(c.target_count);
      out.push_back(',');
      out += format_fixed(c.mean_involved);
      out.push_back('\n');
    }
  return out;
}

// ---------------------------------------------------------------------------
// Excluded-country Monte Carlo.

enum class TrialClass { kNoneExcluded, kAllExcluded, kMixture };

struct TrialOutcome {
  TrialClass cls;
  double clean_ratio;  // clean paths / all paths between the endpoints
};

// Classifies one (x, y, S) draw. A path is clean iff none of its hops is in
// S; S never contains x or y.
inline TrialOutcome excluded_trial(const PathStore& store, CountryCode x, CountryCode y,
                                   const std::set<CountryCode>& excluded) {
  if (excluded.count(x) || excluded.count(y)) throw ExcludedEndpointError{};
  const auto& paths = store.paths_between(x, y);
  if (paths.empty()) throw NoPathsError{};
  std::size_t clean = 0;
  for (const CountryPath& p : paths) {
    bool hit = false;
    for (const CountryCode& c : p.hops())
      if (excluded.count(c)) {
        hit = true;
        break;
      }
    if (!hit) ++clean;
  }
  const double ratio = static_cast<double>(clean) / static_cast<double>(paths.size());
  if (clean == paths.size()) return {TrialClass::kNoneExcluded, ratio};
  if (clean == 0) return {TrialClass::kAllExcluded, ratio};
  return {TrialClass::kMixture, ratio};
}

// Excluded-list size sweep, "min:max:step".
struct SizesSpec {
  int min = 0;
  int max = 190;
  int step = 10;

  static std::optional<SizesSpec> parse(std::string_view text) {
    const auto fields = detail::split(text, ':');
    if (fields.size() != 3) return std::nullopt;
    int values[3];
    for (int i = 0; i < 3; ++i) {
      if (fields[i].empty() || fields[i].size() > 9) return std::nullopt;
      int v = 0;
      for (char c : fields[i]) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
      }
      values[i] = v;
    }
    SizesSpec spec{values[0], values[1], values[2]};
    if (spec.step < 1 || spec.max < spec.min) return std::nullopt;
    return spec;
  }

  std::vector<int> values() const {
    std::vector<int> out;
    for (int s = min; s <= max; s += step) out.push_back(s);
    return out;
  }
};

struct ExcludedRow {
  int size;
  std::uint64_t none_trials = 0;
  std::uint64_t all_trials = 0;
  std::uint64_t mixture_trials = 0;
  std::uint64_t trials = 0;
  double mixture_clean_sum = 0.0;

  double none_ratio() const { return static_cast<double>(none_trials) / static_cast<double>(trials); }
  double all_ratio() const { return static_cast<double>(all_trials) / static_cast<double>(trials); }
  double mixture_trial_ratio() const {
    return static_cast<double>(mixture_trials) / static_cast<double>(trials);
  }
  // Mean clean ratio over mixture-class trials only; 0 when there were none.
  double mixture_mean_clean_ratio() const {
    return mixture_trials == 0 ? 0.0 : mixture_clean_sum / static_cast<double>(mixture_trials);
  }
};

struct ExcludedReport {
  CountryCode source;
  std::uint64_t seed;
  std::vector<ExcludedRow> rows;  // one per size, ascending
};

// Runs trials_per_size independent trials per list size. Trial (si, ti)
// draws from the stream keyed by (seed, source, si, ti): first a destination
// uniform over reachable targets, then an excluded set without replacement
// from all stored countries minus the endpoints. Outcomes depend only on the
// key, never on execution order, so reports are identical at any thread
// count.
inline ExcludedReport excluded_experiment(const PathStore& store, CountryCode source,
                                          const SizesSpec& sizes, int trials_per_size,
                                          std::uint64_t seed, int threads = 1) {
  const std::vector<CountryCode> targets = store.targets_from(source);
  if (targets.empty()) throw NoTargetsError{};
  const std::vector<CountryCode> universe(store.countries().begin(), store.countries().end());
  const std::vector<int> size_values = sizes.values();
  const std::size_t trials = static_cast<std::size_t>(trials_per_size);
  const std::uint64_t source_label = fnv1a64(source.view());

  std::vector<TrialOutcome> outcomes(size_values.size() * trials);
  parallel_for(outcomes.size(), threads, [&](std::size_t i) {
    const std::size_t size_index = i / trials;
    const std::size_t trial_index = i % trials;
    SplitMix64 rng(derive_stream({seed, source_label, size_index, trial_index}));

    const CountryCode y = targets[rng.bounded(targets.size())];
    std::vector<CountryCode> candidates;
    candidates.reserve(universe.size());
    for (const CountryCode& c : universe)
      if (c != source && c != y) candidates.push_back(c);

    const std::size_t want = static_cast<std::size_t>(size_values[size_index]);
    std::set<CountryCode> excluded;
    for (std::size_t idx : sample_indices(candidates.size(), want, rng))
      excluded.insert(candidates[idx]);

    outcomes[i] = excluded_trial(store, source, y, excluded);
  });

  ExcludedReport report{source, seed, {}};
  for (std::size_t si = 0; si < size_values.size(); ++si) {
    ExcludedRow row;
    row.size = size_values[si];
    row.trials = trials;
    for (std::size_t ti = 0; ti < trials; ++ti) {  // fixed reduction order
      const TrialOutcome& o = outcomes[si * trials + ti];
      switch (o.cls) {
        case TrialClass::kNoneExcluded: ++row.none_trials; break;
        case TrialClass::kAllExcluded: ++row.all_trials; break;
        case TrialClass::kMixture:
          ++row.mixture_trials;
          row.mixture_clean_sum += o.clean_ratio;
          break;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

inline std::string render_excluded_csv(const std::vector<ExcludedReport>& reports) {
  std::string out =
      "source,size,none_ratio,all_ratio,mixture_trial_ratio,mixture_mean_clean_ratio,trials,seed\n";
  for (const auto& report : reports)
    for (const auto& row : report.rows) {
      out += report.source.str();
      out.push_back(',');
      out += std::to_string(row.size);
      out.push_back(',');
      out += format_fixed(row.none_ratio());
      out.push_back(',');
      out += format_fixed(row.all_ratio());
      out.push_back(',');
      out += format_fixed(row.mixture_trial_ratio());
      out.push_back(',');
      out += format_fixed(row.mixture_mean_clean_ratio());
      out.push_back(',');
      out += std::to_string(row.trials);
      out.push_back(',');
      out += std::to_string(report.seed);
      out.push_back('\n');
    }
  return out;
}

}  // namespace expo
