// Acceptance suite for the exposure toolkit. Each criterion prints one
// PASS/FAIL line; run with no arguments for all criteria or with a single
// criterion number. Exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "expo/country_graph.hpp"
#include "expo/country_mapping.hpp"
#include "expo/csv.hpp"
#include "expo/experiments.hpp"
#include "expo/ingest.hpp"
#include "expo/path_store.hpp"
#include "expo/pipeline.hpp"
#include "expo/rng.hpp"
#include "expo/synth.hpp"
#include "expo/trace_model.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

using expo::CountryCode;
using expo::CountryGraph;
using expo::CountryPath;
using expo::DatasetKind;
using expo::MonitorId;
using expo::MonitorTable;
using expo::PathStore;
using expo::SynthConfig;
using expo::SynthCorpus;

namespace {

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

CountryCode code_of(int i) {
  return CountryCode(std::string{static_cast<char>('A' + i / 26), static_cast<char>('A' + i % 26)});
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// shared builders

struct RandomStore {
  PathStore store;
  std::vector<oracles::Record> records;
  int n_countries;
};

RandomStore random_store(expo::SplitMix64& rng, int max_countries, int max_paths) {
  const int n = 3 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_countries - 2)));
  MonitorTable table;
  for (int c = 0; c < n; ++c)
    table.insert(MonitorId("mon" + std::to_string(c)), code_of(c));
  PathStore store(DatasetKind::kGeolocation, table);
  std::vector<oracles::Record> records;
  const int paths = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_paths)));
  for (int i = 0; i < paths; ++i) {
    const int c = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    std::vector<CountryCode> hops{code_of(c)};
    for (std::size_t k = rng.bounded(5); k > 0; --k)
      hops.push_back(code_of(static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)))));
    const CountryPath p = expo::normalize_country_path(hops);
    const MonitorId m("mon" + std::to_string(c));
    store.insert(m, p);
    records.push_back({m, p});
  }
  return {std::move(store), std::move(records), n};
}

SynthConfig ensemble_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_countries = 40;
  cfg.n_routers_per_country = 2;
  cfg.attachment_exponent = 2.4;  // hub-favoring
  cfg.n_monitors = 80;            // every router, so every country records paths
  cfg.paths_per_monitor = 39;
  cfg.multipath_factor = 5;
  cfg.seed = seed;
  return cfg;
}

PathStore ingest_corpus(const SynthCorpus& corpus, DatasetKind kind) {
  const MonitorTable monitors = expo::parse_monitor_table(corpus.monitors_tsv);
  PathStore store(kind, monitors);
  if (kind == DatasetKind::kGeolocation) {
    const expo::GeoTable geo = expo::GeoTable::parse(corpus.geo_tsv);
    expo::ingest_text(store, corpus.traces_tsv, &geo, nullptr, expo::ErrorPolicy::kAbort);
  } else {
    const expo::AsRegistry reg = expo::AsRegistry::parse(corpus.asreg_tsv);
    expo::ingest_text(store, corpus.bgp_tsv, nullptr, &reg, expo::ErrorPolicy::kAbort);
  }
  return store;
}

std::set<std::pair<std::string, std::string>> ground_truth_set(const SynthCorpus& corpus) {
  std::set<std::pair<std::string, std::string>> out;
  std::istringstream in(corpus.ground_truth_tsv);
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    out.insert({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

std::set<std::pair<std::string, std::string>> store_record_set(const PathStore& store) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [monitor, paths] : store.by_monitor())
    for (const auto& path : paths) out.insert({monitor.str(), path.str()});
  return out;
}

// ---------------------------------------------------------------------------
// criterion 1: involved(x, y) equals brute force on 1000 randomized stores

void criterion_involved_oracle() {
  const auto start = std::chrono::steady_clock::now();
  expo::SplitMix64 rng(0xacce0701);
  for (int iteration = 0; iteration < 1000; ++iteration) {
    const RandomStore rs = random_store(rng, 30, 500);
    for (int a = 0; a < rs.n_countries; ++a)
      for (int b = 0; b < rs.n_countries; ++b) {
        const CountryCode x = code_of(a), y = code_of(b);
        require(expo::involved(rs.store, x, y) == oracles::involved(rs.records, x, y),
                "involved mismatch at store " + std::to_string(iteration));
      }
  }
  require(seconds_since(start) < 30.0, "involved oracle sweep exceeded 30s");
}

// ---------------------------------------------------------------------------
// criterion 2: centralities vs oracles on all connected graphs with <= 7
// nodes plus 200 random connected graphs with <= 12 nodes

void check_graph_against_oracles(const oracles::DenseGraph& dense) {
  std::vector<CountryCode> nodes;
  std::vector<std::pair<CountryCode, CountryCode>> edges;
  for (int v = 0; v < dense.n; ++v) nodes.push_back(code_of(v));
  for (int a = 0; a < dense.n; ++a)
    for (int b = a + 1; b < dense.n; ++b)
      if (dense.a[a][b]) edges.emplace_back(code_of(a), code_of(b));
  const CountryGraph g = CountryGraph::from_edges(nodes, edges);

  require(expo::degree_centrality(g) == oracles::degree_oracle(dense), "degree mismatch");

  const expo::LoadCounts counts = expo::load_centrality_counts(g);
  const oracles::LoadOracle load = oracles::load_oracle(dense);
  require(counts.denominator == load.denominator, "load denominator mismatch");
  unsigned long long interior_total = 0;
  for (std::size_t v = 0; v < counts.numerator.size(); ++v) {
    require(counts.numerator[v] == load.numerator[v], "load numerator mismatch");
    interior_total += counts.numerator[v];
  }
  require(interior_total == load.interior_weight, "load conservation mismatch");

  const auto closeness = expo::closeness_centrality(g);
  const auto closeness_ref = oracles::closeness_oracle(dense);
  for (std::size_t v = 0; v < closeness.size(); ++v)
    require(std::abs(closeness[v] - closeness_ref[v]) < 1e-9, "closeness mismatch");

  if (!edges.empty()) {
    const auto eigen = expo::eigenvector_centrality(g);
    const auto eigen_ref = oracles::eigenvector_oracle(dense);
    for (std::size_t v = 0; v < eigen.size(); ++v)
      require(std::abs(eigen[v] - eigen_ref[v]) < 1e-6, "eigenvector mismatch");
  }
}

void criterion_centrality_oracle() {
  const auto start = std::chrono::steady_clock::now();

  // every connected labeled graph on 1..7 nodes
  long long checked = 0;
  for (int n = 1; n <= 7; ++n) {
    std::vector<std::pair<int, int>> slots;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) slots.emplace_back(a, b);
    const std::uint32_t masks = 1u << slots.size();
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      oracles::DenseGraph dense;
      dense.n = n;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask & (1u << s)) dense.add_edge(slots[s].first, slots[s].second);
      if (!dense.connected()) continue;
      check_graph_against_oracles(dense);
      ++checked;
    }
  }
  // labeled connected graph counts for n = 1..7
  require(checked == 1 + 1 + 4 + 38 + 728 + 26704 + 1866256, "enumeration count off");

  // 200 random connected graphs with up to 12 nodes
  expo::SplitMix64 rng(0xacce0702);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng.bounded(11));
    oracles::DenseGraph dense;
    for (;;) {
      dense = {};
      dense.n = n;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (rng.unit() < 0.3) dense.add_edge(a, b);
      if (dense.connected()) break;
    }
    check_graph_against_oracles(dense);
  }

  require(seconds_since(start) < 120.0, "centrality oracle sweep exceeded 2 minutes");
}

// ---------------------------------------------------------------------------
// criterion 3: excluded-country experiment vs exhaustive enumeration

PathStore five_country_store() {
  MonitorTable table;
  table.insert(MonitorId("m1"), CountryCode("XX"));
  PathStore store(DatasetKind::kGeolocation, table);
  for (const char* p : {"XX>YY", "XX>AA>YY", "XX>AA>BB>ZZ", "XX>BB>ZZ", "XX>ZZ>AA"})
    store.insert(MonitorId("m1"), *CountryPath::parse(p));
  return store;
}

void criterion_excluded_exactness() {
  const PathStore store = five_country_store();
  const CountryCode x("XX");
  const std::vector<CountryCode> targets = store.targets_from(x);
  const std::vector<CountryCode> universe(store.countries().begin(), store.countries().end());
  const int trials = 2000;

  const auto report =
      expo::excluded_experiment(store, x, expo::SizesSpec{0, 3, 1}, trials, 0xc3);

  // independent exhaustive enumeration over every (destination, subset) pair
  std::vector<oracles::Record> records;
  for (const auto& [monitor, paths] : store.by_monitor())
    for (const auto& p : paths) records.push_back({monitor, p});

  for (std::size_t si = 0; si < report.rows.size(); ++si) {
    const auto& row = report.rows[si];
    require(row.none_trials + row.all_trials + row.mixture_trials == row.trials,
            "trial classes do not partition the trial count");

    const int s = row.size;
    double p_none = 0, p_all = 0, p_mix = 0;
    for (const CountryCode& y : targets) {
      std::vector<CountryCode> candidates;
      for (const CountryCode& c : universe)
        if (c != x && c != y) candidates.push_back(c);
      const int m = static_cast<int>(candidates.size());
      const int k = std::min(s, m);

      // walk all C(m, k) subsets
      std::vector<int> pick(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
      long long subsets = 0, none = 0, all = 0, mixture = 0;
      for (;;) {
        std::set<CountryCode> excluded;
        for (int idx : pick) excluded.insert(candidates[static_cast<std::size_t>(idx)]);
        const auto paths = oracles::paths_between(records, x, y);
        long long clean = 0;
        for (const CountryPath& p : paths) {
          bool hit = false;
          for (const CountryCode& c : p.hops())
            if (excluded.count(c)) hit = true;
          if (!hit) ++clean;
        }
        ++subsets;
        if (clean == static_cast<long long>(paths.size()))
          ++none;
        else if (clean == 0)
          ++all;
        else
          ++mixture;

        // next combination
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - k + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
          pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
      }
      p_none += static_cast<double>(none) / static_cast<double>(subsets);
      p_all += static_cast<double>(all) / static_cast<double>(subsets);
      p_mix += static_cast<double>(mixture) / static_cast<double>(subsets);
    }
    p_none /= static_cast<double>(targets.size());
    p_all /= static_cast<double>(targets.size());
    p_mix /= static_cast<double>(targets.size());

    const auto within = [&](double estimate, double exact) {
      const double sigma = std::sqrt(exact * (1.0 - exact) / trials);
      return std::abs(estimate - exact) <= 3.0 * sigma + 1e-12;
    };
    require(within(row.none_ratio(), p_none), "none ratio outside 3 sigma at size " +
                                                  std::to_string(s));
    require(within(row.all_ratio(), p_all), "all ratio outside 3 sigma at size " +
                                                std::to_string(s));
    require(within(row.mixture_trial_ratio(), p_mix),
            "mixture ratio outside 3 sigma at size " + std::to_string(s));
    if (s == 0) {
      require(row.none_ratio() == 1.0, "size 0 must be exactly clean");
      require(row.all_trials == 0 && row.mixture_trials == 0, "size 0 stray classes");
    }
  }
}

// ---------------------------------------------------------------------------
// criterion 4: byte-identical outputs across runs and thread counts (CLI)

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EXPO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

void criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / "expo_acceptance_c4";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto at = [&](const std::string& p) { return (dir / p).string(); };
  const std::string synth_flags =
      " --seed 1234 --countries 40 --routers 3 --monitors 5 --multipath 3";

  require(run_cli("synth --out " + at("d1") + synth_flags) == 0, "synth run 1 failed");
  require(run_cli("synth --out " + at("d2") + synth_flags) == 0, "synth run 2 failed");
  for (const char* name :
       {"traces.tsv", "bgp.tsv", "monitors.tsv", "geo.tsv", "asreg.tsv", "ground_truth.tsv"})
    require(expo::read_file(dir / "d1" / name) == expo::read_file(dir / "d2" / name),
            std::string("synth output differs: ") + name);

  const std::string ingest_geo = "ingest --dataset geo --monitors " + at("d1/monitors.tsv") +
                                 " --geo " + at("d1/geo.tsv") + " " + at("d1/traces.tsv");
  require(run_cli(ingest_geo + " --threads 1 --out " + at("geo_t1.store")) == 0, "ingest t1");
  require(run_cli(ingest_geo + " --threads 8 --out " + at("geo_t8.store")) == 0, "ingest t8");
  require(run_cli(ingest_geo + " --threads 8 --out " + at("geo_t8b.store")) == 0, "ingest t8b");
  require(expo::read_file(at("geo_t1.store")) == expo::read_file(at("geo_t8.store")),
          "geo store differs across thread counts");
  require(expo::read_file(at("geo_t8.store")) == expo::read_file(at("geo_t8b.store")),
          "geo store differs across runs");

  const std::string ingest_reg = "ingest --dataset reg --monitors " + at("d1/monitors.tsv") +
                                 " --asreg " + at("d1/asreg.tsv") + " " + at("d1/bgp.tsv");
  require(run_cli(ingest_reg + " --threads 1 --out " + at("reg_t1.store")) == 0, "reg t1");
  require(run_cli(ingest_reg + " --threads 8 --out " + at("reg_t8.store")) == 0, "reg t8");
  require(expo::read_file(at("reg_t1.store")) == expo::read_file(at("reg_t8.store")),
          "reg store differs across thread counts");

  const std::string store = at("geo_t1.store");
  require(run_cli("generalize --store " + store + " --threads 1 --out " + at("g1")) == 0, "g1");
  require(run_cli("generalize --store " + store + " --threads 8 --out " + at("g8")) == 0, "g8");
  require(expo::read_file(at("g1/generalization.csv")) == expo::read_file(at("g8/generalization.csv")),
          "generalization.csv differs");

  require(run_cli("involved --store " + store + " --threads 1 --out " + at("i1")) == 0, "i1");
  require(run_cli("involved --store " + store + " --threads 8 --out " + at("i8")) == 0, "i8");
  require(expo::read_file(at("i1/involved_points.csv")) == expo::read_file(at("i8/involved_points.csv")),
          "involved_points.csv differs");
  require(expo::read_file(at("i1/involved_curves.csv")) == expo::read_file(at("i8/involved_curves.csv")),
          "involved_curves.csv differs");

  const std::string exclude_flags = " --sizes 0:30:10 --trials 300 --seed 77";
  require(run_cli("exclude --store " + store + exclude_flags + " --threads 1 --out " + at("e1")) == 0,
          "e1");
  require(run_cli("exclude --store " + store + exclude_flags + " --threads 8 --out " + at("e8")) == 0,
          "e8");
  require(run_cli("exclude --store " + store + exclude_flags + " --threads 8 --out " + at("e8b")) == 0,
          "e8b");
  require(expo::read_file(at("e1/excluded.csv")) == expo::read_file(at("e8/excluded.csv")),
          "excluded.csv differs across thread counts");
  require(expo::read_file(at("e8/excluded.csv")) == expo::read_file(at("e8b/excluded.csv")),
          "excluded.csv differs across runs");

  require(run_cli("centrality --store " + store + " --threads 1 --out " + at("c1")) == 0, "c1");
  require(run_cli("centrality --store " + store + " --threads 8 --out " + at("c8")) == 0, "c8");
  require(expo::read_file(at("c1/centrality.csv")) == expo::read_file(at("c8/centrality.csv")),
          "centrality.csv differs");

  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// criterion 5: degree centrality vs mean involved countries correlates
// positively across the synthetic ensemble

void criterion_centrality_exposure_correlation() {
  int positive = 0;
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SynthCorpus corpus = expo::generate_corpus(ensemble_config(seed));
    const PathStore store = ingest_corpus(corpus, DatasetKind::kGeolocation);
    const CountryGraph graph = expo::build_graph(store);
    const auto rows = expo::centrality_scatter(store, graph);

    std::vector<double> degree, involved;
    for (const auto& row : rows) {
      degree.push_back(static_cast<double>(row.degree));
      involved.push_back(row.mean_involved);
    }
    const double rho = oracles::spearman(degree, involved);
    if (rho > 0.0) ++positive;
    total += rho;
  }
  const double mean = total / 20.0;
  require(positive >= 18, "positive correlation in only " + std::to_string(positive) + "/20");
  require(mean >= 0.3, "ensemble mean correlation " + std::to_string(mean) + " below 0.3");
}

// ---------------------------------------------------------------------------
// criterion 6: avoidance probability decays monotonically

void criterion_avoidance_decay() {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SynthCorpus corpus = expo::generate_corpus(ensemble_config(seed));
    const PathStore store = ingest_corpus(corpus, DatasetKind::kGeolocation);
    const CountryCode x = *store.countries().begin();
    const std::vector<CountryCode> targets = store.targets_from(x);
    require(!targets.empty(), "ensemble source has no targets");
    const int n_universe = static_cast<int>(store.countries().size());
    const expo::SizesSpec sizes{0, 36, 3};

    // exact none-excluded probability: mean over destinations of the
    // hypergeometric chance that the excluded sample avoids involved(x, y)
    std::vector<double> exact;
    {
      std::vector<double> per_target(targets.size(), 1.0);
      std::vector<int> k_involved;
      for (const CountryCode& y : targets)
        k_involved.push_back(static_cast<int>(expo::involved(store, x, y).size()));
      int s_prev = 0;
      for (int s : sizes.values()) {
        for (std::size_t t = 0; t < targets.size(); ++t) {
          const int n = n_universe - 2;
          const int k = k_involved[t];
          for (int step = s_prev; step < std::min(s, n); ++step)
            per_target[t] *= std::max(0.0, static_cast<double>(n - k - step)) /
                             static_cast<double>(n - step);
        }
        double mean = 0.0;
        for (double p : per_target) mean += p;
        exact.push_back(mean / static_cast<double>(targets.size()));
        s_prev = std::min(s, n_universe - 2);
      }
    }
    for (std::size_t i = 1; i < exact.size(); ++i)
      require(exact[i] <= exact[i - 1] + 1e-12, "exact avoidance probability increased");

    const auto report = expo::excluded_experiment(store, x, sizes, 5000, 0xdecaf + seed);
    for (std::size_t i = 1; i < report.rows.size(); ++i)
      require(report.rows[i].none_ratio() <= report.rows[i - 1].none_ratio() + 0.02,
              "Monte Carlo avoidance curve rose by more than 0.02 (seed " +
                  std::to_string(seed) + ")");
  }
}

// ---------------------------------------------------------------------------
// criterion 7: generalization ratio grows with monitor count

void criterion_generalization_growth() {
  std::vector<CountryPath> pool;
  for (int i = 0; i < 200; ++i)
    pool.push_back(*CountryPath::parse("QQ>" + code_of(i).str()));

  const int resamples = 300;
  std::vector<double> mean_by_count;
  for (int monitors = 2; monitors <= 20; ++monitors) {
    double total = 0.0;
    for (int resample = 0; resample < resamples; ++resample) {
      expo::SplitMix64 rng(expo::derive_stream(
          {0xc7, static_cast<std::uint64_t>(monitors), static_cast<std::uint64_t>(resample)}));
      MonitorTable table;
      for (int m = 0; m < monitors; ++m)
        table.insert(MonitorId("mon" + std::to_string(m)), CountryCode("QQ"));
      PathStore store(DatasetKind::kGeolocation, table);
      std::map<MonitorId, std::set<CountryPath>> by_monitor;
      for (int m = 0; m < monitors; ++m) {
        const MonitorId id("mon" + std::to_string(m));
        for (std::size_t idx : expo::sample_indices(pool.size(), 50, rng)) {
          store.insert(id, pool[idx]);
          by_monitor[id].insert(pool[idx]);
        }
      }
      const auto report = expo::generalization_report(store);
      require(report.rows.size() == 1, "expected a single country row");
      const double mean_ratio = report.rows[0].mean_ratio;
      if (resample < 3)
        require(std::abs(mean_ratio - oracles::generalization_mean(by_monitor)) < 1e-12,
                "leave-one-out oracle mismatch");
      total += mean_ratio;
    }
    mean_by_count.push_back(total / resamples);
  }

  for (std::size_t i = 1; i < mean_by_count.size(); ++i)
    require(mean_by_count[i] > mean_by_count[i - 1],
            "mean generalization ratio not strictly increasing at " + std::to_string(i + 2) +
                " monitors");
}

// ---------------------------------------------------------------------------
// criterion 8: pipeline reproduces synth ground truth exactly

void criterion_pipeline_fidelity() {
  std::vector<SynthConfig> configs;
  {
    SynthConfig chain;
    chain.n_countries = 3;
    chain.n_routers_per_country = 1;
    chain.n_monitors = 3;
    chain.seed = 2;
    configs.push_back(chain);
  }
  {
    SynthConfig mid;
    mid.n_countries = 12;
    mid.n_routers_per_country = 3;
    mid.n_monitors = 8;
    mid.multipath_factor = 2;
    mid.seed = 21;
    configs.push_back(mid);
  }
  {
    SynthConfig determinism;
    determinism.n_countries = 40;
    determinism.n_routers_per_country = 3;
    determinism.n_monitors = 5;
    determinism.multipath_factor = 3;
    determinism.seed = 1234;
    configs.push_back(determinism);
  }
  {
    SynthConfig wide;
    wide.n_countries = 60;
    wide.n_routers_per_country = 2;
    wide.n_monitors = 30;
    wide.multipath_factor = 2;
    wide.attachment_exponent = 1.0;
    wide.seed = 99;
    configs.push_back(wide);
  }
  configs.push_back(ensemble_config(1));

  for (const SynthConfig& cfg : configs) {
    const SynthCorpus corpus = expo::generate_corpus(cfg);
    const auto truth = ground_truth_set(corpus);
    require(!truth.empty(), "empty ground truth");
    require(store_record_set(ingest_corpus(corpus, DatasetKind::kGeolocation)) == truth,
            "geolocation ingest diverged from ground truth (seed " +
                std::to_string(cfg.seed) + ")");
    require(store_record_set(ingest_corpus(corpus, DatasetKind::kRegistration)) == truth,
            "registration ingest diverged from ground truth (seed " +
                std::to_string(cfg.seed) + ")");
  }
}

// ---------------------------------------------------------------------------
// criterion 9: ingest 1e6 trace lines in under 60s and 2 GB, single thread

long long peak_rss_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream in(line.substr(6));
      long long kb = 0;
      in >> kb;
      return kb;
    }
  }
  return -1;
}

void criterion_ingest_performance() {
  SynthConfig cfg;
  cfg.n_countries = 250;
  cfg.n_routers_per_country = 4;
  cfg.n_monitors = 400;
  cfg.paths_per_monitor = 249;
  cfg.multipath_factor = 1;
  cfg.attachment_exponent = 1.2;
  cfg.seed = 9;

  const fs::path dir = fs::temp_directory_path() / "expo_acceptance_c9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path big = dir / "traces_1m.tsv";
  MonitorTable monitors;
  expo::GeoTable geo;
  {
    const SynthCorpus corpus = expo::generate_corpus(cfg);
    monitors = expo::parse_monitor_table(corpus.monitors_tsv);
    geo = expo::GeoTable::parse(corpus.geo_tsv);

    // cycle the distinct trace lines up to exactly one million records
    std::vector<std::string> lines;
    std::istringstream in(corpus.traces_tsv);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#') lines.push_back(line);
    require(lines.size() > 50000, "perf corpus unexpectedly small");
    std::ofstream out(big);
    for (long long written = 0; written < 1000000; ++written)
      out << lines[static_cast<std::size_t>(written % lines.size())] << "\n";
  }

  PathStore store(DatasetKind::kGeolocation, monitors);
  const auto start = std::chrono::steady_clock::now();
  const expo::IngestStats stats =
      expo::ingest_file(store, big, &geo, nullptr, expo::ErrorPolicy::kAbort, 1);
  const double elapsed = seconds_since(start);

  require(stats.lines == 1000000, "expected exactly 1e6 records");
  require(stats.parse_errors == 0 && stats.discarded == 0, "perf corpus should be clean");
  require(stats.inserted > 50000, "distinct path count unexpectedly small");
  require(elapsed < 60.0,
          "ingest took " + std::to_string(elapsed) + "s (budget 60s)");
  const long long rss = peak_rss_kb();
  require(rss > 0 && rss < 2LL * 1024 * 1024,
          "peak RSS " + std::to_string(rss) + " kB exceeds 2 GB");

  std::cerr << "    [ingest 1e6 lines: " << elapsed << "s, " << stats.inserted
            << " distinct, peak rss " << rss / 1024 << " MB]\n";
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  const char* label;
  void (*fn)();
};

const Criterion kCriteria[] = {
    {1, "involved sets match brute-force oracle", criterion_involved_oracle},
    {2, "centralities match exhaustive oracles", criterion_centrality_oracle},
    {3, "excluded experiment matches exhaustive enumeration", criterion_excluded_exactness},
    {4, "byte-identical outputs across runs and thread counts", criterion_determinism},
    {5, "degree centrality correlates with exposure", criterion_centrality_exposure_correlation},
    {6, "avoidance probability decays monotonically", criterion_avoidance_decay},
    {7, "generalization ratio grows with monitor count", criterion_generalization_growth},
    {8, "pipeline reproduces synth ground truth", criterion_pipeline_fidelity},
    {9, "1e6-line ingest under 60s and 2GB", criterion_ingest_performance},
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  if (argc > 1) selected = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& criterion : kCriteria) {
    if (selected != 0 && criterion.id != selected) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
      criterion.fn();
    } catch (const Failure& f) {
      verdict = "FAIL";
      detail = f.what;
      ++failures;
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = std::string("unexpected error: ") + e.what();
      ++failures;
    }
    std::cout << verdict << " criterion " << criterion.id << ": " << criterion.label << " ("
              << expo::format_fixed(seconds_since(start), 1) << "s)";
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << "\n" << std::flush;
  }
  return failures;
}
