// expo: country-level route exposure toolkit.
//
// Pipeline: synth (optional) -> ingest -> store file -> generalize /
// involved / exclude / centrality, each emitting CSV reports plus a
// machine-readable run summary. All outputs are byte-deterministic for
// fixed inputs, flags, and seeds, at any --threads value.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "expo/country_graph.hpp"
#include "expo/country_mapping.hpp"
#include "expo/csv.hpp"
#include "expo/experiments.hpp"
#include "expo/ingest.hpp"
#include "expo/path_store.hpp"
#include "expo/pipeline.hpp"
#include "expo/synth.hpp"
#include "expo/trace_model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_json(const fs::path& path, const json& j) {
  expo::write_file_atomic(path, j.dump(2) + "\n");
}

// Explicit flag values must be well-formed country codes; "all" expands to
// every country with at least one recorded outgoing path.
std::vector<expo::CountryCode> resolve_sources(const std::vector<std::string>& flags,
                                               const expo::PathStore& store) {
  if (flags.size() == 1 && flags[0] == "all") {
    std::vector<expo::CountryCode> out;
    for (const expo::CountryCode& c : store.countries())
      if (!store.targets_from(c).empty()) out.push_back(c);
    return out;
  }
  std::vector<expo::CountryCode> out;
  for (const std::string& flag : flags) {
    const auto code = expo::CountryCode::parse(flag);
    if (!code) throw UsageError("bad --source value '" + flag + "'");
    out.push_back(*code);
  }
  return out;
}

void validate_source_flags(const std::vector<std::string>& flags) {
  if (flags.size() == 1 && flags[0] == "all") return;
  for (const std::string& flag : flags)
    if (!expo::CountryCode::parse(flag)) throw UsageError("bad --source value '" + flag + "'");
}

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 0;
  int countries = 40;
  int routers = 3;
  int monitors = 5;
  int paths = 256;
  int multipath = 1;
  double exponent = 1.5;
};

int run_synth(const SynthArgs& args) {
  expo::SynthConfig cfg;
  cfg.n_countries = args.countries;
  cfg.n_routers_per_country = args.routers;
  cfg.n_monitors = args.monitors;
  cfg.paths_per_monitor = args.paths;
  cfg.multipath_factor = args.multipath;
  cfg.attachment_exponent = args.exponent;
  cfg.seed = args.seed;
  cfg.validate();

  const expo::SynthCorpus corpus = expo::generate_corpus(cfg);
  const fs::path dir(args.out);
  expo::write_corpus(corpus, dir);

  json summary = {
      {"command", "synth"},
      {"seed", cfg.seed},
      {"countries", cfg.n_countries},
      {"routers", corpus.router_count},
      {"router_edges", corpus.router_edge_count},
      {"monitors", cfg.n_monitors},
      {"router_graph_connected", corpus.router_graph_connected},
  };
  write_json(dir / "synth_summary.json", summary);
  std::cerr << "synth: wrote corpus to " << dir.string() << "\n";
  return kExitOk;
}

struct IngestArgs {
  std::string dataset;
  std::string out;
  std::string monitors_file;
  std::string geo_file;
  std::string asreg_file;
  std::string remap_file;
  std::string on_error = "skip";
  int threads = 1;
  std::vector<std::string> inputs;
};

int run_ingest(const IngestArgs& args) {
  const auto kind = expo::dataset_from_label(args.dataset);
  if (!kind) throw UsageError("--dataset must be geo or reg");
  if (args.on_error != "skip" && args.on_error != "abort")
    throw UsageError("--on-error must be skip or abort");
  if (*kind == expo::DatasetKind::kGeolocation && args.geo_file.empty())
    throw UsageError("--dataset geo requires --geo");
  if (*kind == expo::DatasetKind::kRegistration && args.asreg_file.empty())
    throw UsageError("--dataset reg requires --asreg");
  const expo::ErrorPolicy policy =
      args.on_error == "skip" ? expo::ErrorPolicy::kSkip : expo::ErrorPolicy::kAbort;

  std::optional<expo::CountryRemap> remap;
  if (!args.remap_file.empty()) remap = expo::load_country_remap(args.remap_file);
  const expo::CountryRemap* remap_ptr = remap ? &*remap : nullptr;

  const expo::MonitorTable monitors = expo::load_monitor_table(args.monitors_file, remap_ptr);
  std::optional<expo::GeoTable> geo;
  std::optional<expo::AsRegistry> registry;
  if (!args.geo_file.empty()) geo = expo::load_geo_table(args.geo_file, remap_ptr);
  if (!args.asreg_file.empty()) registry = expo::load_as_registry(args.asreg_file, remap_ptr);

  expo::PathStore store(*kind, monitors);
  expo::IngestStats stats;
  for (const std::string& input : args.inputs)
    stats += expo::ingest_file(store, input, geo ? &*geo : nullptr,
                               registry ? &*registry : nullptr, policy, args.threads);

  const fs::path out(args.out);
  expo::save_store(store, out);
  json summary = {
      {"command", "ingest"},
      {"dataset", std::string(expo::dataset_label(*kind))},
      {"inputs", args.inputs},
      {"records", stats.lines},
      {"parse_errors", stats.parse_errors},
      {"discarded", stats.discarded},
      {"monitor_unknown", stats.monitor_unknown},
      {"source_mismatch", stats.source_mismatch},
      {"duplicates", stats.duplicates},
      {"inserted", stats.inserted},
      {"monitors", store.monitors().size()},
  };
  write_json(fs::path(args.out + ".summary.json"), summary);
  std::cerr << "ingest: " << stats.inserted << " distinct paths from " << stats.lines
            << " records (" << stats.duplicates << " duplicates, " << stats.discarded
            << " discarded, " << stats.parse_errors << " parse errors)\n";
  return kExitOk;
}

struct ReportArgs {
  std::string store;
  std::string out;
  std::vector<std::string> sources{"all"};
  std::string sizes = "0:190:10";
  int trials = 500;
  std::uint64_t seed = 0;
  int threads = 1;
};

int run_generalize(const ReportArgs& args) {
  const expo::PathStore store = expo::load_store(args.store);
  const expo::GeneralizationReport report = expo::generalization_report(store, args.threads);
  const fs::path dir(args.out);
  fs::create_directories(dir);
  expo::write_file_atomic(dir / "generalization.csv", expo::render_generalization_csv(report));
  write_json(dir / "generalize_summary.json",
             json{{"command", "generalize"},
                  {"rows", report.rows.size()},
                  {"skipped_single_monitor", report.skipped_single_monitor},
                  {"skipped_monitor_without_paths", report.skipped_monitor_without_paths}});
  std::cerr << "generalize: " << report.rows.size() << " countries\n";
  return kExitOk;
}

int run_involved(const ReportArgs& args) {
  validate_source_flags(args.sources);
  const expo::PathStore store = expo::load_store(args.store);
  const std::vector<expo::CountryCode> sources = resolve_sources(args.sources, store);
  for (const expo::CountryCode& source : sources)
    if (store.targets_from(source).empty())
      throw expo::NoTargetsError{};

  std::vector<std::optional<expo::InvolvedReport>> slots(sources.size());
  expo::parallel_for(sources.size(), args.threads,
                     [&](std::size_t i) { slots[i] = expo::involved_report(store, sources[i]); });
  std::vector<expo::InvolvedReport> reports;
  reports.reserve(slots.size());
  for (auto& slot : slots) reports.push_back(std::move(*slot));

  const fs::path dir(args.out);
  fs::create_directories(dir);
  expo::write_file_atomic(dir / "involved_points.csv", expo::render_involved_points_csv(reports));
  expo::write_file_atomic(dir / "involved_curves.csv", expo::render_involved_curves_csv(reports));
  write_json(dir / "involved_summary.json",
             json{{"command", "involved"}, {"sources", sources.size()}});
  std::cerr << "involved: " << sources.size() << " source countries\n";
  return kExitOk;
}

int run_exclude(const ReportArgs& args) {
  validate_source_flags(args.sources);
  const auto sizes = expo::SizesSpec::parse(args.sizes);
  if (!sizes) throw UsageError("bad --sizes value '" + args.sizes + "' (want min:max:step)");
  if (args.trials < 1) throw UsageError("--trials must be positive");

  const expo::PathStore store = expo::load_store(args.store);
  const std::vector<expo::CountryCode> sources = resolve_sources(args.sources, store);

  std::vector<expo::ExcludedReport> reports;
  for (const expo::CountryCode& source : sources)
    reports.push_back(
        expo::excluded_experiment(store, source, *sizes, args.trials, args.seed, args.threads));

  const fs::path dir(args.out);
  fs::create_directories(dir);
  expo::write_file_atomic(dir / "excluded.csv", expo::render_excluded_csv(reports));
  write_json(dir / "exclude_summary.json",
             json{{"command", "exclude"},
                  {"sources", sources.size()},
                  {"sizes", args.sizes},
                  {"trials_per_size", args.trials},
                  {"seed", args.seed}});
  std::cerr << "exclude: " << sources.size() << " source countries\n";
  return kExitOk;
}

int run_centrality(const ReportArgs& args) {
  const expo::PathStore store = expo::load_store(args.store);
  const expo::CountryGraph graph = expo::build_graph(store);
  const std::vector<expo::ScatterRow> rows = expo::centrality_scatter(store, graph, args.threads);
  const fs::path dir(args.out);
  fs::create_directories(dir);
  expo::write_file_atomic(dir / "centrality.csv", expo::render_centrality_csv(rows));
  write_json(dir / "centrality_summary.json",
             json{{"command", "centrality"},
                  {"nodes", graph.size()},
                  {"edges", graph.edge_count()}});
  std::cerr << "centrality: " << graph.size() << " countries, " << graph.edge_count()
            << " edges\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expo: country-level route exposure toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
  synth->add_option("--out", synth_args.out, "output directory")->required();
  synth->add_option("--seed", synth_args.seed, "generator seed")->required();
  synth->add_option("--countries", synth_args.countries, "number of countries (3..256)");
  synth->add_option("--routers", synth_args.routers, "routers per country");
  synth->add_option("--monitors", synth_args.monitors, "number of monitors");
  synth->add_option("--paths", synth_args.paths, "destination countries per monitor");
  synth->add_option("--multipath", synth_args.multipath, "distinct routes per destination");
  synth->add_option("--exponent", synth_args.exponent, "preferential attachment exponent");

  IngestArgs ingest_args;
  CLI::App* ingest = app.add_subcommand("ingest", "convert trace/bgp files into a path store");
  ingest->add_option("--dataset", ingest_args.dataset, "geo or reg")->required();
  ingest->add_option("--out", ingest_args.out, "store file to write")->required();
  ingest->add_option("--monitors", ingest_args.monitors_file, "monitor table file")->required();
  ingest->add_option("--geo", ingest_args.geo_file, "geolocation table file");
  ingest->add_option("--asreg", ingest_args.asreg_file, "AS registry file");
  ingest->add_option("--eu-remap", ingest_args.remap_file, "country remap file");
  ingest->add_option("--on-error", ingest_args.on_error, "skip or abort (default skip)");
  ingest->add_option("--threads", ingest_args.threads, "worker threads")->check(CLI::Range(1, 4096));
  ingest->add_option("inputs", ingest_args.inputs, "input trace/bgp files")->required();

  ReportArgs generalize_args;
  CLI::App* generalize = app.add_subcommand("generalize", "per-country monitor generalization");
  generalize->add_option("--store", generalize_args.store, "path store file")->required();
  generalize->add_option("--out", generalize_args.out, "report directory")->required();
  generalize->add_option("--threads", generalize_args.threads, "worker threads")
      ->check(CLI::Range(1, 4096));

  ReportArgs involved_args;
  CLI::App* involved = app.add_subcommand("involved", "involved countries vs distance");
  involved->add_option("--store", involved_args.store, "path store file")->required();
  involved->add_option("--out", involved_args.out, "report directory")->required();
  involved->add_option("--source", involved_args.sources, "source country (repeatable) or all");
  involved->add_option("--threads", involved_args.threads, "worker threads")
      ->check(CLI::Range(1, 4096));

  ReportArgs exclude_args;
  CLI::App* exclude = app.add_subcommand("exclude", "excluded-country avoidance Monte Carlo");
  exclude->add_option("--store", exclude_args.store, "path store file")->required();
  exclude->add_option("--out", exclude_args.out, "report directory")->required();
  exclude->add_option("--source", exclude_args.sources, "source country (repeatable) or all");
  exclude->add_option("--sizes", exclude_args.sizes, "excluded-list sizes min:max:step");
  exclude->add_option("--trials", exclude_args.trials, "trials per size");
  exclude->add_option("--seed", exclude_args.seed, "experiment seed")->required();
  exclude->add_option("--threads", exclude_args.threads, "worker threads")
      ->check(CLI::Range(1, 4096));

  ReportArgs centrality_args;
  CLI::App* centrality = app.add_subcommand("centrality", "country graph centrality vs exposure");
  centrality->add_option("--store", centrality_args.store, "path store file")->required();
  centrality->add_option("--out", centrality_args.out, "report directory")->required();
  centrality->add_option("--threads", centrality_args.threads, "worker threads")
      ->check(CLI::Range(1, 4096));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (ingest->parsed()) return run_ingest(ingest_args);
    if (generalize->parsed()) return run_generalize(generalize_args);
    if (involved->parsed()) return run_involved(involved_args);
    if (exclude->parsed()) return run_exclude(exclude_args);
    if (centrality->parsed()) return run_centrality(centrality_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
