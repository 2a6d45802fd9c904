#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "expo/csv.hpp"
#include "expo/rng.hpp"
#include "expo/trace_model.hpp"

namespace expo {

struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& why) : std::invalid_argument(why) {}
};

// Deterministic corpus generator: a preferential-attachment country topology
// with a router ring per country, random border links per country edge, and
// shortest-plus-deviation routes from each monitor. Every random choice is
// keyed by (seed, stage, indices), so equal configs give byte-equal corpora.
struct SynthConfig {
  int n_countries = 40;           // 3..256 (one /16 from 10.0.0.0/8 each)
  int n_routers_per_country = 3;  // 1..60000
  double attachment_exponent = 1.5;  // 0 = uniform attachment, higher = hubbier
  int n_monitors = 5;
  int paths_per_monitor = 256;    // destination countries per monitor, capped at n-1
  int multipath_factor = 1;       // distinct routes attempted per destination
  std::uint64_t seed = 0;

  void validate() const {
    if (n_countries < 3 || n_countries > 256) throw ConfigError("n_countries must be in 3..256");
    if (n_routers_per_country < 1 || n_routers_per_country > 60000)
      throw ConfigError("n_routers_per_country must be in 1..60000");
    if (n_monitors < 1) throw ConfigError("n_monitors must be positive");
    if (static_cast<long long>(n_monitors) >
        static_cast<long long>(n_countries) * n_routers_per_country)
      throw ConfigError("n_monitors exceeds total routers");
    if (paths_per_monitor < 1) throw ConfigError("paths_per_monitor must be positive");
    if (multipath_factor < 1) throw ConfigError("multipath_factor must be positive");
    if (!(attachment_exponent >= 0.0) || !std::isfinite(attachment_exponent))
      throw ConfigError("attachment_exponent must be finite and non-negative");
  }
};

struct SynthCorpus {
  std::string traces_tsv;
  std::string bgp_tsv;
  std::string monitors_tsv;
  std::string geo_tsv;
  std::string asreg_tsv;
  std::string ground_truth_tsv;

  int router_count = 0;
  int router_edge_count = 0;
  bool router_graph_connected = false;
};

namespace synth_detail {

inline std::string country_code_str(int index) {
  return {static_cast<char>('A' + index / 26), static_cast<char>('A' + index % 26)};
}

inline std::uint32_t router_ip(int country, int router) {
  return (10u << 24) | (static_cast<std::uint32_t>(country) << 16) |
         static_cast<std::uint32_t>(router + 1);
}

inline std::string ip_str(std::uint32_t ip) {
  return std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 0xff) + "." +
         std::to_string((ip >> 8) & 0xff) + "." + std::to_string(ip & 0xff);
}

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

struct RouterGraph {
  std::vector<std::vector<int>> adj;  // sorted neighbor ids
  int edge_count = 0;

  bool connected() const {
    if (adj.empty()) return true;
    std::vector<char> seen(adj.size(), 0);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    std::size_t visited = 1;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop();
      for (int w : adj[static_cast<std::size_t>(v)])
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++visited;
          queue.push(w);
        }
    }
    return visited == adj.size();
  }
};

// Dijkstra with unit edge weights plus per-edge penalties. Ties break on
// node id via the heap ordering, so routes are reproducible.
struct ShortestPaths {
  std::vector<std::uint64_t> dist;
  std::vector<int> parent;
};

inline ShortestPaths dijkstra(const RouterGraph& g, int src,
                              const std::unordered_map<std::uint64_t, std::uint32_t>& penalty) {
  constexpr std::uint64_t kInf = ~std::uint64_t{0};
  ShortestPaths sp;
  sp.dist.assign(g.adj.size(), kInf);
  sp.parent.assign(g.adj.size(), -1);
  sp.dist[static_cast<std::size_t>(src)] = 0;
  using Item = std::pair<std::uint64_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.push({0, src});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d != sp.dist[static_cast<std::size_t>(v)]) continue;
    for (int w : g.adj[static_cast<std::size_t>(v)]) {
      std::uint64_t weight = 1;
      if (!penalty.empty()) {
        auto it = penalty.find(edge_key(v, w));
        if (it != penalty.end()) weight += it->second;
      }
      if (d + weight < sp.dist[static_cast<std::size_t>(w)]) {
        sp.dist[static_cast<std::size_t>(w)] = d + weight;
        sp.parent[static_cast<std::size_t>(w)] = v;
        heap.push({d + weight, w});
      }
    }
  }
  return sp;
}

inline std::vector<int> route_to(const ShortestPaths& sp, int dst) {
  std::vector<int> route;
  for (int v = dst; v != -1; v = sp.parent[static_cast<std::size_t>(v)]) route.push_back(v);
  std::reverse(route.begin(), route.end());
  return route;
}

}  // namespace synth_detail

inline SynthCorpus generate_corpus(const SynthConfig& cfg) {
  using namespace synth_detail;
  cfg.validate();

  const int n = cfg.n_countries;
  const int routers = cfg.n_routers_per_country;
  const int total_routers = n * routers;
  const auto country_of = [&](int router_id) { return router_id / routers; };

  enum Stage : std::uint64_t {
    kCountries = 1,
    kBorders = 2,
    kMonitors = 3,
    kDestinations = 4,
    kRoutes = 5,
  };

  // Country topology: country 0 starts, each later country attaches with up
  // to two weighted draws (weight (degree+1)^exponent) over earlier ones.
  std::vector<std::set<int>> country_adj(static_cast<std::size_t>(n));
  std::vector<int> country_degree(static_cast<std::size_t>(n), 0);
  {
    SplitMix64 rng(derive_stream({cfg.seed, kCountries}));
    for (int i = 1; i < n; ++i) {
      const int draws = i == 1 ? 1 : 2;
      for (int d = 0; d < draws; ++d) {
        double total = 0.0;
        for (int j = 0; j < i; ++j)
          total += std::pow(static_cast<double>(country_degree[static_cast<std::size_t>(j)] + 1),
                            cfg.attachment_exponent);
        const double r = rng.unit() * total;
        double acc = 0.0;
        int chosen = i - 1;
        for (int j = 0; j < i; ++j) {
          acc += std::pow(static_cast<double>(country_degree[static_cast<std::size_t>(j)] + 1),
                          cfg.attachment_exponent);
          if (r < acc) {
            chosen = j;
            break;
          }
        }
        if (country_adj[static_cast<std::size_t>(i)].insert(chosen).second) {
          country_adj[static_cast<std::size_t>(chosen)].insert(i);
          ++country_degree[static_cast<std::size_t>(i)];
          ++country_degree[static_cast<std::size_t>(chosen)];
        }
      }
    }
  }

  // Router graph: ring within each country, one or two random border links
  // per country edge.
  RouterGraph graph;
  graph.adj.resize(static_cast<std::size_t>(total_routers));
  std::set<std::pair<int, int>> router_edges;
  const auto add_edge = [&](int a, int b) {
    if (a == b) return;
    if (router_edges.insert({std::min(a, b), std::max(a, b)}).second) {
      graph.adj[static_cast<std::size_t>(a)].push_back(b);
      graph.adj[static_cast<std::size_t>(b)].push_back(a);
    }
  };
  for (int c = 0; c < n; ++c) {
    const int base_id = c * routers;
    for (int r = 0; r + 1 < routers; ++r) add_edge(base_id + r, base_id + r + 1);
    if (routers > 2) add_edge(base_id + routers - 1, base_id);  // close the ring
  }
  for (int a = 0; a < n; ++a) {
    for (int b : country_adj[static_cast<std::size_t>(a)]) {
      if (b < a) continue;
      SplitMix64 rng(derive_stream({cfg.seed, kBorders, static_cast<std::uint64_t>(a),
                                    static_cast<std::uint64_t>(b)}));
      const int links = 1 + static_cast<int>(rng.bounded(2));
      for (int k = 0; k < links; ++k)
        add_edge(a * routers + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(routers))),
                 b * routers + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(routers))));
    }
  }
  for (auto& nb : graph.adj) std::sort(nb.begin(), nb.end());
  graph.edge_count = static_cast<int>(router_edges.size());

  // Monitors: a sorted sample of routers, ids zero-padded for stable sorting.
  std::vector<int> monitor_routers;
  {
    SplitMix64 rng(derive_stream({cfg.seed, kMonitors}));
    for (std::size_t idx : sample_indices(static_cast<std::size_t>(total_routers),
                                          static_cast<std::size_t>(cfg.n_monitors), rng))
      monitor_routers.push_back(static_cast<int>(idx));
    std::sort(monitor_routers.begin(), monitor_routers.end());
  }
  const auto monitor_name = [&](int index) {
    std::string digits = std::to_string(index + 1);
    const std::size_t width = std::max<std::size_t>(4, std::to_string(cfg.n_monitors).size());
    return "m" + std::string(width - std::min(width, digits.size()), '0') + digits;
  };

  SynthCorpus corpus;
  corpus.router_count = total_routers;
  corpus.router_edge_count = graph.edge_count;
  corpus.router_graph_connected = graph.connected();
  if (!corpus.router_graph_connected)
    throw std::logic_error("generated router graph is not connected");

  const std::string banner = "# synth corpus seed=" + std::to_string(cfg.seed) +
                             " countries=" + std::to_string(n) +
                             " routers_per_country=" + std::to_string(routers) +
                             " monitors=" + std::to_string(cfg.n_monitors) +
                             " multipath=" + std::to_string(cfg.multipath_factor) + "\n";
  corpus.traces_tsv = banner;
  corpus.bgp_tsv = banner;

  for (int i = 0; i < cfg.n_monitors; ++i) {
    corpus.monitors_tsv += monitor_name(i);
    corpus.monitors_tsv.push_back('\t');
    corpus.monitors_tsv += country_code_str(country_of(monitor_routers[static_cast<std::size_t>(i)]));
    corpus.monitors_tsv.push_back('\n');
  }
  for (int c = 0; c < n; ++c) {
    corpus.geo_tsv += "10." + std::to_string(c) + ".0.0/16\t" + country_code_str(c) + "\n";
    // a more specific block now and then, so longest-prefix matching earns its keep
    if (c % 5 == 0)
      corpus.geo_tsv += "10." + std::to_string(c) + ".7.0/24\t" + country_code_str(c) + "\n";
    corpus.asreg_tsv += std::to_string(64512 + c) + "\t" + country_code_str(c) + "\n";
  }

  std::set<std::pair<std::string, std::string>> ground_truth;
  std::uint64_t route_ordinal = 0;

  for (int mi = 0; mi < cfg.n_monitors; ++mi) {
    const int src = monitor_routers[static_cast<std::size_t>(mi)];
    const int src_country = country_of(src);
    const ShortestPaths base = dijkstra(graph, src, {});

    // destination countries, sorted, optionally sampled down
    std::vector<int> dests;
    for (int c = 0; c < n; ++c)
      if (c != src_country) dests.push_back(c);
    if (cfg.paths_per_monitor < static_cast<int>(dests.size())) {
      SplitMix64 rng(derive_stream({cfg.seed, kDestinations, static_cast<std::uint64_t>(mi)}));
      std::vector<int> picked;
      for (std::size_t idx :
           sample_indices(dests.size(), static_cast<std::size_t>(cfg.paths_per_monitor), rng))
        picked.push_back(dests[idx]);
      std::sort(picked.begin(), picked.end());
      dests = std::move(picked);
    }

    for (int dest_country : dests) {
      SplitMix64 rng(derive_stream({cfg.seed, kRoutes, static_cast<std::uint64_t>(mi),
                                    static_cast<std::uint64_t>(dest_country)}));
      const int dest_router =
          dest_country * routers + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(routers)));

      // Distinctness is judged on the country sequence: that is what the
      // corpus records, and it is what gives adjacent countries genuinely
      // diverse paths. Each attempt penalizes one random border edge of the
      // current route, which pushes the next route through other countries.
      std::map<std::vector<int>, std::vector<int>> routes;  // country seq -> route
      std::vector<int> current = route_to(base, dest_router);
      const auto country_seq = [&](const std::vector<int>& route) {
        std::vector<int> seq;
        for (int v : route)
          if (seq.empty() || seq.back() != country_of(v)) seq.push_back(country_of(v));
        return seq;
      };
      routes.emplace(country_seq(current), current);
      std::unordered_map<std::uint64_t, std::uint32_t> penalty;
      for (int attempt = 0;
           static_cast<int>(routes.size()) < cfg.multipath_factor &&
           attempt < 4 * cfg.multipath_factor;
           ++attempt) {
        std::vector<std::size_t> border_edges;
        for (std::size_t i = 0; i + 1 < current.size(); ++i)
          if (country_of(current[i]) != country_of(current[i + 1])) border_edges.push_back(i);
        if (border_edges.empty()) break;
        const std::size_t pick = border_edges[rng.bounded(border_edges.size())];
        penalty[edge_key(current[pick], current[pick + 1])] += 32;
        current = route_to(dijkstra(graph, src, penalty), dest_router);
        routes.emplace(country_seq(current), current);
      }

      for (const auto& [seq, route] : routes) {
        ++route_ordinal;
        std::vector<CountryCode> codes;
        for (int v : route) codes.push_back(CountryCode(country_code_str(country_of(v))));
        const CountryPath path = CountryPath::normalized(codes);
        ground_truth.emplace(monitor_name(mi), path.str());

        // trace line; every fourth route gets an unresolved hop wedged
        // between two same-country routers, exercising the flanking rule
        // without touching the country path
        std::size_t star_after = route.size();  // sentinel: no star
        if (route_ordinal % 4 == 0) {
          for (std::size_t p = 0; p + 1 < route.size(); ++p)
            if (country_of(route[p]) == country_of(route[p + 1])) {
              star_after = p;
              break;
            }
        }
        corpus.traces_tsv += monitor_name(mi);
        corpus.traces_tsv.push_back('\t');
        for (std::size_t i = 0; i < route.size(); ++i) {
          if (i) corpus.traces_tsv.push_back(',');
          corpus.traces_tsv += ip_str(router_ip(country_of(route[i]), route[i] % routers));
          if (i == star_after) corpus.traces_tsv += ",*";
        }
        corpus.traces_tsv.push_back('\n');

        // bgp line for the same route, occasionally with a prepended origin
        corpus.bgp_tsv += monitor_name(mi);
        corpus.bgp_tsv.push_back('\t');
        corpus.bgp_tsv += "10." + std::to_string(dest_country) + ".0.0/16";
        corpus.bgp_tsv.push_back('\t');
        bool first = true;
        for (const CountryCode& c : path.hops()) {
          int country_index = (c.view()[0] - 'A') * 26 + (c.view()[1] - 'A');
          if (first && route_ordinal % 7 == 0) {
            corpus.bgp_tsv += std::to_string(64512 + country_index);
            corpus.bgp_tsv.push_back(' ');
          }
          if (!first) corpus.bgp_tsv.push_back(' ');
          corpus.bgp_tsv += std::to_string(64512 + country_index);
          first = false;
        }
        corpus.bgp_tsv.push_back('\n');
      }
    }
  }

  for (const auto& [monitor, path] : ground_truth)
    corpus.ground_truth_tsv += monitor + "\t" + path + "\n";
  return corpus;
}

inline void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "traces.tsv", corpus.traces_tsv);
  write_file_atomic(dir / "bgp.tsv", corpus.bgp_tsv);
  write_file_atomic(dir / "monitors.tsv", corpus.monitors_tsv);
  write_file_atomic(dir / "geo.tsv", corpus.geo_tsv);
  write_file_atomic(dir / "asreg.tsv", corpus.asreg_tsv);
  write_file_atomic(dir / "ground_truth.tsv", corpus.ground_truth_tsv);
}

}  // namespace expo
