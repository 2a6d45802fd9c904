#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "expo/csv.hpp"
#include "expo/experiments.hpp"
#include "expo/parallel.hpp"
#include "expo/path_store.hpp"
#include "expo/trace_model.hpp"

namespace expo {

struct NoEdgesError : std::runtime_error {
  NoEdgesError() : std::runtime_error("graph has no edges") {}
};

struct ConvergenceError : std::runtime_error {
  ConvergenceError() : std::runtime_error("power iteration did not converge") {}
};

// Simple undirected country graph: routers of a country merged into one
// node, loops and multi-edges dropped. Nodes are sorted; adjacency is by
// node index with sorted neighbor lists.
class CountryGraph {
 public:
  static CountryGraph from_edges(const std::vector<CountryCode>& nodes,
                                 const std::vector<std::pair<CountryCode, CountryCode>>& edges) {
    CountryGraph g;
    g.nodes_ = nodes;
    std::sort(g.nodes_.begin(), g.nodes_.end());
    g.nodes_.erase(std::unique(g.nodes_.begin(), g.nodes_.end()), g.nodes_.end());
    g.adj_.resize(g.nodes_.size());
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(edges.size());
    for (const auto& [a, b] : edges) {
      const auto ia = g.index_of(a), ib = g.index_of(b);
      if (!ia || !ib) throw std::invalid_argument("edge endpoint not in node set");
      if (*ia == *ib) continue;  // no self-loops
      pairs.emplace_back(std::min(*ia, *ib), std::max(*ia, *ib));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& [a, b] : pairs) {
      g.adj_[static_cast<std::size_t>(a)].push_back(b);
      g.adj_[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());
    g.edge_count_ = pairs.size();
    return g;
  }

  // Nodes are every country on any stored path; edges every consecutive pair.
  static CountryGraph build(const PathStore& store) {
    CountryGraph g;
    g.nodes_.assign(store.countries().begin(), store.countries().end());
    g.adj_.resize(g.nodes_.size());
    std::set<std::pair<int, int>> seen;
    for (const auto& [pair, paths] : store.by_pair()) {
      for (const CountryPath& p : paths) {
        const auto& hops = p.hops();
        for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
          const int a = *g.index_of(hops[i]);
          const int b = *g.index_of(hops[i + 1]);
          if (seen.insert({std::min(a, b), std::max(a, b)}).second) {
            g.adj_[a].push_back(b);
            g.adj_[b].push_back(a);
          }
        }
      }
    }
    for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());
    g.edge_count_ = seen.size();
    return g;
  }

  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<CountryCode>& nodes() const { return nodes_; }
  const std::vector<int>& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }

  std::optional<int> index_of(CountryCode c) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), c);
    if (it == nodes_.end() || *it != c) return std::nullopt;
    return static_cast<int>(it - nodes_.begin());
  }

  bool has_edge(CountryCode a, CountryCode b) const {
    const auto ia = index_of(a), ib = index_of(b);
    if (!ia || !ib) return false;
    const auto& nb = adj_[static_cast<std::size_t>(*ia)];
    return std::binary_search(nb.begin(), nb.end(), *ib);
  }

  std::vector<std::pair<CountryCode, CountryCode>> edges() const {
    std::vector<std::pair<CountryCode, CountryCode>> out;
    for (std::size_t a = 0; a < adj_.size(); ++a)
      for (int b : adj_[a])
        if (static_cast<int>(a) < b) out.emplace_back(nodes_[a], nodes_[static_cast<std::size_t>(b)]);
    return out;
  }

  // BFS hop distances from src; -1 marks unreachable.
  std::vector<int> bfs_distances(int src) const {
    std::vector<int> dist(nodes_.size(), -1);
    std::deque<int> queue{src};
    dist[static_cast<std::size_t>(src)] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : adj_[static_cast<std::size_t>(v)]) {
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
          queue.push_back(w);
        }
      }
    }
    return dist;
  }

 private:
  std::vector<CountryCode> nodes_;
  std::vector<std::vector<int>> adj_;
  std::size_t edge_count_ = 0;
};

inline CountryGraph build_graph(const PathStore& store) { return CountryGraph::build(store); }

// Raw neighbor counts, indexed like g.nodes().
inline std::vector<int> degree_centrality(const CountryGraph& g) {
  std::vector<int> out(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) out[v] = static_cast<int>(g.neighbors(static_cast<int>(v)).size());
  return out;
}

// Reachability-scaled inverse mean BFS distance:
//   (r / (n-1)) * (r / d)   with r reachable others and d their distance sum.
// Isolated nodes score 0; the scaling keeps disconnected graphs comparable.
inline std::vector<double> closeness_centrality(const CountryGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> out(n, 0.0);
  if (n <= 1) return out;
  for (std::size_t v = 0; v < n; ++v) {
    const auto dist = g.bfs_distances(static_cast<int>(v));
    long long total = 0;
    long long reachable = 0;
    for (std::size_t w = 0; w < n; ++w) {
      if (w == v || dist[w] < 0) continue;
      total += dist[w];
      ++reachable;
    }
    if (reachable > 0 && total > 0)
      out[v] = (static_cast<double>(reachable) / static_cast<double>(n - 1)) *
               (static_cast<double>(reachable) / static_cast<double>(total));
  }
  return out;
}

// Dominant-eigenvector scores by power iteration on A + I (the shift keeps
// bipartite graphs from oscillating and leaves the eigenvector unchanged).
// Unit Euclidean norm, entries >= 0. On a disconnected graph mass settles on
// the component with the largest eigenvalue.
inline std::vector<double> eigenvector_centrality(const CountryGraph& g, double tol = 1e-10,
                                                  int max_iterations = 100000) {
  const std::size_t n = g.size();
  if (g.edge_count() == 0) throw NoEdgesError{};
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> next(n);
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t v = 0; v < n; ++v) {
      double sum = x[v];  // + I
      for (int w : g.neighbors(static_cast<int>(v))) sum += x[static_cast<std::size_t>(w)];
      next[v] = sum;
    }
    double norm = 0.0;
    for (double a : next) norm += a * a;
    norm = std::sqrt(norm);
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= norm;
      const double d = next[v] - x[v];
      delta += d * d;
    }
    x.swap(next);
    if (std::sqrt(delta) < tol) return x;
  }
  throw ConvergenceError{};
}

// Exact shortest-path counts behind load centrality, for oracle comparison.
// numerator[v] counts ordered (s,t) shortest paths with v strictly interior;
// denominator counts all ordered shortest paths between connected pairs.
struct LoadCounts {
  std::vector<unsigned long long> numerator;
  unsigned long long denominator = 0;
};

inline LoadCounts load_centrality_counts(const CountryGraph& g) {
  const std::size_t n = g.size();
  LoadCounts counts;
  counts.numerator.assign(n, 0);
  if (n == 0) return counts;

  // All-pairs BFS distances and path counts.
  std::vector<std::vector<int>> dist(n);
  std::vector<std::vector<unsigned long long>> sigma(n);
  for (std::size_t s = 0; s < n; ++s) {
    dist[s].assign(n, -1);
    sigma[s].assign(n, 0);
    dist[s][s] = 0;
    sigma[s][s] = 1;
    std::deque<int> queue{static_cast<int>(s)};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : g.neighbors(v)) {
        const auto uw = static_cast<std::size_t>(w);
        const auto uv = static_cast<std::size_t>(v);
        if (dist[s][uw] < 0) {
          dist[s][uw] = dist[s][uv] + 1;
          queue.push_back(w);
        }
        if (dist[s][uw] == dist[s][uv] + 1) sigma[s][uw] += sigma[s][uv];
      }
    }
  }

  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || dist[s][t] < 0) continue;
      counts.denominator += sigma[s][t];
      for (std::size_t v = 0; v < n; ++v) {
        if (v == s || v == t) continue;
        if (dist[s][v] >= 0 && dist[v][t] >= 0 && dist[s][v] + dist[v][t] == dist[s][t])
          counts.numerator[v] += sigma[s][v] * sigma[v][t];
      }
    }
  return counts;
}

// Fraction of all shortest paths passing through each node as an interior
// hop. Pairs in different components contribute nothing.
inline std::vector<double> load_centrality(const CountryGraph& g) {
  const LoadCounts counts = load_centrality_counts(g);
  std::vector<double> out(g.size(), 0.0);
  if (counts.denominator == 0) return out;
  for (std::size_t v = 0; v < g.size(); ++v)
    out[v] = static_cast<double>(counts.numerator[v]) / static_cast<double>(counts.denominator);
  return out;
}

struct ScatterRow {
  CountryCode country;
  int degree;
  double closeness;
  double eigenvector;
  double load;
  double mean_involved;
};

// Per country: the four centralities joined with the mean involved-set size
// over every target reachable in the graph (targets without recorded paths
// contribute zero). Countries reaching nothing score zero.
inline std::vector<ScatterRow> centrality_scatter(const PathStore& store, const CountryGraph& g,
                                                  int threads = 1) {
  const std::vector<int> degree = degree_centrality(g);
  const std::vector<double> closeness = closeness_centrality(g);
  const std::vector<double> load = load_centrality(g);
  std::vector<double> eigen(g.size(), 0.0);
  if (g.edge_count() > 0) eigen = eigenvector_centrality(g);

  std::vector<double> mean_involved(g.size(), 0.0);
  parallel_for(g.size(), threads, [&](std::size_t v) {
    const CountryCode x = g.nodes()[v];
    const auto dist = g.bfs_distances(static_cast<int>(v));
    long long involved_sum = 0;
    long long reachable = 0;
    for (std::size_t w = 0; w < g.size(); ++w) {
      if (w == v || dist[w] < 0) continue;
      ++reachable;
      involved_sum += static_cast<long long>(involved(store, x, g.nodes()[w]).size());
    }
    if (reachable > 0)
      mean_involved[v] = static_cast<double>(involved_sum) / static_cast<double>(reachable);
  });

  std::vector<ScatterRow> rows;
  rows.reserve(g.size());
  for (std::size_t v = 0; v < g.size(); ++v)
    rows.push_back({g.nodes()[v], degree[v], closeness[v], eigen[v], load[v], mean_involved[v]});
  return rows;
}

inline std::string render_centrality_csv(const std::vector<ScatterRow>& rows) {
  std::string out = "country,degree,closeness,eigenvector,load,mean_involved\n";
  for (const auto& row : rows) {
    out += row.country.str();
    out.push_back(',');
    out += std::to_string(row.degree);
    out.push_back(',');
    out += format_fixed(row.closeness);
    out.push_back(',');
    out += format_fixed(row.eigenvector);
    out.push_back(',');
    out += format_fixed(row.load);
    out.push_back(',');
    out += format_fixed(row.mean_involved);
    out.push_back('\n');
  }
  return out;
}

}  // namespace expo
