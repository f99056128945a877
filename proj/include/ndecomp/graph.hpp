// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ndecomp/errors.hpp"

namespace ndecomp {

using Node = int;
using Weight = std::int64_t;
using Dist = std::int64_t;

inline constexpr Dist kInf = std::numeric_limits<Dist>::max();

struct Arc {
  Node to;
  Weight w;
  friend bool operator==(const Arc&, const Arc&) = default;
};

struct WeightedEdge {
  Node u;
  Node v;
  Weight w = 1;
  friend auto operator<=>(const WeightedEdge&, const WeightedEdge&) = default;
};

// Undirected graph with positive integer weights. Adjacency lists are sorted
// by neighbor id, so every traversal below visits nodes in a fixed order.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(static_cast<std::size_t>(n)) {}

  // Duplicate edges collapse to the minimum weight.
  static Graph from_edges(int n, const std::vector<WeightedEdge>& edges) {
    if (n < 0) throw ValidationError("negative node count");
    std::map<std::pair<Node, Node>, Weight> best;
    for (const auto& e : edges) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
        throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") has an endpoint outside 0.." + std::to_string(n - 1));
      if (e.u == e.v) throw ValidationError("self-loop at node " + std::to_string(e.u));
      if (e.w < 1) throw ValidationError("edge weight must be >= 1");
      auto key = std::minmax(e.u, e.v);
      auto it = best.find(key);
      if (it == best.end() || e.w < it->second) best[key] = e.w;
    }
    Graph g(n);
    for (const auto& [key, w] : best) {
      g.adj_[key.first].push_back({key.second, w});
      g.adj_[key.second].push_back({key.first, w});
      ++g.m_;
    }
    for (auto& list : g.adj_)
      std::sort(list.begin(), list.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
    return g;
  }

  int node_count() const { return static_cast<int>(adj_.size()); }
  std::size_t edge_count() const { return m_; }
  const std::vector<Arc>& neighbors(Node u) const { return adj_[u]; }
  std::size_t degree(Node u) const { return adj_[u].size(); }

  bool has_edge(Node u, Node v) const { return edge_weight(u, v) != kInf; }

  Weight edge_weight(Node u, Node v) const {
    const auto& list = adj_[u];
    auto it = std::lower_bound(list.begin(), list.end(), v,
                               [](const Arc& a, Node x) { return a.to < x; });
    return (it != list.end() && it->to == v) ? it->w : kInf;
  }

  bool is_unit_weight() const {
    for (const auto& list : adj_)
      for (const auto& a : list)
        if (a.w != 1) return false;
    return true;
  }

  // Each edge once, with u < v, in lexicographic order.
  std::vector<WeightedEdge> edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(m_);
    for (Node u = 0; u < node_count(); ++u)
      for (const auto& a : adj_[u])
        if (u < a.to) out.push_back({u, a.to, a.w});
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

 private:
  std::vector<std::vector<Arc>> adj_;
  std::size_t m_ = 0;
};

// Edge-list text: header "n m", then m lines "u v" or "u v w". Lines whose
// first non-blank character is '#' and blank lines are skipped.
inline Graph load_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  long long n = 0, m = 0;
  std::vector<WeightedEdge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<long long> nums;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
        throw ParseError(lineno, "not an integer: '" + tok + "'");
      }
      if (used != tok.size()) throw ParseError(lineno, "not an integer: '" + tok + "'");
      nums.push_back(v);
    }
    if (!have_header) {
      if (nums.size() != 2) throw ParseError(lineno, "expected header 'n m'");
      n = nums[0];
      m = nums[1];
      if (n < 0 || m < 0) throw ParseError(lineno, "negative count in header");
      if (n > std::numeric_limits<int>::max()) throw ParseError(lineno, "node count too large");
      have_header = true;
      continue;
    }
    if (nums.size() != 2 && nums.size() != 3) throw ParseError(lineno, "expected 'u v' or 'u v w'");
    long long w = nums.size() == 3 ? nums[2] : 1;
    auto range_ok = [&](long long x) { return x >= 0 && x < n; };
    if (!range_ok(nums[0]) || !range_ok(nums[1]))
      throw ValidationError("line " + std::to_string(lineno) + ": node id out of range");
    if (nums[0] == nums[1])
      throw ValidationError("line " + std::to_string(lineno) + ": self-loop");
    if (w < 1) throw ValidationError("line " + std::to_string(lineno) + ": weight must be >= 1");
    edges.push_back({static_cast<Node>(nums[0]), static_cast<Node>(nums[1]), w});
  }
  if (!have_header) throw ParseError(lineno + 1, "missing header 'n m'");
  if (static_cast<long long>(edges.size()) != m)
    throw ParseError(lineno + 1, "header declares " + std::to_string(m) + " edges, found " +
                                     std::to_string(edges.size()));
  return Graph::from_edges(static_cast<int>(n), edges);
}

inline Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  return load_graph(in);
}

// Weights are written only when some edge has weight != 1.
inline void write_graph(std::ostream& out, const Graph& g) {
  bool unit = g.is_unit_weight();
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) {
    out << e.u << ' ' << e.v;
    if (!unit) out << ' ' << e.w;
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Hop-distance primitives. These ignore edge weights.

struct Source {
  Node node;
  Dist offset;
};

// dist(u) = min over sources of offset + hops(source, u).
inline std::vector<Dist> multi_source_bfs(const Graph& g, std::vector<Source> sources) {
  std::vector<Dist> dist(static_cast<std::size_t>(g.node_count()), kInf);
  std::stable_sort(sources.begin(), sources.end(),
                   [](const Source& a, const Source& b) { return a.offset < b.offset; });
  std::deque<Node> queue;
  std::size_t next = 0;
  // The queue is nondecreasing in distance, so merging it with the sorted
  // source list processes nodes in Dijkstra order.
  while (next < sources.size() || !queue.empty()) {
    Node u;
    if (next < sources.size() &&
        (queue.empty() || sources[next].offset <= dist[queue.front()])) {
      const auto& s = sources[next++];
      if (s.offset < 0) throw ValidationError("negative source offset");
      if (dist[s.node] <= s.offset) continue;
      dist[s.node] = s.offset;
      u = s.node;
    } else {
      u = queue.front();
      queue.pop_front();
    }
    for (const auto& a : g.neighbors(u)) {
      if (dist[a.to] > dist[u] + 1) {
        dist[a.to] = dist[u] + 1;
        queue.push_back(a.to);
      }
    }
  }
  return dist;
}

inline std::vector<Dist> bfs(const Graph& g, Node source) {
  return multi_source_bfs(g, {{source, 0}});
}

// Nodes within `radius` hops of any node in `from`, as a distance map
// (kInf outside the ball).
inline std::vector<Dist> bounded_bfs(const Graph& g, const std::vector<Node>& from, Dist radius) {
  std::vector<Dist> dist(static_cast<std::size_t>(g.node_count()), kInf);
  std::deque<Node> queue;
  for (Node s : from) {
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    Node u = queue.front();
    queue.pop_front();
    if (dist[u] == radius) continue;
    for (const auto& a : g.neighbors(u)) {
      if (dist[a.to] == kInf) {
        dist[a.to] = dist[u] + 1;
        queue.push_back(a.to);
      }
    }
  }
  return dist;
}

struct Subgraph {
  Graph graph;
  std::vector<Node> to_original;  // local id -> original id
  std::vector<Node> to_local;     // original id -> local id, or -1
};

// Local ids follow increasing original id.
inline Subgraph induced_subgraph(const Graph& g, const std::vector<Node>& keep) {
  Subgraph s;
  s.to_local.assign(static_cast<std::size_t>(g.node_count()), -1);
  std::vector<Node> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (Node v : sorted) {
    if (v < 0 || v >= g.node_count()) throw ValidationError("keep set has an out-of-range node");
    s.to_local[v] = static_cast<Node>(s.to_original.size());
    s.to_original.push_back(v);
  }
  std::vector<WeightedEdge> edges;
  for (Node v : sorted)
    for (const auto& a : g.neighbors(v))
      if (v < a.to && s.to_local[a.to] >= 0) edges.push_back({s.to_local[v], s.to_local[a.to], a.w});
  s.graph = Graph::from_edges(static_cast<int>(sorted.size()), edges);
  return s;
}

// Strong diameter: max hop distance inside G[cluster]; kInf if G[cluster] is
// disconnected.
inline Dist component_strong_diameter(const Graph& g, const std::vector<Node>& cluster) {
  if (cluster.empty()) throw ValidationError("empty cluster");
  auto sub = induced_subgraph(g, cluster);
  Dist best = 0;
  for (Node u = 0; u < sub.graph.node_count(); ++u) {
    auto d = bfs(sub.graph, u);
    for (Dist x : d) best = std::max(best, x);
    if (best == kInf) return kInf;
  }
  return best;
}

// Connected component label per node; labels are 0.. in order of smallest member.
inline std::vector<int> connected_components(const Graph& g, int* count = nullptr) {
  std::vector<int> comp(static_cast<std::size_t>(g.node_count()), -1);
  int c = 0;
  for (Node s = 0; s < g.node_count(); ++s) {
    if (comp[s] >= 0) continue;
    std::deque<Node> queue{s};
    comp[s] = c;
    while (!queue.empty()) {
      Node u = queue.front();
      queue.pop_front();
      for (const auto& a : g.neighbors(u))
        if (comp[a.to] < 0) {
          comp[a.to] = c;
          queue.push_back(a.to);
        }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

// ---------------------------------------------------------------------------
// Weighted distances.

inline std::vector<Dist> dijkstra(const Graph& g, Node source) {
  std::vector<Dist> dist(static_cast<std::size_t>(g.node_count()), kInf);
  using Item = std::pair<Dist, Node>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0;
  pq.push({0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    for (const auto& a : g.neighbors(u)) {
      if (d + a.w < dist[a.to]) {
        dist[a.to] = d + a.w;
        pq.push({dist[a.to], a.to});
      }
    }
  }
  return dist;
}

inline constexpr int kDefaultVerifyCap = 2048;
inline constexpr const char* kVerifyCapEnv = "NDECOMP_VERIFY_CAP";

// The cap can be raised or lowered through NDECOMP_VERIFY_CAP.
inline int verify_cap() {
  if (const char* env = std::getenv(kVerifyCapEnv)) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return kDefaultVerifyCap;
}

using DistanceMatrix = std::vector<std::vector<Dist>>;

inline DistanceMatrix all_pairs_distances(const Graph& g, int cap = verify_cap()) {
  if (g.node_count() > cap)
    throw CapExceeded("all-pairs distances refused: " + std::to_string(g.node_count()) +
                      " nodes exceeds the cap of " + std::to_string(cap) +
                      "; use a smaller graph or set " + kVerifyCapEnv);
  DistanceMatrix out;
  out.reserve(static_cast<std::size_t>(g.node_count()));
  for (Node s = 0; s < g.node_count(); ++s) out.push_back(dijkstra(g, s));
  return out;
}

}  // namespace ndecomp
