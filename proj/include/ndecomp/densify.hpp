// SPDX-License-Identifier: Apache-2.0
// Growing a well-separated clustering into one that covers half the nodes,
// and the color-by-color network decomposition built on top of it.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ndecomp/clustering.hpp"
#include "ndecomp/delay_clustering.hpp"
#include "ndecomp/errors.hpp"
#include "ndecomp/graph.hpp"
#include "ndecomp/isolation.hpp"
#include "ndecomp/numeric.hpp"

namespace ndecomp {

// x = ceil(log2(2000 log2 log2 max(n, 4))).
inline int default_x(std::int64_t n) {
  HighFloat ll = log2_high(log2_high(HighFloat(std::max<std::int64_t>(n, 4))));
  return static_cast<int>(boost::multiprecision::ceil(log2_high(2000 * ll)));
}

// ---------------------------------------------------------------------------
// Expansion

struct ExpandedClustering {
  Clustering clustering;
  std::vector<int> source;  // per output cluster, its input cluster id
  std::vector<int> cut;     // per input cluster; -1 for bad clusters
  std::size_t bad_nodes = 0;
};

// |C^{<=i}| for i = 0..limit, by BFS from C.
inline std::vector<std::size_t> ball_sizes(const Graph& g, const std::vector<Node>& C, int limit) {
  auto d = bounded_bfs(g, C, limit);
  std::vector<std::size_t> out(static_cast<std::size_t>(limit) + 1, 0);
  for (Dist x : d)
    if (x != kInf) ++out[static_cast<std::size_t>(x)];
  for (std::size_t i = 1; i < out.size(); ++i) out[i] += out[i - 1];
  return out;
}

// cut(C) = min { 0 <= i <= 3x : |C^{<=i+1}| <= 1.5 |C^{<=i}| }; good clusters
// grow to C^{<=cut}. Requires the input to be 10x-separated, which makes the
// 3x-balls disjoint.
inline ExpandedClustering expand(const Graph& g, const Clustering& in, int x) {
  if (x < 2) throw ValidationError("x must be at least 2");
  auto sep = verify_separation(g, in, 10 * x);
  if (!sep.ok) {
    std::string path;
    for (Node v : sep.path) path += (path.empty() ? "" : "-") + std::to_string(v);
    throw ValidationError("expand needs a " + std::to_string(10 * x) + "-separated clustering; clusters " +
                          std::to_string(sep.cluster_a) + " and " + std::to_string(sep.cluster_b) +
                          " are joined by path " + path);
  }
  ExpandedClustering out;
  out.clustering = Clustering(g.node_count());
  std::size_t kept_in = 0;
  for (std::size_t c = 0; c < in.clusters.size(); ++c) {
    const auto& cl = in.clusters[c];
    auto sizes = ball_sizes(g, cl.nodes, 3 * x + 1);
    int cut = -1;
    for (int i = 0; i <= 3 * x; ++i)
      if (2 * sizes[static_cast<std::size_t>(i) + 1] <= 3 * sizes[static_cast<std::size_t>(i)]) {
        cut = i;
        break;
      }
    out.cut.push_back(cut);
    if (cut < 0) {
      out.bad_nodes += cl.nodes.size();
      continue;
    }
    kept_in += cl.nodes.size();
    auto d = bounded_bfs(g, cl.nodes, cut);
    std::vector<Node> grown;
    for (Node v = 0; v < g.node_count(); ++v)
      if (d[static_cast<std::size_t>(v)] != kInf) grown.push_back(v);
    out.clustering.add_cluster(g, cl.center, std::move(grown));
    out.source.push_back(static_cast<int>(c));
  }
  // Bad clusters own disjoint 3x-balls of size >= 1.5^{3x}|C| >= 2^{x+1}|C|.
  check_invariant((BigInt(out.bad_nodes) << (x + 1)) <= BigInt(g.node_count()),
                  "expand: bad clusters hold more than n/2^{x+1} nodes");
  check_invariant(verify_separation(g, out.clustering, 4 * x).ok, "expand: output is not 4x-separated");
  check_invariant(out.clustering.clustered_count() >= kept_in, "expand: a good cluster shrank");
  auto boundary = bounded_bfs(g, [&] {
    std::vector<Node> all;
    for (const auto& cl : out.clustering.clusters) all.insert(all.end(), cl.nodes.begin(), cl.nodes.end());
    return all;
  }(), 1);
  std::size_t b = 0;
  for (Dist v : boundary) b += v != kInf;
  check_invariant(2 * b <= 3 * out.clustering.clustered_count(), "expand: boundary exceeds 1.5 times the clustered nodes");
  return out;
}

// ---------------------------------------------------------------------------
// Clustering half of the nodes

// An inner clustering algorithm: given a graph, a 10x-separated clustering.
using InnerClustering = std::function<Clustering(const Graph&)>;

struct HalfIteration {
  int i = 0;
  std::size_t residual = 0;       // |V(G_i)|
  std::size_t inner = 0;          // nodes clustered by the inner algorithm
  std::size_t expanded = 0;       // nodes added by expansion
  std::size_t clustered = 0;      // |V(C_i)|
  std::size_t boundary = 0;       // |V(C_i^{<=1})|
  std::size_t clusters = 0;       // C_i is the first `clusters` clusters of the result
};

struct HalfResult {
  Clustering clustering;
  int x = 2;
  int budget = 0;  // N = 4 * 2^x
  std::vector<HalfIteration> iterations;
};

// Iterates inner + expand on the graph minus the 1-neighborhood of what is
// already clustered, until half the nodes are clustered or N rounds pass.
// After every round: 2-separated, |V(C_i)| >= n min(1/2, i/(8 2^x)) and
// |V(C_i^{<=1})| <= 1.5 |V(C_i)|.
inline HalfResult cluster_half(const Graph& g, int x, const InnerClustering& inner) {
  if (x < 2) throw ValidationError("x must be at least 2");
  if (x > 20) throw ValidationError("x above 20 makes the round budget impractical");
  HalfResult out;
  out.x = x;
  out.budget = 4 << x;
  out.clustering = Clustering(g.node_count());
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<char> blocked(n, 0);  // in V(C_{i-1}^{<=1})
  std::size_t clustered = 0;
  for (int i = 1; i <= out.budget && 2 * clustered < n; ++i) {
    HalfIteration it;
    it.i = i;
    std::vector<Node> keep;
    for (Node v = 0; v < g.node_count(); ++v)
      if (!blocked[static_cast<std::size_t>(v)]) keep.push_back(v);
    it.residual = keep.size();
    auto sub = induced_subgraph(g, keep);
    Clustering c = inner(sub.graph);
    check_invariant(c.node_count() == sub.graph.node_count(), "inner clustering has the wrong size");
    check_clustering(sub.graph, c);
    it.inner = c.clustered_count();
    auto ex = expand(sub.graph, c, x);
    for (const auto& cl : ex.clustering.clusters) {
      std::vector<Node> nodes;
      for (Node v : cl.nodes) nodes.push_back(sub.to_original[static_cast<std::size_t>(v)]);
      out.clustering.add_cluster(g, sub.to_original[static_cast<std::size_t>(cl.center)], std::move(nodes));
    }
    it.expanded = ex.clustering.clustered_count();
    clustered += it.expanded;
    it.clustered = clustered;
    it.clusters = out.clustering.clusters.size();
    std::vector<Node> all;
    for (Node v = 0; v < g.node_count(); ++v)
      if (out.clustering.clustered(v)) all.push_back(v);
    auto near = bounded_bfs(g, all, 1);
    it.boundary = 0;
    for (std::size_t v = 0; v < n; ++v) {
      blocked[v] = near[v] != kInf;
      it.boundary += blocked[v];
    }
    const std::string at = " after iteration " + std::to_string(i);
    check_invariant(verify_separation(g, out.clustering, 2).ok, "cluster_half: not 2-separated" + at);
    // |V(C_i)| >= n min(1/2, i/(8 2^x))
    const BigInt lhs = BigInt(clustered) * (BigInt(8) << x);
    const BigInt rhs = BigInt(n) * std::min(BigInt(4) << x, BigInt(i));
    check_invariant(lhs >= rhs, "cluster_half: fewer than n min(1/2, i/(8 2^x)) nodes clustered" + at);
    check_invariant(2 * it.boundary <= 3 * clustered, "cluster_half: boundary exceeds 1.5 times the clustered nodes" + at);
    out.iterations.push_back(it);
  }
  check_invariant(2 * clustered >= n, "cluster_half: fewer than half the nodes clustered");
  return out;
}

// ---------------------------------------------------------------------------
// The composed inner algorithm and the decomposition

struct PipelineConfig {
  int x = 0;  // 0 selects default_x(n)
  DelayConstants delay = default_constants();
};

struct PipelineStats {
  std::size_t runs = 0;
  std::size_t delay_clustered = 0;
  std::size_t isolated = 0;
  int max_k = 0;
  int max_hop_degree = 0;
  std::uint64_t indicative_rounds = 0;
};

// Delays at s = 10x, extraction, then subsampling at the same s.
inline InnerClustering pipeline_inner(int x, const DelayConstants& c, PipelineStats* stats = nullptr) {
  return [x, c, stats](const Graph& g) {
    const int s = 10 * x;
    auto d = compute_delays(g, s, c);
    auto low = extract_clustering(g, d);
    const int k = d.max_k();
    auto sep = subsample(g, low, s, k);
    if (stats) {
      ++stats->runs;
      stats->delay_clustered += low.clustered_count();
      stats->isolated += sep.clustering.clustered_count();
      stats->max_k = std::max(stats->max_k, k);
      stats->max_hop_degree = std::max(stats->max_hop_degree, s_hop_degree(g, low, s).max);
      for (const auto& run : d.components) stats->indicative_rounds += run.indicative_rounds;
    }
    return std::move(sep.clustering);
  };
}

struct NetworkDecomposition {
  Clustering clustering;          // every node is clustered
  std::vector<int> cluster_color; // 1-based color per cluster
  int colors = 0;
  int x = 2;
  Dist diameter_bound = 0;
  std::vector<std::size_t> residual;  // residual size before each color
  PipelineStats stats;

  int color_of(Node v) const {
    return cluster_color[static_cast<std::size_t>(clustering.cluster_of[static_cast<std::size_t>(v)])];
  }
};

// Strong-diameter bound for every cluster: delay clusters have diameter at
// most 10 s R with s = 10x, subsampling only prunes subtrees, and
// expansion adds at most 2 * 3x.
inline Dist decomposition_diameter_bound(std::int64_t n, int x) {
  return 10 * static_cast<Dist>(10 * x) * phase_count(n) + 6 * static_cast<Dist>(x);
}

inline NetworkDecomposition decompose(const Graph& g, const PipelineConfig& cfg = {}, const InnerClustering& inner = {}) {
  NetworkDecomposition out;
  const int n = g.node_count();
  out.x = cfg.x > 0 ? cfg.x : default_x(n);
  out.diameter_bound = decomposition_diameter_bound(n, out.x);
  out.clustering = Clustering(n);
  InnerClustering algo = inner ? inner : pipeline_inner(out.x, cfg.delay, &out.stats);
  int budget = 1;
  while ((std::int64_t{1} << (budget - 1)) < std::max(n, 1)) ++budget;  // ceil(log2 n) + 1
  std::vector<Node> residual;
  for (Node v = 0; v < n; ++v) residual.push_back(v);
  while (!residual.empty()) {
    ++out.colors;
    check_invariant(out.colors <= budget, "decompose: color budget ceil(log2 n) + 1 exceeded");
    out.residual.push_back(residual.size());
    auto sub = induced_subgraph(g, residual);
    auto half = cluster_half(sub.graph, out.x, algo);
    for (const auto& cl : half.clustering.clusters) {
      std::vector<Node> nodes;
      for (Node v : cl.nodes) nodes.push_back(sub.to_original[static_cast<std::size_t>(v)]);
      out.clustering.add_cluster(g, sub.to_original[static_cast<std::size_t>(cl.center)], std::move(nodes));
      out.cluster_color.push_back(out.colors);
    }
    std::vector<Node> next;
    for (Node v : residual)
      if (!out.clustering.clustered(v)) next.push_back(v);
    residual = std::move(next);
    check_invariant((BigInt(residual.size()) << out.colors) <= BigInt(n),
                    "decompose: residual after color " + std::to_string(out.colors) + " exceeds n/2^c");
  }
  return out;
}

struct ColorReport {
  int color = 0;
  std::size_t clusters = 0, nodes = 0;
  Dist max_diameter = 0;
  std::size_t adjacent_pairs = 0;  // edges joining two distinct clusters of this color
};

struct DecompositionReport {
  bool all_colored = true;
  bool ok = true;
  int colors = 0;
  Dist max_diameter = 0;
  Dist diameter_bound = 0;
  std::vector<ColorReport> per_color;
  std::vector<std::string> problems;
};

inline DecompositionReport verify_decomposition(const Graph& g, const NetworkDecomposition& d) {
  DecompositionReport r;
  r.colors = d.colors;
  r.diameter_bound = d.diameter_bound;
  try {
    check_clustering(g, d.clustering);
  } catch (const InvariantError& e) {
    r.problems.push_back(e.what());
  }
  for (Node v = 0; v < g.node_count(); ++v)
    if (!d.clustering.clustered(v)) {
      r.all_colored = false;
      r.problems.push_back("node " + std::to_string(v) + " has no color");
      break;
    }
  r.per_color.resize(static_cast<std::size_t>(std::max(d.colors, 0)));
  for (int c = 0; c < d.colors; ++c) r.per_color[static_cast<std::size_t>(c)].color = c + 1;
  for (std::size_t id = 0; id < d.clustering.clusters.size(); ++id) {
    const int c = d.cluster_color[id];
    if (c < 1 || c > d.colors) {
      r.problems.push_back("cluster " + std::to_string(id) + " has color " + std::to_string(c) + " out of range");
      continue;
    }
    auto& rep = r.per_color[static_cast<std::size_t>(c - 1)];
    ++rep.clusters;
    rep.nodes += d.clustering.clusters[id].nodes.size();
    rep.max_diameter = std::max(rep.max_diameter, component_strong_diameter(g, d.clustering.clusters[id].nodes));
  }
  for (const auto& e : g.edges()) {
    int a = d.clustering.cluster_of[static_cast<std::size_t>(e.u)], b = d.clustering.cluster_of[static_cast<std::size_t>(e.v)];
    if (a < 0 || b < 0 || a == b) continue;
    int ca = d.cluster_color[static_cast<std::size_t>(a)];
    if (ca == d.cluster_color[static_cast<std::size_t>(b)] && ca >= 1 && ca <= d.colors)
      ++r.per_color[static_cast<std::size_t>(ca - 1)].adjacent_pairs;
  }
  for (const auto& rep : r.per_color) {
    r.max_diameter = std::max(r.max_diameter, rep.max_diameter);
    if (rep.adjacent_pairs > 0)
      r.problems.push_back("color " + std::to_string(rep.color) + " has " + std::to_string(rep.adjacent_pairs) +
                           " edges between distinct clusters");
    if (rep.max_diameter > d.diameter_bound)
      r.problems.push_back("color " + std::to_string(rep.color) + " has a cluster of diameter " +
                           (rep.max_diameter == kInf ? std::string("inf") : std::to_string(rep.max_diameter)) +
                           " above the bound " + std::to_string(d.diameter_bound));
  }
  r.ok = r.problems.empty();
  return r;
}

// One line per node: node_id color cluster_id center_id.
inline void write_decomposition(std::ostream& out, const NetworkDecomposition& d) {
  for (Node v = 0; v < d.clustering.node_count(); ++v) {
    int c = d.clustering.cluster_of[static_cast<std::size_t>(v)];
    out << v << ' ' << (c < 0 ? 0 : d.cluster_color[static_cast<std::size_t>(c)]) << ' ' << c << ' '
        << (c < 0 ? -1 : d.clustering.clusters[static_cast<std::size_t>(c)].center) << '\n';
  }
}

}  // namespace ndecomp
