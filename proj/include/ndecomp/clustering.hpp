// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "ndecomp/errors.hpp"
#include "ndecomp/graph.hpp"

namespace ndecomp {

struct Cluster {
  Node center = -1;
  std::vector<Node> nodes;  // sorted
};

// Disjoint clusters over the nodes of one graph. Each cluster carries a
// spanning tree rooted at its center, stored as parent pointers.
struct Clustering {
  std::vector<int> cluster_of;  // -1 when unclustered
  std::vector<Node> parent;     // tree parent; -1 at centers and unclustered nodes
  std::vector<Cluster> clusters;

  explicit Clustering(int n = 0) : cluster_of(static_cast<std::size_t>(n), -1), parent(static_cast<std::size_t>(n), -1) {}

  int node_count() const { return static_cast<int>(cluster_of.size()); }

  std::size_t clustered_count() const {
    std::size_t c = 0;
    for (const auto& cl : clusters) c += cl.nodes.size();
    return c;
  }

  bool clustered(Node v) const { return cluster_of[static_cast<std::size_t>(v)] >= 0; }

  // Adds a cluster whose tree is a BFS of g[nodes] from center. Returns its id.
  int add_cluster(const Graph& g, Node center, std::vector<Node> nodes) {
    std::sort(nodes.begin(), nodes.end());
    const int id = static_cast<int>(clusters.size());
    for (Node v : nodes) {
      if (cluster_of[static_cast<std::size_t>(v)] != -1) throw InvariantError("clusters overlap at node " + std::to_string(v));
      cluster_of[static_cast<std::size_t>(v)] = id;
    }
    std::deque<Node> queue{center};
    parent[static_cast<std::size_t>(center)] = -1;
    std::size_t reached = 1;
    auto in_cluster = [&](Node v) { return cluster_of[static_cast<std::size_t>(v)] == id; };
    std::vector<char> seen(nodes.size(), 0);
    auto pos = [&](Node v) {
      return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
    };
    if (!in_cluster(center)) throw InvariantError("cluster center is not a member");
    seen[pos(center)] = 1;
    while (!queue.empty()) {
      Node u = queue.front();
      queue.pop_front();
      for (const Arc& a : g.neighbors(u)) {
        if (!in_cluster(a.to) || seen[pos(a.to)]) continue;
        seen[pos(a.to)] = 1;
        parent[static_cast<std::size_t>(a.to)] = u;
        queue.push_back(a.to);
        ++reached;
      }
    }
    if (reached != nodes.size()) throw InvariantError("cluster around " + std::to_string(center) + " is not connected");
    clusters.push_back({center, std::move(nodes)});
    return id;
  }
};

// Structural checks: disjoint, every tree edge is a graph edge inside the
// cluster, and parent pointers lead to the center.
inline void check_clustering(const Graph& g, const Clustering& c) {
  check_invariant(c.node_count() == g.node_count(), "clustering size does not match the graph");
  std::vector<int> owner(static_cast<std::size_t>(g.node_count()), -1);
  for (std::size_t id = 0; id < c.clusters.size(); ++id) {
    const auto& cl = c.clusters[id];
    check_invariant(!cl.nodes.empty(), "empty cluster");
    for (Node v : cl.nodes) {
      check_invariant(owner[static_cast<std::size_t>(v)] == -1, "node in two clusters");
      owner[static_cast<std::size_t>(v)] = static_cast<int>(id);
    }
  }
  for (Node v = 0; v < g.node_count(); ++v) {
    check_invariant(owner[static_cast<std::size_t>(v)] == c.cluster_of[static_cast<std::size_t>(v)],
                    "cluster_of disagrees with cluster lists");
    if (owner[static_cast<std::size_t>(v)] < 0) continue;
    const auto& cl = c.clusters[static_cast<std::size_t>(owner[static_cast<std::size_t>(v)])];
    Node cur = v;
    for (std::size_t steps = 0; cur != cl.center; ++steps) {
      check_invariant(steps <= cl.nodes.size(), "cluster tree has a cycle");
      Node p = c.parent[static_cast<std::size_t>(cur)];
      check_invariant(p >= 0 && g.has_edge(cur, p) && c.cluster_of[static_cast<std::size_t>(p)] == owner[static_cast<std::size_t>(v)],
                      "cluster tree edge missing or leaves the cluster");
      cur = p;
    }
  }
}

// near[w] = sorted ids of clusters within hop distance s of w.
inline std::vector<std::vector<int>> clusters_near(const Graph& g, const Clustering& c, int s) {
  std::vector<std::vector<int>> near(static_cast<std::size_t>(g.node_count()));
  std::vector<Dist> dist(static_cast<std::size_t>(g.node_count()), kInf);
  std::vector<Node> touched;
  for (std::size_t id = 0; id < c.clusters.size(); ++id) {
    std::deque<Node> queue;
    for (Node v : c.clusters[id].nodes) {
      dist[static_cast<std::size_t>(v)] = 0;
      touched.push_back(v);
      queue.push_back(v);
    }
    while (!queue.empty()) {
      Node u = queue.front();
      queue.pop_front();
      near[static_cast<std::size_t>(u)].push_back(static_cast<int>(id));
      if (dist[static_cast<std::size_t>(u)] == s) continue;
      for (const Arc& a : g.neighbors(u))
        if (dist[static_cast<std::size_t>(a.to)] == kInf) {
          dist[static_cast<std::size_t>(a.to)] = dist[static_cast<std::size_t>(u)] + 1;
          touched.push_back(a.to);
          queue.push_back(a.to);
        }
    }
    for (Node v : touched) dist[static_cast<std::size_t>(v)] = kInf;
    touched.clear();
  }
  return near;
}

// S_u = clusters within distance s of the tree path from u to its center,
// for every clustered u (empty for unclustered nodes). Built top-down:
// S_u = S_parent(u) + near(u).
inline std::vector<std::vector<int>> compute_Su(const Graph& g, const Clustering& c, int s) {
  auto near = clusters_near(g, c, s);
  std::vector<std::vector<int>> S(static_cast<std::size_t>(g.node_count()));
  for (const auto& cl : c.clusters) {
    // BFS order of the tree: parents before children.
    std::vector<Node> order{cl.center};
    std::vector<std::vector<Node>> kids;
    const std::vector<Node>& members = cl.nodes;
    auto pos = [&](Node v) {
      return static_cast<std::size_t>(std::lower_bound(members.begin(), members.end(), v) - members.begin());
    };
    kids.resize(members.size());
    for (Node v : members)
      if (v != cl.center) kids[pos(c.parent[static_cast<std::size_t>(v)])].push_back(v);
    for (std::size_t i = 0; i < order.size(); ++i) {
      Node u = order[i];
      Node p = c.parent[static_cast<std::size_t>(u)];
      std::vector<int> merged;
      const auto& mine = near[static_cast<std::size_t>(u)];
      if (p < 0) {
        merged = mine;
      } else {
        const auto& up = S[static_cast<std::size_t>(p)];
        std::set_union(up.begin(), up.end(), mine.begin(), mine.end(), std::back_inserter(merged));
      }
      S[static_cast<std::size_t>(u)] = std::move(merged);
      for (Node k : kids[pos(u)]) order.push_back(k);
    }
  }
  return S;
}

struct HopDegree {
  std::vector<int> per_node;  // 0 for unclustered nodes
  int max = 0;
};

inline HopDegree s_hop_degree(const Graph& g, const Clustering& c, int s) {
  auto S = compute_Su(g, c, s);
  HopDegree h;
  h.per_node.resize(S.size());
  for (std::size_t v = 0; v < S.size(); ++v) {
    h.per_node[v] = static_cast<int>(S[v].size());
    h.max = std::max(h.max, h.per_node[v]);
  }
  return h;
}

struct SeparationCheck {
  bool ok = true;
  int cluster_a = -1, cluster_b = -1;
  std::vector<Node> path;  // from a node of cluster_a to a node of cluster_b
};

// True iff every two clusters are at hop distance >= s in g.
inline SeparationCheck verify_separation(const Graph& g, const Clustering& c, int s) {
  SeparationCheck out;
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<Dist> dist(n, kInf);
  std::vector<Node> from(n, -1), touched;
  for (std::size_t id = 0; id < c.clusters.size(); ++id) {
    std::deque<Node> queue;
    for (Node v : c.clusters[id].nodes) {
      dist[static_cast<std::size_t>(v)] = 0;
      touched.push_back(v);
      queue.push_back(v);
    }
    while (!queue.empty() && out.ok) {
      Node u = queue.front();
      queue.pop_front();
      int owner = c.cluster_of[static_cast<std::size_t>(u)];
      if (owner >= 0 && owner != static_cast<int>(id)) {
        out.ok = false;
        out.cluster_a = static_cast<int>(id);
        out.cluster_b = owner;
        for (Node x = u; x != -1; x = from[static_cast<std::size_t>(x)]) out.path.push_back(x);
        std::reverse(out.path.begin(), out.path.end());
        break;
      }
      if (dist[static_cast<std::size_t>(u)] + 1 >= s) continue;
      for (const Arc& a : g.neighbors(u))
        if (dist[static_cast<std::size_t>(a.to)] == kInf) {
          dist[static_cast<std::size_t>(a.to)] = dist[static_cast<std::size_t>(u)] + 1;
          from[static_cast<std::size_t>(a.to)] = u;
          touched.push_back(a.to);
          queue.push_back(a.to);
        }
    }
    for (Node v : touched) {
      dist[static_cast<std::size_t>(v)] = kInf;
      from[static_cast<std::size_t>(v)] = -1;
    }
    touched.clear();
    if (!out.ok) break;
  }
  return out;
}

// Largest strong diameter over the clusters (0 when there are none).
inline Dist max_strong_diameter(const Graph& g, const Clustering& c) {
  Dist d = 0;
  for (const auto& cl : c.clusters) d = std::max(d, component_strong_diameter(g, cl.nodes));
  return d;
}

}  // namespace ndecomp
