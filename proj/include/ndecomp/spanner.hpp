// SPDX-License-Identifier: Apache-2.0
// Cluster-growing (2k-1)-spanner. Each growth step samples clusters with a
// derandomized hitting-set solve instead of coin flips; the last step samples
// nothing and connects every remaining node to each neighboring cluster.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ndecomp/errors.hpp"
#include "ndecomp/graph.hpp"
#include "ndecomp/hitting_set.hpp"
#include "ndecomp/numeric.hpp"

namespace ndecomp {

struct SpannerConstants {
  long long gamma3 = 24;  // p = 1 / (gamma3 * ceil(n^{1/k}))
  long long gamma1 = 24;  // heavy-node threshold gamma1 * n^{1/k} * ln k, reported only
  long long size_c = 8;   // size check: c * (nk + n^{1+1/k} * ln k)
};

struct SpannerStep {
  int i = 0;
  std::size_t clusters = 0;  // |C_i|
  std::size_t clustered = 0;
  std::size_t sets = 0;
  Rational p;
  int retries = 0;
  std::size_t sampled = 0;  // |C_{i+1}|
  std::size_t coverage_threshold = 0;
  Rational phi;
  std::size_t edges_added = 0;
  std::size_t heavy_edges = 0;  // added by nodes with >= gamma1 n^{1/k} ln k neighboring clusters
};

struct SpannerResult {
  std::vector<WeightedEdge> edges;  // u < v, sorted
  int k = 1;
  bool weighted = false;
  SpannerConstants constants;
  std::vector<SpannerStep> steps;
  std::size_t final_edges_added = 0;
  std::uint64_t evaluations = 0;

  Graph as_graph(int n) const { return Graph::from_edges(n, edges); }
};

// Meaningless for k = 1, where the output is all of g.
inline HighFloat spanner_size_bound(int n, int k, long long c = SpannerConstants{}.size_c) {
  using boost::multiprecision::log;
  using boost::multiprecision::pow;
  const HighFloat hn(n);
  const HighFloat lk = log(HighFloat(k));
  return HighFloat(c) * (hn * k + pow(hn, 1 + HighFloat(1) / k) * lk);
}

namespace detail {

// Lightest live edge (weight, neighbor) from one node to each neighboring cluster.
struct ClusterLink {
  Weight w;
  Node x;
  int cluster;
};

inline std::vector<ClusterLink> cluster_links(const std::map<Node, Weight>& live, const std::vector<int>& cluster_of) {
  std::map<int, std::pair<Weight, Node>> best;
  for (const auto& [x, w] : live) {
    const int c = cluster_of[static_cast<std::size_t>(x)];
    if (c < 0) continue;
    auto it = best.find(c);
    if (it == best.end() || std::make_pair(w, x) < it->second) best[c] = {w, x};
  }
  std::vector<ClusterLink> out;
  for (const auto& [c, wx] : best) out.push_back({wx.first, wx.second, c});
  std::sort(out.begin(), out.end(), [](const ClusterLink& a, const ClusterLink& b) {
    return std::tie(a.w, a.cluster) < std::tie(b.w, b.cluster);
  });
  return out;
}

}  // namespace detail

inline SpannerResult build_spanner(const Graph& g, int k, bool weighted, const SpannerConstants& cst = {}) {
  if (k < 1) throw ValidationError("spanner stretch parameter k must be at least 1");
  if (cst.gamma3 < 2) throw ValidationError("gamma3 must be at least 2");
  const int n = g.node_count();
  SpannerResult res;
  res.k = k;
  res.weighted = weighted;
  res.constants = cst;

  std::vector<std::map<Node, Weight>> live(static_cast<std::size_t>(n));
  for (Node u = 0; u < n; ++u)
    for (const Arc& a : g.neighbors(u)) live[static_cast<std::size_t>(u)][a.to] = a.w;
  auto drop = [&](Node a, Node b) {
    live[static_cast<std::size_t>(a)].erase(b);
    live[static_cast<std::size_t>(b)].erase(a);
  };
  std::set<std::pair<Node, Node>> chosen;
  auto add = [&](Node a, Node b) { chosen.insert(std::minmax(a, b)); };

  std::vector<int> cluster_of(static_cast<std::size_t>(n));
  int cluster_count = n;
  for (Node v = 0; v < n; ++v) cluster_of[static_cast<std::size_t>(v)] = v;

  const long long root = n > 0 ? ceil_root(n, k) : 1;
  const HighFloat nk = n > 0 ? HighFloat(boost::multiprecision::pow(HighFloat(n), HighFloat(1) / k)) : HighFloat(0);
  const HighFloat heavy_threshold = HighFloat(cst.gamma1) * nk * boost::multiprecision::log(HighFloat(k));
  const int max_retries = static_cast<int>(ceil_log2(static_cast<std::uint64_t>(std::max(n, 2))));

  for (int i = 1; i < k && cluster_count > 0; ++i) {
    SpannerStep step;
    step.i = i;
    step.clusters = static_cast<std::size_t>(cluster_count);
    check_invariant(BigInt(cluster_count) == 0 ||
                        boost::multiprecision::pow(BigInt(cluster_count), static_cast<unsigned>(k)) <=
                            boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(k - i + 1)),
                    "spanner: |C_" + std::to_string(i) + "| exceeds n^{1-(i-1)/k}");

    std::vector<Node> members;
    std::vector<std::vector<detail::ClusterLink>> links(static_cast<std::size_t>(n));
    for (Node v = 0; v < n; ++v) {
      if (cluster_of[static_cast<std::size_t>(v)] < 0) continue;
      members.push_back(v);
      links[static_cast<std::size_t>(v)] = detail::cluster_links(live[static_cast<std::size_t>(v)], cluster_of);
    }
    step.clustered = members.size();

    std::vector<Node> owners;  // node behind each unreduced set
    std::vector<std::vector<int>> sets;
    for (Node v : members) {
      const auto& L = links[static_cast<std::size_t>(v)];
      if (L.empty()) continue;
      std::vector<int> s;
      for (const auto& l : L) s.push_back(l.cluster);
      if (!weighted) std::sort(s.begin(), s.end());
      sets.push_back(std::move(s));
      owners.push_back(v);
    }
    step.sets = sets.size();

    Rational p(1, cst.gamma3 * root);
    std::vector<int> H;
    for (;; p /= 2, ++step.retries) {
      HittingInstance inst;
      if (weighted) {
        inst = reduce_ordered(OrderedInstance{cluster_count, sets, p});
      } else {
        inst = HittingInstance{cluster_count, sets, {}, p};
        for (const auto& s : sets) inst.weights.push_back(static_cast<std::int64_t>(s.size()));
      }
      CoverageResult cov = solve_with_coverage(inst);
      res.evaluations += cov.small_run.evaluations + cov.large_run.evaluations;
      step.coverage_threshold = cov.threshold;
      step.phi = cov.phi.value;
      H = cov.H;
      const bool small_enough = boost::multiprecision::pow(BigInt(H.size()), static_cast<unsigned>(k)) <=
                                boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(k - i));
      if (small_enough) break;
      check_invariant(step.retries < max_retries,
                      "spanner: sampled clusters exceed n^{1-i/k} after " + std::to_string(max_retries) + " retries");
    }
    step.p = p;
    step.sampled = H.size();

    std::vector<int> renumber(static_cast<std::size_t>(cluster_count), -1);
    for (std::size_t j = 0; j < H.size(); ++j) renumber[static_cast<std::size_t>(H[j])] = static_cast<int>(j);
    for (std::size_t j = 0; j < sets.size(); ++j)
      if (sets[j].size() >= step.coverage_threshold) {
        bool hit = false;
        for (int c : sets[j]) hit = hit || renumber[static_cast<std::size_t>(c)] >= 0;
        check_invariant(hit, "spanner: node " + std::to_string(owners[j]) +
                                 " with many neighboring clusters lost its cluster");
      }

    // Decisions read the old clustering; removals and joins apply afterwards.
    std::vector<int> next(static_cast<std::size_t>(n), -1);
    std::vector<std::pair<Node, int>> removals;  // E(v, old cluster)
    std::size_t added_before = chosen.size();
    for (Node v : members) {
      const int own = cluster_of[static_cast<std::size_t>(v)];
      if (renumber[static_cast<std::size_t>(own)] >= 0) {
        next[static_cast<std::size_t>(v)] = renumber[static_cast<std::size_t>(own)];
        continue;
      }
      const auto& L = links[static_cast<std::size_t>(v)];
      std::size_t stop = L.size();
      int join = -1;
      for (std::size_t j = 0; j < L.size(); ++j)
        if (renumber[static_cast<std::size_t>(L[j].cluster)] >= 0) {
          stop = j + 1;
          join = renumber[static_cast<std::size_t>(L[j].cluster)];
          break;
        }
      const bool heavy = HighFloat(static_cast<long long>(L.size())) >= heavy_threshold;
      for (std::size_t j = 0; j < stop; ++j) {
        const std::size_t before = chosen.size();
        add(v, L[j].x);
        if (heavy) step.heavy_edges += chosen.size() - before;
        removals.push_back({v, L[j].cluster});
      }
      next[static_cast<std::size_t>(v)] = join;
    }
    for (const auto& [v, c] : removals) {
      std::vector<Node> gone;
      for (const auto& [x, w] : live[static_cast<std::size_t>(v)])
        if (cluster_of[static_cast<std::size_t>(x)] == c) gone.push_back(x);
      for (Node x : gone) drop(v, x);
    }
    step.edges_added = chosen.size() - added_before;

    cluster_of = std::move(next);
    cluster_count = static_cast<int>(H.size());
    for (Node v = 0; v < n; ++v) {
      std::vector<Node> gone;
      const int c = cluster_of[static_cast<std::size_t>(v)];
      for (const auto& [x, w] : live[static_cast<std::size_t>(v)])
        if (c < 0 || cluster_of[static_cast<std::size_t>(x)] == c) gone.push_back(x);
      for (Node x : gone) drop(v, x);
    }
    res.steps.push_back(std::move(step));
  }

  const std::size_t before_final = chosen.size();
  for (Node v = 0; v < n; ++v) {
    if (cluster_of[static_cast<std::size_t>(v)] < 0) continue;
    for (const auto& l : detail::cluster_links(live[static_cast<std::size_t>(v)], cluster_of)) add(v, l.x);
  }
  res.final_edges_added = chosen.size() - before_final;

  for (const auto& [a, b] : chosen) res.edges.push_back({a, b, g.edge_weight(a, b)});
  return res;
}

struct StretchReport {
  bool ok = true;
  bool subgraph = true;
  bool disconnects = false;  // a pair connected in g is not in the spanner
  Rational max_stretch = 1;
  Node worst_u = -1, worst_v = -1;
  Rational bound;
};

// Exact all-pairs comparison; refuses graphs above the verification cap.
inline StretchReport verify_stretch(const Graph& g, const std::vector<WeightedEdge>& edges, const Rational& bound,
                                    int cap = verify_cap()) {
  StretchReport rep;
  rep.bound = bound;
  const int n = g.node_count();
  for (const auto& e : edges)
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || g.edge_weight(e.u, e.v) != e.w) rep.subgraph = false;
  if (!rep.subgraph) {
    rep.ok = false;
    return rep;
  }
  const Graph h = Graph::from_edges(n, edges);
  const auto dg = all_pairs_distances(g, cap);
  const auto dh = all_pairs_distances(h, cap);
  for (Node u = 0; u < n; ++u)
    for (Node v = u + 1; v < n; ++v) {
      const Dist a = dg[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
      const Dist b = dh[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
      if (a == kInf) continue;
      if (b == kInf) {
        if (!rep.disconnects) {
          rep.worst_u = u;
          rep.worst_v = v;
        }
        rep.disconnects = true;
        continue;
      }
      const Rational r(b, a);
      if (!rep.disconnects && r > rep.max_stretch) {
        rep.max_stretch = r;
        rep.worst_u = u;
        rep.worst_v = v;
      }
    }
  rep.ok = !rep.disconnects && rep.max_stretch <= bound;
  return rep;
}

}  // namespace ndecomp
