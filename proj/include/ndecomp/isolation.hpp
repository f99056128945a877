// SPDX-License-Identifier: Apache-2.0
// From low s-hop degree to s-separation: keep a pairwise independent sample
// of whole clusters, then drop every node that still sees a second kept
// cluster within distance s of its tree path.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ndecomp/clustering.hpp"
#include "ndecomp/errors.hpp"
#include "ndecomp/graph.hpp"
#include "ndecomp/numeric.hpp"
#include "ndecomp/pairwise.hpp"

namespace ndecomp {

struct SeparatedClustering {
  Clustering clustering;
  int s = 2;
  int k = 1;
  std::vector<int> selected;  // input cluster ids kept whole in the sample
  std::vector<int> source;    // per output cluster, its input cluster id
  std::size_t input_clustered = 0;
  Rational expected;  // E[utility - cost] under the unfixed sample
  Rational utility, cost;
  PairwiseSpace space;
  std::uint64_t evaluations = 0;

  // Guaranteed lower bound on the output count: |V(C_in)| / (8k).
  Rational count_bound() const { return Rational(static_cast<long long>(input_clustered), 8 * static_cast<long long>(k)); }
};

// The sub-clustering made of the listed input clusters, trees unchanged.
inline Clustering select_clusters(const Clustering& in, const std::vector<int>& ids) {
  Clustering out(in.node_count());
  for (int id : ids) {
    const auto& cl = in.clusters[static_cast<std::size_t>(id)];
    const int nid = static_cast<int>(out.clusters.size());
    for (Node v : cl.nodes) {
      out.cluster_of[static_cast<std::size_t>(v)] = nid;
      out.parent[static_cast<std::size_t>(v)] = in.parent[static_cast<std::size_t>(v)];
    }
    out.clusters.push_back(cl);
  }
  return out;
}

// Each cluster is sampled with probability 2^-l in [1/(4k), 1/(2k)), and bit
// fixing maximizes utility(x) - cost(x) with
//   utility = sum_C |C| x_C,  cost = sum_u sum_{C in S_u, C != C_u} x_{C_u} x_C.
// Pruned nodes satisfy I(u kept) >= x_{C_u} - sum x_{C_u} x_C, so the output
// count is at least utility - cost, which is asserted to be >= |V(C_in)|/(8k).
inline SeparatedClustering subsample(const Graph& g, const Clustering& in, int s, int k) {
  if (s < 1) throw ValidationError("s must be positive");
  if (k < 1) throw ValidationError("k must be at least 1");
  check_invariant(in.node_count() == g.node_count(), "clustering size does not match the graph");
  SeparatedClustering out;
  out.s = s;
  out.k = k;
  out.clustering = Clustering(g.node_count());
  out.input_clustered = in.clustered_count();
  auto S = compute_Su(g, in, s);
  for (Node u = 0; u < g.node_count(); ++u)
    if (S[static_cast<std::size_t>(u)].size() > static_cast<std::size_t>(k))
      throw ValidationError("input s-hop degree " + std::to_string(S[static_cast<std::size_t>(u)].size()) +
                            " at node " + std::to_string(u) + " exceeds k = " + std::to_string(k));
  if (in.clusters.empty()) return out;

  out.space = build_space(in.clusters.size(), Rational(1, 4 * static_cast<long long>(k)));
  QuadraticObjective f(out.space);  // minimizes cost - utility
  for (std::size_t c = 0; c < in.clusters.size(); ++c)
    f.add_linear(c + 1, -BigInt(in.clusters[c].nodes.size()));
  for (Node u = 0; u < g.node_count(); ++u) {
    const int own = in.cluster_of[static_cast<std::size_t>(u)];
    if (own < 0) continue;
    for (int c : S[static_cast<std::size_t>(u)])
      if (c != own) f.add_pair(static_cast<std::uint64_t>(own) + 1, static_cast<std::uint64_t>(c) + 1, 1);
  }
  FixResult fixed = fix_bits(out.space, [&](const Seed& prefix) {
    ++out.evaluations;
    return f.expectation_scaled(prefix);
  });
  out.expected = -fixed.initial;
  check_invariant(out.expected >= out.count_bound(), "subsampling: expected utility minus cost below |C|/(8k)");

  std::vector<char> pick(in.clusters.size(), 0);
  for (auto i : selected_indices(out.space, fixed.seed)) {
    pick[static_cast<std::size_t>(i - 1)] = 1;
    out.selected.push_back(static_cast<int>(i - 1));
  }
  out.utility = 0;
  out.cost = 0;
  for (int c : out.selected) out.utility += static_cast<long long>(in.clusters[static_cast<std::size_t>(c)].nodes.size());
  for (Node u = 0; u < g.node_count(); ++u) {
    const int own = in.cluster_of[static_cast<std::size_t>(u)];
    if (own < 0 || !pick[static_cast<std::size_t>(own)]) continue;
    for (int c : S[static_cast<std::size_t>(u)])
      if (c != own && pick[static_cast<std::size_t>(c)]) out.cost += 1;
  }
  check_invariant(out.utility - out.cost == -fixed.final, "subsampling: objective disagrees with the selected sample");

  Clustering sample = select_clusters(in, out.selected);
  auto S2 = compute_Su(g, sample, s);
  for (std::size_t c = 0; c < sample.clusters.size(); ++c) {
    std::vector<Node> kept;
    for (Node v : sample.clusters[c].nodes)
      if (S2[static_cast<std::size_t>(v)].size() == 1) kept.push_back(v);
    if (kept.empty()) continue;
    out.clustering.add_cluster(g, sample.clusters[c].center, std::move(kept));
    out.source.push_back(out.selected[c]);
  }
  const Rational kept_count(static_cast<long long>(out.clustering.clustered_count()));
  check_invariant(kept_count >= out.utility - out.cost, "subsampling: fewer nodes kept than utility minus cost");
  check_invariant(kept_count >= out.count_bound(), "subsampling: fewer than |C|/(8k) nodes kept");
  check_invariant(verify_separation(g, out.clustering, s).ok, "subsampling: output is not s-separated");
  return out;
}

}  // namespace ndecomp
