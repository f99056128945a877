// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "ndecomp/generators.hpp"
#include "ndecomp/graph.hpp"

using namespace ndecomp;

namespace {

Graph path3() { return parse_graph("3 2\n0 1\n1 2\n"); }

}  // namespace

TEST(LoadGraph, PathGraph) {
  Graph g = path3();
  EXPECT_EQ(g.node_count(), 3);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(LoadGraph, SelfLoopIsValidationError) {
  EXPECT_THROW(parse_graph("2 1\n0 0\n"), ValidationError);
}

TEST(LoadGraph, OutOfRangeIsValidationError) {
  EXPECT_THROW(parse_graph("2 1\n0 2\n"), ValidationError);
}

TEST(LoadGraph, DuplicateKeepsMinimumWeight) {
  Graph g = parse_graph("2 2\n0 1 5\n1 0 3\n");
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edge_weight(0, 1), 3);
  EXPECT_EQ(g.edge_weight(1, 0), 3);
}

TEST(LoadGraph, CommentsAndBlankLinesSkipped) {
  Graph g = parse_graph("# a comment\n3 2\n\n0 1\n  # another\n1 2 4\n");
  EXPECT_EQ(g.edge_weight(1, 2), 4);
}

TEST(LoadGraph, MalformedLineReportsLineNumber) {
  try {
    parse_graph("3 2\n0 1\n1 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_graph("3 2\n0 1 2 3\n1 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadGraph, RoundTrip) {
  Graph g = random_graph(30, 60, 5, 1, 9);
  std::ostringstream out;
  write_graph(out, g);
  EXPECT_EQ(parse_graph(out.str()), g);
}

TEST(MultiSourceBfs, SingleSource) {
  auto d = multi_source_bfs(path3(), {{0, 0}});
  EXPECT_EQ(d, (std::vector<Dist>{0, 1, 2}));
}

TEST(MultiSourceBfs, OffsetsTakeMinimum) {
  auto d = multi_source_bfs(path3(), {{0, 2}, {2, 0}});
  EXPECT_EQ(d, (std::vector<Dist>{2, 1, 0}));
}

TEST(MultiSourceBfs, EmptySourcesGiveInfinity) {
  auto d = multi_source_bfs(path3(), {});
  for (Dist x : d) EXPECT_EQ(x, kInf);
}

TEST(MultiSourceBfs, AllSourcesAtZero) {
  Graph g = random_graph(20, 40, 3);
  std::vector<Source> src;
  for (Node v = 0; v < g.node_count(); ++v) src.push_back({v, 0});
  for (Dist x : multi_source_bfs(g, src)) EXPECT_EQ(x, 0);
}

// Oracle: the minimum over per-source plain BFS runs.
TEST(MultiSourceBfs, MatchesPerSourceMinimum) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng() % 63);
    Graph g = random_graph(n, static_cast<std::size_t>(rng() % (2 * n)), rng());
    std::vector<Source> src;
    int k = 1 + static_cast<int>(rng() % 5);
    for (int s = 0; s < k; ++s) src.push_back({static_cast<Node>(rng() % n), static_cast<Dist>(rng() % 7)});
    auto got = multi_source_bfs(g, src);
    for (Node u = 0; u < n; ++u) {
      Dist want = kInf;
      for (const auto& s : src) {
        auto d = bfs(g, s.node);
        if (d[u] != kInf) want = std::min(want, s.offset + d[u]);
      }
      EXPECT_EQ(got[u], want) << "trial " << trial << " node " << u;
    }
  }
}

TEST(InducedSubgraph, TriangleKeepTwo) {
  Graph tri = parse_graph("3 3\n0 1\n1 2\n0 2\n");
  auto s = induced_subgraph(tri, {0, 1});
  EXPECT_EQ(s.graph.node_count(), 2);
  EXPECT_EQ(s.graph.edge_count(), 1u);
}

TEST(InducedSubgraph, KeepAllIsIdentity) {
  Graph g = random_graph(25, 50, 8);
  std::vector<Node> all(25);
  for (int i = 0; i < 25; ++i) all[i] = i;
  auto s = induced_subgraph(g, all);
  EXPECT_EQ(s.graph, g);
  for (int i = 0; i < 25; ++i) EXPECT_EQ(s.to_original[i], i);
}

TEST(InducedSubgraph, FiveCycleAlternateNodesIsolated) {
  Graph c5 = parse_graph("5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n");
  auto s = induced_subgraph(c5, {0, 2, 4});
  EXPECT_EQ(s.graph.node_count(), 3);
  EXPECT_EQ(s.graph.edge_count(), 1u);  // 4-0 is an edge of the cycle
  EXPECT_TRUE(s.graph.has_edge(s.to_local[0], s.to_local[4]));
}

TEST(InducedSubgraph, InverseRemapRestrictsAdjacency) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_graph(30, 70, rng(), 1, 5);
    std::vector<Node> keep;
    for (Node v = 0; v < 30; ++v)
      if (rng() % 2) keep.push_back(v);
    auto s = induced_subgraph(g, keep);
    for (Node a : keep)
      for (Node b : keep) {
        if (a == b) continue;
        EXPECT_EQ(s.graph.edge_weight(s.to_local[a], s.to_local[b]), g.edge_weight(a, b));
      }
  }
}

TEST(StrongDiameter, Examples) {
  EXPECT_EQ(component_strong_diameter(path3(), {0, 1, 2}), 2);
  EXPECT_EQ(component_strong_diameter(path3(), {0, 2}), kInf);
  Graph c4 = parse_graph("4 4\n0 1\n1 2\n2 3\n3 0\n");
  EXPECT_EQ(component_strong_diameter(c4, {0, 1, 2, 3}), 2);
  EXPECT_THROW(component_strong_diameter(c4, {}), ValidationError);
}

TEST(StrongDiameter, AtLeastWeakDiameter) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_graph(20, 35, rng());
    std::vector<Node> cluster;
    for (Node v = 0; v < 20; ++v)
      if (rng() % 3 == 0) cluster.push_back(v);
    if (cluster.empty()) cluster.push_back(0);
    Dist weak = 0;
    for (Node a : cluster) {
      auto d = bfs(g, a);
      for (Node b : cluster) weak = std::max(weak, d[b]);
    }
    EXPECT_GE(component_strong_diameter(g, cluster), weak);
  }
}

TEST(AllPairs, Examples) {
  EXPECT_EQ(all_pairs_distances(parse_graph("2 1\n0 1 7\n"))[0][1], 7);
  EXPECT_EQ(all_pairs_distances(parse_graph("3 2\n0 1 2\n1 2 3\n"))[0][2], 5);
}

TEST(AllPairs, MatchesSingleSourceRuns) {
  Graph g = random_graph(20, 45, 17, 1, 20);
  auto apd = all_pairs_distances(g);
  for (Node s = 0; s < 20; ++s) EXPECT_EQ(apd[s], dijkstra(g, s));
  for (Node a = 0; a < 20; ++a)
    for (Node b = 0; b < 20; ++b) EXPECT_EQ(apd[a][b], apd[b][a]);
}

TEST(AllPairs, CapRefuses) {
  Graph g = random_graph(10, 12, 1);
  EXPECT_THROW(all_pairs_distances(g, 5), CapExceeded);
}
