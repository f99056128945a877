// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "ndecomp/generators.hpp"
#include "ndecomp/spanner.hpp"

using namespace ndecomp;

namespace {

Graph clique(int n, Weight wmax = 1, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::vector<WeightedEdge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.push_back({u, v, 1 + static_cast<Weight>(rng() % static_cast<std::uint64_t>(wmax))});
  return Graph::from_edges(n, e);
}

// Largest d_H / d_G over connected pairs, or -1 if H disconnects one.
Rational oracle_stretch(const Graph& g, const std::vector<WeightedEdge>& edges) {
  auto dg = oracle::floyd_warshall(g);
  auto dh = oracle::floyd_warshall(Graph::from_edges(g.node_count(), edges));
  Rational worst = 1;
  for (std::size_t u = 0; u < dg.size(); ++u)
    for (std::size_t v = u + 1; v < dg.size(); ++v) {
      if (dg[u][v] == kInf) continue;
      if (dh[u][v] == kInf) return -1;
      worst = std::max(worst, Rational(dh[u][v], dg[u][v]));
    }
  return worst;
}

}  // namespace

TEST(Spanner, RejectsKZero) { EXPECT_THROW(build_spanner(path_graph(3), 0, false), ValidationError); }

TEST(Spanner, CeilRoot) {
  EXPECT_EQ(ceil_root(128, 2), 12);
  EXPECT_EQ(ceil_root(121, 2), 11);
  EXPECT_EQ(ceil_root(128, 3), 6);
  EXPECT_EQ(ceil_root(1, 5), 1);
}

TEST(Spanner, KOneKeepsAllEdges) {
  for (bool weighted : {false, true}) {
    Graph g = random_graph(40, 200, 3, 1, weighted ? 9 : 1);
    auto r = build_spanner(g, 1, weighted);
    EXPECT_EQ(r.edges, g.edges());
    EXPECT_TRUE(r.steps.empty());
  }
}

TEST(Spanner, TreeInputReturnsTree) {
  for (int k : {2, 3, 4})
    for (bool weighted : {false, true}) {
      Graph t = tree_graph(64, 5, true, 1, weighted ? 20 : 1);
      auto r = build_spanner(t, k, weighted);
      EXPECT_EQ(r.edges, t.edges()) << "k=" << k;
      EXPECT_EQ(verify_stretch(t, r.edges, 1).max_stretch, 1);
    }
}

TEST(Spanner, EmptyAndEdgeless) {
  EXPECT_TRUE(build_spanner(Graph(0), 3, false).edges.empty());
  EXPECT_TRUE(build_spanner(Graph(7), 3, true).edges.empty());
}

TEST(Spanner, StretchMatchesOracleOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 30 + static_cast<int>(rng() % 70);
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(n) * (n - 1) / 2, n + rng() % (6 * n));
    const bool weighted = trial % 2 == 1;
    Graph g = random_graph(n, m, rng(), 1, weighted ? 50 : 1);
    for (int k : {2, 3}) {
      auto r = build_spanner(g, k, weighted);
      const Rational want = oracle_stretch(g, r.edges);
      ASSERT_GE(want, 1) << "spanner disconnected a pair, trial " << trial;
      EXPECT_LE(want, 2 * k - 1);
      auto rep = verify_stretch(g, r.edges, 2 * k - 1);
      EXPECT_TRUE(rep.ok);
      EXPECT_EQ(rep.max_stretch, want);
    }
  }
}

TEST(Spanner, StepInvariantsOn128Nodes) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Graph g = random_graph(128, 1500, seed, 1, seed % 2 ? 30 : 1);
    for (int k : {2, 3}) {
      auto r = build_spanner(g, k, seed % 2 == 1);
      ASSERT_GE(r.steps.size(), 1u);
      ASSERT_LE(r.steps.size(), static_cast<std::size_t>(k - 1));
      EXPECT_EQ(r.steps[0].clusters, 128u);
      for (const auto& st : r.steps) {
        EXPECT_LE(boost::multiprecision::pow(BigInt(st.sampled), k), boost::multiprecision::pow(BigInt(128), k - st.i));
        EXPECT_EQ(st.p, Rational(1, 24 * ceil_root(128, k)) / (1 << st.retries));
      }
      EXPECT_LE(HighFloat(static_cast<long long>(r.edges.size())), spanner_size_bound(128, k));
      EXPECT_TRUE(verify_stretch(g, r.edges, 2 * k - 1).ok);
    }
  }
}

// With the default divisor the sampling rate at this size is below 1/200 and
// few clusters survive; a divisor of 2 shows actual sparsification.
TEST(Spanner, SmallDivisorSparsifiesDenseGraphs) {
  SpannerConstants c;
  c.gamma3 = 2;
  for (bool weighted : {false, true}) {
    Graph g = clique(60, weighted ? 100 : 1, 2);
    for (int k : {2, 3}) {
      auto r = build_spanner(g, k, weighted, c);
      EXPECT_LT(2 * r.edges.size(), g.edge_count());
      EXPECT_TRUE(verify_stretch(g, r.edges, 2 * k - 1).ok);
      EXPECT_GE(r.steps.front().sampled, 1u);
    }
  }
}

TEST(Spanner, Deterministic) {
  Graph g = random_graph(90, 400, 8, 1, 7);
  EXPECT_EQ(build_spanner(g, 3, true).edges, build_spanner(g, 3, true).edges);
}

TEST(VerifyStretch, WholeGraphIsStretchOne) {
  Graph g = grid_graph(5, 5);
  auto r = verify_stretch(g, g.edges(), 1);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.max_stretch, 1);
}

TEST(VerifyStretch, MissingBridgeDisconnects) {
  Graph g = path_graph(4);
  auto e = g.edges();
  e.erase(e.begin() + 1);
  auto r = verify_stretch(g, e, 100);
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(r.disconnects);
}

TEST(VerifyStretch, CycleMinusEdge) {
  Graph g = Graph::from_edges(5, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {0, 4, 1}});
  auto e = g.edges();
  e.pop_back();  // drop (3,4)
  auto r = verify_stretch(g, e, 3);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.max_stretch, 4);
}

TEST(VerifyStretch, RejectsForeignEdges) {
  Graph g = path_graph(3);
  EXPECT_FALSE(verify_stretch(g, {{0, 2, 1}}, 10).subgraph);
  EXPECT_FALSE(verify_stretch(g, {{0, 1, 5}}, 10).subgraph);
}

TEST(VerifyStretch, CapRefusal) {
  EXPECT_THROW(verify_stretch(path_graph(10), path_graph(10).edges(), 1, 5), CapExceeded);
}
