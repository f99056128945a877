// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "brute_force.hpp"
#include "ndecomp/distance_oracle.hpp"
#include "ndecomp/generators.hpp"

using namespace ndecomp;

namespace {

std::vector<Node> pick_sources(int n, std::size_t s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Node> all(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
  for (std::size_t i = 0; i < s; ++i) std::swap(all[i], all[i + rng() % (all.size() - i)]);
  all.resize(s);
  return all;
}

// Every source query against Floyd-Warshall; returns the worst stretch.
Rational check_sandwich(const Graph& g, const OracleData& d) {
  auto D = oracle::floyd_warshall(g);
  Rational worst = 1;
  for (Node u : d.sources)
    for (Node v = 0; v < g.node_count(); ++v) {
      auto r = query(d, u, v);
      const Dist t = D[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
      EXPECT_LE(r.hops, d.k - 1);
      if (t == kInf || t == 0) {
        EXPECT_EQ(r.q, t);
        continue;
      }
      EXPECT_GE(r.q, t);
      EXPECT_LE(r.q, (2 * d.k - 1) * t) << "u=" << u << " v=" << v;
      worst = std::max(worst, Rational(r.q, t));
    }
  return worst;
}

// B(v) = A_{k-1} ∪ {w ∈ A_i : d(w, v) < d(A_{i+1}, v)}, over reachable w.
std::map<Node, Dist> bunch_by_definition(const OracleData& d, const std::vector<std::vector<Dist>>& D, Node v) {
  std::map<Node, Dist> B;
  auto dist = [&](Node w) { return D[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)]; };
  for (int i = 0; i < d.k; ++i) {
    Dist next = kInf;
    if (i + 1 < d.k)
      for (Node w : d.levels[static_cast<std::size_t>(i + 1)].members) next = std::min(next, dist(w));
    for (Node w : d.levels[static_cast<std::size_t>(i)].members)
      if (dist(w) != kInf && (i + 1 == d.k || dist(w) < next)) B[w] = dist(w);
  }
  return B;
}

}  // namespace

TEST(Oracle, RejectsBadArguments) {
  Graph g = path_graph(5);
  EXPECT_THROW(build_oracle(g, {0}, 0), ValidationError);
  EXPECT_THROW(build_oracle(g, {}, 2), ValidationError);
  EXPECT_THROW(build_oracle(g, {1, 1}, 2), ValidationError);
  EXPECT_THROW(build_oracle(g, {9}, 2), ValidationError);
  auto d = build_oracle(g, {0, 2}, 2);
  EXPECT_THROW(query(d, 1, 3), ValidationError);
  EXPECT_THROW(query(d, 0, 7), ValidationError);
}

TEST(Oracle, EllUsesNaturalLog) {
  EXPECT_EQ(oracle_ell(128, 16, 2), 195u);  // 10 * 4 * ln 128 = 194.08
  EXPECT_EQ(oracle_ell(1, 1, 1), 7u);  // n padded to 2: 10 ln 2 = 6.93
}

TEST(Oracle, KOneStoresAllSourceDistances) {
  Graph g = random_connected_graph(50, 80, 4, 1, 20);
  auto S = pick_sources(50, 7, 1);
  auto d = build_oracle(g, S, 1);
  auto D = oracle::floyd_warshall(g);
  for (Node v = 0; v < 50; ++v) {
    EXPECT_EQ(d.bunch[static_cast<std::size_t>(v)].size(), 7u);
    for (Node u : S) EXPECT_EQ(query(d, u, v).q, D[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]);
  }
}

TEST(Oracle, SingleSourceIsExact) {
  Graph g = random_connected_graph(40, 60, 9, 1, 10);
  for (int k : {1, 2, 3}) {
    auto d = build_oracle(g, {17}, k);
    for (const auto& l : d.levels) EXPECT_EQ(l.members, std::vector<Node>{17});
    EXPECT_EQ(check_sandwich(g, d), 1);
  }
}

TEST(Oracle, SameNodeIsZero) {
  Graph g = random_connected_graph(30, 30, 2, 1, 9);
  auto d = build_oracle(g, {3, 8, 20}, 2);
  for (Node u : {3, 8, 20}) EXPECT_EQ(query(d, u, u).q, 0);
}

TEST(Oracle, StarFromCenter) {
  Graph g = star_graph(20);
  auto d = build_oracle(g, {0}, 2);
  auto rep = verify_oracle(d, g);
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.max_stretch, 1);
}

TEST(Oracle, SingleNodeGraph) {
  auto d = build_oracle(Graph(1), {0}, 2);
  auto rep = verify_oracle(d, Graph(1));
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.max_stretch, 1);
}

TEST(Oracle, SandwichOnWeightedRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int n = 64 + static_cast<int>(seed) * 8;
    Graph g = random_connected_graph(n, 2 * static_cast<std::size_t>(n), seed, 1, 100);
    for (int k : {2, 3}) {
      auto d = build_oracle(g, pick_sources(n, k == 2 ? 16 : 27, seed), k);
      check_sandwich(g, d);
      auto rep = verify_oracle(d, g);
      EXPECT_EQ(rep.violations, 0u);
      EXPECT_TRUE(rep.levels_ok);
      EXPECT_TRUE(rep.size_ok);
    }
  }
}

TEST(Oracle, LevelsNestAndHitNeighborhoods) {
  Graph g = random_connected_graph(100, 150, 5, 1, 30);
  auto d = build_oracle(g, pick_sources(100, 40, 5), 3);
  auto D = oracle::floyd_warshall(g);
  for (int i = 1; i < d.k; ++i) {
    const auto& prev = d.levels[static_cast<std::size_t>(i - 1)].members;
    const auto& cur = d.levels[static_cast<std::size_t>(i)].members;
    EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
    EXPECT_FALSE(cur.empty());
    for (Node v = 0; v < 100; ++v) {
      std::vector<std::pair<Dist, Node>> near;
      for (Node w : prev) near.push_back({D[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)], w});
      std::sort(near.begin(), near.end());
      near.resize(std::min(near.size(), d.ell));
      bool hit = false;
      for (const auto& [x, w] : near) hit = hit || std::binary_search(cur.begin(), cur.end(), w);
      EXPECT_TRUE(hit);
    }
  }
}

TEST(Oracle, BunchesMatchDefinition) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Graph g = random_connected_graph(80, 120, seed, 1, 50);
    auto d = build_oracle(g, pick_sources(80, 30, seed), 3);
    auto D = oracle::floyd_warshall(g);
    for (Node v = 0; v < 80; ++v) EXPECT_EQ(d.bunch[static_cast<std::size_t>(v)], bunch_by_definition(d, D, v));
  }
}

TEST(Oracle, PivotsAreClosestByDistanceThenId) {
  Graph g = grid_graph(6, 6);
  auto d = build_oracle(g, {0, 5, 30, 35, 14}, 2);
  auto D = oracle::floyd_warshall(g);
  for (int i = 0; i < d.k; ++i)
    for (Node v = 0; v < 36; ++v) {
      std::pair<Dist, Node> best{kInf, -1};
      for (Node w : d.levels[static_cast<std::size_t>(i)].members)
        best = std::min(best, {D[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)], w});
      EXPECT_EQ(d.pivot[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)], best.second);
      EXPECT_EQ(d.pivot_dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)], best.first);
    }
}

TEST(Oracle, DisconnectedGraph) {
  Graph g = random_graph(60, 50, 3, 1, 9);
  auto d = build_oracle(g, pick_sources(60, 12, 3), 2);
  check_sandwich(g, d);
  EXPECT_EQ(verify_oracle(d, g).violations, 0u);
}

// With l = 1 the solver's sample is usually too thin; repairs restore the
// hitting property and queries stay within the stretch bound.
TEST(Oracle, TinyNeighborhoodsNeedRepairs) {
  Graph g = random_connected_graph(60, 90, 6, 1, 40);
  OracleConstants c;
  c.ell_factor = 0;
  auto d = build_oracle(g, pick_sources(60, 20, 6), 2, c);
  EXPECT_EQ(d.ell, 1u);
  EXPECT_GT(d.levels[1].repairs, 0u);
  check_sandwich(g, d);
}

TEST(Oracle, JsonRoundTrip) {
  Graph g = random_connected_graph(50, 70, 8, 1, 25);
  auto d = build_oracle(g, pick_sources(50, 10, 8), 2);
  auto j = oracle_to_json(d);
  auto back = oracle_from_json(nlohmann::ordered_json::parse(j.dump()));
  EXPECT_EQ(oracle_to_json(back).dump(), j.dump());
  for (Node u : d.sources)
    for (Node v = 0; v < 50; ++v) EXPECT_EQ(query(back, u, v).q, query(d, u, v).q);
  EXPECT_THROW(oracle_from_json(nlohmann::ordered_json::parse("{\"n\": 3}")), ValidationError);
}

TEST(Oracle, Deterministic) {
  Graph g = random_connected_graph(70, 100, 1, 1, 60);
  auto S = pick_sources(70, 16, 1);
  EXPECT_EQ(oracle_to_json(build_oracle(g, S, 2)).dump(), oracle_to_json(build_oracle(g, S, 2)).dump());
}
