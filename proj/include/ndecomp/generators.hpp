// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ndecomp/errors.hpp"
#include "ndecomp/graph.hpp"
#include "ndecomp/hitting_set.hpp"

namespace ndecomp {

// All generators draw from std::mt19937_64, whose output sequence is fixed by
// the standard, and reduce with plain modulo instead of the library
// distributions (those are implementation defined). Output is therefore
// identical on every platform.

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

// m distinct edges chosen uniformly; weights uniform in [wmin, wmax].
inline Graph random_graph(int n, std::size_t m, std::uint64_t seed, Weight wmin = 1, Weight wmax = 1) {
  if (n < 0) throw ValidationError("negative node count");
  if (wmin < 1 || wmax < wmin) throw ValidationError("bad weight range");
  std::uint64_t max_edges = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n > 0 ? n - 1 : 0) / 2;
  if (m > max_edges) throw ValidationError("too many edges requested for " + std::to_string(n) + " nodes");
  std::mt19937_64 rng(seed);
  std::set<std::pair<Node, Node>> chosen;
  std::vector<WeightedEdge> edges;
  while (edges.size() < m) {
    Node u = static_cast<Node>(draw(rng, static_cast<std::uint64_t>(n)));
    Node v = static_cast<Node>(draw(rng, static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    auto key = std::minmax(u, v);
    if (!chosen.insert(key).second) continue;
    Weight w = wmin + static_cast<Weight>(draw(rng, static_cast<std::uint64_t>(wmax - wmin + 1)));
    edges.push_back({key.first, key.second, w});
  }
  return Graph::from_edges(n, edges);
}

// Random graph that contains a random spanning tree, so it is connected.
inline Graph random_connected_graph(int n, std::size_t extra, std::uint64_t seed, Weight wmin = 1,
                                    Weight wmax = 1) {
  std::mt19937_64 rng(seed);
  std::set<std::pair<Node, Node>> chosen;
  std::vector<WeightedEdge> edges;
  auto weight = [&] { return wmin + static_cast<Weight>(draw(rng, static_cast<std::uint64_t>(wmax - wmin + 1))); };
  for (Node v = 1; v < n; ++v) {
    Node u = static_cast<Node>(draw(rng, static_cast<std::uint64_t>(v)));
    chosen.insert({u, v});
    edges.push_back({u, v, weight()});
  }
  std::uint64_t max_edges = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n > 0 ? n - 1 : 0) / 2;
  std::size_t target = edges.size() + extra;
  if (target > max_edges) throw ValidationError("too many edges requested");
  while (edges.size() < target) {
    Node u = static_cast<Node>(draw(rng, static_cast<std::uint64_t>(n)));
    Node v = static_cast<Node>(draw(rng, static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    auto key = std::minmax(u, v);
    if (!chosen.insert(key).second) continue;
    edges.push_back({key.first, key.second, weight()});
  }
  return Graph::from_edges(n, edges);
}

// a x b grid; node r*b + c.
inline Graph grid_graph(int a, int b) {
  if (a < 1 || b < 1) throw ValidationError("grid sides must be >= 1");
  std::vector<WeightedEdge> edges;
  for (int r = 0; r < a; ++r)
    for (int c = 0; c < b; ++c) {
      if (c + 1 < b) edges.push_back({r * b + c, r * b + c + 1, 1});
      if (r + 1 < a) edges.push_back({r * b + c, (r + 1) * b + c, 1});
    }
  return Graph::from_edges(a * b, edges);
}

inline Graph path_graph(int n) {
  std::vector<WeightedEdge> edges;
  for (int v = 1; v < n; ++v) edges.push_back({v - 1, v, 1});
  return Graph::from_edges(n, edges);
}

// Without a seed: the heap-shaped binary tree (parent of v is (v-1)/2).
// With a seed: a random recursive tree (parent of v uniform in 0..v-1).
inline Graph tree_graph(int n, std::uint64_t seed = 0, bool random = false, Weight wmin = 1, Weight wmax = 1) {
  std::mt19937_64 rng(seed);
  std::vector<WeightedEdge> edges;
  for (int v = 1; v < n; ++v) {
    Node parent = random ? static_cast<Node>(draw(rng, static_cast<std::uint64_t>(v))) : (v - 1) / 2;
    Weight w = wmin + static_cast<Weight>(draw(rng, static_cast<std::uint64_t>(wmax - wmin + 1)));
    edges.push_back({parent, v, w});
  }
  return Graph::from_edges(n, edges);
}

inline Graph star_graph(int leaves) {
  std::vector<WeightedEdge> edges;
  for (int v = 1; v <= leaves; ++v) edges.push_back({0, v, 1});
  return Graph::from_edges(leaves + 1, edges);
}

// N random sets over 0..n-1. Most sizes are uniform in 1..max_size; one set
// in `large_every` (0 disables) is instead uniform in 1..n. Weights uniform
// in 1..max_weight.
inline HittingInstance random_hitting_instance(int n, std::size_t N, const Rational& p, int max_size,
                                               std::uint64_t seed, int large_every = 0, int max_weight = 10) {
  if (n < 1 || max_size < 1 || max_weight < 1) throw ValidationError("bad instance parameters");
  std::mt19937_64 rng(seed);
  HittingInstance inst;
  inst.n = n;
  inst.p = p;
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  const auto cap = static_cast<std::uint64_t>(std::min(n, max_size));
  for (std::size_t s = 0; s < N; ++s) {
    bool large = large_every > 0 && draw(rng, static_cast<std::uint64_t>(large_every)) == 0;
    auto size = static_cast<std::size_t>(1 + draw(rng, large ? static_cast<std::uint64_t>(n) : cap));
    for (std::size_t k = 0; k < size; ++k)
      std::swap(pool[k], pool[k + draw(rng, static_cast<std::uint64_t>(n) - k)]);
    inst.sets.emplace_back(pool.begin(), pool.begin() + static_cast<long>(size));
    inst.weights.push_back(1 + static_cast<std::int64_t>(draw(rng, static_cast<std::uint64_t>(max_weight))));
  }
  return inst;
}

// s distinct nodes by a partial Fisher-Yates shuffle, returned sorted.
inline std::vector<Node> random_sources(int n, std::size_t s, std::uint64_t seed) {
  if (s < 1 || s > static_cast<std::size_t>(std::max(n, 0))) throw ValidationError("source count must lie in 1..n");
  std::mt19937_64 rng(seed);
  std::vector<Node> all(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
  for (std::size_t i = 0; i < s; ++i) std::swap(all[i], all[i + draw(rng, all.size() - i)]);
  all.resize(s);
  std::sort(all.begin(), all.end());
  return all;
}

// Generator spec as used on the command line:
//   random n m seed | grid a b | tree n [seed] | path n
inline Graph generate(const std::vector<std::string>& spec, Weight wmin = 1, Weight wmax = 1) {
  auto num = [&](std::size_t k) -> long long {
    if (k >= spec.size()) throw ValidationError("generator spec is missing an argument");
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(spec[k], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != spec[k].size() || v < 0)
      throw ValidationError("generator argument is not a nonnegative integer: " + spec[k]);
    return v;
  };
  if (spec.empty()) throw ValidationError("empty generator spec");
  const std::string& kind = spec[0];
  if (kind == "random" && spec.size() == 4)
    return random_graph(static_cast<int>(num(1)), static_cast<std::size_t>(num(2)),
                        static_cast<std::uint64_t>(num(3)), wmin, wmax);
  if (kind == "grid" && spec.size() == 3) return grid_graph(static_cast<int>(num(1)), static_cast<int>(num(2)));
  if (kind == "tree" && spec.size() == 2) return tree_graph(static_cast<int>(num(1)), 0, false, wmin, wmax);
  if (kind == "tree" && spec.size() == 3)
    return tree_graph(static_cast<int>(num(1)), static_cast<std::uint64_t>(num(2)), true, wmin, wmax);
  if (kind == "path" && spec.size() == 2) return path_graph(static_cast<int>(num(1)));
  throw ValidationError("unknown generator spec; expected: random n m seed | grid a b | tree n [seed] | path n");
}

}  // namespace ndecomp
