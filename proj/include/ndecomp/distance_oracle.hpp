// SPDX-License-Identifier: Apache-2.0
// Source-restricted approximate distance oracle with stretch 2k-1. Levels
// A_0 = S ⊇ A_1 ⊇ ... ⊇ A_{k-1} come from ordered hitting-set solves over the
// l closest members of the previous level; distances are exact.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ndecomp/errors.hpp"
#include "ndecomp/graph.hpp"
#include "ndecomp/hitting_set.hpp"
#include "ndecomp/numeric.hpp"

namespace ndecomp {

struct OracleConstants {
  long long gamma = 24;        // p = 1 / (gamma * ceil(s^{1/k}))
  long long ell_factor = 10;   // l = ceil(ell_factor * s^{1/k} * ln n)
  long long size_c = 8;        // size check: sum |B(v)| <= c * n * k * s^{1/k}
};

struct OracleLevel {
  std::vector<Node> members;  // sorted
  Rational p;                 // sampling parameter of the solve that produced it
  int retries = 0;
  std::size_t repairs = 0;    // unhit N_{i-1}(v) patched with their closest member
  std::size_t sets = 0;
  Rational phi;
  bool size_ok = true;        // |A_i| <= s^{1 - i/k}
};

struct OracleData {
  int n = 0;
  int k = 1;
  std::size_t ell = 0;
  OracleConstants constants;
  std::vector<Node> sources;              // A_0, sorted
  std::vector<OracleLevel> levels;        // A_0 .. A_{k-1}
  std::vector<std::vector<Node>> pivot;   // [i][v]: closest member of A_i by (distance, id), -1 if unreachable
  std::vector<std::vector<Dist>> pivot_dist;
  std::vector<std::map<Node, Dist>> bunch;
  std::vector<int> component;
  std::uint64_t evaluations = 0;

  bool is_source(Node u) const { return std::binary_search(sources.begin(), sources.end(), u); }

  std::size_t bunch_total() const {
    std::size_t t = 0;
    for (const auto& b : bunch) t += b.size();
    return t;
  }
};

struct QueryResult {
  Dist q = 0;
  int hops = 0;  // final loop index i
};

namespace detail {

// s^{1/k} at 160-bit precision.
inline HighFloat root_of(std::size_t s, int k) {
  return boost::multiprecision::pow(HighFloat(static_cast<unsigned long long>(s)), HighFloat(1) / k);
}

}  // namespace detail

inline std::size_t oracle_ell(int n, std::size_t s, int k, long long factor = OracleConstants{}.ell_factor) {
  const HighFloat l = HighFloat(factor) * detail::root_of(s, k) *
                      boost::multiprecision::log(HighFloat(std::max(n, 2)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(boost::multiprecision::ceil(l)));
}

inline HighFloat oracle_size_bound(int n, std::size_t s, int k, long long c = OracleConstants{}.size_c) {
  return HighFloat(c) * n * k * detail::root_of(s, k);
}

inline OracleData build_oracle(const Graph& g, std::vector<Node> S, int k, const OracleConstants& cst = {}) {
  if (k < 1) throw ValidationError("oracle level count k must be at least 1");
  if (S.empty()) throw ValidationError("source set must be nonempty");
  if (cst.gamma < 2) throw ValidationError("gamma must be at least 2");
  const int n = g.node_count();
  std::sort(S.begin(), S.end());
  if (std::adjacent_find(S.begin(), S.end()) != S.end()) throw ValidationError("duplicate source");
  for (Node u : S)
    if (u < 0 || u >= n) throw ValidationError("source " + std::to_string(u) + " outside the graph");

  OracleData d;
  d.n = n;
  d.k = k;
  d.constants = cst;
  d.sources = S;
  d.component = connected_components(g);
  const std::size_t s = S.size();
  d.ell = oracle_ell(n, s, k, cst.ell_factor);

  std::map<Node, std::vector<Dist>> dist;  // exact distances from every source
  for (Node u : S) dist[u] = dijkstra(g, u);
  auto dd = [&](Node w, Node v) { return dist.at(w)[static_cast<std::size_t>(v)]; };

  // The l closest reachable members of A, by (distance, id).
  auto closest = [&](const std::vector<Node>& A, Node v) {
    std::vector<std::pair<Dist, Node>> c;
    for (Node w : A)
      if (dd(w, v) != kInf) c.push_back({dd(w, v), w});
    std::sort(c.begin(), c.end());
    if (c.size() > d.ell) c.resize(d.ell);
    return c;
  };

  d.levels.push_back(OracleLevel{S, Rational(1), 0, 0, 0, 0, true});
  const long long root = ceil_root(static_cast<long long>(s), k);
  const int max_retries = static_cast<int>(ceil_log2(static_cast<std::uint64_t>(std::max(n, 2))));
  for (int i = 1; i < k; ++i) {
    const std::vector<Node>& prev = d.levels.back().members;
    std::map<Node, int> index;
    for (std::size_t j = 0; j < prev.size(); ++j) index[prev[j]] = static_cast<int>(j);
    std::vector<std::vector<int>> sets;
    for (Node v = 0; v < n; ++v) {
      auto c = closest(prev, v);
      if (c.empty()) continue;
      std::vector<int> set;
      for (const auto& [dv, w] : c) set.push_back(index.at(w));
      sets.push_back(std::move(set));
    }

    OracleLevel level;
    level.sets = sets.size();
    Rational p(1, cst.gamma * root);
    for (;; p /= 2, ++level.retries) {
      CoverageResult cov = solve_with_coverage(reduce_ordered(OrderedInstance{static_cast<int>(prev.size()), sets, p}));
      d.evaluations += cov.small_run.evaluations + cov.large_run.evaluations;
      std::vector<char> in(prev.size(), 0);
      for (int h : cov.H) in[static_cast<std::size_t>(h)] = 1;
      level.repairs = 0;
      for (const auto& set : sets) {
        bool hit = false;
        for (int e : set) hit = hit || in[static_cast<std::size_t>(e)];
        if (!hit) {
          in[static_cast<std::size_t>(set.front())] = 1;
          ++level.repairs;
        }
      }
      level.members.clear();
      for (std::size_t j = 0; j < prev.size(); ++j)
        if (in[j]) level.members.push_back(prev[j]);
      level.phi = cov.phi.value;
      level.size_ok = boost::multiprecision::pow(BigInt(level.members.size()), static_cast<unsigned>(k)) <=
                      boost::multiprecision::pow(BigInt(s), static_cast<unsigned>(k - i));
      if (level.size_ok || level.retries >= max_retries) break;
    }
    level.p = p;
    for (Node v = 0; v < n; ++v) {
      auto c = closest(prev, v);
      bool hit = c.empty();
      for (const auto& [dv, w] : c) hit = hit || std::binary_search(level.members.begin(), level.members.end(), w);
      check_invariant(hit, "oracle: A_" + std::to_string(i) + " misses N_" + std::to_string(i - 1) + "(" +
                               std::to_string(v) + ")");
    }
    d.levels.push_back(std::move(level));
  }

  d.pivot.assign(static_cast<std::size_t>(k), std::vector<Node>(static_cast<std::size_t>(n), -1));
  d.pivot_dist.assign(static_cast<std::size_t>(k), std::vector<Dist>(static_cast<std::size_t>(n), kInf));
  for (int i = 0; i < k; ++i)
    for (Node v = 0; v < n; ++v)
      for (Node w : d.levels[static_cast<std::size_t>(i)].members) {
        const Dist x = dd(w, v);
        auto& pd = d.pivot_dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)];
        if (x < pd) {
          pd = x;
          d.pivot[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] = w;
        }
      }

  d.bunch.assign(static_cast<std::size_t>(n), {});
  for (Node v = 0; v < n; ++v) {
    auto& B = d.bunch[static_cast<std::size_t>(v)];
    for (Node w : d.levels.back().members)
      if (dd(w, v) != kInf) B[w] = dd(w, v);
    for (int i = 0; i + 1 < k; ++i) {
      const Dist next = d.pivot_dist[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(v)];
      for (const auto& [dv, w] : closest(d.levels[static_cast<std::size_t>(i)].members, v))
        if (dv < next) B[w] = dv;
    }
  }
  return d;
}

// Walks up the pivot chain, swapping ends, until a pivot lies in the other
// end's bunch. Pairs in different components get kInf.
inline QueryResult query(const OracleData& d, Node u, Node v) {
  if (v < 0 || v >= d.n) throw ValidationError("query node " + std::to_string(v) + " outside the graph");
  if (!d.is_source(u)) throw ValidationError("query endpoint " + std::to_string(u) + " is not a source");
  QueryResult r;
  if (d.component[static_cast<std::size_t>(u)] != d.component[static_cast<std::size_t>(v)]) {
    r.q = kInf;
    return r;
  }
  Node w = u;
  Dist du = 0;
  int i = 0;
  for (;;) {
    const auto& B = d.bunch[static_cast<std::size_t>(v)];
    auto it = B.find(w);
    if (it != B.end()) {
      r.q = du + it->second;
      break;
    }
    ++i;
    check_invariant(i <= d.k - 1, "oracle: query loop passed level k-1");
    std::swap(u, v);
    w = d.pivot[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)];
    du = d.pivot_dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)];
    check_invariant(w >= 0, "oracle: missing pivot inside a source component");
  }
  r.hops = i;
  return r;
}

struct OracleReport {
  bool ok = true;
  std::size_t pairs = 0;
  std::size_t violations = 0;  // pairs outside d <= q <= (2k-1) d
  Rational max_stretch = 1;
  double mean_stretch = 1;
  std::vector<std::size_t> hops;  // histogram over the final loop index
  std::size_t bunch_total = 0;
  HighFloat size_bound;
  double size_ratio = 0;  // bunch_total / (n k s^{1/k})
  bool size_ok = true;
  bool levels_ok = true;
};

// Every (source, node) pair against exact all-pairs distances.
inline OracleReport verify_oracle(const OracleData& d, const Graph& g, int cap = verify_cap()) {
  OracleReport rep;
  rep.hops.assign(static_cast<std::size_t>(d.k), 0);
  const auto D = all_pairs_distances(g, cap);
  const Rational bound(2 * d.k - 1);
  HighFloat sum = 0;
  std::size_t counted = 0;
  for (Node u : d.sources)
    for (Node v = 0; v < d.n; ++v) {
      const Dist truth = D[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
      const QueryResult r = query(d, u, v);
      ++rep.pairs;
      ++rep.hops[static_cast<std::size_t>(r.hops)];
      if (truth == kInf || truth == 0) {
        if (r.q != truth) ++rep.violations;
        continue;
      }
      const Rational st(r.q, truth);
      if (r.q < truth || st > bound) ++rep.violations;
      rep.max_stretch = std::max(rep.max_stretch, st);
      sum += to_high(st);
      ++counted;
    }
  rep.mean_stretch = counted ? static_cast<double>(sum / counted) : 1.0;
  rep.bunch_total = d.bunch_total();
  rep.size_bound = oracle_size_bound(d.n, d.sources.size(), d.k, d.constants.size_c);
  const HighFloat unit = HighFloat(d.n) * d.k * detail::root_of(d.sources.size(), d.k);
  rep.size_ratio = d.n > 0 ? static_cast<double>(HighFloat(static_cast<unsigned long long>(rep.bunch_total)) / unit) : 0.0;
  rep.size_ok = HighFloat(static_cast<unsigned long long>(rep.bunch_total)) <= rep.size_bound;
  for (const auto& l : d.levels) rep.levels_ok = rep.levels_ok && l.size_ok;
  rep.ok = rep.violations == 0 && rep.size_ok && rep.levels_ok;
  return rep;
}

// ---- serialization --------------------------------------------------------

inline nlohmann::ordered_json oracle_to_json(const OracleData& d) {
  nlohmann::ordered_json j;
  j["n"] = d.n;
  j["k"] = d.k;
  j["ell"] = d.ell;
  j["sources"] = d.sources;
  auto levels = nlohmann::ordered_json::array();
  for (const auto& l : d.levels)
    levels.push_back({{"members", l.members},
                      {"p", l.p.str()},
                      {"retries", l.retries},
                      {"repairs", l.repairs}});
  j["levels"] = levels;
  auto pivots = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < d.pivot.size(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t v = 0; v < d.pivot[i].size(); ++v)
      row.push_back(d.pivot[i][v] < 0 ? nlohmann::ordered_json(nullptr)
                                      : nlohmann::ordered_json::array({d.pivot[i][v], d.pivot_dist[i][v]}));
    pivots.push_back(row);
  }
  j["pivots"] = pivots;
  auto bunches = nlohmann::ordered_json::array();
  for (const auto& B : d.bunch) {
    auto row = nlohmann::ordered_json::array();
    for (const auto& [w, x] : B) row.push_back({w, x});
    bunches.push_back(row);
  }
  j["bunches"] = bunches;
  j["component"] = d.component;
  return j;
}

inline OracleData oracle_from_json(const nlohmann::ordered_json& j) {
  OracleData d;
  try {
    d.n = j.at("n").get<int>();
    d.k = j.at("k").get<int>();
    d.ell = j.at("ell").get<std::size_t>();
    d.sources = j.at("sources").get<std::vector<Node>>();
    for (const auto& l : j.at("levels")) {
      OracleLevel lv;
      lv.members = l.at("members").get<std::vector<Node>>();
      lv.p = Rational(l.at("p").get<std::string>());
      lv.retries = l.at("retries").get<int>();
      lv.repairs = l.at("repairs").get<std::size_t>();
      d.levels.push_back(std::move(lv));
    }
    for (const auto& row : j.at("pivots")) {
      std::vector<Node> p;
      std::vector<Dist> pd;
      for (const auto& e : row) {
        p.push_back(e.is_null() ? -1 : e.at(0).get<Node>());
        pd.push_back(e.is_null() ? kInf : e.at(1).get<Dist>());
      }
      d.pivot.push_back(std::move(p));
      d.pivot_dist.push_back(std::move(pd));
    }
    for (const auto& row : j.at("bunches")) {
      std::map<Node, Dist> B;
      for (const auto& e : row) B[e.at(0).get<Node>()] = e.at(1).get<Dist>();
      d.bunch.push_back(std::move(B));
    }
    d.component = j.at("component").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("oracle document: ") + e.what());
  }
  const auto n = static_cast<std::size_t>(d.n);
  if (d.k < 1 || d.levels.size() != static_cast<std::size_t>(d.k) || d.pivot.size() != static_cast<std::size_t>(d.k) ||
      d.bunch.size() != n || d.component.size() != n || !std::is_sorted(d.sources.begin(), d.sources.end()))
    throw ValidationError("oracle document: inconsistent sizes");
  for (const auto& p : d.pivot)
    if (p.size() != n) throw ValidationError("oracle document: pivot row has the wrong length");
  return d;
}

}  // namespace ndecomp
