// SPDX-License-Identifier: Apache-2.0
// Delay functions and the low-degree clustering they induce.
//
// Every node v starts a BFS token at time del(v). wait(u) is the arrival
// time of the first token at u and frontier^D(u) is the set of senders whose
// tokens arrive by wait(u) + D. Delays are computed in R phases of k
// iterations; each iteration picks a "good" subset of the active nodes by
// bit fixing a pairwise independent sample, and a pair of potentials
// certifies progress. All potential arithmetic is exact on values rounded
// to 64 fractional bits by one shared rounding function, so the chain of
// inequalities can be asserted without tolerance.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ndecomp/clustering.hpp"
#include "ndecomp/errors.hpp"
#include "ndecomp/graph.hpp"
#include "ndecomp/numeric.hpp"
#include "ndecomp/pairwise.hpp"

namespace ndecomp {

struct DelayConstants {
  Rational c_k = 100;
};

inline DelayConstants default_constants() { return {}; }
inline DelayConstants fast_profile() { return {Rational(4)}; }

// log2 of a positive integer-valued HighFloat, exact on powers of two.
inline HighFloat log2_high(const HighFloat& x) {
  int e = 0;
  HighFloat mant = boost::multiprecision::frexp(x, &e);
  if (mant == HighFloat(0.5)) return HighFloat(e - 1);
  return boost::multiprecision::log(x) / boost::multiprecision::log(HighFloat(2));
}

// R = floor(2 log2 n), at least 1.
inline int phase_count(std::int64_t n) {
  if (n < 2) return 1;
  auto sq = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  return std::max(1, static_cast<int>(std::bit_width(sq)) - 1);
}

// k = ceil(c_k log2 log2 max(n, 4)), at least 1.
inline int token_budget(std::int64_t n, const DelayConstants& c = {}) {
  if (c.c_k <= 0) throw ValidationError("c_k must be positive");
  HighFloat ll = log2_high(log2_high(HighFloat(std::max<std::int64_t>(n, 4))));
  HighFloat v = to_high(c.c_k) * ll;
  auto k = static_cast<long long>(boost::multiprecision::ceil(v));
  return static_cast<int>(std::max(1LL, k));
}

// ---------------------------------------------------------------------------
// Frontiers

struct Token {
  Dist arrival = 0;
  Node from = -1;
  friend bool operator<(const Token& a, const Token& b) {
    return a.arrival != b.arrival ? a.arrival < b.arrival : a.from < b.from;
  }
  friend bool operator==(const Token& a, const Token& b) = default;
};

// Full frontier^D of every node, each list sorted by (arrival, sender).
struct FrontierLists {
  std::vector<Dist> wait;
  std::vector<std::vector<Token>> members;
};

inline void validate_delays(const Graph& g, const std::vector<Dist>& del) {
  if (del.size() != static_cast<std::size_t>(g.node_count())) throw ValidationError("delay vector has the wrong length");
  for (Dist d : del)
    if (d < 0) throw ValidationError("delays must be nonnegative");
}

// A sender v is in frontier^D(u) iff del(v) + d(v,u) <= wait(u) + D, and then
// so is every node on a shortest v-u path. Hence a BFS from v that stops at
// nodes failing the test finds exactly the nodes whose frontier contains v.
inline FrontierLists frontier_lists(const Graph& g, const std::vector<Dist>& del, Dist D) {
  validate_delays(g, del);
  const auto n = static_cast<std::size_t>(g.node_count());
  FrontierLists out;
  std::vector<Source> sources;
  for (Node v = 0; v < g.node_count(); ++v) sources.push_back({v, del[static_cast<std::size_t>(v)]});
  out.wait = multi_source_bfs(g, sources);
  out.members.resize(n);
  std::vector<Dist> dist(n, kInf);
  std::vector<Node> touched;
  std::deque<Node> queue;
  for (Node v = 0; v < g.node_count(); ++v) {
    const Dist dv = del[static_cast<std::size_t>(v)];
    auto admits = [&](Node u, Dist d) { return dv + d <= out.wait[static_cast<std::size_t>(u)] + D; };
    if (!admits(v, 0)) continue;
    dist[static_cast<std::size_t>(v)] = 0;
    touched.push_back(v);
    queue.push_back(v);
    while (!queue.empty()) {
      Node u = queue.front();
      queue.pop_front();
      const Dist du = dist[static_cast<std::size_t>(u)];
      out.members[static_cast<std::size_t>(u)].push_back({dv + du, v});
      for (const Arc& a : g.neighbors(u)) {
        if (dist[static_cast<std::size_t>(a.to)] != kInf || !admits(a.to, du + 1)) continue;
        dist[static_cast<std::size_t>(a.to)] = du + 1;
        touched.push_back(a.to);
        queue.push_back(a.to);
      }
    }
    for (Node x : touched) dist[static_cast<std::size_t>(x)] = kInf;
    touched.clear();
  }
  for (auto& m : out.members) std::sort(m.begin(), m.end());
  return out;
}

struct FrontierInfo {
  Dist wait = 0;
  Node center = -1;           // smallest id among the first arrivals
  std::vector<Node> tokens;   // up to k senders of frontier^{2s}, inactive ones first
  std::size_t frontier_size = 0;
  bool overflow = false;      // frontier^{2s} has more than k members
};

// Per-node frontier data for frontier^{2s}. `active` marks V^active; when
// empty, every node counts as inactive. Within each group the tokens with
// the smallest (arrival, sender) are kept.
inline std::vector<FrontierInfo> frontier_info(const Graph& g, const std::vector<Dist>& del, int s, int k,
                                               const std::vector<char>& active = {}) {
  if (k < 1) throw ValidationError("k must be at least 1");
  auto lists = frontier_lists(g, del, 2 * static_cast<Dist>(s));
  std::vector<FrontierInfo> out(lists.members.size());
  for (std::size_t u = 0; u < out.size(); ++u) {
    auto& f = out[u];
    const auto& m = lists.members[u];
    f.wait = lists.wait[u];
    f.center = m.front().from;  // the first token has arrival wait(u) and the smallest such id
    f.frontier_size = m.size();
    f.overflow = m.size() > static_cast<std::size_t>(k);
    for (int pass = 0; pass < 2; ++pass)
      for (const Token& t : m) {
        if (f.tokens.size() == static_cast<std::size_t>(k)) break;
        bool is_active = !active.empty() && active[static_cast<std::size_t>(t.from)];
        if (is_active == (pass == 1)) f.tokens.push_back(t.from);
      }
  }
  return out;
}

struct AliveDead {
  std::vector<std::vector<Node>> dead, alive;
  std::vector<std::size_t> frontier_size;
};

// dead(u): the first min(k, .) inactive senders of frontier^{2s}(u);
// alive(u): the first min(k - |dead|, .) active ones.
inline AliveDead alive_dead(const Graph& g, const std::vector<Dist>& del, const std::vector<char>& active, int s,
                            int k) {
  auto lists = frontier_lists(g, del, 2 * static_cast<Dist>(s));
  AliveDead out;
  const auto n = lists.members.size();
  out.dead.resize(n);
  out.alive.resize(n);
  out.frontier_size.resize(n);
  const auto cap = static_cast<std::size_t>(k);
  for (std::size_t u = 0; u < n; ++u) {
    const auto& m = lists.members[u];
    out.frontier_size[u] = m.size();
    for (const Token& t : m)
      if (!active[static_cast<std::size_t>(t.from)] && out.dead[u].size() < cap) out.dead[u].push_back(t.from);
    for (const Token& t : m)
      if (active[static_cast<std::size_t>(t.from)] && out.dead[u].size() + out.alive[u].size() < cap)
        out.alive[u].push_back(t.from);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rounded exponentials

// Numerators over 2^64 of e^{x/10} (x = |dead| + |alive|) times
// (1 - a/(10k))^e for e = 0..k. Entry e = 0 equals the plain e^{x/10}, so
// the outer and inner potentials agree wherever they must.
class PotentialTable {
 public:
  explicit PotentialTable(int k) : k_(k) {}

  int k() const { return k_; }

  const BigInt& exp_tenth(int x) { return weight(x, 0, 0); }

  const BigInt& weight(int x, int a, int e) {
    auto key = std::make_pair(x, a);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      std::vector<BigInt> row;
      HighFloat v = boost::multiprecision::exp(HighFloat(x) / 10);
      HighFloat r = 1 - HighFloat(a) / (10 * HighFloat(k_));
      for (int i = 0; i <= k_; ++i) {
        row.push_back(numerator(to_fixed(v)));
        v *= r;
      }
      it = cache_.emplace(key, std::move(row)).first;
    }
    return it->second[static_cast<std::size_t>(e)];
  }

  static const BigInt& unit() {
    static const BigInt one = BigInt(1) << kFixedFractionBits;
    return one;
  }

 private:
  static BigInt numerator(const Rational& r) {
    return boost::multiprecision::numerator(r) * (unit() / boost::multiprecision::denominator(r));
  }

  int k_;
  std::map<std::pair<int, int>, std::vector<BigInt>> cache_;
};

// ---------------------------------------------------------------------------
// Good sets

// One iteration's selection problem. Node-indexed vectors cover the whole
// graph; weights are numerators over 2^64.
struct GoodSetProblem {
  int phase = 1;  // i
  int k = 1;
  std::vector<Node> active;                // V_{i-1}^active, sorted
  std::vector<BigInt> weight;              // phi_{i,j-1}(u) / (1 - |alive(u)|/(10k))
  std::vector<BigInt> previous;            // phi_{i,j-1}(u)
  std::vector<std::vector<Node>> alive;    // alive_{i-1}(u), subsets of `active`
};

struct GoodSetResult {
  std::vector<Node> S;  // sorted
  Rational expected;    // E[lhs] under the unfixed pairwise sample
  Rational lhs;
  Rational rhs;
  PairwiseSpace space;
  Seed seed;
  std::uint64_t evaluations = 0;
};

inline Rational good_set_rhs(const GoodSetProblem& p) {
  BigInt sum = 0;
  for (const auto& w : p.previous) sum += w;
  return Rational(sum, PotentialTable::unit()) +
         pow2(p.phase - 1) * Rational(static_cast<long long>(p.active.size()), p.k);
}

// Left-hand side for an explicit S: sum_u Y(u) weight(u) + |S| 2^i with
// Y(u) = 1 - a + a(a-1)/2, a = |alive(u) intersect S|.
inline Rational good_set_lhs(const GoodSetProblem& p, const std::vector<Node>& S) {
  std::vector<char> in(p.weight.size(), 0);
  for (Node v : S) in[static_cast<std::size_t>(v)] = 1;
  BigInt sum = 0;
  for (std::size_t u = 0; u < p.weight.size(); ++u) {
    if (p.weight[u] == 0) continue;
    long long a = 0;
    for (Node v : p.alive[u]) a += in[static_cast<std::size_t>(v)];
    sum += p.weight[u] * (1 - a + a * (a - 1) / 2);
  }
  return Rational(sum, PotentialTable::unit()) + pow2(p.phase) * Rational(static_cast<long long>(S.size()));
}

inline QuadraticObjective good_set_objective(const GoodSetProblem& p, const PairwiseSpace& space) {
  std::vector<std::uint64_t> index(p.weight.size(), 0);
  for (std::size_t i = 0; i < p.active.size(); ++i) index[static_cast<std::size_t>(p.active[i])] = i + 1;
  QuadraticObjective f(space, PotentialTable::unit());
  for (std::size_t u = 0; u < p.weight.size(); ++u) {
    if (p.weight[u] == 0) continue;
    std::vector<std::uint64_t> idx;
    for (Node v : p.alive[u]) {
      check_invariant(index[static_cast<std::size_t>(v)] != 0, "alive node outside the active set");
      idx.push_back(index[static_cast<std::size_t>(v)]);
    }
    if (idx.empty())
      f.add_constant(p.weight[u]);
    else
      f.add_pessimistic_miss(idx, p.weight[u]);
  }
  const BigInt size_cost = PotentialTable::unit() << p.phase;
  for (std::size_t i = 1; i <= p.active.size(); ++i) f.add_linear(i, size_cost);
  return f;
}

// Bit fixing over V^active with bias 1/(4k). Asserts the good-set
// inequality for the result.
inline GoodSetResult good_set(const GoodSetProblem& p) {
  GoodSetResult r;
  r.rhs = good_set_rhs(p);
  if (p.active.empty()) {
    r.expected = r.lhs = good_set_lhs(p, {});
  } else {
    r.space = build_space(p.active.size(), Rational(1, 4 * p.k));
    QuadraticObjective f = good_set_objective(p, r.space);
    FixResult fixed = fix_bits(r.space, [&](const Seed& prefix) {
      ++r.evaluations;
      return f.expectation_scaled(prefix);
    });
    r.seed = fixed.seed;
    r.expected = fixed.initial;
    r.lhs = fixed.final;
    for (auto i : selected_indices(r.space, r.seed)) r.S.push_back(p.active[static_cast<std::size_t>(i - 1)]);
  }
  check_invariant(r.lhs <= r.rhs, "good set inequality violated after bit fixing");
  return r;
}

// ---------------------------------------------------------------------------
// Delay computation

struct InnerStep {
  int phase = 0, iteration = 0;
  Rational phi;  // phi_{i,j}
  std::size_t selected = 0, active = 0;
};

struct PhaseRecord {
  int phase = 0;
  Rational Phi;  // outer potential after the phase
  std::size_t active_after = 0;
};

struct ComponentRun {
  std::vector<Node> nodes;  // original ids, sorted
  int n = 0, R = 0, k = 0;
  Rational Phi0;
  std::vector<PhaseRecord> phases;
  std::vector<InnerStep> steps;
  std::size_t final_active = 0;
  std::size_t clustered = 0;  // nodes with |frontier^{2s}| <= k after the last phase
  std::uint64_t evaluations = 0;
  std::uint64_t seed_bits = 0;
  std::uint64_t indicative_rounds = 0;
};

struct DelayFunction {
  int s = 2;
  std::vector<Dist> del;
  std::vector<int> k_of;  // component-local k per node
  std::vector<int> R_of;
  std::vector<ComponentRun> components;

  int max_k() const { return k_of.empty() ? 1 : *std::max_element(k_of.begin(), k_of.end()); }
  int max_R() const { return R_of.empty() ? 1 : *std::max_element(R_of.begin(), R_of.end()); }
  std::size_t clustered() const {
    std::size_t c = 0;
    for (const auto& r : components) c += r.clustered;
    return c;
  }
};

namespace detail {

inline std::uint64_t eccentricity(const Graph& g, Node v) {
  Dist e = 0;
  for (Dist d : bfs(g, v))
    if (d != kInf) e = std::max(e, d);
  return static_cast<std::uint64_t>(e);
}

// Sum over u of [alive(u) untouched] * weight(x_u, a_u, e), plus the extra
// terms, all scaled by 2^64 * k to stay integral.
struct InnerState {
  const AliveDead* ad = nullptr;
  std::vector<char> untouched;

  BigInt node_sum(PotentialTable& table, int e) const {
    BigInt sum = 0;
    for (std::size_t u = 0; u < untouched.size(); ++u)
      if (untouched[u]) {
        int a = static_cast<int>(ad->alive[u].size());
        int x = static_cast<int>(ad->dead[u].size()) + a;
        sum += table.weight(x, a, e);
      }
    return sum;
  }
};

inline Rational outer_potential(const AliveDead& ad, std::size_t active, int phase, PotentialTable& table) {
  BigInt sum = 0;
  for (const auto& d : ad.dead) sum += table.exp_tenth(static_cast<int>(d.size()));
  return Rational(sum, PotentialTable::unit()) + pow2(phase) * Rational(static_cast<long long>(active));
}

inline ComponentRun run_component(const Graph& g, int s, const DelayConstants& c, std::vector<Dist>& del) {
  ComponentRun run;
  const int n = g.node_count();
  run.n = n;
  run.R = phase_count(n);
  run.k = token_budget(n, c);
  const int R = run.R, k = run.k;
  const auto un = static_cast<std::size_t>(n);
  PotentialTable table(k);
  const BigInt& unit = PotentialTable::unit();
  const std::uint64_t depth = eccentricity(g, 0) + 1;

  del.assign(un, 5 * static_cast<Dist>(s) * R);
  std::vector<char> active(un, 1);
  AliveDead ad = alive_dead(g, del, active, s, k);
  std::size_t active_count = un;
  run.Phi0 = outer_potential(ad, active_count, 0, table);
  check_invariant(run.Phi0 <= 2 * n, "outer potential starts above 2n");
  Rational Phi_prev = run.Phi0;

  for (int i = 1; i <= R; ++i) {
    std::vector<Node> V;
    for (Node v = 0; v < n; ++v)
      if (active[static_cast<std::size_t>(v)]) V.push_back(v);
    InnerState st{&ad, std::vector<char>(un, 1)};
    std::vector<char> in_w(un, 0);
    std::size_t w_size = 0;
    const BigInt half_level = BigInt(1) << (i - 1);
    // k * 2^64 * phi_{i,j}
    auto scaled_phi = [&](int j) {
      return BigInt(k) * st.node_sum(table, k - j) + BigInt(k) * unit * (BigInt(w_size) << i) +
             BigInt(k - j) * unit * half_level * BigInt(V.size());
    };
    BigInt phi_prev = scaled_phi(0);
    const BigInt phi_den = BigInt(k) * unit;
    check_invariant(Rational(phi_prev, phi_den) <= Phi_prev,
                    "phase " + std::to_string(i) + ": inner potential starts above the outer potential");
    for (int j = 1; j <= k; ++j) {
      GoodSetProblem p;
      p.phase = i;
      p.k = k;
      p.active = V;
      p.weight.assign(un, 0);
      p.previous.assign(un, 0);
      p.alive = ad.alive;
      for (std::size_t u = 0; u < un; ++u) {
        if (!st.untouched[u]) continue;
        int a = static_cast<int>(ad.alive[u].size());
        int x = static_cast<int>(ad.dead[u].size()) + a;
        p.weight[u] = table.weight(x, a, k - j);
        p.previous[u] = table.weight(x, a, k - j + 1);
      }
      GoodSetResult gs;
      try {
        gs = good_set(p);
      } catch (const InvariantError& e) {
        throw InvariantError(std::string(e.what()) + " at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      run.evaluations += gs.evaluations;
      run.seed_bits += static_cast<std::uint64_t>(gs.space.seed_len());
      run.indicative_rounds += static_cast<std::uint64_t>(gs.space.seed_len()) * 2 * depth;
      std::vector<char> now(un, 0);
      for (Node v : gs.S) {
        now[static_cast<std::size_t>(v)] = 1;
        if (!in_w[static_cast<std::size_t>(v)]) {
          in_w[static_cast<std::size_t>(v)] = 1;
          ++w_size;
        }
      }
      for (std::size_t u = 0; u < un; ++u)
        if (st.untouched[u])
          for (Node v : ad.alive[u])
            if (now[static_cast<std::size_t>(v)]) {
              st.untouched[u] = 0;
              break;
            }
      BigInt phi = scaled_phi(j);
      check_invariant(phi <= phi_prev, "inner potential increased at (" + std::to_string(i) + "," +
                                           std::to_string(j) + ")");
      phi_prev = phi;
      run.steps.push_back({i, j, Rational(phi, phi_den), gs.S.size(), V.size()});
    }
    const Rational phi_final(phi_prev, phi_den);
    // V_i^active = W_{i,k}; those nodes start 5s earlier.
    active = in_w;
    active_count = w_size;
    for (std::size_t v = 0; v < un; ++v)
      if (active[v]) del[v] -= 5 * static_cast<Dist>(s);
    AliveDead next = alive_dead(g, del, active, s, k);
    for (std::size_t u = 0; u < un; ++u) {
      if (st.untouched[u])
        check_invariant(next.dead[u].size() <= ad.dead[u].size() + ad.alive[u].size(),
                        "dead set grew past the previous frontier sample at node " + std::to_string(u));
      else
        check_invariant(next.dead[u].empty(), "dead tokens survive at a node whose alive sample was hit");
    }
    ad = std::move(next);
    Rational Phi = outer_potential(ad, active_count, i, table);
    check_invariant(Phi <= phi_final + n, "outer potential exceeds the inner one plus n in phase " + std::to_string(i));
    check_invariant(Phi <= Phi_prev + n, "outer potential grew by more than n in phase " + std::to_string(i));
    run.phases.push_back({i, Phi, active_count});
    Phi_prev = Phi;
    run.indicative_rounds +=
        static_cast<std::uint64_t>(5 * static_cast<Dist>(s) * R + 2 * static_cast<Dist>(s) + 1) * static_cast<std::uint64_t>(k);
  }
  check_invariant(Phi_prev <= Rational((2 + R) * static_cast<long long>(n)), "final outer potential exceeds (2+R)n");
  run.final_active = active_count;
  for (std::size_t u = 0; u < un; ++u)
    if (ad.frontier_size[u] <= static_cast<std::size_t>(k)) ++run.clustered;
  return run;
}

}  // namespace detail

// Runs the phases on every connected component with its own n, R and k.
inline DelayFunction compute_delays(const Graph& g, int s, const DelayConstants& c = {}) {
  if (s < 2) throw ValidationError("s must be at least 2");
  DelayFunction out;
  out.s = s;
  const auto un = static_cast<std::size_t>(g.node_count());
  out.del.assign(un, 0);
  out.k_of.assign(un, 1);
  out.R_of.assign(un, 1);
  int count = 0;
  auto comp = connected_components(g, &count);
  std::vector<std::vector<Node>> members(static_cast<std::size_t>(count));
  for (Node v = 0; v < g.node_count(); ++v) members[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])].push_back(v);
  for (auto& nodes : members) {
    auto sub = induced_subgraph(g, nodes);
    std::vector<Dist> del;
    ComponentRun run = detail::run_component(sub.graph, s, c, del);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto v = static_cast<std::size_t>(nodes[i]);
      out.del[v] = del[i];
      out.k_of[v] = run.k;
      out.R_of[v] = run.R;
    }
    run.nodes = std::move(nodes);
    out.components.push_back(std::move(run));
  }
  return out;
}

// One tab-separated line per (component, phase, iteration):
// component, i, j, phi, |S|, |V^active|.
inline void write_trace(std::ostream& out, const DelayFunction& d) {
  for (std::size_t c = 0; c < d.components.size(); ++c)
    for (const auto& st : d.components[c].steps)
      out << c << '\t' << st.phase << '\t' << st.iteration << '\t' << format_decimal(st.phi, 6) << '\t' << st.selected
          << '\t' << st.active << '\n';
}

// ---------------------------------------------------------------------------
// Extraction

// Clusters every u with |frontier^{2s}(u)| <= k_u around c_u. Nodes on a
// shortest u-c_u path share u's center, so each cluster is connected and
// its BFS tree from the center has depth at most max del.
inline Clustering extract_clustering(const Graph& g, const std::vector<Dist>& del, int s, const std::vector<int>& k_of) {
  if (k_of.size() != static_cast<std::size_t>(g.node_count())) throw ValidationError("k vector has the wrong length");
  auto lists = frontier_lists(g, del, 2 * static_cast<Dist>(s));
  std::map<Node, std::vector<Node>> groups;
  for (Node u = 0; u < g.node_count(); ++u) {
    const auto& m = lists.members[static_cast<std::size_t>(u)];
    if (m.size() <= static_cast<std::size_t>(k_of[static_cast<std::size_t>(u)])) groups[m.front().from].push_back(u);
  }
  Clustering c(g.node_count());
  for (auto& [center, nodes] : groups) {
    check_invariant(std::find(nodes.begin(), nodes.end(), center) != nodes.end(),
                    "cluster center " + std::to_string(center) + " is not clustered with its members");
    c.add_cluster(g, center, std::move(nodes));
  }
  return c;
}

inline Clustering extract_clustering(const Graph& g, const std::vector<Dist>& del, int s, int k) {
  return extract_clustering(g, del, s, std::vector<int>(static_cast<std::size_t>(g.node_count()), k));
}

inline Clustering extract_clustering(const Graph& g, const DelayFunction& d) {
  return extract_clustering(g, d.del, d.s, d.k_of);
}

}  // namespace ndecomp
