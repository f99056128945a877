// SPDX-License-Identifier: Apache-2.0
// Experiment reports. Each stage runs its algorithm, then recomputes every
// checked quantity from the raw output before comparing it to the bound.
#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ndecomp/clustering.hpp"
#include "ndecomp/delay_clustering.hpp"
#include "ndecomp/densify.hpp"
#include "ndecomp/distance_oracle.hpp"
#include "ndecomp/graph.hpp"
#include "ndecomp/hitting_set.hpp"
#include "ndecomp/isolation.hpp"
#include "ndecomp/numeric.hpp"
#include "ndecomp/spanner.hpp"

namespace ndecomp {

// Ordered "key = value" lines; checks render as
// "check.<name> = PASS|FAIL measured=<m> bound=<b>".
class Report {
 public:
  template <class T>
  void put(const std::string& key, const T& value) {
    std::ostringstream s;
    s << value;
    lines_.push_back({key, s.str()});
  }
  void put(const std::string& key, const Rational& value) { lines_.push_back({key, format_decimal(value, 6)}); }
  void put(const std::string& key, bool value) { lines_.push_back({key, value ? "true" : "false"}); }

  void check(const std::string& name, bool ok, const std::string& measured, const std::string& bound) {
    ok_ = ok_ && ok;
    lines_.push_back({"check." + name, std::string(ok ? "PASS" : "FAIL") + " measured=" + measured + " bound=" + bound});
  }

  bool ok() const { return ok_; }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : lines_) out << k << " = " << v << '\n';
    out << "result = " << (ok_ ? "PASS" : "FAIL") << '\n';
  }

  std::string str() const {
    std::ostringstream s;
    write(s);
    return s.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
  bool ok_ = true;
};

inline std::string fmt(const Rational& r) { return format_decimal(r, 6); }
inline std::string fmt(const HighFloat& x) { return format_decimal(to_fixed(x), 6); }
inline std::string fmt_dist(Dist d) { return d == kInf ? "inf" : std::to_string(d); }

inline void describe_graph(Report& r, const Graph& g) {
  int comps = 0;
  connected_components(g, &comps);
  r.put("graph.n", g.node_count());
  r.put("graph.m", g.edge_count());
  r.put("graph.components", comps);
  r.put("graph.unit_weight", g.is_unit_weight());
}

// One line per node: node cluster center (-1 -1 when unclustered).
inline void write_clustering(std::ostream& out, const Clustering& c) {
  for (Node v = 0; v < c.node_count(); ++v) {
    const int id = c.cluster_of[static_cast<std::size_t>(v)];
    out << v << ' ' << id << ' ' << (id < 0 ? -1 : c.clusters[static_cast<std::size_t>(id)].center) << '\n';
  }
}

// ---- low-degree clustering ------------------------------------------------

struct ClusterStage {
  DelayFunction delays;
  Clustering clustering;
};

inline void report_delays(Report& r, const Graph& g, const DelayFunction& d, const Clustering& c) {
  const int n = g.node_count();
  r.put("delay.s", d.s);
  r.put("delay.max_k", d.max_k());
  r.put("delay.max_R", d.max_R());
  r.put("delay.components", d.components.size());
  std::uint64_t rounds = 0, evals = 0, steps = 0;
  bool monotone = true;
  bool phi_ok = true;
  Rational worst_ratio = 0;
  for (const auto& run : d.components) {
    rounds += run.indicative_rounds;
    evals += run.evaluations;
    steps += run.steps.size();
    for (std::size_t j = 1; j < run.steps.size(); ++j)
      if (run.steps[j].phase == run.steps[j - 1].phase && run.steps[j].phi > run.steps[j - 1].phi) monotone = false;
    if (!run.phases.empty()) {
      const Rational PhiR = run.phases.back().Phi;
      const std::int64_t m = std::max(run.n, 2);
      const HighFloat bound = 4 * HighFloat(m) * log2_high(HighFloat(m));
      const Rational bound_r = to_fixed(bound);
      phi_ok = phi_ok && to_high(PhiR) <= bound;
      worst_ratio = std::max(worst_ratio, Rational(PhiR / bound_r));
    }
  }
  r.put("delay.trace_steps", steps);
  r.put("delay.seed_evaluations", evals);
  r.put("delay.indicative_rounds", rounds);
  r.check("phi_nonincreasing", monotone, monotone ? "yes" : "no", "yes");
  r.check("final_potential", phi_ok, "max Phi_R/(4n log2 n)=" + fmt(worst_ratio), "1");

  const std::size_t clustered = c.clustered_count();
  r.put("clusters", c.clusters.size());
  r.check("clustered_half", 2 * clustered >= static_cast<std::size_t>(n), std::to_string(clustered),
          fmt(Rational(n, 2)));
  auto hop = s_hop_degree(g, c, d.s);
  bool hop_ok = true;
  for (Node u = 0; u < n; ++u)
    hop_ok = hop_ok && hop.per_node[static_cast<std::size_t>(u)] <= d.k_of[static_cast<std::size_t>(u)];
  r.check("hop_degree", hop_ok, std::to_string(hop.max), "k=" + std::to_string(d.max_k()));
  Dist worst = 0;
  bool diam_ok = true;
  for (const auto& cl : c.clusters) {
    const Dist diam = component_strong_diameter(g, cl.nodes);
    const Dist bound = 10 * static_cast<Dist>(d.s) * d.R_of[static_cast<std::size_t>(cl.center)];
    worst = std::max(worst, diam);
    diam_ok = diam_ok && diam <= bound;
  }
  r.check("strong_diameter", diam_ok, fmt_dist(worst), "10*s*R=" + std::to_string(10 * d.s * d.max_R()));
}

inline ClusterStage run_cluster(Report& r, const Graph& g, int s, const DelayConstants& c) {
  r.put("stage", "cluster");
  describe_graph(r, g);
  r.put("param.s", s);
  r.put("param.c_k", fmt(c.c_k));
  ClusterStage st{compute_delays(g, s, c), Clustering(g.node_count())};
  st.clustering = extract_clustering(g, st.delays);
  report_delays(r, g, st.delays, st.clustering);
  return st;
}

// ---- isolation --------------------------------------------------------------

inline SeparatedClustering run_isolate(Report& r, const Graph& g, int s, const DelayConstants& c) {
  ClusterStage st = run_cluster(r, g, s, c);
  const int k = st.delays.max_k();
  auto sep = subsample(g, st.clustering, s, k);
  r.put("isolate.k", k);
  r.put("isolate.sampled_clusters", sep.selected.size());
  r.put("isolate.output_clusters", sep.clustering.clusters.size());
  r.put("isolate.expected", sep.expected);
  r.put("isolate.seed_evaluations", sep.evaluations);
  auto separation = verify_separation(g, sep.clustering, s);
  r.check("separated", separation.ok, separation.ok ? "yes" : "no", "s=" + std::to_string(s));
  const Rational kept(static_cast<long long>(sep.clustering.clustered_count()));
  const Rational bound(static_cast<long long>(st.clustering.clustered_count()), 8LL * k);
  r.check("isolated_count", kept >= bound, fmt(kept), fmt(bound));
  return sep;
}

// ---- decomposition ----------------------------------------------------------

inline int color_budget(int n) {
  int budget = 1;
  while ((std::int64_t{1} << (budget - 1)) < std::max(n, 1)) ++budget;
  return n == 0 ? 0 : budget;
}

inline NetworkDecomposition run_decompose(Report& r, const Graph& g, const PipelineConfig& cfg) {
  r.put("stage", "decompose");
  describe_graph(r, g);
  r.put("param.x", cfg.x > 0 ? cfg.x : default_x(g.node_count()));
  r.put("param.c_k", fmt(cfg.delay.c_k));
  auto d = decompose(g, cfg);
  auto v = verify_decomposition(g, d);
  r.put("inner.runs", d.stats.runs);
  r.put("inner.max_k", d.stats.max_k);
  r.put("inner.max_hop_degree", d.stats.max_hop_degree);
  r.put("inner.indicative_rounds", d.stats.indicative_rounds);
  for (const auto& c : v.per_color)
    r.put("color." + std::to_string(c.color),
          "clusters=" + std::to_string(c.clusters) + " nodes=" + std::to_string(c.nodes) +
              " max_diameter=" + fmt_dist(c.max_diameter));
  std::size_t adjacent = 0;
  for (const auto& c : v.per_color) adjacent += c.adjacent_pairs;
  r.check("colors", d.colors <= color_budget(g.node_count()), std::to_string(d.colors),
          std::to_string(color_budget(g.node_count())));
  r.check("all_colored", v.all_colored, v.all_colored ? "yes" : "no", "yes");
  r.check("same_color_adjacent", adjacent == 0, std::to_string(adjacent), "0");
  r.check("strong_diameter", v.max_diameter <= d.diameter_bound, fmt_dist(v.max_diameter),
          std::to_string(d.diameter_bound));
  r.check("verify", v.ok, v.ok ? "ok" : v.problems.front(), "ok");
  return d;
}

// ---- hitting set ------------------------------------------------------------

inline CoverageResult run_hitting(Report& r, const HittingInstance& inst) {
  r.put("stage", "hitting-set");
  r.put("instance.n", inst.n);
  r.put("instance.N", inst.sets.size());
  r.put("instance.p", inst.p.str());
  r.put("instance.max_set", inst.max_set_size());
  auto plain = solve(inst);
  r.put("solve.T", plain.plan.T);
  r.put("solve.p_eff", plain.plan.p_eff.str());
  r.put("solve.size", plain.H.size());
  r.put("solve.seed_evaluations", plain.evaluations);
  bool cert = !plain.iterations.empty() ? plain.iterations.front().expected <= 2 : true;
  for (std::size_t t = 1; t < plain.iterations.size(); ++t)
    cert = cert && plain.iterations[t].value <= plain.iterations[t - 1].value;
  const PotentialValue phi = potential(inst, plain.H);
  r.check("certificate", cert, cert ? "non-increasing" : "increased", "non-increasing");
  r.check("potential", !phi.infinite && phi.value <= 4, phi.infinite ? "inf" : fmt(phi.value), "4");

  auto cov = solve_with_coverage(inst);
  std::vector<char> in(static_cast<std::size_t>(inst.n), 0);
  for (int h : cov.H) in[static_cast<std::size_t>(h)] = 1;
  std::size_t large = 0, missed = 0;
  for (const auto& s : inst.sets) {
    if (s.size() < cov.threshold) continue;
    ++large;
    bool hit = false;
    for (int e : s) hit = hit || in[static_cast<std::size_t>(e)];
    missed += !hit;
  }
  const PotentialValue cphi = potential(inst, cov.H);
  r.put("coverage.threshold", cov.threshold);
  r.put("coverage.large_sets", large);
  r.put("coverage.size", cov.H.size());
  r.check("coverage_potential", !cphi.infinite && cphi.value <= 8, cphi.infinite ? "inf" : fmt(cphi.value), "8");
  r.check("large_sets_hit", missed == 0, std::to_string(missed) + " missed", "0 missed");
  return cov;
}

// ---- spanner ----------------------------------------------------------------

inline SpannerResult run_spanner(Report& r, const Graph& g, int k, bool weighted, const SpannerConstants& c,
                                 int cap = verify_cap()) {
  r.put("stage", "spanner");
  describe_graph(r, g);
  r.put("param.k", k);
  r.put("param.weighted", weighted);
  r.put("param.gamma3", c.gamma3);
  r.put("param.gamma1", c.gamma1);
  r.put("param.size_c", c.size_c);
  auto sp = build_spanner(g, k, weighted, c);
  for (const auto& st : sp.steps)
    r.put("step." + std::to_string(st.i),
          "clusters=" + std::to_string(st.clusters) + " p=" + st.p.str() + " retries=" + std::to_string(st.retries) +
              " sampled=" + std::to_string(st.sampled) + " phi=" + fmt(st.phi) +
              " edges_added=" + std::to_string(st.edges_added) + " heavy_edges=" + std::to_string(st.heavy_edges));
  r.put("final_step.edges_added", sp.final_edges_added);
  r.put("spanner.edges", sp.edges.size());
  auto st = verify_stretch(g, sp.edges, 2 * k - 1, cap);
  r.check("subgraph", st.subgraph, st.subgraph ? "yes" : "no", "yes");
  r.check("stretch", st.ok, st.disconnects ? "inf" : fmt(st.max_stretch), std::to_string(2 * k - 1));
  if (k >= 2) {
    const HighFloat bound = spanner_size_bound(g.node_count(), k, c.size_c);
    r.check("size", HighFloat(static_cast<unsigned long long>(sp.edges.size())) <= bound,
            std::to_string(sp.edges.size()), fmt(bound));
  } else {
    r.put("check.size", "n/a (k = 1 keeps every edge)");
  }
  int comps = 0;
  connected_components(g, &comps);
  if (g.edge_count() + static_cast<std::size_t>(comps) == static_cast<std::size_t>(g.node_count()))
    r.check("forest_kept", sp.edges == g.edges(), std::to_string(sp.edges.size()), std::to_string(g.edge_count()));
  return sp;
}

// ---- distance oracle --------------------------------------------------------

inline OracleData run_oracle(Report& r, const Graph& g, const std::vector<Node>& S, int k, const OracleConstants& c,
                             int cap = verify_cap()) {
  r.put("stage", "oracle");
  describe_graph(r, g);
  r.put("param.k", k);
  r.put("param.sources", S.size());
  r.put("param.gamma", c.gamma);
  r.put("param.ell_factor", c.ell_factor);
  r.put("param.size_c", c.size_c);
  auto d = build_oracle(g, S, k, c);
  r.put("oracle.ell", d.ell);
  for (std::size_t i = 1; i < d.levels.size(); ++i) {
    const auto& l = d.levels[i];
    r.put("level." + std::to_string(i),
          "size=" + std::to_string(l.members.size()) + " p=" + l.p.str() + " retries=" + std::to_string(l.retries) +
              " repairs=" + std::to_string(l.repairs) + " phi=" + fmt(l.phi));
  }
  auto v = verify_oracle(d, g, cap);
  r.put("oracle.pairs", v.pairs);
  r.put("oracle.mean_stretch", fmt(to_fixed(HighFloat(v.mean_stretch))));
  std::string hist;
  for (std::size_t i = 0; i < v.hops.size(); ++i) hist += (i ? "," : "") + std::to_string(v.hops[i]);
  r.put("oracle.loop_histogram", hist);
  int max_i = 0;
  for (std::size_t i = 0; i < v.hops.size(); ++i)
    if (v.hops[i] > 0) max_i = static_cast<int>(i);
  r.check("sandwich", v.violations == 0, std::to_string(v.violations) + " violations", "0 violations");
  r.check("max_stretch", v.max_stretch <= 2 * k - 1, fmt(v.max_stretch), std::to_string(2 * k - 1));
  r.check("loop_index", max_i <= k - 1, std::to_string(max_i), std::to_string(k - 1));
  bool levels_ok = true;
  for (std::size_t i = 1; i < d.levels.size(); ++i)
    levels_ok = levels_ok && boost::multiprecision::pow(BigInt(d.levels[i].members.size()), static_cast<unsigned>(k)) <=
                                 boost::multiprecision::pow(BigInt(S.size()), static_cast<unsigned>(k - i));
  r.check("level_sizes", levels_ok, levels_ok ? "ok" : "exceeded", "|A_i| <= s^(1-i/k)");
  r.put("oracle.bunch_total", v.bunch_total);
  r.put("oracle.size_ratio_c", fmt(to_fixed(HighFloat(v.size_ratio))));
  r.check("bunch_size", HighFloat(static_cast<unsigned long long>(v.bunch_total)) <= v.size_bound,
          std::to_string(v.bunch_total), fmt(v.size_bound));
  return d;
}

}  // namespace ndecomp
