// SPDX-License-Identifier: Apache-2.0
// Command-line front end: runs one stage, verifies it, prints a report.
// Exit status: 0 all checks pass, 1 a check failed, 2 bad input or usage.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ndecomp/errors.hpp"
#include "ndecomp/generators.hpp"
#include "ndecomp/harness.hpp"

using namespace ndecomp;

namespace {

struct GraphSource {
  std::string input;
  std::vector<std::string> gen;
  std::vector<Weight> weights;  // lo hi
};

struct Common {
  GraphSource graph;
  std::string report = "-";
  std::string out;
  int cap = 0;
};

void add_graph_options(CLI::App* app, GraphSource& g) {
  app->add_option("--input", g.input, "graph file (header \"n m\", then \"u v [w]\" lines)");
  app->add_option("--gen", g.gen, "generator: random n m seed | grid a b | tree n [seed] | path n")->expected(2, 4);
  app->add_option("--weights", g.weights, "uniform edge weights lo hi for random and tree generators")->expected(2);
}

void add_common(CLI::App* app, Common& c) {
  add_graph_options(app, c.graph);
  app->add_option("--report", c.report, "report file, - for stdout");
  app->add_option("--out", c.out, "artifact output file");
  app->add_option("--cap", c.cap, "all-pairs verification cap (default from NDECOMP_VERIFY_CAP or 2048)");
}

Graph load_graph_source(const GraphSource& s) {
  if (!s.input.empty() && !s.gen.empty()) throw ValidationError("give either --input or --gen, not both");
  if (!s.gen.empty()) {
    Weight lo = 1, hi = 1;
    if (s.weights.size() == 2) {
      lo = s.weights[0];
      hi = s.weights[1];
    }
    return generate(s.gen, lo, hi);
  }
  if (s.input.empty()) throw ValidationError("a graph is required: --input FILE or --gen SPEC");
  std::ifstream in(s.input);
  if (!in) throw ValidationError("cannot open " + s.input);
  return load_graph(in);
}

template <class F>
void with_output(const std::string& path, F&& f) {
  if (path.empty()) return;
  if (path == "-") {
    f(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  f(out);
}

int emit(const Report& r, const std::string& path) {
  with_output(path, [&](std::ostream& o) { r.write(o); });
  return r.ok() ? 0 : 1;
}

DelayConstants profile_constants(const std::string& profile, long long ck) {
  DelayConstants c = profile == "fast" ? fast_profile() : default_constants();
  if (profile != "fast" && profile != "default") throw ValidationError("profile must be default or fast");
  if (ck > 0) c.c_k = Rational(ck);
  return c;
}

int cap_of(const Common& c) { return c.cap > 0 ? c.cap : verify_cap(); }

std::vector<std::vector<long long>> read_rows(const std::string& path, std::size_t width) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<std::vector<long long>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::vector<long long> row;
    long long x = 0;
    while (s >> x) row.push_back(x);
    if (!s.eof() || row.size() != width)
      throw ParseError(lineno, "expected " + std::to_string(width) + " integers");
    rows.push_back(std::move(row));
  }
  return rows;
}

// Rebuilds clusters from "node cluster center [color]" rows; a row with
// cluster -1 is unclustered.
Clustering clustering_from_rows(const Graph& g, const std::vector<std::vector<long long>>& rows, std::size_t cluster_col,
                                std::size_t center_col, std::map<long long, int>* color_of = nullptr) {
  if (rows.size() != static_cast<std::size_t>(g.node_count())) throw ValidationError("artifact must list every node once");
  std::map<long long, std::pair<Node, std::vector<Node>>> groups;
  std::vector<char> seen(rows.size(), 0);
  for (const auto& r : rows) {
    if (r[0] < 0 || r[0] >= g.node_count() || seen[static_cast<std::size_t>(r[0])])
      throw ValidationError("artifact node ids must be a permutation of 0..n-1");
    seen[static_cast<std::size_t>(r[0])] = 1;
    if (r[cluster_col] < 0) continue;
    auto& grp = groups[r[cluster_col]];
    grp.first = static_cast<Node>(r[center_col]);
    grp.second.push_back(static_cast<Node>(r[0]));
    if (color_of) (*color_of)[r[cluster_col]] = static_cast<int>(r[1]);
  }
  Clustering c(g.node_count());
  for (auto& [id, grp] : groups) {
    std::sort(grp.second.begin(), grp.second.end());
    c.add_cluster(g, grp.first, grp.second);
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic network decomposition, spanners and distance oracles"};
  app.require_subcommand(1);

  Common gen_c;
  auto* gen = app.add_subcommand("generate", "write a generated graph");
  add_graph_options(gen, gen_c.graph);
  gen->add_option("--out", gen_c.out, "output file, - for stdout")->default_val("-");

  Common dec_c;
  int dec_x = 0;
  std::string dec_profile = "default";
  long long dec_ck = 0;
  auto* dec = app.add_subcommand("decompose", "network decomposition with verification");
  add_common(dec, dec_c);
  dec->add_option("--x", dec_x, "separation parameter, 0 for the default");
  dec->add_option("--profile", dec_profile, "delay constants: default or fast");
  dec->add_option("--ck", dec_ck, "override c_k");

  Common clu_c;
  int clu_s = 4;
  std::string clu_profile = "default";
  long long clu_ck = 0;
  std::string clu_trace;
  auto* clu = app.add_subcommand("cluster", "low s-hop degree clustering from delays");
  add_common(clu, clu_c);
  clu->add_option("--s", clu_s, "distance parameter (>= 2)");
  clu->add_option("--profile", clu_profile, "delay constants: default or fast");
  clu->add_option("--ck", clu_ck, "override c_k");
  clu->add_option("--trace", clu_trace, "potential trace output file");

  Common iso_c;
  int iso_s = 4;
  std::string iso_profile = "default";
  long long iso_ck = 0;
  auto* iso = app.add_subcommand("isolate", "s-separated clustering from the delay clustering");
  add_common(iso, iso_c);
  iso->add_option("--s", iso_s, "distance parameter (>= 2)");
  iso->add_option("--profile", iso_profile, "delay constants: default or fast");
  iso->add_option("--ck", iso_ck, "override c_k");

  std::string hit_input, hit_report = "-", hit_out;
  bool hit_ordered = false;
  auto* hit = app.add_subcommand("hitting-set", "solve a weighted hitting-set instance");
  hit->add_option("--input", hit_input, "instance file")->required();
  hit->add_flag("--ordered", hit_ordered, "instance lists ordered sets; reduce before solving");
  hit->add_option("--report", hit_report, "report file, - for stdout");
  hit->add_option("--out", hit_out, "write the coverage solution, 1-based, one element per line");

  Common spa_c;
  int spa_k = 2;
  long long spa_gamma3 = SpannerConstants{}.gamma3;
  std::string spa_mode = "auto";
  auto* spa = app.add_subcommand("spanner", "(2k-1)-spanner with exact stretch verification");
  add_common(spa, spa_c);
  spa->add_option("--k", spa_k, "stretch parameter");
  spa->add_option("--mode", spa_mode, "weighted, unweighted or auto (by edge weights)");
  spa->add_option("--gamma3", spa_gamma3, "sampling divisor");

  Common ora_c;
  int ora_k = 2;
  std::vector<Node> ora_sources;
  std::size_t ora_num = 0;
  std::uint64_t ora_seed = 0;
  long long ora_gamma = OracleConstants{}.gamma, ora_ell = OracleConstants{}.ell_factor;
  std::string ora_save, ora_load;
  bool ora_queries = false;
  auto* ora = app.add_subcommand("oracle", "source-restricted distance oracle");
  add_common(ora, ora_c);
  ora->add_option("--k", ora_k, "number of levels");
  ora->add_option("--sources", ora_sources, "source ids")->delimiter(',');
  ora->add_option("--num-sources", ora_num, "pick this many random sources");
  ora->add_option("--source-seed", ora_seed, "seed for --num-sources");
  ora->add_option("--gamma", ora_gamma, "sampling divisor");
  ora->add_option("--ell-factor", ora_ell, "l = ceil(factor * s^(1/k) * ln n)");
  ora->add_option("--save", ora_save, "write the oracle as JSON");
  ora->add_option("--load", ora_load, "answer queries from a saved oracle instead of building one");
  ora->add_flag("--queries", ora_queries, "read \"u v\" pairs from stdin, print \"u v q\"");

  Common ver_c;
  std::string ver_kind, ver_artifact;
  int ver_k = 2, ver_s = 2, ver_x = 0;
  Dist ver_bound = 0;
  auto* ver = app.add_subcommand("verify", "check a saved artifact against its graph");
  add_common(ver, ver_c);
  ver->add_option("--kind", ver_kind, "decomposition | spanner | clustering")->required();
  ver->add_option("--artifact", ver_artifact, "artifact file")->required();
  ver->add_option("--k", ver_k, "spanner stretch parameter");
  ver->add_option("--s", ver_s, "clustering separation");
  ver->add_option("--x", ver_x, "decomposition x for the default diameter bound");
  ver->add_option("--bound", ver_bound, "decomposition diameter bound (overrides --x)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Graph g = load_graph_source(gen_c.graph);
      with_output(gen_c.out, [&](std::ostream& o) { write_graph(o, g); });
      return 0;
    }
    if (*dec) {
      Graph g = load_graph_source(dec_c.graph);
      Report r;
      auto d = run_decompose(r, g, PipelineConfig{dec_x, profile_constants(dec_profile, dec_ck)});
      with_output(dec_c.out, [&](std::ostream& o) { write_decomposition(o, d); });
      return emit(r, dec_c.report);
    }
    if (*clu) {
      Graph g = load_graph_source(clu_c.graph);
      Report r;
      auto st = run_cluster(r, g, clu_s, profile_constants(clu_profile, clu_ck));
      with_output(clu_c.out, [&](std::ostream& o) { write_clustering(o, st.clustering); });
      with_output(clu_trace, [&](std::ostream& o) { write_trace(o, st.delays); });
      return emit(r, clu_c.report);
    }
    if (*iso) {
      Graph g = load_graph_source(iso_c.graph);
      Report r;
      auto sep = run_isolate(r, g, iso_s, profile_constants(iso_profile, iso_ck));
      with_output(iso_c.out, [&](std::ostream& o) { write_clustering(o, sep.clustering); });
      return emit(r, iso_c.report);
    }
    if (*hit) {
      std::ifstream in(hit_input);
      if (!in) throw ValidationError("cannot open " + hit_input);
      HittingInstance inst = hit_ordered ? reduce_ordered(load_ordered_instance(in)) : load_instance(in);
      Report r;
      auto cov = run_hitting(r, inst);
      with_output(hit_out, [&](std::ostream& o) {
        for (int h : cov.H) o << h + 1 << '\n';
      });
      return emit(r, hit_report);
    }
    if (*spa) {
      Graph g = load_graph_source(spa_c.graph);
      if (spa_mode != "auto" && spa_mode != "weighted" && spa_mode != "unweighted")
        throw ValidationError("--mode must be weighted, unweighted or auto");
      const bool weighted = spa_mode == "auto" ? !g.is_unit_weight() : spa_mode == "weighted";
      SpannerConstants c;
      c.gamma3 = spa_gamma3;
      Report r;
      auto sp = run_spanner(r, g, spa_k, weighted, c, cap_of(spa_c));
      with_output(spa_c.out, [&](std::ostream& o) { write_graph(o, sp.as_graph(g.node_count())); });
      return emit(r, spa_c.report);
    }
    if (*ora) {
      OracleData d;
      int status = 0;
      if (!ora_load.empty()) {
        std::ifstream in(ora_load);
        if (!in) throw ValidationError("cannot open " + ora_load);
        nlohmann::ordered_json j;
        try {
          j = nlohmann::ordered_json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError(std::string("oracle document: ") + e.what());
        }
        d = oracle_from_json(j);
      } else {
        Graph g = load_graph_source(ora_c.graph);
        std::vector<Node> S = ora_sources;
        if (S.empty() && ora_num > 0) S = random_sources(g.node_count(), ora_num, ora_seed);
        if (S.empty()) throw ValidationError("give --sources or --num-sources");
        OracleConstants c;
        c.gamma = ora_gamma;
        c.ell_factor = ora_ell;
        Report r;
        d = run_oracle(r, g, S, ora_k, c, cap_of(ora_c));
        with_output(ora_save, [&](std::ostream& o) { o << oracle_to_json(d).dump(1) << '\n'; });
        status = emit(r, ora_queries && ora_c.report == "-" ? std::string() : ora_c.report);
      }
      if (ora_queries) {
        long long u = 0, v = 0;
        while (std::cin >> u >> v) {
          const QueryResult q = query(d, static_cast<Node>(u), static_cast<Node>(v));
          std::cout << u << ' ' << v << ' ' << fmt_dist(q.q) << '\n';
        }
        if (!std::cin.eof()) throw ValidationError("queries must be pairs of integers");
      }
      return status;
    }
    if (*ver) {
      Graph g = load_graph_source(ver_c.graph);
      Report r;
      r.put("stage", "verify " + ver_kind);
      describe_graph(r, g);
      if (ver_kind == "spanner") {
        std::ifstream in(ver_artifact);
        if (!in) throw ValidationError("cannot open " + ver_artifact);
        Graph h = load_graph(in);
        if (h.node_count() != g.node_count()) throw ValidationError("spanner has a different node count");
        auto st = verify_stretch(g, h.edges(), 2 * ver_k - 1, cap_of(ver_c));
        r.check("subgraph", st.subgraph, st.subgraph ? "yes" : "no", "yes");
        r.check("stretch", st.ok, st.disconnects ? "inf" : fmt(st.max_stretch), std::to_string(2 * ver_k - 1));
      } else if (ver_kind == "clustering") {
        Clustering c(g.node_count());
        bool valid = true;
        std::string why = "ok";
        try {
          c = clustering_from_rows(g, read_rows(ver_artifact, 3), 1, 2);
        } catch (const InvariantError& e) {
          valid = false;
          why = e.what();
        }
        r.check("clusters_valid", valid, why, "ok");
        auto sep = verify_separation(g, c, ver_s);
        r.check("separated", valid && sep.ok, sep.ok ? "yes" : "no", "s=" + std::to_string(ver_s));
        r.put("clustered", c.clustered_count());
      } else if (ver_kind == "decomposition") {
        NetworkDecomposition d;
        std::map<long long, int> colors;
        bool valid = true;
        std::string why = "ok";
        try {
          d.clustering = clustering_from_rows(g, read_rows(ver_artifact, 4), 2, 3, &colors);
        } catch (const InvariantError& e) {
          valid = false;
          why = e.what();
        }
        r.check("clusters_valid", valid, why, "ok");
        for (const auto& [id, col] : colors) {
          d.cluster_color.push_back(col);
          d.colors = std::max(d.colors, col);
        }
        if (!valid) d.clustering = Clustering(g.node_count());
        d.diameter_bound = ver_bound > 0 ? ver_bound
                                         : decomposition_diameter_bound(g.node_count(),
                                                                        ver_x > 0 ? ver_x : default_x(g.node_count()));
        auto v = verify_decomposition(g, d);
        std::size_t adjacent = 0;
        for (const auto& c : v.per_color) adjacent += c.adjacent_pairs;
        r.check("colors", d.colors <= color_budget(g.node_count()), std::to_string(d.colors),
                std::to_string(color_budget(g.node_count())));
        r.check("all_colored", v.all_colored, v.all_colored ? "yes" : "no", "yes");
        r.check("same_color_adjacent", adjacent == 0, std::to_string(adjacent), "0");
        r.check("strong_diameter", v.max_diameter <= d.diameter_bound, fmt_dist(v.max_diameter),
                std::to_string(d.diameter_bound));
      } else {
        throw ValidationError("--kind must be decomposition, spanner or clustering");
      }
      return emit(r, ver_c.report);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: parse: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
