// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "ndecomp/generators.hpp"
#include "ndecomp/harness.hpp"

using namespace ndecomp;

TEST(Report, FormatsLinesAndVerdict) {
  Report r;
  r.put("graph.n", 5);
  r.put("ratio", Rational(1, 3));
  r.put("flag", true);
  r.check("size", true, "3", "4");
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.str(), "graph.n = 5\nratio = 0.333333\nflag = true\ncheck.size = PASS measured=3 bound=4\nresult = PASS\n");
  r.check("stretch", false, "5", "3");
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.str().find("check.stretch = FAIL measured=5 bound=3\nresult = FAIL\n"), std::string::npos);
}

TEST(Report, ColorBudgetIsCeilLogPlusOne) {
  EXPECT_EQ(color_budget(0), 0);
  EXPECT_EQ(color_budget(1), 1);
  EXPECT_EQ(color_budget(2), 2);
  EXPECT_EQ(color_budget(256), 9);
  EXPECT_EQ(color_budget(257), 10);
}

TEST(Harness, SpannerReportSkipsSizeForKOne) {
  Report r;
  run_spanner(r, random_graph(30, 60, 1), 1, false, SpannerConstants{});
  EXPECT_TRUE(r.ok());
  EXPECT_NE(r.str().find("check.size = n/a"), std::string::npos);
}

TEST(Harness, ForestCheckOnlyForForests) {
  Report tree, dense;
  run_spanner(tree, tree_graph(40, 2, true), 2, false, SpannerConstants{});
  run_spanner(dense, random_graph(40, 200, 2), 2, false, SpannerConstants{});
  EXPECT_NE(tree.str().find("check.forest_kept = PASS"), std::string::npos);
  EXPECT_EQ(dense.str().find("check.forest_kept"), std::string::npos);
}

TEST(Harness, ReportsAreDeterministic) {
  Graph g = random_graph(64, 200, 3, 1, 50);
  auto S = random_sources(64, 8, 3);
  Report a, b;
  run_oracle(a, g, S, 2, OracleConstants{});
  run_oracle(b, g, S, 2, OracleConstants{});
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.str(), b.str());
}

TEST(Harness, DecomposeReportPasses) {
  Report r;
  auto d = run_decompose(r, random_graph(128, 400, 4), PipelineConfig{});
  EXPECT_TRUE(r.ok()) << r.str();
  EXPECT_LE(d.colors, 8);
}
