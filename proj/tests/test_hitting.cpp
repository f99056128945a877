// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "brute_force.hpp"
#include "ndecomp/generators.hpp"
#include "ndecomp/hitting_set.hpp"

using namespace ndecomp;

namespace {

HittingInstance make(int n, std::vector<std::vector<int>> sets, std::vector<std::int64_t> w, Rational p) {
  HittingInstance inst;
  inst.n = n;
  inst.sets = std::move(sets);
  inst.weights = std::move(w);
  inst.p = p;
  return inst;
}

// |a - b| < 2^-60
bool close(const Rational& a, const HighFloat& b) {
  HighFloat d = boost::multiprecision::abs(to_high(a) - b);
  return d < boost::multiprecision::ldexp(HighFloat(1), -60);
}

}  // namespace

TEST(Tau, Examples) {
  EXPECT_EQ(tau(make(3, {{0}, {1, 2}}, {0, 0}, Rational(1, 4))), Rational(0));
  EXPECT_TRUE(close(tau(make(4, {{0, 1, 2}}, {1}, Rational(1, 4))), boost::multiprecision::exp(HighFloat(-0.75))));
  HighFloat want = 2 * boost::multiprecision::exp(HighFloat(-0.5)) + 3 * boost::multiprecision::exp(HighFloat(-1));
  EXPECT_TRUE(close(tau(make(3, {{0}, {1, 2}}, {2, 3}, Rational(1, 2))), want));
}

TEST(Tau, KeepsRelativePrecisionForLargeSets) {
  // e^-200 is far below 2^-64; the value must still be accurate relative to itself.
  std::vector<int> big(400);
  for (int i = 0; i < 400; ++i) big[static_cast<std::size_t>(i)] = i;
  Rational t = tau(make(400, {big}, {1}, Rational(1, 2)));
  HighFloat want = boost::multiprecision::exp(HighFloat(-200));
  EXPECT_GT(t, 0);
  EXPECT_LT(boost::multiprecision::abs(to_high(t) / want - 1), boost::multiprecision::ldexp(HighFloat(1), -60));
}

TEST(Potential, HitEverythingWithNpElements) {
  auto inst = make(8, {{0, 1}, {1}, {2, 5}}, {3, 1, 4}, Rational(1, 4));
  auto phi = potential(inst, {1, 2});
  EXPECT_FALSE(phi.infinite);
  EXPECT_EQ(phi.value, Rational(1));
}

TEST(Potential, EmptySetPaysAllWeight) {
  auto inst = make(8, {{0, 1}, {1}, {2, 5}}, {3, 1, 4}, Rational(1, 4));
  EXPECT_EQ(potential(inst, {}).value, Rational(8) / tau(inst));
}

TEST(Potential, MatchesIndependentFormula) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = random_hitting_instance(5 + static_cast<int>(rng() % 40), 1 + rng() % 30, Rational(1, 1 + rng() % 8 + 1),
                                        8, rng());
    std::vector<int> H;
    for (int v = 0; v < inst.n; ++v)
      if (rng() % 4 == 0) H.push_back(v);
    EXPECT_EQ(potential(inst, H).value, oracle::hitting_potential(inst, H)) << "trial " << trial;
  }
}

TEST(Potential, MissedZeroWeightSetCostsNothing) {
  auto inst = make(2, {{0}}, {0}, Rational(1, 2));
  auto phi = potential(inst, {});
  EXPECT_FALSE(phi.infinite);
  EXPECT_EQ(phi.value, Rational(0));
}

TEST(PessimisticY, Examples) {
  EXPECT_EQ(pessimistic_Y({0, 0, 0}), 0);
  EXPECT_EQ(pessimistic_Y({0, 1, 0}), 1);
  EXPECT_EQ(pessimistic_Y({1, 1, 1}), 0);
  EXPECT_THROW(pessimistic_Y({2}), ValidationError);
}

TEST(PessimisticY, BoundsMissIndicatorExhaustively) {
  for (int size = 1; size <= 6; ++size)
    for (int mask = 0; mask < (1 << size); ++mask) {
      std::vector<int> x(static_cast<std::size_t>(size));
      for (int b = 0; b < size; ++b) x[static_cast<std::size_t>(b)] = (mask >> b) & 1;
      EXPECT_GE(1 - pessimistic_Y(x), mask == 0 ? 1 : 0);
    }
}

// E[1 - Y] <= 1 - 3|S| p / T under the actual seed space, by enumeration.
TEST(PessimisticY, ExpectationBoundByEnumeration) {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 60; ++trial) {
    auto inst = random_hitting_instance(2 + static_cast<int>(rng() % 14), 1 + rng() % 6, Rational(1, 2 + rng() % 15),
                                        1 + static_cast<int>(rng() % 8), rng());
    auto plan = plan_hitting(inst);
    if (plan.space.seed_len() > 12) continue;
    ++checked;
    for (const auto& s : inst.sets) {
      Rational mean = oracle::average_over_completions(plan.space, {}, [&](const Seed& seed) {
        std::vector<int> x;
        for (int e : s) x.push_back(oracle::x_of(plan.space, seed, static_cast<std::uint64_t>(e) + 1));
        return Rational(1 - pessimistic_Y(x));
      });
      EXPECT_LE(mean, 1 - 3 * Rational(static_cast<long long>(s.size())) * plan.p_eff / plan.T);
    }
  }
  EXPECT_GE(checked, 20);
}

TEST(Plan, EffectiveBiasAndIterations) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = random_hitting_instance(1 + static_cast<int>(rng() % 300), rng() % 20, Rational(1, 1 + rng() % 40 + 1),
                                        1 + static_cast<int>(rng() % 100), rng());
    auto plan = plan_hitting(inst);
    EXPECT_EQ(plan.q_eff, plan.space.bias());
    EXPECT_EQ(plan.p_eff, plan.q_eff * plan.T / 4);
    EXPECT_GE(plan.p_eff, inst.p);
    EXPECT_LT(plan.p_eff, 2 * inst.p);
    EXPECT_GE(Rational(plan.T), 8 * inst.p * static_cast<long long>(plan.delta));
    EXPECT_GE(Rational(plan.T), 8 * plan.p_eff * static_cast<long long>(plan.delta));
    EXPECT_LE(plan.q_eff, Rational(1, 2));
  }
}

// Oracle: f^t averaged over every completion of the prefix.
TEST(HittingObjective, MatchesBruteForce) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 500 && checked < 40; ++trial) {
    auto inst = random_hitting_instance(2 + static_cast<int>(rng() % 10), 1 + rng() % 8, Rational(1, 2 + rng() % 10),
                                        1 + static_cast<int>(rng() % 6), rng());
    auto plan = plan_hitting(inst);
    if (plan.space.seed_len() > 12) continue;
    ++checked;
    HittingObjectiveBuilder builder(inst, plan);
    int t = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(plan.T));
    std::vector<char> alive(inst.sets.size());
    for (auto& a : alive) a = static_cast<char>(rng() % 3 != 0);
    std::uint64_t prior = rng() % 5;
    auto f = builder.build(t, alive, prior);
    Seed prefix(rng() % (plan.space.seed_len() + 1));
    for (auto& b : prefix) b = rng() & 1u;
    Rational want = oracle::average_over_completions(plan.space, prefix, [&](const Seed& seed) {
      std::vector<int> G;
      for (std::uint64_t i = 1; i <= plan.space.n; ++i)
        if (oracle::x_of(plan.space, seed, i)) G.push_back(static_cast<int>(i - 1));
      return oracle::hitting_f(inst, plan, builder, t, alive, prior, G);
    });
    EXPECT_EQ(f.expectation(prefix), want) << "trial " << trial;
  }
  EXPECT_GE(checked, 20);
}

TEST(HittingObjective, FirstIterationAtMostTwo) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = random_hitting_instance(10 + static_cast<int>(rng() % 100), 1 + rng() % 100, Rational(1, 4 << (rng() % 3)),
                                        20, rng());
    auto plan = plan_hitting(inst);
    HittingObjectiveBuilder builder(inst, plan);
    auto f = builder.build(1, std::vector<char>(inst.sets.size(), 1), 0);
    EXPECT_LE(f.expectation({}), 2);
  }
}

TEST(Solve, NoSets) {
  auto inst = make(10, {}, {}, Rational(1, 4));
  auto r = solve(inst);
  EXPECT_LE(r.phi.value, 4);
  EXPECT_TRUE(r.H.empty());
}

TEST(Solve, SingleFullSetIsHit) {
  std::vector<int> all(16);
  for (int i = 0; i < 16; ++i) all[static_cast<std::size_t>(i)] = i;
  auto inst = make(16, {all}, {1}, Rational(1, 2));
  auto r = solve(inst);
  ASSERT_FALSE(r.H.empty());
  EXPECT_EQ(missed_weight(inst, r.H), 0);
  EXPECT_EQ(r.phi.value, Rational(static_cast<long long>(r.H.size())) / (16 * Rational(1, 2)));
  EXPECT_LE(Rational(static_cast<long long>(r.H.size())), 4 * 16 * Rational(1, 2) * r.phi.value);
}

TEST(Solve, CertificateAndPotential) {
  std::mt19937_64 rng(6);
  const Rational ps[] = {Rational(1, 4), Rational(1, 8), Rational(1, 16)};
  for (int trial = 0; trial < 15; ++trial) {
    auto inst = random_hitting_instance(8 + static_cast<int>(rng() % 120), 1 + rng() % 200, ps[rng() % 3], 24, rng(), 25);
    auto r = solve(inst);
    ASSERT_EQ(static_cast<int>(r.iterations.size()), r.plan.T);
    EXPECT_LE(r.iterations.front().expected, 2);
    for (std::size_t i = 0; i < r.iterations.size(); ++i) {
      EXPECT_LE(r.iterations[i].value, r.iterations[i].expected);
      if (i > 0) EXPECT_LE(r.iterations[i].value, r.iterations[i - 1].value);
    }
    EXPECT_FALSE(r.phi.infinite);
    EXPECT_LE(r.phi.value, 4) << "trial " << trial;
    EXPECT_EQ(r.phi.value, oracle::hitting_potential(inst, r.H));
  }
}

TEST(Solve, Deterministic) {
  auto inst = random_hitting_instance(60, 80, Rational(1, 8), 12, 99);
  EXPECT_EQ(solve(inst).H, solve(inst).H);
}

TEST(Coverage, AllSmallMatchesPlainSolve) {
  auto inst = random_hitting_instance(40, 60, Rational(1, 4), 6, 3);
  auto c = solve_with_coverage(inst);
  EXPECT_EQ(c.large_sets, 0u);
  EXPECT_TRUE(c.large_run.H.empty());
  EXPECT_EQ(c.H, solve(inst).H);
}

TEST(Coverage, HugeSetIsHit) {
  std::vector<int> all(300);
  for (int i = 0; i < 300; ++i) all[static_cast<std::size_t>(i)] = i;
  auto inst = make(300, {all, {0}, {5, 6}}, {1, 1, 1}, Rational(1, 4));
  auto c = solve_with_coverage(inst);
  ASSERT_EQ(c.large_sets, 1u);
  EXPECT_TRUE(c.all_large_hit);
  EXPECT_EQ(missed_weight(make(300, {all}, {1}, Rational(1, 4)), c.H), 0);
}

TEST(Coverage, MixedInstance) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = random_hitting_instance(200 + static_cast<int>(rng() % 200), 50 + rng() % 100, Rational(1, 4), 30, rng(), 8);
    auto c = solve_with_coverage(inst);
    EXPECT_TRUE(c.all_large_hit);
    EXPECT_LE(c.phi.value, 8);
    for (const auto& s : inst.sets)
      if (s.size() >= c.threshold) {
        bool hit = false;
        for (int e : s) hit = hit || std::binary_search(c.H.begin(), c.H.end(), e);
        EXPECT_TRUE(hit);
      }
  }
}

TEST(OrderedCost, Examples) {
  OrderedInstance o{3, {{2, 0, 1}}, Rational(1, 4)};
  EXPECT_EQ(ordered_cost(o, {0}), 1);
  EXPECT_EQ(ordered_cost(o, {2}), 0);
  EXPECT_EQ(ordered_cost(o, {}), 3);
}

TEST(ReduceOrdered, Examples) {
  OrderedInstance five{5, {{4, 3, 2, 1, 0}}, Rational(1, 4)};
  auto r = reduce_ordered(five);
  std::vector<std::size_t> sizes;
  for (const auto& s : r.sets) sizes.push_back(s.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 2, 4, 5}));
  EXPECT_EQ(r.weights, (std::vector<std::int64_t>{1, 2, 4, 5}));
  EXPECT_EQ(r.sets[1], (std::vector<int>{4, 3}));

  OrderedInstance one{3, {{2}}, Rational(1, 4)};
  auto r1 = reduce_ordered(one);
  ASSERT_EQ(r1.sets.size(), 1u);
  EXPECT_EQ(r1.sets[0], (std::vector<int>{2}));
}

TEST(ReduceOrdered, Sandwich) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + static_cast<int>(rng() % 40);
    OrderedInstance o{n, {}, Rational(1, 4)};
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (std::uint64_t s = 0, N = 1 + rng() % 6; s < N; ++s) {
      std::shuffle(pool.begin(), pool.end(), rng);
      o.sets.emplace_back(pool.begin(), pool.begin() + static_cast<long>(1 + rng() % static_cast<std::uint64_t>(n)));
    }
    std::vector<int> H;
    for (int v = 0; v < n; ++v)
      if (rng() % 3 == 0) H.push_back(v);
    auto c1 = ordered_cost(o, H);
    auto c2 = missed_weight(reduce_ordered(o), H);
    EXPECT_LE(c1, c2);
    EXPECT_LE(c2, 3 * c1);
  }
}

TEST(InstanceFormat, RoundTrip) {
  auto inst = random_hitting_instance(30, 20, Rational(1, 8), 7, 5);
  std::ostringstream out;
  write_instance(out, inst);
  auto back = parse_instance(out.str());
  EXPECT_EQ(back.n, inst.n);
  EXPECT_EQ(back.sets, inst.sets);
  EXPECT_EQ(back.weights, inst.weights);
  EXPECT_EQ(back.p, inst.p);
}

TEST(InstanceFormat, Errors) {
  EXPECT_THROW(parse_instance("3 1 1 4\n1 2 1\n"), ParseError);       // size mismatch
  EXPECT_THROW(parse_instance("3 2 1 4\n1 1 1\n"), ParseError);       // missing line
  EXPECT_THROW(parse_instance("3 1 1 4\n1 1 4\n"), ParseError);       // out of range
  EXPECT_THROW(parse_instance("3 1 3 4\n1 1 1\n"), ValidationError);  // p > 1/2
  EXPECT_THROW(parse_instance("3 1 1 4\n1 2 1 1\n"), ValidationError);
  try {
    parse_instance("3 2 1 4\n1 1 1\n1 x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream ordered("4 1 1 8\n3 4 1 2\n");
  auto o = load_ordered_instance(ordered);
  EXPECT_EQ(o.sets[0], (std::vector<int>{3, 0, 1}));
}
