// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ndecomp/errors.hpp"
#include "ndecomp/numeric.hpp"
#include "ndecomp/pairwise.hpp"

namespace ndecomp {

// Sets over the universe 0..n-1 (1-based in files), nonnegative integer
// weights and a sampling parameter p in (0, 1/2].
struct HittingInstance {
  int n = 0;
  std::vector<std::vector<int>> sets;
  std::vector<std::int64_t> weights;
  Rational p = Rational(1, 4);

  std::size_t max_set_size() const {
    std::size_t d = 0;
    for (const auto& s : sets) d = std::max(d, s.size());
    return d;
  }
};

// Each set lists its elements in priority order.
struct OrderedInstance {
  int n = 0;
  std::vector<std::vector<int>> sets;
  Rational p = Rational(1, 4);
};

namespace detail {

inline void validate_sets(int n, const std::vector<std::vector<int>>& sets, const Rational& p) {
  if (n < 1) throw ValidationError("hitting set universe must be nonempty");
  if (p <= 0 || p > Rational(1, 2)) throw ValidationError("p must lie in (0, 1/2]");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& s = sets[i];
    if (s.empty()) throw ValidationError("set " + std::to_string(i + 1) + " is empty");
    std::vector<int> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= n)
      throw ValidationError("set " + std::to_string(i + 1) + " has an element outside the universe");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("set " + std::to_string(i + 1) + " repeats an element");
  }
}

}  // namespace detail

inline void validate(const HittingInstance& inst) {
  detail::validate_sets(inst.n, inst.sets, inst.p);
  if (inst.weights.size() != inst.sets.size()) throw ValidationError("one weight per set is required");
  for (auto w : inst.weights)
    if (w < 0) throw ValidationError("weights must be nonnegative");
}

inline void validate(const OrderedInstance& inst) { detail::validate_sets(inst.n, inst.sets, inst.p); }

// Fractional bits used for the e^-x constants of an instance: 64 plus enough
// to keep 64 significant bits for the smallest one, e^-(max |S| * p).
// log2(e) < 3/2.
inline int decay_fraction_bits(std::size_t max_size, const Rational& p) {
  Rational top = Rational(static_cast<long long>(max_size)) * p * Rational(3, 2);
  BigInt c = boost::multiprecision::numerator(top) / boost::multiprecision::denominator(top) + 1;
  return kFixedFractionBits + static_cast<int>(c);
}

// e^-x as an integer multiple of 2^-bits.
inline BigInt decay_units(const HighFloat& x, int bits) {
  HighFloat scaled = boost::multiprecision::ldexp(boost::multiprecision::exp(-x), bits);
  return static_cast<BigInt>(boost::multiprecision::round(scaled));
}

// sum_i w_i e^{-|S_i| p}, each exponential rounded to decay_fraction_bits.
inline Rational tau(const HittingInstance& inst, const Rational& p) {
  const int bits = decay_fraction_bits(inst.max_set_size(), p);
  const HighFloat hp = to_high(p);
  std::map<std::size_t, BigInt> by_size;
  BigInt total = 0;
  for (std::size_t i = 0; i < inst.sets.size(); ++i) {
    if (inst.weights[i] == 0) continue;
    auto sz = inst.sets[i].size();
    auto it = by_size.find(sz);
    if (it == by_size.end()) it = by_size.emplace(sz, decay_units(hp * static_cast<unsigned>(sz), bits)).first;
    total += it->second * inst.weights[i];
  }
  return Rational(total, BigInt(1) << bits);
}

inline Rational tau(const HittingInstance& inst) { return tau(inst, inst.p); }

struct PotentialValue {
  Rational value;
  bool infinite = false;
};

// (sum of weights of sets missed by H) / tau + |H| / (n p).
inline PotentialValue potential(const HittingInstance& inst, const std::vector<int>& H, const Rational& p) {
  std::vector<char> in(static_cast<std::size_t>(inst.n), 0);
  std::size_t size = 0;
  for (int h : H) {
    if (h < 0 || h >= inst.n) throw ValidationError("hitting set element outside the universe");
    if (!in[static_cast<std::size_t>(h)]) ++size;
    in[static_cast<std::size_t>(h)] = 1;
  }
  BigInt missed = 0;
  for (std::size_t i = 0; i < inst.sets.size(); ++i) {
    bool hit = false;
    for (int e : inst.sets[i]) hit = hit || in[static_cast<std::size_t>(e)];
    if (!hit) missed += inst.weights[i];
  }
  PotentialValue out;
  out.value = Rational(static_cast<long long>(size)) / (Rational(inst.n) * p);
  if (missed > 0) {
    Rational t = tau(inst, p);
    if (t == 0) {
      out.infinite = true;
      return out;
    }
    out.value += Rational(missed) / t;
  }
  return out;
}

inline PotentialValue potential(const HittingInstance& inst, const std::vector<int>& H) {
  return potential(inst, H, inst.p);
}

// a - C(a, 2) for a = number of ones; 1 - Y bounds the indicator of a = 0.
inline std::int64_t pessimistic_Y(const std::vector<int>& assignment) {
  std::int64_t a = 0;
  for (int x : assignment) {
    if (x != 0 && x != 1) throw ValidationError("assignment must be binary");
    a += x;
  }
  return a - a * (a - 1) / 2;
}

// Parameters of one solve. The per-iteration bias 4p/T is rounded up to a
// power of two q_eff; the run then behaves exactly like the unrounded
// algorithm with p_eff = q_eff * T / 4 in [p, 2p). T is the smallest value
// >= max(1, ceil(8 p Delta)) that also satisfies T >= 8 p_eff Delta, which is
// what the per-set bound E[1 - Y] <= 1 - 3|S| p_eff / T needs.
struct HittingPlan {
  Rational p;
  std::size_t delta = 1;
  int T = 1;
  Rational q_eff;
  Rational p_eff;
  int frac_bits = kFixedFractionBits;
  PairwiseSpace space;
};

inline HittingPlan plan_hitting(const HittingInstance& inst) {
  validate(inst);
  HittingPlan plan;
  plan.p = inst.p;
  plan.delta = std::max<std::size_t>(1, inst.max_set_size());
  const Rational delta(static_cast<long long>(plan.delta));
  auto ceil_int = [](const Rational& r) {
    BigInt q = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
    if (Rational(q) < r) ++q;
    return static_cast<long long>(q);
  };
  long long T = std::max(1LL, ceil_int(8 * inst.p * delta));
  for (;; ++T) {
    Rational q = std::min(Rational(1, 2), Rational(4 * inst.p / T));
    PairwiseSpace s = build_space(static_cast<std::uint64_t>(inst.n), q);
    Rational p_eff = s.bias() * T / 4;
    if (Rational(T) >= 8 * p_eff * delta) {
      plan.T = static_cast<int>(T);
      plan.q_eff = s.bias();
      plan.p_eff = p_eff;
      plan.space = s;
      break;
    }
  }
  plan.frac_bits = decay_fraction_bits(plan.delta, plan.p_eff);
  return plan;
}

// One iteration t (1-based) of the sampling process, as an objective over
// the seed of that iteration:
//   f^t(G) = sum_{S_i alive} w_i e^{-|S_i|(T-t)p/T} (1 - Y_i) / tau
//          + (|G| + sum_{j<t} |H^j| + 4n(T-t)p/T) / (4np)
// with p = p_eff. All coefficients share the denominator tau * n * T, with
// tau scaled by 2^frac_bits so that every exponential is an integer.
class HittingObjectiveBuilder {
 public:
  HittingObjectiveBuilder(const HittingInstance& inst, const HittingPlan& plan) : inst_(inst), plan_(plan) {
    const HighFloat step = to_high(plan.p_eff) / plan.T;
    tau_units_ = 0;
    for (std::size_t i = 0; i < inst.sets.size(); ++i) {
      if (inst.weights[i] == 0) continue;
      auto sz = inst.sets[i].size();
      if (!base_.count(sz)) {
        // start at exponent T, multiply by e^{|S| p / T} once per iteration
        base_[sz] = boost::multiprecision::exp(-step * plan.T * static_cast<unsigned>(sz));
        growth_[sz] = boost::multiprecision::exp(step * static_cast<unsigned>(sz));
      }
      tau_units_ += to_units(base_[sz]) * inst.weights[i];
    }
    if (tau_units_ == 0) tau_units_ = 1;  // every weight is zero: no cost terms
    level_ = 0;
  }

  const BigInt& tau_units() const { return tau_units_; }

  // e^{-|S|(T-t)p/T} in units of 2^-frac_bits, for the current level t.
  BigInt decay(std::size_t size) const { return to_units(current_.at(size)); }

  // Advance to iteration t (levels only move forward).
  void set_iteration(int t) {
    if (t < level_ || t < 1 || t > plan_.T) throw ValidationError("iteration out of order");
    if (level_ == 0) {
      current_ = base_;
      level_ = 0;
    }
    while (level_ < t) {
      for (auto& [sz, v] : current_) v *= growth_.at(sz);
      ++level_;
    }
    if (t == plan_.T)
      for (auto& kv : current_) kv.second = 1;
  }

  BigInt denominator() const { return tau_units_ * plan_.space.n * static_cast<unsigned>(plan_.T); }

  // alive[i] says whether S_i is still unhit; prior_size = sum_{j<t} |H^j|.
  QuadraticObjective build(int t, const std::vector<char>& alive, std::uint64_t prior_size) {
    set_iteration(t);
    const std::uint64_t n = plan_.space.n;
    const auto T = static_cast<unsigned>(plan_.T);
    QuadraticObjective q(plan_.space, denominator());
    const BigInt size_unit = tau_units_ << ell();
    for (std::uint64_t i = 1; i <= n; ++i) q.add_linear(i, size_unit);
    q.add_constant(size_unit * prior_size + tau_units_ * (plan_.T - t) * n);
    std::vector<std::uint64_t> idx;
    for (std::size_t s = 0; s < inst_.sets.size(); ++s) {
      if (!alive[s] || inst_.weights[s] == 0) continue;
      idx.clear();
      for (int e : inst_.sets[s]) idx.push_back(static_cast<std::uint64_t>(e) + 1);
      q.add_pessimistic_miss(idx, decay(inst_.sets[s].size()) * inst_.weights[s] * n * T);
    }
    return q;
  }

 private:
  int ell() const { return plan_.space.ell; }
  BigInt to_units(const HighFloat& x) const {
    return static_cast<BigInt>(boost::multiprecision::round(boost::multiprecision::ldexp(x, plan_.frac_bits)));
  }

  const HittingInstance& inst_;
  const HittingPlan& plan_;
  std::map<std::size_t, HighFloat> base_, growth_, current_;
  BigInt tau_units_;
  int level_ = 0;
};

struct HittingIteration {
  int t = 0;
  Rational expected;  // E[f^t(G^t)] before fixing
  Rational value;     // f^t(H^t)
  std::size_t selected = 0;
  std::size_t alive_before = 0;
};

struct HittingResult {
  std::vector<int> H;  // sorted, distinct
  HittingPlan plan;
  std::vector<HittingIteration> iterations;
  PotentialValue phi;  // at the instance's own p
  std::uint64_t evaluations = 0;
};

// Iterated pairwise sampling, each round derandomized by bit fixing.
// Checks at runtime that f^1 starts at most 2 and that f^t(H^t) never
// increases from one iteration to the next.
inline HittingResult solve(const HittingInstance& inst) {
  HittingResult res;
  res.plan = plan_hitting(inst);
  const HittingPlan& plan = res.plan;
  HittingObjectiveBuilder builder(inst, plan);
  std::vector<char> alive(inst.sets.size(), 1);
  std::vector<char> in_h(static_cast<std::size_t>(inst.n), 0);
  std::uint64_t prior = 0;
  Rational previous;
  for (int t = 1; t <= plan.T; ++t) {
    HittingIteration it;
    it.t = t;
    it.alive_before = static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1));
    QuadraticObjective f = builder.build(t, alive, prior);
    FixResult fixed = fix_bits(plan.space, [&](const Seed& prefix) {
      ++res.evaluations;
      return f.expectation_scaled(prefix);
    });
    it.expected = fixed.initial;
    it.value = fixed.final;
    if (t == 1)
      check_invariant(it.expected <= 2, "hitting set: first iteration starts above 2");
    else
      check_invariant(it.expected <= previous,
                      "hitting set: iteration " + std::to_string(t) + " starts above the previous value");
    previous = it.value;
    auto picked = selected_indices(plan.space, fixed.seed);
    it.selected = picked.size();
    prior += picked.size();
    std::vector<char> now(static_cast<std::size_t>(inst.n), 0);
    for (auto i : picked) {
      now[static_cast<std::size_t>(i - 1)] = 1;
      in_h[static_cast<std::size_t>(i - 1)] = 1;
    }
    for (std::size_t s = 0; s < inst.sets.size(); ++s)
      if (alive[s])
        for (int e : inst.sets[s])
          if (now[static_cast<std::size_t>(e)]) {
            alive[s] = 0;
            break;
          }
    res.iterations.push_back(std::move(it));
  }
  for (int v = 0; v < inst.n; ++v)
    if (in_h[static_cast<std::size_t>(v)]) res.H.push_back(v);
  res.phi = potential(inst, res.H);
  return res;
}

struct CoverageResult {
  std::vector<int> H;
  HittingResult small_run;  // sets below the threshold
  HittingResult large_run;  // truncated large sets, weight N^2
  std::size_t threshold = 0;
  std::size_t large_sets = 0;
  bool all_large_hit = false;
  PotentialValue phi;
};

// ceil(10 ln N / p) with N padded to at least max(n, 2) by zero-weight sets.
inline std::size_t coverage_threshold(const HittingInstance& inst) {
  auto N = std::max<std::size_t>({inst.sets.size(), static_cast<std::size_t>(inst.n), 2});
  HighFloat theta = 10 * boost::multiprecision::log(HighFloat(static_cast<unsigned long long>(N))) / to_high(inst.p);
  return static_cast<std::size_t>(boost::multiprecision::ceil(theta));
}

// Solves the sets below the threshold as they are, and separately hits the
// first `threshold` elements of every larger set with weight N^2, which is
// heavy enough that the potential bound forces every one of them to be hit.
inline CoverageResult solve_with_coverage(const HittingInstance& inst) {
  validate(inst);
  CoverageResult res;
  res.threshold = coverage_threshold(inst);
  auto N = static_cast<std::int64_t>(std::max<std::size_t>({inst.sets.size(), static_cast<std::size_t>(inst.n), 2}));
  HittingInstance small{inst.n, {}, {}, inst.p}, large{inst.n, {}, {}, inst.p};
  for (std::size_t i = 0; i < inst.sets.size(); ++i) {
    const auto& s = inst.sets[i];
    if (s.size() >= res.threshold) {
      large.sets.emplace_back(s.begin(), s.begin() + static_cast<long>(res.threshold));
      large.weights.push_back(N * N);
    } else {
      small.sets.push_back(s);
      small.weights.push_back(inst.weights[i]);
    }
  }
  res.large_sets = large.sets.size();
  res.small_run = solve(small);
  res.large_run = solve(large);
  std::vector<char> in(static_cast<std::size_t>(inst.n), 0);
  for (int v : res.small_run.H) in[static_cast<std::size_t>(v)] = 1;
  for (int v : res.large_run.H) in[static_cast<std::size_t>(v)] = 1;
  for (int v = 0; v < inst.n; ++v)
    if (in[static_cast<std::size_t>(v)]) res.H.push_back(v);
  res.all_large_hit = true;
  for (const auto& s : inst.sets) {
    if (s.size() < res.threshold) continue;
    bool hit = false;
    for (int e : s) hit = hit || in[static_cast<std::size_t>(e)];
    res.all_large_hit = res.all_large_hit && hit;
  }
  check_invariant(res.all_large_hit, "hitting set: a set above the coverage threshold was missed");
  res.phi = potential(inst, res.H);
  return res;
}

// Per set: pays (position of the first hit) - 1, or |S| if never hit.
inline std::int64_t ordered_cost(const OrderedInstance& inst, const std::vector<int>& H) {
  std::vector<char> in(static_cast<std::size_t>(inst.n), 0);
  for (int h : H) {
    if (h < 0 || h >= inst.n) throw ValidationError("hitting set element outside the universe");
    in[static_cast<std::size_t>(h)] = 1;
  }
  std::int64_t cost = 0;
  for (const auto& s : inst.sets) {
    std::size_t k = 0;
    while (k < s.size() && !in[static_cast<std::size_t>(s[k])]) ++k;
    cost += static_cast<std::int64_t>(k);
  }
  return cost;
}

// Weighted cost of H in a plain instance: total weight of the sets it misses.
inline std::int64_t missed_weight(const HittingInstance& inst, const std::vector<int>& H) {
  std::vector<char> in(static_cast<std::size_t>(inst.n), 0);
  for (int h : H) in[static_cast<std::size_t>(h)] = 1;
  std::int64_t cost = 0;
  for (std::size_t i = 0; i < inst.sets.size(); ++i) {
    bool hit = false;
    for (int e : inst.sets[i]) hit = hit || in[static_cast<std::size_t>(e)];
    if (!hit) cost += inst.weights[i];
  }
  return cost;
}

// Every set becomes its prefixes of sizes 1, 2, 4, ..., 2^l (2^l <= |S|),
// plus the whole set when |S| is not a power of two, each weighted by its
// size. A first hit at position k then costs between k - 1 and 3(k - 1).
inline HittingInstance reduce_ordered(const OrderedInstance& inst) {
  validate(inst);
  HittingInstance out{inst.n, {}, {}, inst.p};
  for (const auto& s : inst.sets) {
    std::size_t len = 1;
    for (; len <= s.size(); len *= 2) {
      out.sets.emplace_back(s.begin(), s.begin() + static_cast<long>(len));
      out.weights.push_back(static_cast<std::int64_t>(len));
    }
    if (len / 2 != s.size()) {
      out.sets.push_back(s);
      out.weights.push_back(static_cast<std::int64_t>(s.size()));
    }
  }
  return out;
}

// ---- text format ----------------------------------------------------------
// line 1: n N p_num p_den; then N lines "w k e_1 .. e_k" (ordered instances
// omit w and list elements in priority order). Elements are 1-based.

namespace detail {

struct InstanceHeader {
  int n = 0;
  std::size_t N = 0;
  Rational p;
};

inline bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

inline std::vector<long long> parse_ints(const std::string& line, std::size_t lineno) {
  std::istringstream ss(line);
  std::vector<long long> out;
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw ParseError(lineno, "expected an integer, got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

template <bool Weighted>
std::vector<std::pair<std::int64_t, std::vector<int>>> parse_instance_body(std::istream& in, InstanceHeader& h) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno)) throw ParseError(lineno, "missing header line");
  auto head = parse_ints(line, lineno);
  if (head.size() != 4) throw ParseError(lineno, "header must be 'n N p_num p_den'");
  if (head[0] < 1 || head[1] < 0 || head[2] < 1 || head[3] < 1) throw ParseError(lineno, "header values out of range");
  h.n = static_cast<int>(head[0]);
  h.N = static_cast<std::size_t>(head[1]);
  h.p = Rational(head[2], head[3]);
  std::vector<std::pair<std::int64_t, std::vector<int>>> rows;
  while (rows.size() < h.N) {
    if (!next_content_line(in, line, lineno))
      throw ParseError(lineno, "expected " + std::to_string(h.N) + " set lines, found " + std::to_string(rows.size()));
    auto v = parse_ints(line, lineno);
    std::size_t at = 0;
    std::int64_t w = 1;
    if (Weighted) {
      if (v.empty()) throw ParseError(lineno, "missing weight");
      w = v[at++];
    }
    if (at >= v.size()) throw ParseError(lineno, "missing set size");
    long long k = v[at++];
    if (k < 0 || static_cast<std::size_t>(k) != v.size() - at)
      throw ParseError(lineno, "set size does not match the number of elements");
    std::vector<int> elems;
    for (; at < v.size(); ++at) {
      if (v[at] < 1 || v[at] > h.n) throw ParseError(lineno, "element out of range 1.." + std::to_string(h.n));
      elems.push_back(static_cast<int>(v[at] - 1));
    }
    rows.emplace_back(w, std::move(elems));
  }
  if (next_content_line(in, line, lineno)) throw ParseError(lineno, "more set lines than the header announces");
  return rows;
}

}  // namespace detail

inline HittingInstance load_instance(std::istream& in) {
  detail::InstanceHeader h;
  auto rows = detail::parse_instance_body<true>(in, h);
  HittingInstance inst{h.n, {}, {}, h.p};
  for (auto& [w, s] : rows) {
    inst.weights.push_back(w);
    inst.sets.push_back(std::move(s));
  }
  validate(inst);
  return inst;
}

inline OrderedInstance load_ordered_instance(std::istream& in) {
  detail::InstanceHeader h;
  auto rows = detail::parse_instance_body<false>(in, h);
  OrderedInstance inst{h.n, {}, h.p};
  for (auto& row : rows) inst.sets.push_back(std::move(row.second));
  validate(inst);
  return inst;
}

inline HittingInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return load_instance(in);
}

inline void write_instance(std::ostream& out, const HittingInstance& inst) {
  out << inst.n << ' ' << inst.sets.size() << ' ' << boost::multiprecision::numerator(inst.p) << ' '
      << boost::multiprecision::denominator(inst.p) << '\n';
  for (std::size_t i = 0; i < inst.sets.size(); ++i) {
    out << inst.weights[i] << ' ' << inst.sets[i].size();
    for (int e : inst.sets[i]) out << ' ' << e + 1;
    out << '\n';
  }
}

}  // namespace ndecomp
