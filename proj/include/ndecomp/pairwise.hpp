// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ndecomp/errors.hpp"
#include "ndecomp/numeric.hpp"

namespace ndecomp {

// Pairwise independent Bernoulli(2^-ell) variables X_1..X_n from an
// ell*m-bit seed. Seed bit g*m + k is bit k of group g. Variable i gets label
// bit L_i(g) = parity(i AND group g), and X_i = 1 iff all ell label bits are 1.
struct PairwiseSpace {
  std::uint64_t n = 0;
  int ell = 0;
  int m = 0;

  int seed_len() const { return ell * m; }
  Rational bias() const { return pow2(-ell); }
  std::uint64_t max_index() const { return (std::uint64_t{1} << m) - 1; }
};

using Seed = std::vector<std::uint8_t>;

// Rounds q up to the power of two 2^-ell in [q, 2q).
inline PairwiseSpace build_space(std::uint64_t n, const Rational& q) {
  if (n < 1) throw ValidationError("pairwise space needs n >= 1");
  if (q <= 0 || q > Rational(1, 2)) throw ValidationError("bias must lie in (0, 1/2]");
  PairwiseSpace s;
  s.n = n;
  s.ell = 1;
  while (pow2(-(s.ell + 1)) >= q) ++s.ell;
  s.m = 1;
  while (((std::uint64_t{1} << s.m) - 1) < n) ++s.m;
  if (s.m > 62) throw ValidationError("universe too large");
  return s;
}

namespace detail {

inline std::uint64_t group_mask(const Seed& seed, int m, int g, int bits) {
  std::uint64_t mask = 0;
  for (int k = 0; k < bits; ++k)
    if (seed[static_cast<std::size_t>(g * m + k)]) mask |= std::uint64_t{1} << k;
  return mask;
}

inline int parity(std::uint64_t x) { return std::popcount(x) & 1; }

}  // namespace detail

inline int eval_variable(const PairwiseSpace& space, const Seed& seed, std::uint64_t i) {
  if (seed.size() != static_cast<std::size_t>(space.seed_len()))
    throw ValidationError("seed has length " + std::to_string(seed.size()) + ", expected " +
                          std::to_string(space.seed_len()));
  if (i < 1 || i > space.n) throw ValidationError("variable index out of range");
  for (int g = 0; g < space.ell; ++g)
    if (!detail::parity(i & detail::group_mask(seed, space.m, g, space.m))) return 0;
  return 1;
}

// numerator / (denominator * 2^shift). The denominator is shared by every
// value of one objective, so comparisons only need shifts.
struct ScaledValue {
  BigInt numerator;
  int shift = 0;
  const BigInt* denominator = nullptr;

  Rational value() const { return Rational(numerator, *denominator << shift); }

  friend bool operator<=(const ScaledValue& a, const ScaledValue& b) {
    return (a.numerator << b.shift) <= (b.numerator << a.shift);
  }
};

inline Rational as_rational(const Rational& r) { return r; }
inline Rational as_rational(const ScaledValue& v) { return v.value(); }

// A quadratic polynomial in the X_i with integer coefficients over one
// common denominator:
//   (constant + sum c_i X_i + sum c_ij X_i X_j + sum_sets c * C(|A cap G|, 2)) / denominator
// where G = {i : X_i = 1}. expectation(prefix) is exact.
//
// Under a seed prefix, label bits of groups that are fully fixed are known.
// In the group being fixed, with its low `nb` bits fixed to rho, bit L_i is
// known iff (i >> nb) == 0; otherwise it is uniform, and two unknown bits are
// independent unless (i >> nb) == (j >> nb), in which case their XOR is
// parity((i ^ j) & rho). Later groups are untouched, so they contribute a
// factor 1/2 per variable and 1/4 per pair (i != j are linearly independent).
class QuadraticObjective {
 public:
  explicit QuadraticObjective(PairwiseSpace space, BigInt denominator = 1)
      : space_(space), denominator_(std::move(denominator)), linear_(space.n + 1) {
    if (denominator_ <= 0) throw ValidationError("denominator must be positive");
  }

  const PairwiseSpace& space() const { return space_; }
  const BigInt& denominator() const { return denominator_; }

  void add_constant(const BigInt& c) {
    constant_ += c;
    finalized_ = false;
  }

  void add_linear(std::uint64_t i, const BigInt& c) {
    check_index(i);
    linear_[i] += c;
    finalized_ = false;
  }

  void add_pair(std::uint64_t i, std::uint64_t j, const BigInt& c) {
    check_index(i);
    check_index(j);
    if (i == j) throw ValidationError("pair term needs distinct indices");
    if (c == 0) return;
    pairs_.push_back({std::min(i, j), std::max(i, j), c});
    finalized_ = false;
  }

  // c * sum over unordered pairs {i, j} of A of X_i X_j.
  void add_pair_sum(std::vector<std::uint64_t> indices, const BigInt& c) {
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
      throw ValidationError("pair sum needs distinct indices");
    for (auto i : indices) check_index(i);
    if (c == 0 || indices.size() < 2) return;
    sets_.push_back({std::move(indices), c});
    finalized_ = false;
  }

  // w * (1 - a + C(a, 2)) with a = |A cap G|; an upper bound on w * [a == 0].
  void add_pessimistic_miss(const std::vector<std::uint64_t>& indices, const BigInt& w) {
    add_constant(w);
    for (auto i : indices) add_linear(i, -w);
    add_pair_sum(indices, w);
  }

  // Exact E[f | prefix] as an unnormalized fraction; cheap to compare.
  ScaledValue expectation_scaled(const Seed& prefix) {
    if (prefix.size() > static_cast<std::size_t>(space_.seed_len()))
      throw ValidationError("prefix longer than the seed");
    finalize();
    const int B = static_cast<int>(prefix.size());
    const int m = space_.m;
    // Current group: the one holding the last fixed bit (group 0 if none).
    const int cur = B == 0 ? 0 : (B - 1) / m;
    const int nb = B - cur * m;
    sync_groups(prefix, cur);
    const std::uint64_t rho = detail::group_mask(prefix, m, cur, nb);
    const int free_groups = space_.ell - cur - 1;
    ScaledValue out;
    out.denominator = &denominator_;
    out.shift = 2 * (free_groups + 1);
    if (width_ == Width::k128)
      out.numerator = to_big(sum<__int128>(coef128_, nb, rho, free_groups));
    else if (width_ == Width::k256)
      out.numerator = BigInt(sum<Int256>(coef256_, nb, rho, free_groups));
    else
      out.numerator = sum<BigInt>(big_coef_, nb, rho, free_groups);
    return out;
  }

  Rational expectation(const Seed& prefix) { return expectation_scaled(prefix).value(); }

  // Value of the polynomial at a full seed.
  Rational evaluate(const Seed& seed) {
    if (seed.size() != static_cast<std::size_t>(space_.seed_len()))
      throw ValidationError("evaluate needs a full seed");
    return expectation(seed);
  }

 private:
  struct PairTerm {
    std::uint64_t i, j;
    BigInt c;
  };
  struct SetTerm {
    std::vector<std::uint64_t> idx;
    BigInt c;
  };
  using Int256 = boost::multiprecision::int256_t;
  enum class Width { k128, k256, kBig };

  template <class Int>
  struct Coefficients {
    Int constant{};
    std::vector<Int> linear;  // parallel to linear_idx_
    std::vector<Int> pairs;   // parallel to pairs_
    std::vector<Int> sets;    // parallel to sets_
  };

  static __int128 from_big(const BigInt& x) {
    BigInt a = boost::multiprecision::abs(x);
    auto lo = static_cast<std::uint64_t>(a & std::numeric_limits<std::uint64_t>::max());
    auto hi = static_cast<std::uint64_t>(a >> 64);
    __int128 v = static_cast<__int128>((static_cast<unsigned __int128>(hi) << 64) | lo);
    return x < 0 ? -v : v;
  }

  static BigInt to_big(__int128 x) {
    bool neg = x < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(x) : static_cast<unsigned __int128>(x);
    BigInt r = static_cast<std::uint64_t>(u >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(u);
    return neg ? BigInt(-r) : r;
  }

  void check_index(std::uint64_t i) const {
    if (i < 1 || i > space_.n) throw ValidationError("variable index out of range");
  }

  // Weight of E[X_i X_j] in the current group, as a multiple of 1/4.
  static int pair_weight(std::uint64_t i, std::uint64_t j, int nb, std::uint64_t rho) {
    std::uint64_t hi = i >> nb, hj = j >> nb;
    if (hi == 0 && hj == 0) return detail::parity(i & rho) && detail::parity(j & rho) ? 4 : 0;
    if (hi == 0) return detail::parity(i & rho) ? 2 : 0;
    if (hj == 0) return detail::parity(j & rho) ? 2 : 0;
    if (hi != hj) return 1;
    return detail::parity((i ^ j) & rho) ? 0 : 2;
  }

  // Sum over pairs of a sorted index list, in units of 1/4. Indices sharing
  // i >> nb are contiguous because the list is sorted.
  static std::int64_t set_pair_numerator(const std::vector<std::uint64_t>& idx, int nb, std::uint64_t rho) {
    std::int64_t z1 = 0, u = 0, sum_sq = 0, same = 0;
    std::size_t p = 0;
    while (p < idx.size() && (idx[p] >> nb) == 0) {
      z1 += detail::parity(idx[p] & rho);
      ++p;
    }
    while (p < idx.size()) {
      std::uint64_t h = idx[p] >> nb;
      std::int64_t c0 = 0, c1 = 0;
      while (p < idx.size() && (idx[p] >> nb) == h) {
        if (detail::parity(idx[p] & rho)) ++c1; else ++c0;
        ++p;
      }
      std::int64_t c = c0 + c1;
      u += c;
      sum_sq += c * c;
      same += c0 * (c0 - 1) / 2 + c1 * (c1 - 1) / 2;
    }
    return 4 * (z1 * (z1 - 1) / 2) + 2 * z1 * u + (u * u - sum_sq) / 2 + 2 * same;
  }

  // Numerator of the expectation over 4^(free_groups + 1).
  template <class Int>
  Int sum(const Coefficients<Int>& k, int nb, std::uint64_t rho, int free_groups) const {
    Int det{}, und{};
    for (auto pos : live_linear_) {
      auto i = linear_idx_[pos];
      if ((i >> nb) == 0) {
        if (detail::parity(i & rho)) det += k.linear[pos];
      } else {
        und += k.linear[pos];
      }
    }
    Int total = k.constant << (2 * (free_groups + 1));
    total += det << (free_groups + 2);
    total += und << (free_groups + 1);
    Int b1{}, b2{}, b4{};
    for (auto pos : live_pairs_) {
      switch (pair_weight(pairs_[pos].i, pairs_[pos].j, nb, rho)) {
        case 1: b1 += k.pairs[pos]; break;
        case 2: b2 += k.pairs[pos]; break;
        case 4: b4 += k.pairs[pos]; break;
        default: break;
      }
    }
    total += b1 + (b2 << 1) + (b4 << 2);
    for (std::size_t s = 0; s < sets_.size(); ++s) {
      const auto& live = live_sets_[s];
      if (live.size() < 2) continue;
      std::int64_t num = set_pair_numerator(live, nb, rho);
      if (num != 0) total += k.sets[s] * static_cast<Int>(num);
    }
    return total;
  }

  void finalize() {
    if (finalized_) return;
    linear_idx_.clear();
    big_coef_ = {};
    big_coef_.constant = constant_;
    for (std::uint64_t i = 1; i <= space_.n; ++i)
      if (linear_[i] != 0) {
        linear_idx_.push_back(i);
        big_coef_.linear.push_back(linear_[i]);
      }
    for (const auto& t : pairs_) big_coef_.pairs.push_back(t.c);
    for (const auto& t : sets_) big_coef_.sets.push_back(t.c);

    // Bound on every partial sum in sum(); a fixed-width path is taken only
    // when it provably fits.
    const int scale = 2 * space_.ell;
    BigInt bound = boost::multiprecision::abs(constant_) << scale;
    for (const auto& c : big_coef_.linear) bound += boost::multiprecision::abs(c) << scale;
    for (const auto& c : big_coef_.pairs) bound += boost::multiprecision::abs(c) << 2;
    for (std::size_t s = 0; s < sets_.size(); ++s) {
      BigInt sz = sets_[s].idx.size();
      bound += boost::multiprecision::abs(sets_[s].c) * 2 * sz * sz;
    }
    const auto bits = boost::multiprecision::msb(bound + 1);
    width_ = bits < 125 ? Width::k128 : bits < 253 ? Width::k256 : Width::kBig;
    if (width_ == Width::k128) coef128_ = narrow<__int128>([](const BigInt& x) { return from_big(x); });
    if (width_ == Width::k256) coef256_ = narrow<Int256>([](const BigInt& x) { return Int256(x); });
    finalized_ = true;
    reset_cache();
  }

  template <class Int, class Conv>
  Coefficients<Int> narrow(Conv conv) const {
    Coefficients<Int> out;
    out.constant = conv(big_coef_.constant);
    for (const auto& c : big_coef_.linear) out.linear.push_back(conv(c));
    for (const auto& c : big_coef_.pairs) out.pairs.push_back(conv(c));
    for (const auto& c : big_coef_.sets) out.sets.push_back(conv(c));
    return out;
  }

  void reset_cache() {
    groups_done_ = 0;
    done_masks_.clear();
    live_linear_.resize(linear_idx_.size());
    for (std::size_t k = 0; k < linear_idx_.size(); ++k) live_linear_[k] = k;
    live_pairs_.resize(pairs_.size());
    for (std::size_t k = 0; k < pairs_.size(); ++k) live_pairs_[k] = k;
    live_sets_.resize(sets_.size());
    for (std::size_t k = 0; k < sets_.size(); ++k) live_sets_[k] = sets_[k].idx;
  }

  // Make the cache reflect exactly the first `groups` full groups of prefix.
  void sync_groups(const Seed& prefix, int groups) {
    const int m = space_.m;
    int keep = std::min(groups_done_, groups);
    for (int g = 0; g < keep; ++g)
      if (detail::group_mask(prefix, m, g, m) != done_masks_[static_cast<std::size_t>(g)]) {
        keep = g;
        break;
      }
    if (keep < groups_done_) reset_cache();
    while (groups_done_ < groups) {
      std::uint64_t mask = detail::group_mask(prefix, m, groups_done_, m);
      auto on = [mask](std::uint64_t i) { return detail::parity(i & mask) == 1; };
      std::erase_if(live_linear_, [&](std::size_t k) { return !on(linear_idx_[k]); });
      std::erase_if(live_pairs_, [&](std::size_t k) { return !on(pairs_[k].i) || !on(pairs_[k].j); });
      for (auto& s : live_sets_)
        if (s.size() >= 2) std::erase_if(s, [&](std::uint64_t i) { return !on(i); });
      done_masks_.push_back(mask);
      ++groups_done_;
    }
  }

  PairwiseSpace space_;
  BigInt denominator_;
  BigInt constant_ = 0;
  std::vector<BigInt> linear_;  // dense, index 0 unused
  std::vector<PairTerm> pairs_;
  std::vector<SetTerm> sets_;

  bool finalized_ = false;
  Width width_ = Width::kBig;
  std::vector<std::uint64_t> linear_idx_;
  Coefficients<BigInt> big_coef_;
  Coefficients<__int128> coef128_;
  Coefficients<Int256> coef256_;

  int groups_done_ = 0;
  std::vector<std::uint64_t> done_masks_;
  std::vector<std::size_t> live_linear_;
  std::vector<std::size_t> live_pairs_;
  std::vector<std::vector<std::uint64_t>> live_sets_;
};

// Common denominator of a list of rationals.
inline BigInt common_denominator(const std::vector<Rational>& values) {
  BigInt l = 1;
  for (const auto& r : values) {
    const BigInt& d = boost::multiprecision::denominator(r);
    if (l % d != 0) l = l / boost::multiprecision::gcd(l, d) * d;
  }
  return l;
}

inline BigInt scale_to(const Rational& r, const BigInt& den) {
  return boost::multiprecision::numerator(r) * (den / boost::multiprecision::denominator(r));
}

// sum_i c_i E[X_i | prefix].
inline Rational cond_first_moment(const PairwiseSpace& space, const Seed& prefix,
                                  const std::vector<std::pair<std::uint64_t, Rational>>& terms) {
  std::vector<Rational> cs;
  for (const auto& t : terms) cs.push_back(t.second);
  BigInt den = common_denominator(cs);
  QuadraticObjective q(space, den);
  for (const auto& [i, c] : terms) q.add_linear(i, scale_to(c, den));
  return q.expectation(prefix);
}

// c * sum_{i<j in A} E[X_i X_j | prefix].
inline Rational cond_second_moment(const PairwiseSpace& space, const Seed& prefix,
                                   const std::vector<std::uint64_t>& indices, const Rational& c) {
  QuadraticObjective q(space, boost::multiprecision::denominator(c));
  q.add_pair_sum(indices, boost::multiprecision::numerator(c));
  return q.expectation(prefix);
}

struct FixResult {
  Seed seed;
  Rational initial;  // objective at the empty prefix
  Rational final;    // objective at the full seed
};

// Greedy bit fixing: each bit takes the value with the smaller conditional
// expectation, 0 on ties. Throws InvariantError if a fix ever increases the
// objective, which means `objective` is not a conditional expectation.
template <class Objective>
FixResult fix_bits(const PairwiseSpace& space, Objective&& objective) {
  FixResult r;
  auto cur = objective(r.seed);
  r.initial = as_rational(cur);
  for (int b = 0; b < space.seed_len(); ++b) {
    r.seed.push_back(0);
    auto e0 = objective(r.seed);
    r.seed.back() = 1;
    auto e1 = objective(r.seed);
    bool zero = e0 <= e1;
    if (zero) r.seed.back() = 0;
    auto& next = zero ? e0 : e1;
    check_invariant(next <= cur, "bit fixing increased the objective at bit " + std::to_string(b));
    cur = std::move(next);
  }
  r.final = as_rational(cur);
  return r;
}

// Indices i in 1..space.n with X_i = 1 under a full seed.
inline std::vector<std::uint64_t> selected_indices(const PairwiseSpace& space, const Seed& seed) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 1; i <= space.n; ++i)
    if (eval_variable(space, seed, i)) out.push_back(i);
  return out;
}

}  // namespace ndecomp
