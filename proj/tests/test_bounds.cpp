#include "zsk/bounds.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace zsk;

namespace {

// Brute-force tables for tiny groups. Elements are indices; sums go through
// a locally built addition table.
struct Tiny {
  Group g;
  std::vector<std::vector<std::size_t>> add;
  std::map<std::vector<int>, int> memo;

  explicit Tiny(Group grp) : g(std::move(grp)) {
    std::size_t n = static_cast<std::size_t>(g.order());
    add.assign(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) add[a][b] = g.index_of(zsk::add(g, g.element_at(a), g.element_at(b)));
  }

  std::size_t sum(const std::vector<int>& c) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (int j = 0; j < c[i]; ++j) s = add[s][i];
    return s;
  }

  template <class F>
  void sub_multisets(const std::vector<int>& c, F&& f) const {
    std::vector<int> t(c.size(), 0);
    while (true) {
      f(t);
      std::size_t i = 0;
      while (i < c.size() && t[i] == c[i]) t[i++] = 0;
      if (i == c.size()) return;
      ++t[i];
    }
  }

  // max number of disjoint nonempty zero-sum blocks of a zero-sum multiset
  int max_len(const std::vector<int>& c) {
    auto it = memo.find(c);
    if (it != memo.end()) return it->second;
    std::size_t first = 0;
    while (first < c.size() && c[first] == 0) ++first;
    int best = 0;
    if (first < c.size()) {
      sub_multisets(c, [&](const std::vector<int>& t) {
        if (t[first] == 0 || sum(t) != 0) return;
        std::vector<int> rest = c;
        for (std::size_t i = 0; i < c.size(); ++i) rest[i] -= t[i];
        best = std::max(best, 1 + max_len(rest));
      });
    }
    return memo[c] = best;
  }

  template <class F>
  void multisets(int len, F&& f) const {
    std::vector<int> c(static_cast<std::size_t>(g.order()), 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i + 1 == c.size()) {
        c[i] = left;
        f(c);
        return;
      }
      for (int x = left; x >= 0; --x) {
        c[i] = x;
        rec(i + 1, left - x);
      }
    };
    rec(0, len);
  }

  int dk(int k, int max_len_search) {
    int best = 0;
    for (int len = 1; len <= max_len_search; ++len)
      multisets(len, [&](const std::vector<int>& c) {
        if (sum(c) == 0 && max_len(c) <= k) best = std::max(best, len);
      });
    return best;
  }

  int shortest(const std::vector<int>& c) const {
    int best = 1 << 30;
    sub_multisets(c, [&](const std::vector<int>& t) {
      int len = 0;
      for (int x : t) len += x;
      if (len > 0 && len < best && sum(t) == 0) best = len;
    });
    return best;
  }

  // least s such that every length-s sequence has a zero-sum of length <= ell
  int s_le(int ell, int limit) {
    int worst = 0;
    for (int len = 1; len <= limit; ++len) {
      bool bad = false;
      multisets(len, [&](const std::vector<int>& c) {
        if (!bad && shortest(c) > ell) bad = true;
      });
      if (bad) worst = len;
      else if (worst < len - 1) break;
    }
    return worst + 1;
  }
};

Int iv(const Extended& e) { return e.to_int64(); }

}  // namespace

TEST(Bounds, TrivialRecursion) {
  Group g = elementary(2, 3);
  EXPECT_EQ(iv(ub_recursion(g, {}, {}, 4, 3).value), 12);
  EXPECT_EQ(iv(kd_trivial_ub(3, 4).value), 12);
}

TEST(Bounds, RecursionExample) {
  Group g = elementary(2, 3);
  auto r = ub_recursion(g, {2}, {Extended(8)}, 4, 2);
  EXPECT_EQ(iv(r.value), 7);
  EXPECT_EQ(r.direction, Direction::kUpper);
  EXPECT_EQ(r.target, "D_2");
  EXPECT_EQ(reevaluate(r), r.value);
}

TEST(Bounds, RecursionAgreesWithLinearScan) {
  // oracle: direct scan m = 0, 1, ... of the defining sum
  auto oracle = [](const std::vector<Int>& ell, const std::vector<Int>& s, Int d, Int k) {
    auto kdiv = [](Int a, Int b) { return a <= 0 ? Int(0) : (a + b - 1) / b; };
    Int best = 0;
    for (Int m = 0; m <= k * d + 100; ++m) {
      Int used = 0, tot = 0;
      for (std::size_t i = 0; i < ell.size(); ++i) {
        Int ki = kdiv(m - used - s[i] + 1, ell[i]);
        tot += ki;
        used += ki * ell[i];
      }
      tot += kdiv(m - used, d);
      if (tot <= k) best = m;
    }
    return best;
  };
  std::mt19937 rng(7);
  for (int it = 0; it < 300; ++it) {
    Int p = std::uniform_int_distribution<Int>(2, 3)(rng);
    Int r = std::uniform_int_distribution<Int>(1, 4)(rng);
    Group g = elementary(p, static_cast<std::size_t>(r));
    Int d = r * (p - 1) + 1;
    std::vector<Int> ell;
    std::vector<Extended> sv;
    std::vector<Int> si;
    for (Int l = p; l <= d; ++l)
      if (rng() % 2) {
        ell.push_back(l);
        Int sval = std::uniform_int_distribution<Int>(d, 3 * d)(rng);
        sv.push_back(sval);
        si.push_back(sval);
      }
    Int k = std::uniform_int_distribution<Int>(1, 6)(rng);
    EXPECT_EQ(iv(ub_recursion(g, ell, sv, d, k).value), oracle(ell, si, d, k));
  }
}

TEST(Bounds, LowerMaxLength) {
  Group g = elementary(2, 3);
  // m below s_1 leaves only the ceil(m/D) term
  EXPECT_EQ(lower_max_length(g, {2}, {Extended(8)}, 4, 7), 2);
  EXPECT_EQ(lower_max_length(g, {2}, {Extended(8)}, 4, 8), 1 + 2);
  EXPECT_EQ(lower_max_length(g, {}, {}, 4, 9), 3);
}

TEST(Bounds, RecursionRejectsBadInputs) {
  Group g = elementary(2, 3);
  EXPECT_THROW(ub_recursion(g, {2}, {Extended::infinity()}, 4, 2), UsageError);
  EXPECT_THROW(ub_recursion(g, {3, 2}, {Extended(8), Extended(8)}, 4, 2), UsageError);
  EXPECT_THROW(ub_recursion(g, {1}, {Extended(8)}, 4, 2), UsageError);
}

TEST(Bounds, ClosedFormExamples) {
  Group g = elementary(2, 4);
  auto r = remark_ub(g, 3, 2, 16, 5);
  EXPECT_EQ(iv(r.value), 18);
  EXPECT_EQ(r.note, "eta form");
  EXPECT_GE(iv(remark_ub(g, 1, 3, 6, 5).value), 5);
  EXPECT_THROW(remark_ub(g, 2, 5, 6, 5), UsageError);
}

TEST(Bounds, RecursionNeverWorseThanClosedForm) {
  // The recursion with one ell is at most the closed form, and sometimes
  // strictly smaller.
  std::mt19937 rng(11);
  int strictly = 0;
  for (int it = 0; it < 100; ++it) {
    Int p = std::uniform_int_distribution<Int>(2, 5)(rng);
    Int r = std::uniform_int_distribution<Int>(2, 4)(rng);
    Group g = elementary(p, static_cast<std::size_t>(r));
    Int d = r * (p - 1) + 1;
    Int s = std::uniform_int_distribution<Int>(d, 4 * d)(rng);
    Int k = std::uniform_int_distribution<Int>(1, 8)(rng);
    Int rec = iv(ub_recursion(g, {p}, {Extended(s)}, d, k).value);
    Int rem = iv(remark_ub(g, k, p, s, d).value);
    EXPECT_LE(rec, rem);
    strictly += rec < rem;
  }
  EXPECT_GT(strictly, 0);
  EXPECT_EQ(iv(ub_recursion(elementary(2, 3), {2}, {Extended(8)}, 4, 2).value), 7);
  EXPECT_EQ(iv(remark_ub(elementary(2, 3), 2, 2, 8, 4).value), 8);
}

TEST(Bounds, SweepPicksBest) {
  Group g = elementary(2, 4);
  std::map<Int, Extended> s{{2, Extended(16)}, {3, Extended(9)}, {4, Extended(6)}};
  auto best = ub_recursion_sweep(g, s, 5, 2);
  for (Int l : {2, 3, 4}) EXPECT_LE(best.value, ub_recursion(g, {l}, {s.at(l)}, 5, 2).value);
  EXPECT_LE(best.value, ub_recursion(g, {2, 3, 4}, {s.at(2), s.at(3), s.at(4)}, 5, 2).value);
  EXPECT_EQ(reevaluate(best), best.value);
}

TEST(Bounds, ExtensionExamples) {
  auto r = s_le_from_extension(elementary(2, 4), 2, 6, 5);
  EXPECT_EQ(r.target, "s_le_4");
  EXPECT_EQ(iv(r.input("m")), 4);
  EXPECT_EQ(iv(r.value), 6);
  auto deg = s_le_from_extension(elementary(3, 2), 1, 5, 5);
  EXPECT_EQ(iv(deg.input("m")), 5);
  EXPECT_EQ(iv(deg.value), 5);
  // C_p^r with n = p: m <= (r-1)p, so s_le_{(r-1)p} <= s_le_m <= (r+1)(p-1)+1
  for (Int p : {2, 3, 5})
    for (Int r = 2; r <= 4; ++r) {
      Int dext = (r + 1) * (p - 1) + 1, dg = r * (p - 1) + 1;
      auto e = s_le_from_extension(elementary(p, static_cast<std::size_t>(r)), p, dext, dg);
      EXPECT_LE(iv(e.input("m")), (r - 1) * p);
      EXPECT_EQ(iv(e.value), dext);
    }
}

TEST(Bounds, ExtensionExampleHoldsByExhaustion) {
  Tiny t(elementary(2, 4));
  EXPECT_LE(t.s_le(4, 7), 6);
}

TEST(Bounds, CprExamples) {
  EXPECT_EQ(iv(cpr_upper(2, 4, 2, 2).value), 9);
  EXPECT_EQ(iv(cpr_upper(3, 2, 1, 1).value), 5);
  Tiny t(elementary(3, 2));
  EXPECT_EQ(t.dk(1, 6), 5);
  EXPECT_THROW(cpr_upper(2, 4, 2, 1), UsageError);
  EXPECT_THROW(cpr_upper(4, 2, 1, 1), UsageError);
}

TEST(Bounds, InductiveExamples) {
  Tiny c22(elementary(2, 2));
  int d1 = c22.dk(1, 5), d3 = c22.dk(3, 9);
  EXPECT_EQ(d1, 3);
  EXPECT_EQ(d3, 7);
  EXPECT_EQ(iv(inductive_ub(1, d1, d3).value), 7);
  // linear form for C_3^2 with G' = C_3: D_k(C_3) = 3k, D(C_3) = 3, s_le_3(C_3) = 3
  EXPECT_EQ(iv(inductive_ub(1, 3, 3, 3, 3).value), 2 * 3 + 3);
  // trivial G': D_k(G') = k, so the bound is D_k of the quotient
  EXPECT_EQ(iv(inductive_ub(2, 2, 7).value), 7);
}

TEST(Bounds, LowerExamples) {
  Tiny c2(cyclic(2));
  EXPECT_EQ(c2.dk(2, 6), 4);
  auto ds = lower_direct_sum(2, 4, 2, 4);
  EXPECT_EQ(iv(ds.value), 7);
  EXPECT_EQ(ds.target, "D_3");
  EXPECT_EQ(iv(lower_dstar(elementary(2, 5), 2).value), 8);
  EXPECT_EQ(iv(lower_dstar(elementary(2, 5), 1).value), 6);
  EXPECT_EQ(iv(lower_minus(elementary(2, 3), 2, 3).value), 3 - 1 + 4);
  EXPECT_EQ(iv(step_lower(3, 7).value), 9);
}

TEST(Bounds, ElbExamples) {
  EXPECT_EQ(iv(elb_lower(elementary(2, 4), 3, 1, 2).value), 8);
  EXPECT_EQ(iv(elb_lower(elementary(2, 6), 4, 1, 2).value), 11);
  EXPECT_EQ(iv(elb_lower(elementary(2, 5), 3, 1, 2).value), 9);
  EXPECT_EQ(iv(elb_lower(make_group({3, 3, 3}), 3, 1, 3).value), 7 + 3 + 1 + 3);
  EXPECT_THROW(elb_lower(elementary(2, 4), 3, 3, 2), UsageError);
  EXPECT_THROW(elb_lower(elementary(2, 4), 1, 1, 2), UsageError);
  EXPECT_THROW(elb_lower(elementary(2, 4), 2, 1, 1), UsageError);
}

TEST(Bounds, BigIntegerBounds) {
  auto d2 = delta_upper(cyclic(2));
  EXPECT_EQ(d2.value, Extended(16384));
  EXPECT_FALSE(d2.note.empty());
  auto d8 = delta_upper(elementary(2, 3));
  BigInt expect = 1;
  for (int i = 0; i < 25; ++i) expect *= 16;
  EXPECT_EQ(d8.value.value(), expect);
  EXPECT_EQ(d8.value.str(), "1267650600228229401496703205376");

  for (Int n : {2, 3, 4, 6, 8, 9, 12, 16}) {
    Group g = n == 16 ? elementary(2, 4) : cyclic(n);
    auto chain = kD_crude_chain(g);
    auto crude = kD_crude(g);
    EXPECT_LE(chain.value, crude.value) << n;
    auto full = kD_upper(g, delta_upper(g).value, pow_big(BigInt(n), static_cast<unsigned>(n)), Extended(n), Extended(1));
    if (g.is_cyclic()) {
      EXPECT_EQ(full.value, chain.value);
    } else {
      EXPECT_LE(full.value, chain.value);
    }
    EXPECT_EQ(reevaluate(full), full.value);
  }
}

TEST(Bounds, ElementaryTwoExamples) {
  auto reps = e2g_bounds(5, 2);
  std::map<std::string, Int> up, lo;
  for (const auto& r : reps) {
    (r.direction == Direction::kUpper ? up : lo)[r.rule_id + ":" + r.target] = iv(r.value);
    EXPECT_EQ(reevaluate(r), r.value);
  }
  EXPECT_EQ(up.at("e2g_d2:D_2"), 10);
  EXPECT_EQ(up.at("e2g_s2m:s_le_4"), 9);
  EXPECT_EQ(up.at("e2g_kD:k_D"), 10);
  EXPECT_EQ(lo.at("e2g_D0_lower:D_0"), 11);
  EXPECT_EQ(up.at("e2g_D0_upper:D_0"), 11 + 5);
  // strict inequality at an integer threshold: r = 4 gives D_2 < 9
  for (const auto& r : e2g_bounds(4, 2))
    if (r.rule_id == "e2g_d2") {
      EXPECT_EQ(iv(r.value), 8);
    }
}

TEST(Bounds, RootIsolationIsExact) {
  // (m-1) + u with u the least integer such that u^m >= m! 2^r
  for (Int r = 4; r <= 40; ++r)
    for (Int m = 2; 2 * m <= r; ++m) {
      BigInt x = BigInt(1) << static_cast<unsigned>(r);
      for (Int i = 2; i <= m; ++i) x *= i;
      Int u = 0;
      while (pow_big(BigInt(u), static_cast<unsigned>(m)) < x) ++u;
      for (const auto& rep : e2g_bounds(r, 1))
        if (rep.rule_id == "e2g_s2m" && iv(rep.input("m")) == m) {
          EXPECT_EQ(iv(rep.value), m - 1 + u);
        }
    }
}

TEST(Bounds, SquarefreeSplit) {
  // C_2^5 with exact lower values fed back: the rule must not cut below them
  std::map<Int, Int> d{{1, 6}, {2, 10}, {3, 13}, {4, 16}, {5, 19}, {6, 21}, {7, 23}, {8, 26}};
  EXPECT_EQ(iv(e2g_squarefree_split(5, 9, 100, d).value), 28);
  d[9] = 28;
  EXPECT_EQ(iv(e2g_squarefree_split(5, 10, 100, d).value), 31);
  EXPECT_THROW(e2g_squarefree_split(5, 3, 100, {{1, 6}}), UsageError);
}

TEST(Bounds, SplitRule) {
  E2Extras ex;
  ex.splits.push_back({2, 5, 9});
  auto reps = e2g_bounds(4, 2, ex);
  bool found = false;
  for (const auto& r : reps)
    if (r.rule_id == "e2g_split") {
      found = true;
      EXPECT_EQ(iv(r.value), 11);
    }
  EXPECT_TRUE(found);
  ex.splits = {{5, 1, 1}};
  EXPECT_THROW(e2g_bounds(4, 2, ex), UsageError);
}

TEST(Bounds, ConsistencyDetectsViolation) {
  std::vector<BoundReport> reps{lower_dstar(elementary(2, 5), 2), e2g_bounds(5, 2).front()};
  EXPECT_TRUE(check_consistency(reps).empty());
  reps.push_back(kd_trivial_ub(2, 3));
  EXPECT_EQ(check_consistency(reps).size(), 1u);
}

namespace {

struct Table {
  Group g;
  std::map<Int, Int> dk;
  std::map<Int, Int> s;
};

Table build_table(const Group& g, Int kmax) {
  Tiny t(g);
  Table tab{g, {}, {}};
  Int d = 0;
  for (Int k = 1; k <= kmax; ++k) {
    Int prev = k == 1 ? 0 : tab.dk.at(k - 1);
    tab.dk[k] = t.dk(static_cast<int>(k), static_cast<int>(prev + g.order() + 1));
    if (k == 1) d = tab.dk[1];
  }
  for (Int l = g.exponent(); l <= d; ++l) tab.s[l] = t.s_le(static_cast<int>(l), static_cast<int>(g.order() + d + 1));
  return tab;
}

std::vector<BoundReport> all_reports(const Table& t, Int k) {
  const Group& g = t.g;
  Int d = t.dk.at(1), e = g.exponent();
  std::vector<BoundReport> out;
  std::map<Int, Extended> sx;
  for (auto [l, v] : t.s) sx[l] = v;
  out.push_back(kd_trivial_ub(k, d));
  out.push_back(ub_recursion_sweep(g, sx, d, k));
  for (Int l = e; l <= d - 1; ++l) out.push_back(remark_ub(g, k, l, sx.at(l), d));
  if (k >= 2)
    for (auto [l, v] : t.s) out.push_back(prop_bas_step(k, t.dk.at(k - 1), l, v));
  out.push_back(lower_dstar(g, k));
  if (k >= 2 && g.order() >= 2) out.push_back(step_lower(k, t.dk.at(k - 1)));
  for (Int s = 2; s * (s - 1) / 2 <= static_cast<Int>(g.rank()); ++s)
    for (Int tt = 1; tt <= static_cast<Int>(g.rank()) && s * (s - 1) / 2 <= static_cast<Int>(g.rank()) - tt + 1; ++tt)
      if (k >= 2) out.push_back(elb_lower(g, s, tt, k));
  auto f = g.invariant_factors();
  bool elem = !f.empty() && f.front() == f.back();
  if (elem && f.size() >= 2) {
    Int p = f.front(), r = static_cast<Int>(f.size());
    for (Int m = 1; m <= 4; ++m) {
      Int pm = 1;
      for (Int i = 0; i < m; ++i) pm *= p;
      if (r * (p - 1) + 1 < 2 * pm) out.push_back(cpr_upper(p, r, k, m));
    }
  }
  if (g.is_elementary_2()) {
    for (auto& rep : e2g_bounds(static_cast<Int>(g.rank()), k))
      if (rep.target == "D_" + std::to_string(k)) out.push_back(rep);
    std::map<Int, Int> prev;
    for (Int j = 1; j < k; ++j) prev[j] = t.dk.at(j);
    out.push_back(e2g_squarefree_split(static_cast<Int>(g.rank()), k, k * d, prev));
  }
  return out;
}

}  // namespace

TEST(Bounds, ExactTablesSitInsideAllBounds) {
  std::vector<std::pair<Group, Int>> cases{{elementary(2, 2), 4}, {elementary(2, 3), 3}, {elementary(3, 2), 2},
                                           {cyclic(2), 4},        {cyclic(3), 3},        {cyclic(4), 3},
                                           {cyclic(5), 2},        {cyclic(6), 2},        {make_group({2, 4}), 2}};
  for (const auto& [g, kmax] : cases) {
    Table t = build_table(g, kmax);
    for (Int k = 1; k <= kmax; ++k) {
      auto reps = all_reports(t, k);
      EXPECT_TRUE(check_consistency(reps).empty()) << g.spec();
      for (const auto& r : reps) {
        EXPECT_EQ(reevaluate(r), r.value);
        if (r.direction == Direction::kUpper)
          EXPECT_GE(r.value, Extended(t.dk.at(k))) << g.spec() << " " << r.rule_id << " k=" << k;
        else
          EXPECT_LE(r.value, Extended(t.dk.at(k))) << g.spec() << " " << r.rule_id << " k=" << k;
      }
    }
  }
  // cyclic groups: D_k(C_n) = kn
  for (Int n = 2; n <= 6; ++n) {
    Table t = build_table(cyclic(n), 2);
    EXPECT_EQ(t.dk.at(1), n);
    EXPECT_EQ(t.dk.at(2), 2 * n);
  }
}

TEST(Bounds, KnownSmallTables) {
  Table t = build_table(elementary(2, 3), 3);
  EXPECT_EQ(t.dk.at(1), 4);
  EXPECT_EQ(t.dk.at(2), 7);
  EXPECT_EQ(t.s.at(2), 8);
  EXPECT_EQ(t.s.at(4), 4);
}
