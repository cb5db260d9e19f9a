#include "zsk/predicates.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace zsk;

namespace {

// Brute force: every nonempty sub-multiset, return lengths that sum to zero.
std::optional<std::size_t> brute_shortest(const Sequence& s, std::size_t cap) {
  const Group& g = s.group();
  std::vector<std::pair<std::size_t, std::uint32_t>> terms(s.counts().begin(), s.counts().end());
  std::optional<std::size_t> best;
  std::vector<std::uint32_t> pick(terms.size(), 0);
  while (true) {
    std::size_t i = 0;
    while (i < terms.size() && pick[i] == terms[i].second) pick[i++] = 0;
    if (i == terms.size()) break;
    ++pick[i];
    GroupElement acc = zero(g);
    std::size_t len = 0;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      acc = add(g, acc, scale(g, pick[j], g.element_at(terms[j].first)));
      len += pick[j];
    }
    if (acc == zero(g) && len <= cap && (!best || len < *best)) best = len;
  }
  return best;
}

Sequence random_sequence(std::mt19937& rng, const Group& g, std::size_t max_len, bool allow_zero) {
  Sequence s(g);
  std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    std::size_t x = rng() % g.order();
    if (!allow_zero && x == 0) continue;
    s.push_index(x);
  }
  return s;
}

Sequence random_set(std::mt19937& rng, const Group& g, std::size_t size) {
  std::vector<std::size_t> el;
  for (std::size_t i = 1; i < static_cast<std::size_t>(g.order()); ++i) el.push_back(i);
  std::shuffle(el.begin(), el.end(), rng);
  el.resize(std::min(size, el.size()));
  return Sequence::from_indices(g, el);
}

}  // namespace

TEST(ZeroSumFree, Examples) {
  Group g = elementary(2, 3);
  EXPECT_TRUE(is_zero_sum_free(parse_sequence(g, "1,0,0; 0,1,0; 0,0,1")));
  EXPECT_FALSE(is_zero_sum_free(parse_sequence(g, "0,0,0; 0,1,0")));
  EXPECT_FALSE(is_zero_sum_free(parse_sequence(cyclic(5), "2^5")));
  EXPECT_TRUE(is_zero_sum_free(parse_sequence(cyclic(5), "2^4")));
  EXPECT_TRUE(is_zero_sum_free(Sequence(g)));
}

TEST(ZeroSumFree, FastPathMatchesBruteForce) {
  std::mt19937 rng(5);
  for (std::size_t r = 1; r <= 4; ++r) {
    Group g = elementary(2, r);
    for (int it = 0; it < 2000; ++it) {
      Sequence s = random_sequence(rng, g, 8, it % 5 == 0);
      EXPECT_EQ(is_zero_sum_free(s), !brute_shortest(s, 64).has_value()) << format_sequence(s);
    }
  }
  for (auto spec : {"3,3", "6", "2,4"}) {
    Group g = parse_group(spec);
    for (int it = 0; it < 1000; ++it) {
      Sequence s = random_sequence(rng, g, 7, true);
      EXPECT_EQ(is_zero_sum_free(s), !brute_shortest(s, 64).has_value());
    }
  }
}

TEST(ShortestZeroSum, Examples) {
  Group g = elementary(2, 3);
  EXPECT_EQ(shortest_zero_sum_length(parse_sequence(g, "0,0,0; 1,0,0"), 4), 1u);
  EXPECT_EQ(shortest_zero_sum_length(parse_sequence(g, "1,0,0; 0,1,0; 1,1,0; 0,0,1"), 4), 3u);
  EXPECT_EQ(shortest_zero_sum_length(parse_sequence(g, "1,0,0; 0,1,0"), 2), std::nullopt);
  EXPECT_THROW(shortest_zero_sum_length(Sequence(g), 0), UsageError);
}

TEST(ShortestZeroSum, MatchesBruteForce) {
  std::mt19937 rng(9);
  for (auto spec : {"2^4", "2^5", "3,3", "6", "2,4", "3^3"}) {
    Group g = parse_group(spec);
    for (int it = 0; it < 800; ++it) {
      Sequence s = (it % 2) ? random_set(rng, g, 1 + rng() % 7) : random_sequence(rng, g, 7, it % 7 == 0);
      std::size_t cap = 1 + rng() % 6;
      EXPECT_EQ(shortest_zero_sum_length(s, cap), brute_shortest(s, cap)) << spec << " " << format_sequence(s);
    }
  }
}

TEST(SumFreeSidon, Examples) {
  Group g = elementary(2, 4);
  // nonzero coset of {x : x_1 = 0}
  Sequence coset(g);
  for (std::size_t x = 8; x < 16; ++x) coset.push_index(x);
  EXPECT_TRUE(is_sum_free(coset));
  EXPECT_FALSE(is_sum_free(parse_sequence(g, "0,0,0,0")));
  EXPECT_THROW(is_sum_free(parse_sequence(g, "1,0,0,0^2")), UsageError);
}

TEST(SumFreeSidon, IndependentSetsAreSidon) {
  // Oracle: every quadruple (with repetition) a+b=c+d forces |{a,b,c,d}| <= 2.
  auto brute_sidon = [](const Sequence& a) {
    const Group& g = a.group();
    auto el = a.support();
    for (auto& x : el)
      for (auto& y : el)
        for (auto& z : el)
          for (auto& w : el) {
            std::set<GroupElement> dist{x, y, z, w};
            if (add(g, x, y) == add(g, z, w) && dist.size() >= 3) return false;
          }
    return true;
  };
  std::mt19937 rng(13);
  for (std::size_t r = 2; r <= 5; ++r) {
    Group g = elementary(2, r);
    for (int it = 0; it < 200; ++it) {
      Sequence s = random_set(rng, g, 1 + rng() % (r + 2));
      EXPECT_EQ(is_sidon(s), brute_sidon(s));
      if (is_zero_sum_free(s)) {
        EXPECT_TRUE(is_sidon(s));
      }
    }
  }
  Group c7 = cyclic(7);
  for (int it = 0; it < 200; ++it) {
    Sequence s = random_set(rng, c7, 1 + rng() % 4);
    EXPECT_EQ(is_sidon(s), brute_sidon(s));
  }
}

TEST(ShortCriteria, Examples) {
  Group g = elementary(2, 4);
  // e1,e2,e3,e1+e2+e3: sum-free, not Sidon
  auto rep = short_zero_sum_criteria(parse_sequence(g, "1,0,0,0; 0,1,0,0; 0,0,1,0; 1,1,1,0"));
  EXPECT_TRUE(rep.support_sum_free);
  EXPECT_FALSE(rep.support_sidon);
  EXPECT_EQ(rep.shortest_class, 4u);
  EXPECT_EQ(short_zero_sum_criteria(parse_sequence(g, "1,0,1,0^2")).shortest_class, 2u);
  Sequence coset(g);
  for (std::size_t x = 8; x < 16; ++x) coset.push_index(x);
  auto c = short_zero_sum_criteria(coset);
  EXPECT_TRUE(!c.shortest_class || *c.shortest_class >= 4);
  EXPECT_THROW(short_zero_sum_criteria(parse_sequence(cyclic(4), "1")), UsageError);
}

TEST(ShortCriteria, AgreesWithShortestLength) {
  std::mt19937 rng(17);
  for (std::size_t r : {4u, 5u}) {
    Group g = elementary(2, r);
    for (int it = 0; it < 10000; ++it) {
      Sequence s = (it % 3) ? random_set(rng, g, 1 + rng() % 8) : random_sequence(rng, g, 8, it % 11 == 0);
      auto rep = short_zero_sum_criteria(s);
      EXPECT_EQ(rep.shortest_class, shortest_zero_sum_length(s, 4)) << format_sequence(s);
    }
  }
}

namespace {

// Random invertible linear map on F_2^r as images of basis vectors.
std::vector<std::uint64_t> random_gl(std::mt19937& rng, std::size_t r) {
  while (true) {
    std::vector<std::uint64_t> cols(r);
    for (auto& c : cols) c = rng() % (std::uint64_t(1) << r);
    if (detail::masks_independent(cols)) return cols;
  }
}

std::uint64_t apply_gl(const std::vector<std::uint64_t>& m, std::uint64_t x) {
  std::uint64_t y = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (x >> i & 1) y ^= m[i];
  return y;
}

}  // namespace

TEST(DavydovTombak, Examples) {
  Group g = elementary(2, 5);
  Sequence coset(g);
  for (std::size_t x = 16; x < 32; ++x) coset.push_index(x);
  auto rep = davydov_tombak_check(coset, 5);
  EXPECT_EQ(rep.cls, DTClass::kIndexTwoCoset);
  EXPECT_EQ(rep.subgroup_basis.size(), 4u);

  // {e1,e2,e3,e4,e1+e2+e3+e4} + <e5>
  Sequence five(g);
  for (std::uint64_t base : {16u, 8u, 4u, 2u, 30u})
    for (std::uint64_t h : {0u, 1u}) five.push_index(base ^ h);
  auto rep2 = davydov_tombak_check(five, 5);
  EXPECT_EQ(rep2.cls, DTClass::kFiveCoset);
  ASSERT_EQ(rep2.e.size(), 4u);
  EXPECT_EQ(rep2.subgroup_basis.size(), 1u);

  std::mt19937 rng(1);
  EXPECT_THROW(davydov_tombak_check(random_set(rng, g, 8), 5), UsageError);
}

TEST(DavydovTombak, EquivalenceWithSumFree) {
  std::mt19937 rng(23);
  for (std::size_t r : {5u, 6u}) {
    Group g = elementary(2, r);
    const std::size_t thr = (9 * (std::size_t(1) << r) + 31) / 32;
    const std::size_t n = std::size_t(1) << r;
    int sum_free_seen = 0;
    for (int it = 0; it < (r == 5 ? 600 : 150); ++it) {
      Sequence a(g);
      int mode = it % 3;
      if (mode == 0) {
        a = random_set(rng, g, thr + rng() % 6);
      } else {
        // subset of a coset or of a 5-coset configuration, moved by a random GL element
        auto m = random_gl(rng, r);
        std::vector<std::uint64_t> pool;
        for (std::uint64_t x = 0; x < n; ++x) {
          bool take = mode == 1 ? (x >> (r - 1) & 1)
                                : ([&] {
                                    std::uint64_t hi = x >> (r - 4);
                                    return hi == 8 || hi == 4 || hi == 2 || hi == 1 || hi == 15;
                                  }());
          if (take) pool.push_back(apply_gl(m, x));
        }
        std::shuffle(pool.begin(), pool.end(), rng);
        std::size_t size = thr + rng() % (pool.size() - thr + 1);
        pool.resize(size);
        if (rng() % 4 == 0) pool.back() = 1 + rng() % (n - 1);  // perturb
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        if (pool.size() < thr || pool[0] == 0) continue;
        for (auto x : pool) a.push_index(x);
      }
      auto rep = davydov_tombak_check(a, r);
      bool sf = is_sum_free(a);
      sum_free_seen += sf;
      EXPECT_EQ(sf, rep.cls != DTClass::kNeither) << format_sequence(a);
    }
    EXPECT_GT(sum_free_seen, 20);
  }
}
