#pragma once

#include "zsk/errors.hpp"
#include "zsk/group.hpp"
#include "zsk/sequence.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

namespace zsk {

namespace detail {

inline void require_elementary_2(const Group& g, const char* op) {
  if (!g.is_elementary_2()) throw UsageError(std::string(op) + " requires an elementary 2-group");
}

inline bool masks_independent(const std::vector<std::uint64_t>& v) {
  std::vector<std::uint64_t> basis;  // reduced on distinct leading bits
  for (std::uint64_t x : v) {
    for (std::uint64_t b : basis) x = std::min(x, x ^ b);
    if (!x) return false;
    basis.push_back(x);
  }
  return true;
}

inline std::vector<std::uint64_t> support_masks(const Sequence& s) {
  std::vector<std::uint64_t> out;
  for (auto [idx, c] : s.counts()) out.push_back(idx);
  return out;
}

inline void require_set(const Sequence& a, const char* op) {
  if (!a.is_squarefree()) throw UsageError(std::string(op) + " expects a set (squarefree sequence)");
}

}  // namespace detail

inline bool is_zero_sum_free(const Sequence& s) {
  const Group& g = s.group();
  if (s.multiplicity_index(0)) return false;
  if (g.is_elementary_2()) return s.is_squarefree() && detail::masks_independent(detail::support_masks(s));
  IndexArith ar(g);
  std::vector<char> sums(ar.size(), 0), next;
  for (auto [idx, c] : s.counts()) {
    auto x = static_cast<std::uint32_t>(idx);
    for (std::uint32_t m = 0; m < c; ++m) {
      next = sums;
      next[x] = 1;
      for (std::uint32_t y = 0; y < ar.size(); ++y)
        if (sums[y]) next[ar.add(y, x)] = 1;
      sums.swap(next);
      if (sums[0]) return false;
    }
  }
  return true;
}

namespace detail {

// Shortest zero-sum subset of a set of distinct nonzero masks, by increasing
// length with meet-in-the-middle on half-size subsets.
inline std::optional<std::size_t> shortest_in_mask_set(const std::vector<std::uint64_t>& a, std::size_t cap) {
  const std::size_t n = a.size();
  for (std::size_t len = 3; len <= std::min(cap, n); ++len) {
    std::size_t h = len / 2, H = len - h;
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> half;
    bool found = false;
    auto for_subsets = [&](std::size_t size, auto&& fn) {
      std::vector<std::size_t> p(size);
      for (std::size_t i = 0; i < size; ++i) p[i] = i;
      while (true) {
        std::uint64_t sum = 0, which = 0;
        for (auto i : p) sum ^= a[i], which |= std::uint64_t(1) << i;
        if (fn(sum, which)) return;
        std::size_t i = size;
        while (i > 0 && p[i - 1] == n - size + i - 1) --i;
        if (i == 0) return;
        ++p[i - 1];
        for (std::size_t j = i; j < size; ++j) p[j] = p[j - 1] + 1;
      }
    };
    for_subsets(h, [&](std::uint64_t sum, std::uint64_t which) {
      auto& v = half[sum];
      if (v.size() < 2) v.push_back(which);
      if (h == H && v.size() >= 2) found = true;
      return found;
    });
    if (found) return len;
    if (h != H) {
      for_subsets(H, [&](std::uint64_t sum, std::uint64_t) {
        if (half.count(sum)) found = true;
        return found;
      });
      if (found) return len;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Minimum length <= cap of a nonempty zero-sum subsequence, or none.
inline std::optional<std::size_t> shortest_zero_sum_length(const Sequence& s, std::size_t cap) {
  if (cap < 1) throw UsageError("cap must be >= 1");
  const Group& g = s.group();
  if (s.multiplicity_index(0)) return 1;
  if (g.is_elementary_2() && s.support().size() <= 64) {
    if (!s.is_squarefree()) return cap >= 2 ? std::optional<std::size_t>(2) : std::nullopt;
    return detail::shortest_in_mask_set(detail::support_masks(s), std::min(cap, g.rank() + 1));
  }
  // reach[l] = set of sums of sub-multisets of size exactly l
  IndexArith ar(g);
  const std::size_t lim = std::min(cap, s.length());
  std::vector<std::vector<char>> reach(lim + 1, std::vector<char>(ar.size(), 0));
  reach[0][0] = 1;
  for (auto [idx, c] : s.counts()) {
    auto x = static_cast<std::uint32_t>(idx);
    for (std::uint32_t m = 0; m < c; ++m)
      for (std::size_t l = lim; l >= 1; --l)
        for (std::uint32_t y = 0; y < ar.size(); ++y)
          if (reach[l - 1][y]) reach[l][ar.add(y, x)] = 1;
  }
  for (std::size_t l = 1; l <= lim; ++l)
    if (reach[l][0]) return l;
  return std::nullopt;
}

inline bool is_sum_free(const Sequence& a) {
  detail::require_set(a, "is_sum_free");
  IndexArith ar(a.group());
  std::vector<char> in(ar.size(), 0);
  for (auto [idx, c] : a.counts()) in[idx] = 1;
  for (auto [x, cx] : a.counts())
    for (auto [y, cy] : a.counts())
      if (y >= x && in[ar.add(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y))]) return false;
  return true;
}

inline bool is_sidon(const Sequence& a) {
  detail::require_set(a, "is_sidon");
  IndexArith ar(a.group());
  std::vector<std::uint32_t> el;
  for (auto [idx, c] : a.counts()) el.push_back(static_cast<std::uint32_t>(idx));
  std::unordered_map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> by_sum;
  for (std::size_t i = 0; i < el.size(); ++i)
    for (std::size_t j = i; j < el.size(); ++j) {
      auto& v = by_sum[ar.add(el[i], el[j])];
      for (auto [c, d] : v) {
        std::uint32_t q[4] = {el[i], el[j], c, d};
        std::sort(q, q + 4);
        if (std::unique(q, q + 4) - q >= 3) return false;
      }
      v.emplace_back(el[i], el[j]);
    }
  return true;
}

struct ShortZeroSumReport {
  bool contains_zero = false;
  bool squarefree = false;
  bool support_sum_free = false;
  bool support_sidon = false;
  // Length of a shortest zero-sum subsequence if it is at most 4; none means >= 5.
  std::optional<std::size_t> shortest_class;
};

inline ShortZeroSumReport short_zero_sum_criteria(const Sequence& s) {
  detail::require_elementary_2(s.group(), "short_zero_sum_criteria");
  ShortZeroSumReport rep;
  Sequence supp(s.group());
  for (auto [idx, c] : s.counts()) supp.push_index(idx);
  rep.contains_zero = s.multiplicity_index(0) > 0;
  rep.squarefree = s.is_squarefree();
  rep.support_sum_free = is_sum_free(supp);
  rep.support_sidon = is_sidon(supp);
  if (rep.contains_zero)
    rep.shortest_class = 1;
  else if (!rep.squarefree)
    rep.shortest_class = 2;
  else if (!rep.support_sum_free)
    rep.shortest_class = 3;
  else if (!rep.support_sidon)
    rep.shortest_class = 4;
  return rep;
}

enum class DTClass { kIndexTwoCoset, kFiveCoset, kNeither };

struct DavydovTombakReport {
  DTClass cls = DTClass::kNeither;
  // Class (i): A lies in {x : <f,x> = 1}; subgroup = ker f.
  std::uint64_t functional = 0;
  std::vector<GroupElement> subgroup_basis;  // basis of the index-2 subgroup or of G'
  // Class (ii): the elements e_1..e_4.
  std::vector<GroupElement> e;
  // Class (iii): a zero-sum triple found in A.
  std::vector<GroupElement> triple;
};

namespace detail {

inline int parity(std::uint64_t x) { return std::popcount(x) & 1; }

// Basis of the common kernel of the given functionals in F_2^r.
inline std::vector<std::uint64_t> kernel_basis(const std::vector<std::uint64_t>& fs, std::size_t r) {
  std::vector<std::uint64_t> out, reduced;
  for (std::uint64_t x = 1; x < (std::uint64_t(1) << r) && out.size() + fs.size() < r; ++x) {
    bool in_ker = true;
    for (auto f : fs)
      if (parity(f & x)) in_ker = false;
    if (!in_ker) continue;
    std::uint64_t y = x;
    for (auto b : reduced) y = std::min(y, y ^ b);
    if (!y) continue;
    reduced.push_back(y);
    out.push_back(x);
  }
  return out;
}

// Every 4-dimensional subspace of the dual of F_2^r, one basis each
// (row-reduced with lowest-bit pivots).
template <class F>
void for_each_rank4_functional_set(std::size_t r, F&& fn) {
  if (r < 4) return;
  std::vector<std::size_t> piv(4);
  std::vector<std::uint64_t> rows(4);
  std::function<bool(std::size_t, std::size_t)> choose = [&](std::size_t row, std::size_t from) -> bool {
    if (row == 4) {
      std::uint64_t pivmask = 0;
      for (auto p : piv) pivmask |= std::uint64_t(1) << p;
      std::vector<std::vector<std::size_t>> free(4);
      std::size_t total = 0;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t b = piv[i] + 1; b < r; ++b)
          if (!(pivmask >> b & 1)) free[i].push_back(b), ++total;
      for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << total); ++bits) {
        std::size_t used = 0;
        for (std::size_t i = 0; i < 4; ++i) {
          rows[i] = std::uint64_t(1) << piv[i];
          for (auto b : free[i]) {
            if (bits >> used & 1) rows[i] |= std::uint64_t(1) << b;
            ++used;
          }
        }
        if (fn(rows)) return true;
      }
      return false;
    }
    for (std::size_t p = from; p + (4 - row) <= r; ++p) {
      piv[row] = p;
      if (choose(row + 1, p + 1)) return true;
    }
    return false;
  };
  choose(0, 0);
}

// 16-bit masks over C_2^4 of the sets {u1,u2,u3,u4,u1+u2+u3+u4}, u a basis.
inline const std::vector<std::pair<std::uint16_t, std::array<std::uint8_t, 4>>>& five_caps() {
  static const auto caps = [] {
    std::vector<std::pair<std::uint16_t, std::array<std::uint8_t, 4>>> out;
    std::vector<std::uint16_t> seen;
    for (unsigned a = 1; a < 16; ++a)
      for (unsigned b = a + 1; b < 16; ++b)
        for (unsigned c = b + 1; c < 16; ++c)
          for (unsigned d = c + 1; d < 16; ++d) {
            if (!masks_independent({a, b, c, d})) continue;
            unsigned e = a ^ b ^ c ^ d;
            auto m = static_cast<std::uint16_t>((1u << a) | (1u << b) | (1u << c) | (1u << d) | (1u << e));
            if (std::find(seen.begin(), seen.end(), m) != seen.end()) continue;
            seen.push_back(m);
            out.push_back({m, {std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), std::uint8_t(d)}});
          }
    return out;
  }();
  return caps;
}

}  // namespace detail

// Structure check for large sum-free sets in C_2^r. Rank is capped at 8 since
// class (ii) is found by scanning all index-16 subgroups.
inline DavydovTombakReport davydov_tombak_check(const Sequence& a, std::size_t r) {
  const Group& g = a.group();
  detail::require_elementary_2(g, "davydov_tombak_check");
  if (g.rank() != r) throw UsageError("rank mismatch in davydov_tombak_check");
  detail::require_set(a, "davydov_tombak_check");
  if (a.multiplicity_index(0)) throw UsageError("davydov_tombak_check: set contains 0");
  if (r > 8) throw GuardExceeded("davydov_tombak_check: rank above 8");
  // |A| >= 9 * 2^(r-5)
  if (32 * a.length() < 9 * (std::size_t(1) << r))
    throw UsageError("davydov_tombak_check: |A| below the threshold 9*2^(r-5)");

  auto masks = detail::support_masks(a);
  auto to_el = [&](std::uint64_t m) { return g.element_at(static_cast<std::size_t>(m)); };
  DavydovTombakReport rep;

  for (std::uint64_t f = 1; f < (std::uint64_t(1) << r); ++f) {
    bool ok = true;
    for (auto x : masks)
      if (!detail::parity(f & x)) {
        ok = false;
        break;
      }
    if (ok) {
      rep.cls = DTClass::kIndexTwoCoset;
      rep.functional = f;
      for (auto b : detail::kernel_basis({f}, r)) rep.subgroup_basis.push_back(to_el(b));
      return rep;
    }
  }

  bool found = false;
  detail::for_each_rank4_functional_set(r, [&](const std::vector<std::uint64_t>& fs) {
    auto phi = [&](std::uint64_t x) {
      unsigned y = 0;
      for (std::size_t i = 0; i < 4; ++i) y |= unsigned(detail::parity(fs[i] & x)) << i;
      return y;
    };
    std::uint16_t img = 0;
    for (auto x : masks) img |= std::uint16_t(1u << phi(x));
    for (const auto& [cap, u] : detail::five_caps()) {
      if ((img & ~cap) != 0) continue;
      rep.cls = DTClass::kFiveCoset;
      for (auto b : detail::kernel_basis(fs, r)) rep.subgroup_basis.push_back(to_el(b));
      for (auto ui : u)
        for (std::uint64_t x = 1; x < (std::uint64_t(1) << r); ++x)
          if (phi(x) == ui) {
            rep.e.push_back(to_el(x));
            break;
          }
      found = true;
      return true;
    }
    return false;
  });
  if (found) return rep;

  rep.cls = DTClass::kNeither;
  for (std::size_t i = 0; i < masks.size() && rep.triple.empty(); ++i)
    for (std::size_t j = i + 1; j < masks.size(); ++j) {
      std::uint64_t c = masks[i] ^ masks[j];
      if (a.multiplicity_index(c)) {
        rep.triple = {to_el(masks[i]), to_el(masks[j]), to_el(c)};
        break;
      }
    }
  if (rep.triple.empty() || shortest_zero_sum_length(a, 3) != std::optional<std::size_t>(3))
    throw std::logic_error("davydov_tombak_check: set above threshold is sum-free but fits neither shape");
  return rep;
}

}  // namespace zsk
