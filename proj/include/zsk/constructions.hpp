#pragma once

#include "zsk/bounds.hpp"
#include "zsk/factor.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace zsk {

// Lower-bound witness: S has length D*(G) - 1 + s*floor(n_t/2) + delta + (k-2)n_r
// and no k disjoint nonempty zero-sum subsequences. The pair construction
// sits on coordinates t..r; coordinates before t only carry e_i^(n_i - 1).
inline Sequence elb_witness(const Group& g, Int s, Int t, Int k) {
  check_elb_params(g, s, t, k);
  const auto& n = g.invariant_factors();
  const std::size_t r = n.size();
  const std::size_t t0 = static_cast<std::size_t>(t - 1);
  const Int nt = n[t0];

  // 2-subsets of [1, s] in lex order map to coordinates t0, t0 + 1, ...
  std::vector<GroupElement> gj(static_cast<std::size_t>(s), zero(g));
  std::size_t pos = t0;
  for (Int a = 0; a < s; ++a)
    for (Int b = a + 1; b < s; ++b, ++pos) {
      Int ep = n[pos] / nt;  // e'_pos = (n_pos / n_t) e_pos
      gj[static_cast<std::size_t>(a)].coords[pos] = ep;
      gj[static_cast<std::size_t>(b)].coords[pos] = ep;
    }

  Sequence out(g);
  for (const auto& x : gj) out.push(x, static_cast<std::uint32_t>(nt / 2));
  if (nt % 2) out.push(gj.back(), 1);
  for (std::size_t i = 0; i < r; ++i) out.push(basis_element(g, i + 1), static_cast<std::uint32_t>(n[i] - 1));
  out.push(basis_element(g, r), static_cast<std::uint32_t>((k - 2) * n.back()));
  return out;
}

inline Int elb_witness_length(const Group& g, Int s, Int t, Int k) {
  const auto& n = g.invariant_factors();
  Int nt = n[static_cast<std::size_t>(t - 1)];
  return d_star(g) - 1 + s * (nt / 2) + (nt % 2) + (k - 2) * n.back();
}

// True when s has no `need` disjoint nonempty zero-sum subsequences.
inline bool lacks_disjoint_zero_sums(const Sequence& s, std::size_t need, PackingOptions opt = {}) {
  GroupElement sig = sum(s);
  if (sig == zero(s.group())) return max_disjoint_zero_sums(s, opt) < need;
  // B = S(-sigma) is zero-sum with max L(B) = max_disjoint(S) + 1
  Sequence b = s;
  b.push(neg(s.group(), sig), 1);
  if (s.group().is_elementary_2() && s.group().rank() <= 5) return max_disjoint_zero_sums(b, opt) <= need;
  PackingSolver solver(s.group(), opt);
  return !solver.at_least(s, need, false);
}

inline bool verify_elb_witness(const Sequence& w, Int k, PackingOptions opt = {}) {
  return lacks_disjoint_zero_sums(w, static_cast<std::size_t>(k), opt);
}

// Elements of C_2^r as bitmasks: bit i is coordinate i + 1.
namespace detail {

inline GroupElement mask_to_element(const Group& g, std::uint32_t m) {
  GroupElement e = zero(g);
  for (std::size_t i = 0; i < g.rank(); ++i) e.coords[i] = (m >> i) & 1;
  return e;
}

inline std::uint32_t element_to_mask(const GroupElement& e) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < e.coords.size(); ++i)
    if (e.coords[i]) m |= std::uint32_t(1) << i;
  return m;
}

// phi on masks over `rank` coordinates starting at bit 0.
inline std::vector<std::uint32_t> paige_masks(std::size_t rank) {
  if (rank == 2) {
    // a = f1, b = f2, c = a + b: 0 -> 0, a -> b, b -> c, c -> a
    return {0, 2, 3, 1};
  }
  if (rank == 3) {
    const std::uint32_t f1 = 1, f2 = 2, f3 = 4;
    std::vector<std::uint32_t> phi(8);
    phi[0] = 0;
    phi[f1] = f1 | f2;
    phi[f2] = f2 | f3;
    phi[f3] = f1;
    phi[f1 | f2] = f1 | f3;
    phi[f1 | f3] = f2;
    phi[f2 | f3] = f1 | f2 | f3;
    phi[f1 | f2 | f3] = f3;
    return phi;
  }
  // first two coordinates carry the rank-2 map, the rest recurse
  auto low = paige_masks(2);
  auto high = paige_masks(rank - 2);
  std::vector<std::uint32_t> phi(std::size_t(1) << rank);
  for (std::uint32_t x = 0; x < phi.size(); ++x) phi[x] = low[x & 3] | (high[x >> 2] << 2);
  return phi;
}

}  // namespace detail

using PaigeMap = std::vector<std::pair<GroupElement, GroupElement>>;

// Bijection phi of C_2^r with g + phi(g) also a bijection. Pairs are listed in
// the group's element order.
inline PaigeMap paige_bijection(std::size_t r) {
  if (r < 2) throw UsageError("paige_bijection needs r >= 2");
  if (r > 20) throw GuardExceeded("paige_bijection: r > 20");
  Group g = elementary(2, r);
  auto phi = detail::paige_masks(r);
  PaigeMap out;
  out.reserve(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    GroupElement x = g.element_at(i);
    out.emplace_back(x, detail::mask_to_element(g, phi[detail::element_to_mask(x)]));
  }
  return out;
}

inline bool verify_paige(const PaigeMap& m, std::size_t r) {
  if (m.size() != (std::size_t(1) << r)) return false;
  std::vector<char> img(m.size(), 0), sums(m.size(), 0);
  for (const auto& [x, y] : m) {
    if (x.coords.size() != r || y.coords.size() != r) return false;
    std::uint32_t a = detail::element_to_mask(x), b = detail::element_to_mask(y);
    img[b] = 1;
    sums[a ^ b] = 1;
  }
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!img[i] || !sums[i]) return false;
  return true;
}

namespace detail {

// Atoms (as mask lists) of a factorization of the full squarefree sequence
// over the nonzero elements on coordinates [shift, shift + rank).
inline void maxfull_atoms(std::size_t rank, unsigned shift, std::vector<std::vector<std::uint32_t>>& out) {
  auto at = [shift](std::uint32_t m) { return m << shift; };
  if (rank == 2) {
    out.push_back({at(1), at(2), at(3)});
    return;
  }
  if (rank == 3) {
    out.push_back({at(1), at(2), at(3)});
    out.push_back({at(4), at(5), at(6), at(7)});
    return;
  }
  // e1, e2 are the first two coordinates; G' is the rest
  const std::uint32_t e1 = 1, e2 = 2;
  auto phi = paige_masks(rank - 2);
  for (std::uint32_t h = 0; h < phi.size(); ++h) {
    std::uint32_t hh = h << 2, ph = phi[h] << 2;
    out.push_back({at(e1 | hh), at(e2 | ph), at(e1 | e2 | (hh ^ ph))});
  }
  maxfull_atoms(rank - 2, shift + 2, out);
}

}  // namespace detail

inline Factorization maxfull_factorization(std::size_t r) {
  if (r < 2) throw UsageError("maxfull_factorization needs r >= 2");
  if (r > 20) throw GuardExceeded("maxfull_factorization: r > 20");
  Group g = elementary(2, r);
  std::vector<std::vector<std::uint32_t>> atoms;
  detail::maxfull_atoms(r, 0, atoms);
  Factorization f(g);
  for (const auto& a : atoms) {
    Sequence s(g);
    for (auto m : a) s.push(detail::mask_to_element(g, m), 1);
    f.add(s);
  }
  return f;
}

// Product is the squarefree sequence of all nonzero elements and the atom
// count meets the |B|/3 ceiling.
inline bool verify_maxfull(const Factorization& f, std::size_t r) {
  Group g = elementary(2, r);
  if (!(f.group() == g)) return false;
  Sequence full(g);
  for (std::size_t i = 1; i < static_cast<std::size_t>(g.order()); ++i) full.push_index(i, 1);
  for (const auto& [a, m] : f.atoms())
    if (!is_minimal_zero_sum(a)) return false;
  return f.product() == full && f.length() == ((std::size_t(1) << r) - 1) / 3;
}

}  // namespace zsk
