#pragma once

#include "zsk/factor.hpp"
#include "zsk/predicates.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

namespace zsk {

struct SearchOptions {
  Budget budget{4'000'000'000ULL};
  std::size_t cache_limit = 8'000'000;
  Int order_limit = 1024;
  std::size_t workers = 1;
};

// Longest sequence found by a hereditary search. `complete` means the whole
// (symmetry-reduced) tree was explored or the stop target was reached, so
// `best` is the true maximum.
struct SearchOutcome {
  std::size_t best = 0;
  std::vector<std::uint32_t> witness;
  bool complete = false;
  std::uint64_t nodes = 0;
};

namespace detail {

// Coordinate permutations among equal invariant factors, as index maps.
// Any subset of the group is sound for lex-min pruning, so large symmetric
// groups are truncated at `cap` maps.
class Symmetry {
 public:
  explicit Symmetry(const Group& g, std::size_t cap = 720) {
    const auto& f = g.invariant_factors();
    std::size_t r = f.size();
    std::vector<std::size_t> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (std::size_t i = 0; i < r;) {
      std::size_t j = i;
      while (j < r && f[j] == f[i]) ++j;
      if (j - i > 1) blocks.emplace_back(i, j);
      i = j;
    }
    if (blocks.empty()) return;
    auto n = static_cast<std::size_t>(g.order());
    std::vector<GroupElement> els = enumerate_elements(g);
    // odometer over per-block permutations, skipping the identity
    while (true) {
      std::size_t b = 0;
      for (; b < blocks.size(); ++b) {
        auto [lo, hi] = blocks[b];
        if (std::next_permutation(perm.begin() + static_cast<std::ptrdiff_t>(lo),
                                  perm.begin() + static_cast<std::ptrdiff_t>(hi)))
          break;
      }
      if (b == blocks.size()) break;
      std::vector<std::uint32_t> map(n);
      for (std::size_t i = 0; i < n; ++i) {
        GroupElement img = zero(g);
        for (std::size_t c = 0; c < r; ++c) img.coords[perm[c]] = els[i].coords[c];
        map[i] = static_cast<std::uint32_t>(g.index_of(img));
      }
      maps_.push_back(std::move(map));
      if (maps_.size() >= cap) break;
    }
  }

  std::size_t size() const { return maps_.size(); }

  bool is_lex_min(const std::vector<std::uint32_t>& cur) const {
    for (const auto& m : maps_) {
      scratch_.resize(cur.size());
      for (std::size_t i = 0; i < cur.size(); ++i) scratch_[i] = m[cur[i]];
      std::sort(scratch_.begin(), scratch_.end());
      if (scratch_ < cur) return false;
    }
    return true;
  }

 private:
  std::vector<std::vector<std::uint32_t>> maps_;
  mutable std::vector<std::uint32_t> scratch_;
};

class Bits {
 public:
  explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
  bool test(std::size_t i) const { return w_[i >> 6] >> (i & 63) & 1; }
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t(1) << (i & 63); }
  Bits& operator|=(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      for (std::uint64_t x = w_[i]; x; x &= x - 1) f(i * 64 + static_cast<std::size_t>(std::countr_zero(x)));
  }

 private:
  std::vector<std::uint64_t> w_;
};

inline Bits translate(const Bits& b, const IndexArith& ar, std::uint32_t y) {
  Bits out(ar.size());
  b.for_each([&](std::size_t h) { out.set(ar.add(static_cast<std::uint32_t>(h), y)); });
  return out;
}

// Translation by y of a bitset indexed by C_2^r elements (r <= 6): xor on
// positions, done one coordinate at a time as a block swap.
inline std::uint64_t xlate64(std::uint64_t b, std::uint32_t y) {
  static constexpr std::uint64_t kLow[6] = {0x5555555555555555ULL, 0x3333333333333333ULL, 0x0F0F0F0F0F0F0F0FULL,
                                            0x00FF00FF00FF00FFULL, 0x0000FFFF0000FFFFULL, 0x00000000FFFFFFFFULL};
  for (unsigned i = 0; i < 6; ++i)
    if (y >> i & 1) {
      unsigned s = 1u << i;
      b = ((b & kLow[i]) << s) | ((b >> s) & kLow[i]);
    }
  return b;
}

}  // namespace detail

// Longest sequence over G with no nonempty zero-sum subsequence of length
// <= ell (ell = 0: no zero-sum subsequence at all). Non-decreasing index
// order, multiplicity caps ord(y) - 1, lex-min pruning under coordinate
// permutations, and a capacity bound against the best length so far.
class ShortFreeSearch {
 public:
  ShortFreeSearch(const Group& g, std::size_t ell, SearchOptions opt = {}, std::size_t stop_at = SIZE_MAX)
      : ar_(g), sym_(g), ell_(ell), stop_at_(stop_at), counter_(opt.budget) {
    if (g.order() > opt.order_limit) throw GuardExceeded("search: group order above the guard");
    if (ell == 1) throw UsageError("short zero-sum search needs ell >= 2");
    layers_ = ell_ == 0 ? 1 : ell_ - 1;
  }

  SearchOutcome run() {
    SearchOutcome out;
    std::vector<detail::Bits> layers(layers_, detail::Bits(ar_.size()));
    std::vector<std::uint32_t> cur;
    out.complete = true;
    try {
      dfs(1, 0, layers, cur, out);
    } catch (const BudgetExhausted&) {
      out.complete = false;
    }
    if (out.best >= stop_at_) out.complete = true;
    out.nodes = counter_.used();
    return out;
  }

 private:
  bool allowed(const std::vector<detail::Bits>& layers, std::uint32_t y) const {
    if (y == 0) return false;
    std::uint32_t ny = ar_.neg(y);
    for (const auto& l : layers)
      if (l.test(ny)) return false;
    return true;
  }

  void dfs(std::uint32_t from, std::uint32_t mult_last, const std::vector<detail::Bits>& layers,
           std::vector<std::uint32_t>& cur, SearchOutcome& out) {
    counter_.tick("short zero-sum free search");
    if (cur.size() > out.best) {
      out.best = cur.size();
      out.witness = cur;
    }
    if (out.best >= stop_at_) return;
    auto n = static_cast<std::uint32_t>(ar_.size());
    std::size_t cap = cur.size();
    for (std::uint32_t y = from; y < n; ++y) {
      if (!allowed(layers, y)) continue;
      std::uint32_t c = ar_.order(y) - 1;
      if (!cur.empty() && y == cur.back()) c -= std::min(c, mult_last);
      cap += c;
    }
    if (cap <= out.best) return;
    for (std::uint32_t y = from; y < n && out.best < stop_at_; ++y) {
      std::uint32_t m = (!cur.empty() && y == cur.back()) ? mult_last : 0;
      if (m + 1 > ar_.order(y) - 1 || !allowed(layers, y)) continue;
      cur.push_back(y);
      if (sym_.is_lex_min(cur)) {
        std::vector<detail::Bits> next = layers;
        if (ell_ == 0) {
          next[0] |= detail::translate(layers[0], ar_, y);
        } else {
          for (std::size_t j = layers_; j-- > 1;) next[j] |= detail::translate(layers[j - 1], ar_, y);
        }
        if (!next.empty()) next[0].set(y);
        dfs(y, m + 1, next, cur, out);
      }
      cur.pop_back();
    }
  }

  IndexArith ar_;
  detail::Symmetry sym_;
  std::size_t ell_, layers_ = 0, stop_at_;
  NodeCounter counter_;
};

// Same question over C_2^r (r <= 6) for ell >= 2 or ell = 0. Such sets are
// squarefree and 0-free, and an extremal one spans, so after a linear change
// of coordinates it contains the standard basis. The search fixes the basis
// and extends by the remaining elements in increasing order.
class BinaryShortFreeSearch {
 public:
  BinaryShortFreeSearch(std::size_t r, std::size_t ell, SearchOptions opt = {}, std::size_t stop_at = SIZE_MAX)
      : r_(r), g_(elementary(2, r)), sym_(g_), ell_(ell), stop_at_(stop_at), counter_(opt.budget) {
    if (r < 1 || r > 6) throw GuardExceeded("binary search supports rank 1..6");
    if (ell == 1) throw UsageError("binary search needs ell >= 2");
    layers_ = ell_ == 0 ? 1 : ell_ - 1;
  }

  SearchOutcome run() {
    SearchOutcome out;
    std::vector<std::uint64_t> layers(layers_, 0);
    std::vector<std::uint32_t> basis;
    for (std::size_t i = 0; i < r_; ++i) {
      auto y = static_cast<std::uint32_t>(1u << i);
      push(layers, y);
      basis.push_back(y);
    }
    base_ = basis;
    out.complete = true;
    std::vector<std::uint32_t> rest;
    try {
      dfs(1, layers, rest, out);
    } catch (const BudgetExhausted&) {
      out.complete = false;
    }
    if (out.best >= stop_at_) out.complete = true;
    out.nodes = counter_.used();
    return out;
  }

 private:
  bool allowed(const std::vector<std::uint64_t>& layers, std::uint32_t y) const {
    for (auto l : layers)
      if (l >> y & 1) return false;
    return true;
  }

  void push(std::vector<std::uint64_t>& layers, std::uint32_t y) const {
    if (ell_ == 0) {
      layers[0] |= detail::xlate64(layers[0], y) | (std::uint64_t(1) << y);
      return;
    }
    for (std::size_t j = layers_; j-- > 1;) layers[j] |= detail::xlate64(layers[j - 1], y);
    layers[0] |= std::uint64_t(1) << y;
  }

  void dfs(std::uint32_t from, const std::vector<std::uint64_t>& layers, std::vector<std::uint32_t>& rest,
           SearchOutcome& out) {
    counter_.tick("binary short zero-sum free search");
    std::size_t len = base_.size() + rest.size();
    if (len > out.best) {
      out.best = len;
      out.witness = base_;
      out.witness.insert(out.witness.end(), rest.begin(), rest.end());
      std::sort(out.witness.begin(), out.witness.end());
    }
    if (out.best >= stop_at_) return;
    std::uint64_t blocked = 0;
    for (auto l : layers) blocked |= l;
    std::uint64_t n = std::uint64_t(1) << r_;
    std::uint64_t all = n == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << n) - 1;
    std::uint64_t above = all & ~((std::uint64_t(1) << from) - 1);
    std::uint64_t cand = above & ~blocked & ~std::uint64_t(1);
    if (len + static_cast<std::size_t>(std::popcount(cand)) <= out.best) return;
    for (std::uint64_t c = cand; c && out.best < stop_at_; c &= c - 1) {
      auto y = static_cast<std::uint32_t>(std::countr_zero(c));
      rest.push_back(y);
      if (sym_.is_lex_min(rest)) {
        std::vector<std::uint64_t> next = layers;
        push(next, y);
        dfs(y + 1, next, rest, out);
      }
      rest.pop_back();
    }
  }

  std::size_t r_;
  Group g_;
  detail::Symmetry sym_;
  std::size_t ell_, layers_ = 0, stop_at_;
  NodeCounter counter_;
  std::vector<std::uint32_t> base_;
};

// Longest sequence S over G with fewer than k disjoint nonempty zero-sum
// subsequences; then D_k(G) = |S| + 1. Zero never occurs in a longest S for
// |G| >= 2, multiplicities are capped at k ord(y) - 1, and the disjoint count
// is tracked incrementally (adding one term raises it by at most one).
class FewDisjointSearch {
 public:
  FewDisjointSearch(const Group& g, std::size_t k, SearchOptions opt = {}, std::size_t stop_at = SIZE_MAX)
      : g_(g), ar_(g), sym_(g), k_(k), stop_at_(stop_at), counter_(opt.budget),
        solver_(g, PackingOptions{Budget::unlimited(), opt.cache_limit}) {
    if (k < 1) throw UsageError("k must be >= 1");
    if (g.order() > opt.order_limit) throw GuardExceeded("search: group order above the guard");
  }

  SearchOutcome run() {
    SearchOutcome out;
    out.complete = true;
    std::vector<std::uint32_t> cur;
    try {
      dfs(1, 0, 0, cur, out);
    } catch (const BudgetExhausted&) {
      out.complete = false;
    }
    if (out.best >= stop_at_) out.complete = true;
    out.nodes = counter_.used();
    return out;
  }

 private:
  void dfs(std::uint32_t from, std::uint32_t mult_last, std::size_t disjoint, std::vector<std::uint32_t>& cur,
           SearchOutcome& out) {
    counter_.tick("disjoint zero-sum search");
    if (cur.size() > out.best) {
      out.best = cur.size();
      out.witness = cur;
    }
    if (out.best >= stop_at_) return;
    auto n = static_cast<std::uint32_t>(ar_.size());
    std::size_t cap = cur.size();
    for (std::uint32_t y = from; y < n; ++y) {
      std::size_t c = k_ * ar_.order(y) - 1;
      if (!cur.empty() && y == cur.back()) c -= std::min<std::size_t>(c, mult_last);
      cap += c;
    }
    if (cap <= out.best) return;
    for (std::uint32_t y = from; y < n && out.best < stop_at_; ++y) {
      std::uint32_t m = (!cur.empty() && y == cur.back()) ? mult_last : 0;
      if (m + 1 > k_ * ar_.order(y) - 1) continue;
      cur.push_back(y);
      if (sym_.is_lex_min(cur)) {
        Sequence s = Sequence::from_indices(g_, std::vector<std::size_t>(cur.begin(), cur.end()));
        std::size_t d = disjoint;
        if (solver_.at_least(s, disjoint + 1, false)) d = disjoint + 1;
        if (d < k_) dfs(y, m + 1, d, cur, out);
      }
      cur.pop_back();
    }
  }

  const Group& g_;
  IndexArith ar_;
  detail::Symmetry sym_;
  std::size_t k_, stop_at_;
  NodeCounter counter_;
  PackingSolver solver_;
};

// Minimal max L over squarefree 0-free zero-sum sets of C_2^r, per size.
// Sets of rank d are normalized to contain the standard basis of C_2^d (the
// last d coordinates, i.e. element indices below 2^d).
struct E2Classification {
  std::size_t r = 0;
  std::vector<int> min_len;            // per size n, -1 when no set has size n
  std::vector<std::uint64_t> witness;  // element-index bitmask realizing min_len[n]
  std::uint64_t sets = 0;              // zero-sum sets examined

  // largest size of a set with max L <= j
  int sf(int j) const {
    int best = 0;
    for (std::size_t n = 0; n < min_len.size(); ++n)
      if (min_len[n] >= 0 && min_len[n] <= j) best = static_cast<int>(n);
    return best;
  }
  std::uint64_t sf_witness(int j) const { return witness[static_cast<std::size_t>(sf(j))]; }

  // D_k(C_2^r) = max over t of 2t + sf(k - t); returns the value and the t used.
  std::pair<int, int> dk(int k) const {
    int best = -1, arg = 0;
    for (int t = 0; t <= k; ++t) {
      int v = 2 * t + sf(k - t);
      if (v > best) best = v, arg = t;
    }
    return {best, arg};
  }
};

namespace detail {

struct E2Chunk {
  std::vector<int> min_len;
  std::vector<std::uint64_t> witness;
  std::uint64_t sets = 0;
};

inline void e2_chunk(std::size_t d, const std::vector<std::uint32_t>& rest, std::size_t fixed, std::uint64_t chunk,
                     const SearchOptions& opt, E2Chunk& out) {
  const std::size_t n_el = std::size_t(1) << d;
  out.min_len.assign(n_el, -1);
  out.witness.assign(n_el, 0);
  BinaryPackingSolver solver(d, PackingOptions{opt.budget, opt.cache_limit});
  std::uint64_t mask = 0;
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i < d; ++i) {
    mask |= std::uint64_t(1) << (1u << i);
    sum ^= 1u << i;
  }
  // the first `fixed` rest elements are decided by the chunk id (include first)
  for (std::size_t i = 0; i < fixed; ++i)
    if (!(chunk >> (fixed - 1 - i) & 1)) {
      mask |= std::uint64_t(1) << rest[i];
      sum ^= rest[i];
    }
  auto leaf = [&](std::uint64_t m) {
    ++out.sets;
    auto n = static_cast<std::size_t>(std::popcount(m));
    int cur = out.min_len[n];
    if (cur >= 0 && solver.at_least(m, cur, true)) return;
    int l = solver.solve(m, true);
    out.min_len[n] = l;
    out.witness[n] = m;
  };
  std::function<void(std::size_t, std::uint64_t, std::uint32_t)> rec = [&](std::size_t i, std::uint64_t m,
                                                                            std::uint32_t s) {
    if (i == rest.size()) {
      if (s == 0) leaf(m);
      return;
    }
    rec(i + 1, m | (std::uint64_t(1) << rest[i]), s ^ rest[i]);
    rec(i + 1, m, s);
  };
  rec(fixed, mask, sum);
}

}  // namespace detail

inline E2Classification classify_e2(std::size_t r, SearchOptions opt = {}) {
  if (r < 1 || r > 5) throw GuardExceeded("squarefree classification supports rank 1..5");
  E2Classification res;
  res.r = r;
  const std::size_t n_el = std::size_t(1) << r;
  res.min_len.assign(n_el, -1);
  res.witness.assign(n_el, 0);
  res.min_len[0] = 0;
  for (std::size_t d = 1; d <= r; ++d) {
    std::vector<std::uint32_t> rest;
    for (std::uint32_t y = 1; y < (1u << d); ++y)
      if (std::popcount(y) > 1) rest.push_back(y);
    std::size_t fixed = std::min<std::size_t>(rest.size(), 4);
    std::size_t chunks = std::size_t(1) << fixed;
    std::vector<detail::E2Chunk> parts(chunks);
    std::size_t workers = std::max<std::size_t>(1, std::min(opt.workers, chunks));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
      for (std::size_t c; (c = next++) < chunks;) {
        try {
          detail::e2_chunk(d, rest, fixed, c, opt, parts[c]);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    // merge in enumeration order: the first chunk reaching the minimum wins
    for (const auto& p : parts) {
      res.sets += p.sets;
      for (std::size_t n = 0; n < p.min_len.size(); ++n)
        if (p.min_len[n] >= 0 && (res.min_len[n] < 0 || p.min_len[n] < res.min_len[n])) {
          res.min_len[n] = p.min_len[n];
          res.witness[n] = p.witness[n];
        }
    }
  }
  return res;
}

}  // namespace zsk
