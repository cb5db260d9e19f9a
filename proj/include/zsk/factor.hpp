#pragma once

#include "zsk/budget.hpp"
#include "zsk/errors.hpp"
#include "zsk/group.hpp"
#include "zsk/predicates.hpp"
#include "zsk/sequence.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory_resource>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace zsk {

inline bool is_minimal_zero_sum(const Sequence& s) {
  if (s.empty() || !is_zero_sum(s)) return false;
  // Minimal iff removing one term leaves a zero-sum-free sequence.
  Sequence rest = s;
  auto first = s.counts().begin()->first;
  Sequence one(s.group());
  one.push_index(first);
  return is_zero_sum_free(divide(rest, one));
}

namespace detail {

using Dense = std::vector<std::uint16_t>;

inline Dense dense_counts(const Sequence& s) {
  Dense d(static_cast<std::size_t>(s.group().order()), 0);
  for (auto [idx, c] : s.counts()) {
    if (c > 0xFFFF) throw GuardExceeded("multiplicity above 65535");
    d[idx] = static_cast<std::uint16_t>(c);
  }
  return d;
}

inline std::u16string dense_key(const Dense& d) { return std::u16string(d.begin(), d.end()); }

// Subset-sum set over the dense element range.
class SumSet {
 public:
  explicit SumSet(std::size_t n = 0) : bits_((n + 63) / 64, 0) {}
  bool test(std::uint32_t x) const { return bits_[x >> 6] >> (x & 63) & 1; }
  void set(std::uint32_t x) { bits_[x >> 6] |= std::uint64_t(1) << (x & 63); }
  // this ∪ {y} ∪ (this + y)
  SumSet extended(const IndexArith& ar, std::uint32_t y) const {
    SumSet out = *this;
    out.set(y);
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t b = bits_[w];
      while (b) {
        auto x = static_cast<std::uint32_t>(w * 64 + std::countr_zero(b));
        b &= b - 1;
        out.set(ar.add(x, y));
      }
    }
    return out;
  }

 private:
  std::vector<std::uint64_t> bits_;
};

// Enumerates zero-sum-free T (elements >= lo, drawn from avail) with
// sigma(T) = target and no proper subsequence summing to target, i.e. the
// tails of minimal zero-sum sequences x*T with -x = target. The callback gets
// T as a sorted index list and returns false to stop.
class AtomTailEnumerator {
 public:
  AtomTailEnumerator(const IndexArith& ar, const Dense& avail, std::uint32_t lo, std::uint32_t target,
                     std::size_t max_tail, NodeCounter* counter)
      : ar_(ar), avail_(avail), lo_(lo), target_(target), max_tail_(max_tail), counter_(counter) {}

  template <class F>
  bool run(F&& cb) {
    tail_.clear();
    if (target_ == 0) {  // pinned element is 0: the atom is 0 alone
      return cb(tail_);
    }
    SumSet sums(ar_.size());
    return dfs(lo_, 0, sums, cb);
  }

 private:
  template <class F>
  bool dfs(std::uint32_t from, std::uint32_t sigma, const SumSet& sums, F& cb) {
    if (counter_) counter_->tick("atom enumeration");
    if (!tail_.empty() && sigma == target_) return cb(tail_);
    // A subsequence already hits target: any longer tail would not be minimal.
    if (!tail_.empty() && sums.test(target_)) return true;
    if (tail_.size() >= max_tail_) return true;
    for (std::uint32_t y = from; y < ar_.size(); ++y) {
      if (!avail_[y] || y == 0) continue;
      std::uint32_t used = 0;
      for (auto t : tail_) used += (t == y);
      if (used >= avail_[y]) continue;
      SumSet next = sums.extended(ar_, y);
      if (next.test(0)) continue;
      tail_.push_back(y);
      bool go = dfs(y, ar_.add(sigma, y), next, cb);
      tail_.pop_back();
      if (!go) return false;
    }
    return true;
  }

  const IndexArith& ar_;
  const Dense& avail_;
  std::uint32_t lo_;
  std::uint32_t target_;
  std::size_t max_tail_;
  NodeCounter* counter_;
  std::vector<std::uint32_t> tail_;
};

}  // namespace detail

// Every minimal zero-sum T | S with |T| <= max_len, each once, ordered by
// least element and then depth-first over the tail.
template <class F>
void for_each_minimal_divisor(const Sequence& s, std::size_t max_len, F&& fn) {
  if (max_len == 0) return;
  IndexArith ar(s.group());
  detail::Dense avail = detail::dense_counts(s);
  for (auto [x, c] : s.counts()) {
    auto xi = static_cast<std::uint32_t>(x);
    --avail[x];
    detail::AtomTailEnumerator en(ar, avail, xi, ar.neg(xi), max_len - 1, nullptr);
    bool go = en.run([&](const std::vector<std::uint32_t>& tail) {
      Sequence t(s.group());
      t.push_index(x);
      for (auto y : tail) t.push_index(y);
      return fn(t) != false;
    });
    ++avail[x];
    if (!go) return;
  }
}

inline std::vector<Sequence> minimal_divisors(const Sequence& s,
                                              std::size_t max_len = std::numeric_limits<std::size_t>::max()) {
  std::vector<Sequence> out;
  for_each_minimal_divisor(s, max_len, [&](const Sequence& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

// The sequence prod_{g in G} g^{exp(G)}; its minimal divisors are all of A(G).
inline Sequence full_sequence(const Group& g, std::uint32_t mult) {
  Sequence s(g);
  for (std::size_t i = 0; i < static_cast<std::size_t>(g.order()); ++i) s.push_index(i, mult);
  return s;
}

struct PackingOptions {
  Budget budget;
  std::size_t cache_limit = 4'000'000;
};

// Branch and bound for the largest number of disjoint nonempty zero-sum
// subsequences. Pins the least remaining element and branches over the atoms
// containing it, plus a discard branch unless the pieces must exhaust the
// input. Memo entries hold proven [lo, hi] brackets per residual multiset.
class PackingSolver {
 public:
  explicit PackingSolver(const Group& g, PackingOptions opt = {})
      : ar_(g), opt_(opt), counter_(opt.budget) {}

  const Group& group() const { return ar_.group(); }
  std::uint64_t nodes_used() const { return counter_.used(); }

  std::size_t max_disjoint(const Sequence& s) { return solve(s, false); }

  std::size_t max_length(const Sequence& b) {
    if (!is_zero_sum(b)) throw UsageError("max_length requires a zero-sum sequence");
    return solve(b, true);
  }

  // Decides max_disjoint(s) >= need (or max L >= need in exhaust mode).
  bool at_least(const Sequence& s, std::size_t need, bool exhaust) {
    check_group(s);
    detail::Dense st = detail::dense_counts(s);
    return reach(st, s.length(), static_cast<int>(need), exhaust);
  }

 private:
  struct Entry {
    int lo = 0;
    int hi = std::numeric_limits<int>::max();
  };

  void check_group(const Sequence& s) const {
    if (!(s.group() == ar_.group())) throw UsageError("sequence over a different group");
  }

  std::size_t solve(const Sequence& s, bool exhaust) {
    check_group(s);
    detail::Dense st = detail::dense_counts(s);
    std::size_t n = s.length();
    int best = greedy(st, n, exhaust);
    while (reach(st, n, best + 1, exhaust)) ++best;
    return static_cast<std::size_t>(best);
  }

  int upper(const detail::Dense& st, std::size_t n) const {
    int z = st[0], pairs = 0;
    for (std::uint32_t g = 1; g < st.size(); ++g) {
      if (!st[g]) continue;
      std::uint32_t h = ar_.neg(g);
      if (h == g)
        pairs += st[g] / 2;
      else if (g < h)
        pairs += std::min(st[g], st[h]);
    }
    return z + pairs + static_cast<int>((n - z - 2 * pairs) / 3);
  }

  // Quick lower bound: repeatedly remove a shortest atom through the least element.
  int greedy(detail::Dense st, std::size_t n, bool exhaust) {
    int count = 0;
    while (n > 0) {
      std::uint32_t x = 0;
      while (!st[x]) ++x;
      --st[x];
      std::vector<std::uint32_t> best;
      bool found = false;
      detail::AtomTailEnumerator en(ar_, st, x, ar_.neg(x), n, &counter_);
      en.run([&](const std::vector<std::uint32_t>& tail) {
        if (!found || tail.size() < best.size()) best = tail, found = true;
        return best.size() > 1;
      });
      if (!found) {
        if (exhaust) return count;  // cannot happen for zero-sum input
        --n;
        continue;
      }
      for (auto y : best) --st[y];
      n -= 1 + best.size();
      ++count;
    }
    return count;
  }

  Entry& memo(const detail::Dense& st, bool exhaust) {
    auto& m = exhaust ? memo_exhaust_ : memo_free_;
    if (m.size() >= opt_.cache_limit) m.clear();
    return m.try_emplace(std::pmr::u16string(st.begin(), st.end(), &pool_)).first->second;
  }

  bool reach(detail::Dense& st, std::size_t n, int need, bool exhaust) {
    if (need <= 0) return true;
    if (n == 0) return false;
    if (upper(st, n) < need) return false;
    counter_.tick("disjoint zero-sum search");
    {
      Entry& e = memo(st, exhaust);
      if (need <= e.lo) return true;
      if (need > e.hi) return false;
    }
    std::uint32_t x = 0;
    while (!st[x]) ++x;
    --st[x];
    bool ok = false;
    std::vector<std::vector<std::uint32_t>> tails;
    detail::AtomTailEnumerator en(ar_, st, x, ar_.neg(x), n - 1, &counter_);
    en.run([&](const std::vector<std::uint32_t>& tail) {
      tails.push_back(tail);
      return true;
    });
    std::stable_sort(tails.begin(), tails.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    for (const auto& tail : tails) {
      for (auto y : tail) --st[y];
      ok = reach(st, n - 1 - tail.size(), need - 1, exhaust);
      for (auto y : tail) ++st[y];
      if (ok) break;
    }
    if (!ok && !exhaust) ok = reach(st, n - 1, need, exhaust);
    ++st[x];
    Entry& e = memo(st, exhaust);
    if (ok)
      e.lo = std::max(e.lo, need);
    else
      e.hi = std::min(e.hi, need - 1);
    return ok;
  }

  IndexArith ar_;
  PackingOptions opt_;
  NodeCounter counter_;
  // Memo nodes come from a private pool so that dropping millions of them
  // does not leave the global heap fragmented.
  std::pmr::unsynchronized_pool_resource pool_;
  std::pmr::unordered_map<std::pmr::u16string, Entry> memo_free_{&pool_}, memo_exhaust_{&pool_};
};

// Squarefree, 0-free sequences over C_2^r with r <= 5 as 64-bit element masks.
// Atoms of such sets are circuits (minimal dependent sets).
class BinaryPackingSolver {
 public:
  explicit BinaryPackingSolver(std::size_t r, PackingOptions opt = {})
      : r_(r), n_(std::size_t(1) << r), opt_(opt), counter_(opt.budget) {
    if (r < 1 || r > 5) throw GuardExceeded("binary packing solver supports rank 1..5");
    by_low_.resize(n_);
    build_circuits();
  }

  std::size_t rank() const { return r_; }
  const std::vector<std::vector<std::uint64_t>>& circuits_by_low() const { return by_low_; }
  std::uint64_t nodes_used() const { return counter_.used(); }

  bool at_least(std::uint64_t mask, int need, bool exhaust) { return reach(mask, need, exhaust); }

  int solve(std::uint64_t mask, bool exhaust) {
    int best = 0;
    while (reach(mask, best + 1, exhaust)) ++best;
    return best;
  }

  static std::uint64_t sum_of(std::uint64_t mask) {
    std::uint64_t s = 0;
    while (mask) {
      s ^= static_cast<std::uint64_t>(std::countr_zero(mask));
      mask &= mask - 1;
    }
    return s;
  }

 private:
  struct Entry {
    int lo = 0;
    int hi = std::numeric_limits<int>::max();
  };

  void build_circuits() {
    // Grow independent sets in increasing element order; a circuit is an
    // independent set plus its sum, recorded under its least element.
    std::vector<std::uint32_t> cur;
    std::function<void(std::uint32_t, std::vector<std::uint64_t>&)> rec = [&](std::uint32_t from,
                                                                              std::vector<std::uint64_t>& basis) {
      if (cur.size() >= 2) {
        std::uint64_t s = 0;
        for (auto c : cur) s ^= c;
        if (s > cur.back()) {
          std::uint64_t m = std::uint64_t(1) << s;
          for (auto c : cur) m |= std::uint64_t(1) << c;
          by_low_[cur.front()].push_back(m);
        }
      }
      for (std::uint32_t y = from; y < n_; ++y) {
        std::uint64_t v = y;
        for (auto b : basis) v = std::min(v, v ^ b);
        if (!v) continue;
        basis.push_back(v);
        cur.push_back(y);
        rec(y + 1, basis);
        cur.pop_back();
        basis.pop_back();
      }
    };
    std::vector<std::uint64_t> basis;
    rec(1, basis);
    for (auto& v : by_low_)
      std::stable_sort(v.begin(), v.end(),
                       [](std::uint64_t a, std::uint64_t b) { return std::popcount(a) < std::popcount(b); });
  }

  bool reach(std::uint64_t mask, int need, bool exhaust) {
    if (need <= 0) return true;
    if (std::popcount(mask) / 3 < need) return false;
    counter_.tick("binary disjoint zero-sum search");
    auto& memo = exhaust ? memo_exhaust_ : memo_free_;
    {
      auto it = memo.find(mask);
      if (it != memo.end()) {
        if (need <= it->second.lo) return true;
        if (need > it->second.hi) return false;
      }
    }
    auto x = static_cast<std::uint32_t>(std::countr_zero(mask));
    bool ok = false;
    for (std::uint64_t c : by_low_[x]) {
      if ((c & mask) != c) continue;
      if (reach(mask & ~c, need - 1, exhaust)) {
        ok = true;
        break;
      }
    }
    if (!ok && !exhaust) ok = reach(mask & (mask - 1), need, exhaust);
    if (memo.size() >= opt_.cache_limit) memo.clear();
    Entry& e = memo[mask];
    if (ok)
      e.lo = std::max(e.lo, need);
    else
      e.hi = std::min(e.hi, need - 1);
    return ok;
  }

  std::size_t r_, n_;
  PackingOptions opt_;
  NodeCounter counter_;
  std::vector<std::vector<std::uint64_t>> by_low_;
  std::unordered_map<std::uint64_t, Entry> memo_free_, memo_exhaust_;
};

namespace detail {

inline std::uint64_t element_mask(const Sequence& s) {
  std::uint64_t m = 0;
  for (auto [idx, c] : s.counts()) m |= std::uint64_t(1) << idx;
  return m;
}

// Zero-sum B over C_2^r: L(B0) = 1 + L(B) and max L(Bgg) = 1 + max L(B), so
// zeros and repeated pairs are split off and the squarefree core goes to the
// circuit solver.
inline std::size_t max_length_elementary_2(const Sequence& b, PackingOptions opt) {
  std::size_t extra = b.multiplicity_index(0);
  Sequence core(b.group());
  for (auto [idx, c] : b.counts()) {
    if (idx == 0) continue;
    extra += c / 2;
    if (c % 2) core.push_index(idx);
  }
  if (core.empty()) return extra;
  BinaryPackingSolver solver(b.group().rank(), opt);
  return extra + static_cast<std::size_t>(solver.solve(element_mask(core), true));
}

}  // namespace detail

inline std::size_t max_disjoint_zero_sums(const Sequence& s, PackingOptions opt = {}) {
  const Group& g = s.group();
  if (g.is_trivial()) return s.length();
  if (g.is_elementary_2() && g.rank() <= 5 && is_zero_sum(s)) return detail::max_length_elementary_2(s, opt);
  PackingSolver solver(g, opt);
  return solver.max_disjoint(s);
}

inline std::size_t max_length(const Sequence& b, PackingOptions opt = {}) {
  if (!is_zero_sum(b)) throw UsageError("max_length requires a zero-sum sequence");
  return max_disjoint_zero_sums(b, opt);
}

class Factorization {
 public:
  using Atoms = std::map<Sequence, std::uint32_t>;

  Factorization() = default;
  explicit Factorization(Group g) : group_(std::move(g)) {}

  static Factorization from_atoms(const Group& g, const std::vector<Sequence>& atoms) {
    Factorization f(g);
    for (const auto& a : atoms) f.add(a);
    return f;
  }

  void add(const Sequence& atom, std::uint32_t mult = 1) {
    if (!(atom.group() == group_)) throw UsageError("atom over a different group");
    if (!is_minimal_zero_sum(atom)) throw UsageError("not a minimal zero-sum sequence: " + format_sequence(atom));
    atoms_[atom] += mult;
    length_ += mult;
  }

  const Group& group() const { return group_; }
  const Atoms& atoms() const { return atoms_; }
  std::size_t length() const { return length_; }
  std::uint32_t multiplicity(const Sequence& atom) const {
    auto it = atoms_.find(atom);
    return it == atoms_.end() ? 0 : it->second;
  }

  Sequence product() const {
    Sequence p(group_);
    for (const auto& [a, m] : atoms_)
      for (auto [idx, c] : a.counts()) p.push_index(idx, c * m);
    return p;
  }

  bool operator==(const Factorization& o) const { return group_ == o.group_ && atoms_ == o.atoms_; }
  bool operator<(const Factorization& o) const { return atoms_ < o.atoms_; }

 private:
  Group group_;
  Atoms atoms_;
  std::size_t length_ = 0;
};

inline std::size_t distance(const Factorization& a, const Factorization& b) {
  std::size_t common = 0;
  for (const auto& [atom, m] : a.atoms()) common += std::min(m, b.multiplicity(atom));
  return std::max(a.length() - common, b.length() - common);
}

namespace detail {

// Exactly-once factorization walk: pin the least element; atoms through the
// same pinned element are taken in nondecreasing canonical order.
class FactorizationWalker {
 public:
  FactorizationWalker(const Sequence& b, Budget budget) : group_(b.group()), ar_(b.group()), counter_(budget) {
    if (!is_zero_sum(b)) throw UsageError("factorizations require a zero-sum sequence");
    st_ = dense_counts(b);
    n_ = b.length();
  }

  template <class F>
  void run(F&& visit) {
    std::vector<std::vector<std::uint32_t>> chosen;
    walk(chosen, std::numeric_limits<std::uint32_t>::max(), {}, visit);
  }

 private:
  template <class F>
  bool walk(std::vector<std::vector<std::uint32_t>>& chosen, std::uint32_t last_pin,
            const std::vector<std::uint32_t>& last_atom, F& visit) {
    counter_.tick("factorization enumeration");
    if (n_ == 0) return visit(chosen) != false;
    std::uint32_t x = 0;
    while (!st_[x]) ++x;
    --st_[x];
    std::vector<std::vector<std::uint32_t>> atoms;
    AtomTailEnumerator en(ar_, st_, x, ar_.neg(x), n_ - 1, &counter_);
    en.run([&](const std::vector<std::uint32_t>& tail) {
      std::vector<std::uint32_t> a{x};
      a.insert(a.end(), tail.begin(), tail.end());
      if (x != last_pin || !(a < last_atom)) atoms.push_back(std::move(a));
      return true;
    });
    ++st_[x];
    for (const auto& a : atoms) {
      for (auto y : a) --st_[y];
      n_ -= a.size();
      chosen.push_back(a);
      bool go = walk(chosen, x, a, visit);
      chosen.pop_back();
      n_ += a.size();
      for (auto y : a) ++st_[y];
      if (!go) return false;
    }
    return true;
  }

  Group group_;
  IndexArith ar_;
  NodeCounter counter_;
  Dense st_;
  std::size_t n_ = 0;
};

}  // namespace detail

// Visits every factorization of B exactly once. The visitor may return false to stop.
template <class F>
void for_each_factorization(const Sequence& b, Budget budget, F&& visit) {
  detail::FactorizationWalker w(b, budget);
  w.run([&](const std::vector<std::vector<std::uint32_t>>& chosen) {
    Factorization f(b.group());
    for (const auto& a : chosen) {
      Sequence atom(b.group());
      for (auto y : a) atom.push_index(y);
      f.add(atom);
    }
    return visit(f);
  });
}

inline std::vector<Factorization> enumerate_factorizations(const Sequence& b, Budget budget = {}) {
  std::vector<Factorization> out;
  for_each_factorization(b, budget, [&](const Factorization& f) {
    out.push_back(f);
    return true;
  });
  return out;
}

class LengthSet {
 public:
  LengthSet() = default;
  explicit LengthSet(std::set<std::size_t> l) : lengths_(std::move(l)) {}
  const std::set<std::size_t>& lengths() const { return lengths_; }
  bool contains(std::size_t l) const { return lengths_.count(l) > 0; }
  std::size_t min() const { return *lengths_.begin(); }
  std::size_t max() const { return *lengths_.rbegin(); }
  std::set<std::size_t> delta() const {
    std::set<std::size_t> d;
    for (auto it = lengths_.begin(); it != lengths_.end() && std::next(it) != lengths_.end(); ++it)
      d.insert(*std::next(it) - *it);
    return d;
  }
  bool operator==(const LengthSet& o) const { return lengths_ == o.lengths_; }

 private:
  std::set<std::size_t> lengths_;
};

namespace detail {

class LengthSetSolver {
 public:
  LengthSetSolver(const Group& g, std::size_t atom_cap, Budget budget)
      : ar_(g), atom_cap_(atom_cap), counter_(budget) {}

  const std::vector<std::size_t>& solve(Dense& st, std::size_t n) {
    static const std::vector<std::size_t> kZero{0};
    if (n == 0) return kZero;
    auto key = dense_key(st);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    counter_.tick("length set");
    std::uint32_t x = 0;
    while (!st[x]) ++x;
    --st[x];
    std::vector<std::vector<std::uint32_t>> tails;
    AtomTailEnumerator en(ar_, st, x, ar_.neg(x), std::min(n - 1, atom_cap_ - 1), &counter_);
    en.run([&](const std::vector<std::uint32_t>& t) {
      tails.push_back(t);
      return true;
    });
    std::set<std::size_t> acc;
    for (const auto& t : tails) {
      for (auto y : t) --st[y];
      const auto& sub = solve(st, n - 1 - t.size());
      for (auto l : sub) acc.insert(l + 1);
      for (auto y : t) ++st[y];
    }
    ++st[x];
    return memo_[key] = std::vector<std::size_t>(acc.begin(), acc.end());
  }

 private:
  IndexArith ar_;
  std::size_t atom_cap_;
  NodeCounter counter_;
  std::unordered_map<std::u16string, std::vector<std::size_t>> memo_;
};

}  // namespace detail

// Exact L(B), counting only atoms of length <= atom_cap (unlimited by default).
inline LengthSet length_set(const Sequence& b, std::size_t atom_cap = std::numeric_limits<std::size_t>::max(),
                            Budget budget = {}) {
  if (!is_zero_sum(b)) throw UsageError("length_set requires a zero-sum sequence");
  if (atom_cap == 0) throw UsageError("atom_cap must be positive");
  detail::LengthSetSolver solver(b.group(), atom_cap, budget);
  detail::Dense st = detail::dense_counts(b);
  const auto& l = solver.solve(st, b.length());
  return LengthSet(std::set<std::size_t>(l.begin(), l.end()));
}

// delta(z): the smallest m such that every length adjacent to |z| in
// L(pi(z)) is realized by a factorization within distance m of z.
inline std::size_t successive_distance_of(const Factorization& z, Budget budget = {}) {
  Sequence b = z.product();
  std::map<std::size_t, std::size_t> best;  // length -> min distance to z
  for_each_factorization(b, budget, [&](const Factorization& f) {
    std::size_t d = distance(z, f);
    auto [it, fresh] = best.emplace(f.length(), d);
    if (!fresh) it->second = std::min(it->second, d);
    return true;
  });
  auto self = best.find(z.length());
  if (self == best.end()) throw std::logic_error("factorization missing from its own enumeration");
  std::size_t m = 0;
  if (self != best.begin()) m = std::max(m, std::prev(self)->second);
  if (std::next(self) != best.end()) m = std::max(m, std::next(self)->second);
  return m;
}

}  // namespace zsk
