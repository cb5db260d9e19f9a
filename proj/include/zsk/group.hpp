#pragma once

#include "zsk/errors.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zsk {

using Int = std::int64_t;

struct GroupElement {
  std::vector<Int> coords;

  auto operator<=>(const GroupElement&) const = default;
};

class Group {
 public:
  // The trivial group.
  Group() = default;

  // Takes invariant factors that are already canonical (n_i | n_{i+1}, n_i >= 2).
  static Group from_invariant_factors(std::vector<Int> factors) {
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (factors[i] < 2) throw UsageError("invariant factors must be >= 2");
      if (i > 0 && factors[i] % factors[i - 1] != 0)
        throw UsageError("invariant factors must form a divisor chain");
    }
    Group g;
    g.factors_ = std::move(factors);
    g.order_ = 1;
    for (Int n : g.factors_) {
      if (g.order_ > (Int(1) << 40) / n) throw UsageError("group order too large");
      g.order_ *= n;
    }
    return g;
  }

  const std::vector<Int>& invariant_factors() const { return factors_; }
  std::size_t rank() const { return factors_.size(); }
  Int order() const { return order_; }
  Int exponent() const { return factors_.empty() ? 1 : factors_.back(); }
  bool is_trivial() const { return factors_.empty(); }
  bool is_elementary_2() const {
    return !factors_.empty() && factors_.back() == 2;
  }
  bool is_cyclic() const { return factors_.size() <= 1; }

  // Canonical spec string, e.g. "2,2,4". The trivial group is "1".
  std::string spec() const {
    if (factors_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(factors_[i]);
    }
    return s;
  }

  // Human-readable form using powers, e.g. "C_2^2 + C_4".
  std::string pretty() const {
    if (factors_.empty()) return "C_1";
    std::string s;
    std::size_t i = 0;
    while (i < factors_.size()) {
      std::size_t j = i;
      while (j < factors_.size() && factors_[j] == factors_[i]) ++j;
      if (!s.empty()) s += " + ";
      s += "C_" + std::to_string(factors_[i]);
      if (j - i > 1) s += "^" + std::to_string(j - i);
      i = j;
    }
    return s;
  }

  // Dense index: mixed radix with the first coordinate most significant, so
  // for C_2^r the index is the bitmask with e_1 as the top bit.
  std::size_t index_of(const GroupElement& a) const {
    check(a);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      idx = idx * static_cast<std::size_t>(factors_[i]) + static_cast<std::size_t>(a.coords[i]);
    return idx;
  }

  GroupElement element_at(std::size_t idx) const {
    if (idx >= static_cast<std::size_t>(order_)) throw UsageError("element index out of range");
    GroupElement a;
    a.coords.assign(factors_.size(), 0);
    for (std::size_t i = factors_.size(); i-- > 0;) {
      a.coords[i] = static_cast<Int>(idx % static_cast<std::size_t>(factors_[i]));
      idx /= static_cast<std::size_t>(factors_[i]);
    }
    return a;
  }

  // Validates that a belongs to this group.
  void check(const GroupElement& a) const {
    if (a.coords.size() != factors_.size())
      throw UsageError("element has " + std::to_string(a.coords.size()) + " coordinates, group rank is " +
                       std::to_string(factors_.size()));
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (a.coords[i] < 0 || a.coords[i] >= factors_[i])
        throw UsageError("coordinate " + std::to_string(i) + " out of range");
  }

  bool operator==(const Group& o) const { return factors_ == o.factors_; }

 private:
  std::vector<Int> factors_;
  Int order_ = 1;
};

namespace detail {

inline std::vector<std::pair<Int, int>> factor_int(Int n) {
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline Int ipow(Int b, int e) {
  Int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace detail

// Canonical group isomorphic to the direct sum of C_{factors[i]}.
inline Group make_group(std::span<const Int> factors) {
  std::map<Int, std::vector<int>> by_prime;
  for (Int n : factors) {
    if (n < 2) throw UsageError("cyclic factor " + std::to_string(n) + " is < 2");
    for (auto [p, e] : detail::factor_int(n)) by_prime[p].push_back(e);
  }
  std::size_t r = 0;
  for (auto& [p, es] : by_prime) {
    std::sort(es.begin(), es.end(), std::greater<>());
    r = std::max(r, es.size());
  }
  // Largest invariant factor takes the largest power of each prime, and so on.
  std::vector<Int> inv(r, 1);
  for (auto& [p, es] : by_prime)
    for (std::size_t j = 0; j < es.size(); ++j) inv[r - 1 - j] *= detail::ipow(p, es[j]);
  return Group::from_invariant_factors(std::move(inv));
}

inline Group make_group(std::initializer_list<Int> factors) {
  std::vector<Int> v(factors);
  return make_group(std::span<const Int>(v));
}

inline Group cyclic(Int n) { return n == 1 ? Group() : make_group({n}); }

inline Group elementary(Int p, std::size_t r) {
  std::vector<Int> v(r, p);
  return make_group(std::span<const Int>(v));
}

// Grammar: "2,2,2", "2^4", "2^2,4", "1" (trivial) or "" (trivial).
inline Group parse_group(std::string_view spec) {
  std::vector<Int> factors;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < spec.size() && (spec[i] == ' ' || spec[i] == '\t')) ++i;
  };
  auto read_int = [&](const char* what) -> Int {
    skip_ws();
    std::size_t start = i;
    Int v = 0;
    while (i < spec.size() && spec[i] >= '0' && spec[i] <= '9') {
      v = v * 10 + (spec[i] - '0');
      if (v > 1'000'000'000) throw ParseError(std::string(what) + " too large", start);
      ++i;
    }
    if (i == start) throw ParseError(std::string("expected ") + what, start);
    return v;
  };
  skip_ws();
  if (i == spec.size()) return Group();
  while (true) {
    std::size_t start = i;
    Int n = read_int("cyclic order");
    Int reps = 1;
    skip_ws();
    if (i < spec.size() && spec[i] == '^') {
      ++i;
      reps = read_int("exponent");
      if (reps > 64) throw ParseError("exponent too large", start);
    }
    if (n == 1) {
      // C_1 contributes nothing.
    } else if (n < 2) {
      throw ParseError("cyclic order must be >= 1", start);
    } else {
      for (Int k = 0; k < reps; ++k) factors.push_back(n);
    }
    skip_ws();
    if (i == spec.size()) break;
    if (spec[i] != ',') throw ParseError("expected ',' or end of group spec", i);
    ++i;
  }
  return make_group(std::span<const Int>(factors));
}

struct GroupProfile {
  Int order = 1;
  Int exponent = 1;
  std::size_t rank = 0;
  Int d_star = 1;
  std::vector<Int> minus_factors;
};

inline GroupProfile profile(const Group& g) {
  GroupProfile p;
  p.order = g.order();
  p.exponent = g.exponent();
  p.rank = g.rank();
  p.d_star = 1;
  for (Int n : g.invariant_factors()) p.d_star += n - 1;
  if (g.rank() > 1) p.minus_factors.assign(g.invariant_factors().begin(), g.invariant_factors().end() - 1);
  return p;
}

inline Int d_star(const Group& g) { return profile(g).d_star; }

// G^- with G = G^- + C_exp(G).
inline Group minus_group(const Group& g) {
  return Group::from_invariant_factors(profile(g).minus_factors);
}

inline GroupElement zero(const Group& g) { return GroupElement{std::vector<Int>(g.rank(), 0)}; }

inline GroupElement add(const Group& g, const GroupElement& a, const GroupElement& b) {
  g.check(a);
  g.check(b);
  GroupElement c;
  c.coords.resize(g.rank());
  const auto& n = g.invariant_factors();
  for (std::size_t i = 0; i < n.size(); ++i) c.coords[i] = (a.coords[i] + b.coords[i]) % n[i];
  return c;
}

inline GroupElement neg(const Group& g, const GroupElement& a) {
  g.check(a);
  GroupElement c;
  c.coords.resize(g.rank());
  const auto& n = g.invariant_factors();
  for (std::size_t i = 0; i < n.size(); ++i) c.coords[i] = (n[i] - a.coords[i]) % n[i];
  return c;
}

inline GroupElement scale(const Group& g, Int m, const GroupElement& a) {
  g.check(a);
  GroupElement c;
  c.coords.resize(g.rank());
  const auto& n = g.invariant_factors();
  for (std::size_t i = 0; i < n.size(); ++i) c.coords[i] = (((m % n[i]) + n[i]) % n[i] * a.coords[i]) % n[i];
  return c;
}

inline Int element_order(const Group& g, const GroupElement& a) {
  g.check(a);
  Int ord = 1;
  const auto& n = g.invariant_factors();
  for (std::size_t i = 0; i < n.size(); ++i) ord = std::lcm(ord, n[i] / std::gcd(n[i], a.coords[i]));
  return ord;
}

inline std::vector<GroupElement> enumerate_elements(const Group& g) {
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(g.order()));
  for (std::size_t i = 0; i < static_cast<std::size_t>(g.order()); ++i) out.push_back(g.element_at(i));
  return out;
}

// Standard basis vector e_i (1-based).
inline GroupElement basis_element(const Group& g, std::size_t i) {
  if (i < 1 || i > g.rank()) throw UsageError("basis index out of range");
  GroupElement e = zero(g);
  e.coords[i - 1] = 1;
  return e;
}

inline std::string format_element(const GroupElement& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a.coords[i]);
  }
  return s + ")";
}

// Index-level arithmetic for the inner loops of the searches. Builds an
// addition table for small groups; for C_2^r addition is XOR.
class IndexArith {
 public:
  explicit IndexArith(const Group& g) : group_(g), n_(static_cast<std::size_t>(g.order())) {
    xor_ = g.is_elementary_2();
    const auto& f = g.invariant_factors();
    neg_.resize(n_);
    ord_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      GroupElement a = g.element_at(i);
      neg_[i] = static_cast<std::uint32_t>(g.index_of(zsk::neg(g, a)));
      ord_[i] = static_cast<std::uint32_t>(element_order(g, a));
    }
    if (!xor_ && n_ <= 2048) {
      table_.resize(n_ * n_);
      std::vector<GroupElement> els = enumerate_elements(g);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j) {
          auto s = static_cast<std::uint32_t>(g.index_of(zsk::add(g, els[i], els[j])));
          table_[i * n_ + j] = s;
          table_[j * n_ + i] = s;
        }
    }
    radix_.assign(f.begin(), f.end());
  }

  const Group& group() const { return group_; }
  std::size_t size() const { return n_; }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    if (xor_) return a ^ b;
    if (!table_.empty()) return table_[a * n_ + b];
    return slow_add(a, b);
  }
  std::uint32_t neg(std::uint32_t a) const { return neg_[a]; }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg_[b]); }
  std::uint32_t order(std::uint32_t a) const { return ord_[a]; }
  std::uint32_t times(std::uint32_t m, std::uint32_t a) const {
    std::uint32_t r = 0;
    for (std::uint32_t i = 0; i < m; ++i) r = add(r, a);
    return r;
  }

 private:
  std::uint32_t slow_add(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t res = 0, mul = 1;
    for (std::size_t i = radix_.size(); i-- > 0;) {
      auto n = static_cast<std::uint32_t>(radix_[i]);
      std::uint32_t d = (a % n + b % n) % n;
      res += d * mul;
      mul *= n;
      a /= n;
      b /= n;
    }
    return res;
  }

  Group group_;
  std::size_t n_;
  bool xor_ = false;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> neg_;
  std::vector<std::uint32_t> ord_;
  std::vector<Int> radix_;
};

}  // namespace zsk
