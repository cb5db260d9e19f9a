#pragma once

#include "zsk/errors.hpp"
#include "zsk/group.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace zsk {

using Rational = boost::rational<Int>;

// Multiset of group elements. Keys are dense element indices, so iteration
// follows lexicographic coordinate order.
class Sequence {
 public:
  using Counts = std::map<std::size_t, std::uint32_t>;

  Sequence() = default;
  explicit Sequence(Group g) : group_(std::move(g)) {}
  Sequence(Group g, Counts counts) : group_(std::move(g)) {
    for (auto [idx, c] : counts) {
      if (idx >= static_cast<std::size_t>(group_.order())) throw UsageError("element index out of range");
      if (c) counts_[idx] = c, length_ += c;
    }
  }

  static Sequence from_elements(const Group& g, const std::vector<GroupElement>& elems) {
    Sequence s(g);
    for (const auto& e : elems) s.push(e);
    return s;
  }

  static Sequence from_indices(const Group& g, const std::vector<std::size_t>& idx) {
    Sequence s(g);
    for (auto i : idx) s.push_index(i);
    return s;
  }

  const Group& group() const { return group_; }
  std::size_t length() const { return length_; }
  bool empty() const { return length_ == 0; }
  const Counts& counts() const { return counts_; }

  std::uint32_t multiplicity(const GroupElement& g) const { return multiplicity_index(group_.index_of(g)); }
  std::uint32_t multiplicity_index(std::size_t idx) const {
    auto it = counts_.find(idx);
    return it == counts_.end() ? 0 : it->second;
  }

  std::vector<GroupElement> support() const {
    std::vector<GroupElement> out;
    for (auto [idx, c] : counts_) out.push_back(group_.element_at(idx));
    return out;
  }

  // Expanded sorted list of element indices.
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(length_);
    for (auto [idx, c] : counts_) out.insert(out.end(), c, idx);
    return out;
  }

  void push(const GroupElement& g, std::uint32_t mult = 1) { push_index(group_.index_of(g), mult); }
  void push_index(std::size_t idx, std::uint32_t mult = 1) {
    if (idx >= static_cast<std::size_t>(group_.order())) throw UsageError("element index out of range");
    if (!mult) return;
    counts_[idx] += mult;
    length_ += mult;
  }

  bool is_squarefree() const {
    for (auto [idx, c] : counts_)
      if (c > 1) return false;
    return true;
  }

  bool divides(const Sequence& other) const {
    same_group(other);
    for (auto [idx, c] : counts_)
      if (other.multiplicity_index(idx) < c) return false;
    return true;
  }

  Sequence operator*(const Sequence& o) const {
    same_group(o);
    Sequence r = *this;
    for (auto [idx, c] : o.counts_) r.push_index(idx, c);
    return r;
  }

  bool operator==(const Sequence& o) const { return group_ == o.group_ && counts_ == o.counts_; }

  // Canonical order: compare sorted element lists lexicographically.
  bool operator<(const Sequence& o) const {
    auto a = indices(), b = o.indices();
    return a < b;
  }

  void same_group(const Sequence& o) const {
    if (!(group_ == o.group_)) throw UsageError("sequences over different groups");
  }

 private:
  Group group_;
  Counts counts_;
  std::size_t length_ = 0;
};

class NotDivisible : public UsageError {
 public:
  explicit NotDivisible(const GroupElement& e)
      : UsageError("sequence not divisible: element " + format_element(e) + " has too small multiplicity"),
        element_(e) {}
  const GroupElement& element() const { return element_; }

 private:
  GroupElement element_;
};

inline GroupElement sum(const Sequence& s) {
  const Group& g = s.group();
  GroupElement acc = zero(g);
  for (auto [idx, c] : s.counts()) acc = add(g, acc, scale(g, c, g.element_at(idx)));
  return acc;
}

inline bool is_zero_sum(const Sequence& s) { return sum(s) == zero(s.group()); }

inline Rational cross_number(const Sequence& s) {
  Rational r(0);
  for (auto [idx, c] : s.counts())
    r += Rational(static_cast<Int>(c), element_order(s.group(), s.group().element_at(idx)));
  return r;
}

inline Sequence divide(const Sequence& s, const Sequence& t) {
  s.same_group(t);
  Sequence::Counts out = s.counts();
  for (auto [idx, c] : t.counts()) {
    auto it = out.find(idx);
    if (it == out.end() || it->second < c) throw NotDivisible(s.group().element_at(idx));
    it->second -= c;
  }
  return Sequence(s.group(), out);
}

// Sequence literal: "1,0,0^3; 0,1,0; 1,1,1^2". Empty string is the empty sequence.
inline Sequence parse_sequence(const Group& g, std::string_view lit) {
  Sequence s(g);
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < lit.size() && (lit[i] == ' ' || lit[i] == '\t' || lit[i] == '\n')) ++i;
  };
  auto read_int = [&](const char* what) -> Int {
    skip_ws();
    std::size_t start = i;
    bool negative = false;
    if (i < lit.size() && lit[i] == '-') negative = true, ++i;
    Int v = 0;
    std::size_t digits = i;
    while (i < lit.size() && lit[i] >= '0' && lit[i] <= '9') {
      v = v * 10 + (lit[i] - '0');
      if (v > 1'000'000'000) throw ParseError(std::string(what) + " too large", start);
      ++i;
    }
    if (i == digits) throw ParseError(std::string("expected ") + what, start);
    return negative ? -v : v;
  };
  skip_ws();
  if (i == lit.size()) return s;
  while (true) {
    skip_ws();
    std::size_t term_start = i;
    GroupElement e;
    while (true) {
      e.coords.push_back(read_int("coordinate"));
      skip_ws();
      if (i < lit.size() && lit[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    Int mult = 1;
    if (i < lit.size() && lit[i] == '^') {
      ++i;
      std::size_t at = i;
      mult = read_int("multiplicity");
      if (mult < 1) throw ParseError("multiplicity must be positive", at);
    }
    // Rank-0 group: the only element is the empty tuple, written "0".
    if (g.rank() == 0 && e.coords.size() == 1 && e.coords[0] == 0) e.coords.clear();
    if (e.coords.size() != g.rank())
      throw ParseError("term has " + std::to_string(e.coords.size()) + " coordinates, group rank is " +
                           std::to_string(g.rank()),
                       term_start);
    const auto& n = g.invariant_factors();
    for (std::size_t c = 0; c < n.size(); ++c) e.coords[c] = ((e.coords[c] % n[c]) + n[c]) % n[c];
    s.push(e, static_cast<std::uint32_t>(mult));
    skip_ws();
    if (i == lit.size()) break;
    if (lit[i] != ';') throw ParseError("expected ';' between terms", i);
    ++i;
  }
  return s;
}

inline std::string format_sequence(const Sequence& s) {
  std::string out;
  const Group& g = s.group();
  for (auto [idx, c] : s.counts()) {
    if (!out.empty()) out += "; ";
    GroupElement e = g.element_at(idx);
    if (e.coords.empty()) out += "0";
    for (std::size_t i = 0; i < e.coords.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(e.coords[i]);
    }
    if (c > 1) out += "^" + std::to_string(c);
  }
  return out;
}

}  // namespace zsk
