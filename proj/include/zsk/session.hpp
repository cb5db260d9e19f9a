#pragma once

#include "zsk/bounds.hpp"
#include "zsk/constructions.hpp"
#include "zsk/search.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace zsk {

// Result of an invariant computation. `lower == upper` for exact values; an
// interval means a guard or budget stopped the search. For D and D_k the
// witness is a zero-sum sequence of length `lower` with max L <= k; for s_le
// and eta it has length `lower - 1` and no short zero-sum subsequence.
struct Certificate {
  std::string constant;  // "D", "D_k", "s_le", "eta"
  Group group;
  Int k = 1;  // k for D_k, the length cap for s_le and eta
  Extended lower, upper;
  std::optional<Sequence> witness;
  std::vector<BoundReport> upper_chain;
  bool exhaustive = false;
  std::string method;
  std::optional<std::int64_t> elapsed_ms;

  bool exact() const { return lower == upper; }
};

struct StabilizationRow {
  Int k;
  Certificate cert;
};

struct StabilizationReport {
  Group group;
  Int k_max = 0;
  std::vector<StabilizationRow> rows;
  std::optional<Int> d0;  // read off the tail
  std::optional<Int> kd;
  bool certified = false;
  std::string rule;  // "a", "b", "c" or empty
  std::string note;
};

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> problems;
  std::vector<std::string> assumptions;  // recorded search results taken as given
};

namespace detail {

inline std::string dk_key(const Group& g, Int k) { return g.spec() + "|" + std::to_string(k); }

inline Sequence seq_from(const Group& g, const std::vector<std::uint32_t>& idx) {
  return Sequence::from_indices(g, std::vector<std::size_t>(idx.begin(), idx.end()));
}

inline Sequence seq_from_mask(const Group& g, std::uint64_t mask) {
  Sequence s(g);
  for (; mask; mask &= mask - 1) s.push_index(static_cast<std::size_t>(std::countr_zero(mask)));
  return s;
}

// prod e_i^(n_i - 1), zero-sum free of length D*(G) - 1.
inline Sequence dstar_free(const Group& g) {
  Sequence s(g);
  const auto& f = g.invariant_factors();
  for (std::size_t i = 0; i < f.size(); ++i) s.push(basis_element(g, i + 1), static_cast<std::uint32_t>(f[i] - 1));
  return s;
}

// Completes S to the zero-sum sequence S(-sigma(S)); max L of the result is
// the disjoint count of S plus one.
inline Sequence close_up(const Sequence& s) {
  Sequence b = s;
  b.push(neg(s.group(), sum(s)), 1);
  return b;
}

}  // namespace detail

// max L(B) <= k for a zero-sum B. Throws BudgetExhausted when undecided.
inline bool max_length_at_most(const Sequence& b, Int k, const SearchOptions& opt) {
  if (!is_zero_sum(b)) throw UsageError("max_length_at_most needs a zero-sum sequence");
  const Group& g = b.group();
  PackingOptions po{opt.budget, opt.cache_limit};
  if (g.is_trivial()) return static_cast<Int>(b.length()) <= k;
  if (g.is_elementary_2() && g.rank() <= 5) return static_cast<Int>(detail::max_length_elementary_2(b, po)) <= k;
  PackingSolver solver(g, po);
  return !solver.at_least(b, static_cast<std::size_t>(k + 1), true);
}

class Session {
 public:
  explicit Session(SearchOptions opt = {}) : opt_(opt) {}

  const SearchOptions& options() const { return opt_; }

  Certificate davenport(const Group& g) {
    auto key = g.spec();
    if (auto it = d_.find(key); it != d_.end()) return it->second;
    Certificate c = base("D", g, 1);
    if (g.is_trivial()) {
      c.lower = c.upper = Extended(1);
      c.witness = detail::close_up(Sequence(g));
      zsf_[key] = Sequence(g);
      c.exhaustive = true;
      c.method = "closed form";
    } else if (g.order() > opt_.order_limit && !(g.is_elementary_2() && g.rank() <= 6)) {
      Sequence s = detail::dstar_free(g);
      zsf_[key] = s;
      c.witness = detail::close_up(s);
      c.lower = Extended(d_star(g));
      c.upper = Extended(g.order());
      c.method = "interval (order guard)";
    } else {
      SearchOutcome o = short_free(g, 0, SIZE_MAX);
      Sequence s = detail::seq_from(g, o.witness);
      zsf_[key] = s;
      c.witness = detail::close_up(s);
      c.lower = Extended(static_cast<Int>(o.best + 1));
      c.upper = o.complete ? c.lower : Extended(g.order());
      c.exhaustive = o.complete;
      c.method = o.complete ? "search" : "interval (search budget)";
    }
    d_[key] = c;
    return c;
  }

  Certificate s_le(const Group& g, Int ell) {
    if (ell < 1) throw UsageError("s_le needs k >= 1");
    auto key = detail::dk_key(g, ell);
    if (auto it = s_.find(key); it != s_.end()) return it->second;
    Certificate c = base("s_le", g, ell);
    if (ell < g.exponent()) {
      c.lower = c.upper = Extended::infinity();
      c.exhaustive = true;
      c.method = "closed form";
    } else {
      Certificate d = davenport(g);
      if (d.exact() && Extended(ell) >= d.lower) {
        c.lower = c.upper = d.lower;
        c.witness = zsf_.at(g.spec());
        c.exhaustive = d.exhaustive;
        c.method = "closed form";
      } else if (g.order() > opt_.order_limit && !(g.is_elementary_2() && g.rank() <= 6)) {
        // s_le >= D >= D*, and s_le <= eta <= |G| once k >= exp(G)
        c.witness = detail::dstar_free(g);
        c.lower = Extended(d_star(g));
        c.upper = Extended(g.order());
        c.method = "interval (order guard)";
      } else {
        SearchOutcome o = short_free(g, static_cast<std::size_t>(ell), SIZE_MAX);
        c.witness = detail::seq_from(g, o.witness);
        c.lower = Extended(static_cast<Int>(o.best + 1));
        c.upper = o.complete ? c.lower : Extended(g.order());
        c.exhaustive = o.complete;
        c.method = o.complete ? "search" : "interval (search budget)";
      }
    }
    s_[key] = c;
    return c;
  }

  Certificate eta(const Group& g) {
    Certificate c = s_le(g, g.exponent());
    c.constant = "eta";
    return c;
  }

  const E2Classification& classification(std::size_t r) {
    auto it = e2_.find(r);
    if (it == e2_.end()) it = e2_.emplace(r, classify_e2(r, opt_)).first;
    return it->second;
  }

  // Exact D_k from a completed search, preferring the exhaustive route.
  Certificate davenport_k(const Group& g, Int k) {
    if (k < 1) throw UsageError("k must be >= 1");
    if (k == 1) return as_dk(davenport(g));
    if (auto c = exhaustive_dk(g, k)) return *c;
    auto up = upper_chain(g, k);
    return search_dk(g, k, up.second, up.first, lower_witness(g, k));
  }

  // Witness plus bound chain first; search only when the two sides differ.
  Certificate certify_dk(const Group& g, Int k) {
    if (k < 1) throw UsageError("k must be >= 1");
    auto key = detail::dk_key(g, k);
    if (auto it = certified_.find(key); it != certified_.end()) return it->second;
    Certificate c;
    if (k == 1) {
      c = as_dk(davenport(g));
    } else {
      auto up = upper_chain(g, k);
      auto lo = lower_witness(g, k);
      if (lo && Extended(static_cast<Int>(lo->first.length())) == up.second) {
        c = base("D_k", g, k);
        c.lower = c.upper = up.second;
        c.witness = lo->first;
        c.upper_chain = up.first;
        c.method = "witness+chain (" + lo->second + ")";
      } else if (auto ex = exhaustive_dk(g, k)) {
        c = *ex;
      } else {
        c = search_dk(g, k, up.second, up.first, lo);
      }
    }
    certified_[key] = c;
    return c;
  }

  StabilizationReport stabilization(const Group& g, Int k_max, std::optional<Int> external_d0 = {}) {
    if (k_max < 1) throw UsageError("k_max must be >= 1");
    StabilizationReport rep;
    rep.group = g;
    rep.k_max = k_max;
    Int e = g.exponent();
    bool all_exact = true;
    for (Int k = 1; k <= k_max; ++k) {
      rep.rows.push_back({k, certify_dk(g, k)});
      all_exact = all_exact && rep.rows.back().cert.exact();
    }
    if (!all_exact) {
      rep.note = "some rows are intervals; no tail read off";
      return rep;
    }
    auto val = [&](Int k) { return rep.rows[static_cast<std::size_t>(k - 1)].cert.lower.to_int64(); };
    Int d0 = val(k_max) - k_max * e;
    Int kd = k_max;
    while (kd > 1 && val(kd - 1) - (kd - 1) * e == d0) --kd;
    rep.d0 = d0;
    rep.kd = kd;
    rep.note = "observed on k <= " + std::to_string(k_max);

    if (g.is_elementary_2() && g.rank() >= 1 && g.rank() <= 5) {
      // rule (c): the classification gives D_k for every k
      const auto& cl = classification(g.rank());
      int jstar = static_cast<int>(((Int(1) << g.rank()) - 1) / 3);
      int kk = jstar + 1;
      int d0x = cl.dk(kk).first - 2 * kk;
      int kdx = kk;
      while (kdx > 1 && cl.dk(kdx - 1).first - 2 * (kdx - 1) == d0x) --kdx;
      rep.d0 = d0x;
      rep.kd = kdx;
      rep.certified = true;
      rep.rule = "c";
      rep.note = "exact for all k from the squarefree classification";
      return rep;
    }
    if (g.is_trivial()) {
      rep.certified = true;
      rep.rule = "c";
      rep.note = "trivial group: D_k = k";
      return rep;
    }
    // rule (a): past ceil(eta/exp) - 1 the tail D_k - k exp is non-increasing
    // and never drops below D(G^-) - 1, so meeting that floor settles it
    Certificate et = eta(g);
    Certificate dm = davenport(minus_group(g));
    if (et.exact() && dm.exact()) {
      Int eta_v = et.lower.to_int64();
      Int threshold = (eta_v + e - 1) / e - 1;
      Int floor_v = dm.lower.to_int64() - 1;
      bool step_ok = k_max >= 2 && val(k_max) - val(k_max - 1) == e;
      if (step_ok && k_max >= threshold && d0 == floor_v) {
        rep.certified = true;
        rep.rule = "a";
        rep.note = "tail on the D(G^-) - 1 floor past k = " + std::to_string(threshold);
        return rep;
      }
    }
    if (external_d0 && *external_d0 == d0) {
      rep.certified = true;
      rep.rule = "b";
      rep.note = "supplied bound D_k <= " + std::to_string(*external_d0) + " + k exp(G) meets the witness line";
    }
    return rep;
  }

  // Best upper bound chain for D_k. Steps cite earlier steps ("step:i") or
  // completed searches ("search:...").
  std::pair<std::vector<BoundReport>, Extended> upper_chain(const Group& g, Int k) {
    Certificate d = davenport(g);
    if (!d.exact()) return {{}, Extended::infinity()};
    Int dv = d.lower.to_int64();
    std::map<Int, Extended> s_tab;
    for (Int l = g.exponent(); l < dv; ++l) {
      Certificate sc = s_le(g, l);
      if (sc.exact()) s_tab[l] = sc.lower;
    }
    std::vector<NodePtr> best;  // best[j - 1] bounds D_j
    for (Int j = 1; j <= k; ++j) {
      best.push_back(best_node(g, j, dv, s_tab, best));
      // earlier rows may lean on an exhaustive value when it is sharper
      if (j < k && g.is_elementary_2() && g.rank() <= 5) {
        Int ex = classification(g.rank()).dk(static_cast<int>(j)).first;
        if (Extended(ex) < best.back()->rep.value) {
          Node n;
          n.rep.value = Extended(ex);
          n.external = "exhaustive:D_" + std::to_string(j);
          best.back() = std::make_shared<const Node>(std::move(n));
        }
      }
    }
    std::vector<BoundReport> chain;
    std::map<const Node*, std::size_t> placed;
    std::function<void(const NodePtr&)> place = [&](const NodePtr& nd) {
      if (placed.count(nd.get()) || !nd->external.empty()) return;
      for (const auto& [input, dep] : nd->deps) place(dep);
      BoundReport r = nd->rep;
      for (const auto& [input, dep] : nd->deps)
        r.inputs[input].source =
            dep->external.empty() ? "step:" + std::to_string(placed.at(dep.get())) : dep->external;
      placed[nd.get()] = chain.size();
      chain.push_back(std::move(r));
    };
    place(best.back());
    return {chain, chain.back().value};
  }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    BoundReport rep;
    std::vector<std::pair<std::size_t, NodePtr>> deps;  // input index -> node supplying it
    std::string external;                               // set for values taken from a search
  };

  static Certificate base(const std::string& name, const Group& g, Int k) {
    Certificate c;
    c.constant = name;
    c.group = g;
    c.k = k;
    return c;
  }

  static Certificate as_dk(Certificate c) {
    c.constant = "D_k";
    c.k = 1;
    return c;
  }

  SearchOutcome short_free(const Group& g, std::size_t ell, std::size_t stop_at) {
    if (g.is_elementary_2() && g.rank() <= 6 && (ell == 0 || ell >= 2))
      return BinaryShortFreeSearch(g.rank(), ell, opt_, stop_at).run();
    return ShortFreeSearch(g, ell, opt_, stop_at).run();
  }

  static void cite(BoundReport& r, const std::string& name, const std::string& src) {
    for (auto& in : r.inputs)
      if (in.name == name) {
        in.provenance = Provenance::kComputed;
        in.source = src;
      }
  }

  NodePtr best_node(const Group& g, Int j, Int dv, const std::map<Int, Extended>& s_tab,
                    const std::vector<NodePtr>& prev) {
    std::vector<Node> cands;
    {
      BoundReport r = kd_trivial_ub(j, dv);
      cite(r, "D", "search:D");
      cands.push_back({r, {}, {}});
    }
    if (!s_tab.empty()) {
      BoundReport r = ub_recursion_sweep(g, s_tab, dv, j);
      cite(r, "D", "search:D");
      for (auto& in : r.inputs)
        if (in.name.rfind("s_", 0) == 0) {
          Int ell = r.input("ell_" + in.name.substr(2)).to_int64();
          in.provenance = Provenance::kComputed;
          in.source = "search:s_le_" + std::to_string(ell);
        }
      cands.push_back({r, {}, {}});
    }
    if (j >= 2) {
      const NodePtr& p = prev.back();
      for (const auto& [l, sv] : s_tab) {
        BoundReport r = prop_bas_step(j, p->rep.value.to_int64(), l, sv);
        cite(r, "s", "search:s_le_" + std::to_string(l));
        cite(r, "D_prev", "");
        cands.push_back({r, {{0, p}}, {}});
      }
    }
    const auto& f = g.invariant_factors();
    if (f.size() >= 2 && f.front() == f.back() && detail::is_prime(f.front())) {
      Int p = f.front(), r = static_cast<Int>(f.size());
      BigInt pm = p;
      for (Int m = 1; m <= 62; ++m, pm *= p)
        if (BigInt(r * (p - 1) + 1) < 2 * pm) {
          cands.push_back({cpr_upper(p, r, j, m), {}, {}});
          break;
        }
    }
    if (g.is_elementary_2() && j == 2)
      for (auto& rep : e2g_bounds(static_cast<Int>(g.rank()), 2))
        if (rep.rule_id == "e2g_d2") cands.push_back({rep, {}, {}});
    auto out = std::make_shared<const Node>(*std::min_element(
        cands.begin(), cands.end(), [](const Node& a, const Node& b) { return a.rep.value < b.rep.value; }));
    if (g.is_elementary_2() && g.rank() >= 1) {
      std::map<Int, Int> up;
      for (Int i = 1; i < j; ++i) up[i] = prev[static_cast<std::size_t>(i - 1)]->rep.value.to_int64();
      Node sq{e2g_squarefree_split(static_cast<Int>(g.rank()), j, out->rep.value.to_int64(), up), {}, {}};
      if (sq.rep.value < out->rep.value) {
        for (std::size_t i = 0; i < sq.rep.inputs.size(); ++i) {
          const auto& nm = sq.rep.inputs[i].name;
          if (nm == "U_k") {
            sq.deps.push_back({i, out});
          } else if (nm.rfind("D_", 0) == 0) {
            sq.deps.push_back({i, prev[static_cast<std::size_t>(std::stoll(nm.substr(2)) - 1)]});
          } else {
            continue;
          }
          sq.rep.inputs[i].provenance = Provenance::kComputed;
        }
        out = std::make_shared<const Node>(std::move(sq));
      }
    }
    return out;
  }

  // Verified lower witnesses for D_k: constructions, the step from a known
  // D_{k-1} witness, and for small elementary 2-groups the classification.
  std::optional<std::pair<Sequence, std::string>> lower_witness(const Group& g, Int k) {
    std::vector<std::pair<Sequence, std::string>> cands;
    const auto& f = g.invariant_factors();
    if (g.is_trivial()) {
      Sequence b(g);
      b.push_index(0, static_cast<std::uint32_t>(k));
      return std::make_pair(b, std::string("trivial group"));
    }
    std::size_t r = f.size();
    {
      // prod e_i^(n_i - 1) e_r^((k-1) n_r), closed up
      Sequence s = detail::dstar_free(g);
      s.push(basis_element(g, r), static_cast<std::uint32_t>((k - 1) * f.back()));
      cands.emplace_back(detail::close_up(s), "D*(G) + (k-1)exp(G) construction");
    }
    if (k >= 2)
      for (Int s = 2; s * (s - 1) / 2 <= static_cast<Int>(r); ++s)
        for (Int t = 1; s * (s - 1) / 2 <= static_cast<Int>(r) - t + 1; ++t)
          try {
            cands.emplace_back(detail::close_up(elb_witness(g, s, t, k)),
                               "elb witness s=" + std::to_string(s) + " t=" + std::to_string(t));
          } catch (const UsageError&) {
          }
    if (k >= 2) {
      auto it = certified_.find(detail::dk_key(g, k - 1));
      if (it != certified_.end() && it->second.witness) {
        Sequence b = *it->second.witness;
        GroupElement x = basis_element(g, r);
        b.push(x, 1);
        b.push(neg(g, x), 1);
        cands.emplace_back(b, "D_{k-1} witness times g(-g)");
      }
    }
    if (g.is_elementary_2() && g.rank() <= 5) cands.emplace_back(e2_witness(g, k), "squarefree classification");
    std::sort(cands.begin(), cands.end(),
              [](const auto& a, const auto& b) { return a.first.length() > b.first.length(); });
    for (auto& c : cands) {
      try {
        if (max_length_at_most(c.first, k, opt_)) return c;
      } catch (const std::runtime_error&) {
      }
    }
    return std::nullopt;
  }

  // A squarefree set realizing SF(k - t) times g^(2t), g outside the set
  // when possible. Checked before use.
  Sequence e2_witness(const Group& g, Int k) {
    const auto& cl = classification(g.rank());
    auto [v, t] = cl.dk(static_cast<int>(k));
    std::uint64_t mask = cl.sf_witness(static_cast<int>(k) - t);
    Sequence b = detail::seq_from_mask(g, mask);
    if (t > 0) {
      std::size_t x = 1;
      while (x + 1 < static_cast<std::size_t>(g.order()) && (mask >> x & 1)) ++x;
      b.push_index(x, static_cast<std::uint32_t>(2 * t));
    }
    if (static_cast<int>(b.length()) != v || !is_zero_sum(b) || !max_length_at_most(b, k, opt_))
      throw std::logic_error("classification witness failed its check");
    return b;
  }

  std::optional<Certificate> exhaustive_dk(const Group& g, Int k) {
    if (!(g.is_elementary_2() && g.rank() <= 5)) return std::nullopt;
    Certificate c = base("D_k", g, k);
    c.lower = c.upper = Extended(classification(g.rank()).dk(static_cast<int>(k)).first);
    c.witness = e2_witness(g, k);
    c.exhaustive = true;
    c.method = "squarefree classification";
    return c;
  }

  Certificate search_dk(const Group& g, Int k, const Extended& upper, const std::vector<BoundReport>& chain,
                        const std::optional<std::pair<Sequence, std::string>>& lo) {
    Certificate c = base("D_k", g, k);
    std::size_t stop = upper.is_infinite() ? SIZE_MAX : static_cast<std::size_t>(upper.to_int64() - 1);
    SearchOutcome o;
    try {
      o = FewDisjointSearch(g, static_cast<std::size_t>(k), opt_, stop).run();
    } catch (const GuardExceeded&) {
      o.complete = false;
    }
    Int found = o.complete || !o.witness.empty() ? static_cast<Int>(o.best + 1) : 0;
    Int lo_len = lo ? static_cast<Int>(lo->first.length()) : 0;
    if (found > 0 && found >= lo_len) {
      c.witness = detail::close_up(detail::seq_from(g, o.witness));
    } else if (lo) {
      c.witness = lo->first;
    }
    c.lower = Extended(std::max(found, lo_len));
    if (o.complete) {
      c.upper = c.lower;
      c.exhaustive = !(upper.is_finite() && c.lower == upper);
      if (!c.exhaustive) c.upper_chain = chain;
      c.method = c.exhaustive ? "search" : "search+chain";
    } else {
      c.upper = upper;
      c.upper_chain = chain;
      c.method = "interval (search budget or guard)";
    }
    return c;
  }

  SearchOptions opt_;
  std::map<std::string, Certificate> d_, s_, certified_;
  std::map<std::string, Sequence> zsf_;  // longest zero-sum free sequence per group
  std::map<std::size_t, E2Classification> e2_;
};

// Values a caller may supply instead of having them computed.
struct SuppliedInputs {
  std::optional<Int> d, eta, d_minus, d_prev_upper, d_prev_lower, atoms;
  std::map<Int, Extended> s_le;
};

// Every rule that applies to (G, k), with inputs taken from `in` first and
// from completed searches otherwise. Rules whose inputs are unknown are skipped.
inline std::vector<BoundReport> applicable_bounds(Session& s, const Group& g, Int k, const SuppliedInputs& in = {}) {
  if (k < 1) throw UsageError("k must be >= 1");
  std::vector<BoundReport> out;
  auto give = [](BoundReport r, const std::string& name, bool supplied, const std::string& src) {
    for (auto& x : r.inputs)
      if (x.name == name) {
        x.provenance = supplied ? Provenance::kSupplied : Provenance::kComputed;
        x.source = supplied ? "" : src;
      }
    return r;
  };
  Int e = g.exponent();
  std::optional<Int> d = in.d;
  if (!d) {
    Certificate c = s.davenport(g);
    if (c.exact()) d = c.lower.to_int64();
  }
  std::map<Int, Extended> s_tab = in.s_le;
  std::set<Int> supplied_s;
  for (const auto& [l, v] : in.s_le) supplied_s.insert(l);
  if (d)
    for (Int l = e; l < *d; ++l)
      if (!s_tab.count(l)) {
        Certificate c = s.s_le(g, l);
        if (c.exact()) s_tab[l] = c.lower;
      }
  auto s_src = [&](BoundReport r, const std::string& name, Int l) {
    return give(std::move(r), name, supplied_s.count(l) > 0, "search:s_le_" + std::to_string(l));
  };

  if (d) {
    out.push_back(give(kd_trivial_ub(k, *d), "D", in.d.has_value(), "search:D"));
    std::map<Int, Extended> finite;
    for (const auto& [l, v] : s_tab)
      if (v.is_finite() && l >= e && l < *d) finite[l] = v;
    if (!finite.empty()) {
      BoundReport r = give(ub_recursion_sweep(g, finite, *d, k), "D", in.d.has_value(), "search:D");
      for (auto& x : r.inputs)
        if (x.name.rfind("s_", 0) == 0) {
          Int l = r.input("ell_" + x.name.substr(2)).to_int64();
          x.provenance = supplied_s.count(l) ? Provenance::kSupplied : Provenance::kComputed;
          x.source = supplied_s.count(l) ? "" : "search:s_le_" + std::to_string(l);
        }
      out.push_back(r);
    }
    for (const auto& [l, v] : finite)
      out.push_back(s_src(give(remark_ub(g, k, l, v, *d), "D", in.d.has_value(), "search:D"), "s", l));
  }
  if (k >= 2) {
    std::optional<Int> prev = in.d_prev_upper;
    if (!prev && d) {
      auto up = s.upper_chain(g, k - 1);
      if (up.second.is_finite()) prev = up.second.to_int64();
    }
    if (prev)
      for (const auto& [l, v] : s_tab)
        if (v.is_finite())
          out.push_back(s_src(give(prop_bas_step(k, *prev, l, v), "D_prev", in.d_prev_upper.has_value(),
                                   "chain:D_" + std::to_string(k - 1)),
                              "s", l));
  }
  const auto& f = g.invariant_factors();
  if (f.size() >= 2 && f.front() == f.back() && detail::is_prime(f.front())) {
    Int p = f.front(), r = static_cast<Int>(f.size());
    BigInt pm = p;
    for (Int m = 1; m <= 62; ++m, pm *= p)
      if (BigInt(r * (p - 1) + 1) < 2 * pm) {
        out.push_back(cpr_upper(p, r, k, m));
        break;
      }
  }
  if (g.is_elementary_2())
    for (auto& r : e2g_bounds(static_cast<Int>(g.rank()), k)) out.push_back(r);
  out.push_back(delta_upper(g));
  out.push_back(kD_crude_chain(g));
  out.push_back(kD_crude(g));

  out.push_back(lower_dstar(g, k));
  std::optional<Int> dm = in.d_minus;
  if (!dm) {
    Certificate c = s.davenport(minus_group(g));
    if (c.exact()) dm = c.lower.to_int64();
  }
  if (dm) out.push_back(give(lower_minus(g, k, *dm), "D_minus", in.d_minus.has_value(), "search:D(G^-)"));
  if (k >= 2) {
    Int r = static_cast<Int>(g.rank());
    for (Int sp = 2; sp * (sp - 1) / 2 <= r; ++sp)
      for (Int t = 1; sp * (sp - 1) / 2 <= r - t + 1; ++t) out.push_back(elb_lower(g, sp, t, k));
    if (in.d_prev_lower) out.push_back(step_lower(k, *in.d_prev_lower));
  }
  std::optional<Int> eta_v = in.eta;
  if (!eta_v && s_tab.count(e) && s_tab.at(e).is_finite()) eta_v = s_tab.at(e).to_int64();
  if (in.atoms && eta_v && dm)
    out.push_back(kD_upper(g, delta_upper(g).value, Extended(*in.atoms), Extended(*eta_v), Extended(*dm)));
  return out;
}

inline VerifyResult verify_certificate(const Certificate& c, const SearchOptions& opt = {}) {
  VerifyResult v;
  auto fail = [&](std::string m) {
    v.ok = false;
    v.problems.push_back(std::move(m));
  };
  const Group& g = c.group;
  if (c.lower > c.upper) fail("lower exceeds upper");
  bool dk = c.constant == "D" || c.constant == "D_k";
  bool sle = c.constant == "s_le" || c.constant == "eta";
  if (!dk && !sle) fail("unknown constant " + c.constant);
  if (sle && c.lower.is_infinite()) {
    if (c.k >= g.exponent()) fail("s_le is finite for k >= exp(G)");
    return v;
  }
  if (c.witness) {
    const Sequence& w = *c.witness;
    if (!(w.group() == g)) fail("witness over a different group");
    if (dk) {
      if (Extended(static_cast<Int>(w.length())) != c.lower) fail("witness length differs from the lower value");
      if (!is_zero_sum(w)) fail("witness is not zero-sum");
      else {
        try {
          if (!max_length_at_most(w, c.k, opt)) fail("witness has max L above k");
        } catch (const std::runtime_error& e) {
          fail(std::string("witness check stopped: ") + e.what());
        }
      }
    } else {
      if (Extended(static_cast<Int>(w.length()) + 1) != c.lower) fail("witness length is not value - 1");
      if (shortest_zero_sum_length(w, static_cast<std::size_t>(c.k))) fail("witness has a short zero-sum");
    }
  } else if (!g.is_trivial() || dk) {
    fail("missing witness");
  }
  for (std::size_t i = 0; i < c.upper_chain.size(); ++i) {
    const auto& st = c.upper_chain[i];
    Extended re;
    try {
      re = reevaluate(st);
    } catch (const std::exception& e) {
      fail("step " + std::to_string(i) + ": " + e.what());
      continue;
    }
    if (re != st.value) fail("step " + std::to_string(i) + " re-evaluates to " + re.str());
    for (const auto& in : st.inputs) {
      if (in.source.rfind("step:", 0) == 0) {
        std::size_t j = std::stoul(in.source.substr(5));
        if (j >= i) fail("step " + std::to_string(i) + " cites a later step");
        else if (c.upper_chain[j].value != in.value || c.upper_chain[j].direction != Direction::kUpper)
          fail("step " + std::to_string(i) + " input " + in.name + " does not match step " + std::to_string(j));
      } else if (!in.source.empty()) {
        v.assumptions.push_back(in.source + " = " + in.value.str());
      }
    }
  }
  if (!c.upper_chain.empty()) {
    const auto& last = c.upper_chain.back();
    if (last.direction != Direction::kUpper) fail("last chain step is not an upper bound");
    if (last.value != c.upper) fail("chain ends at " + last.value.str() + ", not at the upper value");
  } else if (c.exact() && !c.exhaustive) {
    fail("exact value without an upper chain or exhaustive search");
  }
  if (c.exhaustive) v.assumptions.push_back("exhaustive " + c.method + " for the upper side");
  std::sort(v.assumptions.begin(), v.assumptions.end());
  v.assumptions.erase(std::unique(v.assumptions.begin(), v.assumptions.end()), v.assumptions.end());
  return v;
}

}  // namespace zsk
