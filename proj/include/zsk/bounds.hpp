#pragma once

#include "zsk/errors.hpp"
#include "zsk/extended.hpp"
#include "zsk/group.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zsk {

enum class Direction { kLower, kUpper };
enum class Provenance { kComputed, kSupplied, kDerived };

inline const char* to_string(Direction d) { return d == Direction::kLower ? "lower" : "upper"; }
inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kComputed: return "computed";
    case Provenance::kSupplied: return "supplied";
    default: return "derived";
  }
}

struct BoundInput {
  std::string name;
  Extended value;
  Provenance provenance = Provenance::kSupplied;
  // Where a computed value came from, e.g. "step:2" or "search:s_le_3".
  std::string source = {};
};

// One application of one rule. `target` names the bounded quantity, e.g.
// "D_3", "s_le_4", "k_D", "D_0", "delta".
struct BoundReport {
  std::string rule_id;
  std::string target;
  Direction direction = Direction::kUpper;
  std::vector<BoundInput> inputs;
  Extended value;
  std::string note;
  // Preconditions that were checked before evaluation.
  std::string preconditions = {};

  const Extended& input(const std::string& name) const {
    for (const auto& in : inputs)
      if (in.name == name) return in.value;
    throw UsageError("bound report " + rule_id + " has no input " + name);
  }
  bool has_input(const std::string& name) const {
    for (const auto& in : inputs)
      if (in.name == name) return true;
    return false;
  }
};

namespace detail {

inline Int small(const Extended& e, const char* what) {
  if (e.is_infinite()) throw UsageError(std::string(what) + " must be finite");
  return e.to_int64();
}

inline Int ceil_div(Int a, Int b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

inline bool is_prime(Int p) {
  if (p < 2) return false;
  for (Int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

struct RecursionInputs {
  Int k = 0, d = 0;
  std::vector<Int> ell, s;
};

inline RecursionInputs read_recursion(const BoundReport& r, bool with_k) {
  RecursionInputs in;
  if (with_k) in.k = small(r.input("k"), "k");
  in.d = small(r.input("D"), "D");
  Int n = small(r.input("n"), "n");
  for (Int i = 1; i <= n; ++i) {
    in.ell.push_back(small(r.input("ell_" + std::to_string(i)), "ell"));
    in.s.push_back(small(r.input("s_" + std::to_string(i)), "s_le value"));
  }
  return in;
}

inline Int recursion_sum(const RecursionInputs& in, Int m) {
  Int used = 0, total = 0;
  for (std::size_t i = 0; i < in.ell.size(); ++i) {
    Int ki = std::max<Int>(0, ceil_div(m - used - in.s[i] + 1, in.ell[i]));
    total += ki;
    used += ki * in.ell[i];
  }
  return total + std::max<Int>(0, ceil_div(m - used, in.d));
}

inline Int recursion_max_m(const RecursionInputs& in) {
  // The sum is non-decreasing in m and at least ceil(m / D) - ... grows without
  // bound, so scan by doubling then bisect.
  Int lo = 0, hi = 1;
  while (recursion_sum(in, hi) <= in.k) lo = hi, hi *= 2;
  while (hi - lo > 1) {
    Int mid = lo + (hi - lo) / 2;
    (recursion_sum(in, mid) <= in.k ? lo : hi) = mid;
  }
  return lo;
}

inline Int least_root_at_least(const BigInt& x, unsigned m) {
  // least u >= 0 with u^m >= x
  Int lo = 0, hi = 1;
  while (pow_big(BigInt(hi), m) < x) hi *= 2;
  while (lo < hi) {
    Int mid = lo + (hi - lo) / 2;
    if (pow_big(BigInt(mid), m) >= x)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

inline Int isqrt_pow2_floor(Int r) {
  // floor(2^(r/2))
  if (r % 2 == 0) return Int(1) << (r / 2);
  BigInt target = BigInt(1) << static_cast<unsigned>(r);  // u^2 <= 2^r
  Int u = least_root_at_least(target, 2);
  if (pow_big(BigInt(u), 2) > target) --u;
  return u;
}

using Evaluator = std::function<Extended(const BoundReport&)>;

inline const std::map<std::string, Evaluator>& evaluators() {
  static const std::map<std::string, Evaluator> table = {
      {"kD_trivial",
       [](const BoundReport& r) { return Extended(r.input("k").value() * r.input("D").value()); }},
      {"ub_recursion",
       [](const BoundReport& r) {
         auto in = read_recursion(r, true);
         return Extended(recursion_max_m(in));
       }},
      {"remark_ub",
       [](const BoundReport& r) {
         Int k = small(r.input("k"), "k"), l = small(r.input("ell_1"), "ell_1"), d = small(r.input("D"), "D");
         Int s = small(r.input("s"), "s_le value"), e = small(r.input("exp"), "exp");
         if (l < e || l > d - 1) throw UsageError("remark_ub: ell_1 must lie in [exp(G), D(G)-1]");
         return Extended((k - 1) * l + std::max(d, s - l));
       }},
      {"prop_bas_step",
       [](const BoundReport& r) {
         Int prev = small(r.input("D_prev"), "D_{k-1}"), l = small(r.input("ell"), "ell");
         Int s = small(r.input("s"), "s_le value");
         return Extended(std::max(prev + l, s - 1));
       }},
      {"s_le_from_extension",
       [](const BoundReport& r) {
         // value is D(G + C_n); the threshold m is recomputed and must match
         Int n = small(r.input("n"), "n"), dext = small(r.input("D_ext"), "D_ext"), dg = small(r.input("D_G"), "D_G");
         Int m = std::max((dext / n) * n / 2, (dg / n) * n);
         if (small(r.input("m"), "m") != m) throw UsageError("s_le_from_extension: inconsistent m");
         return Extended(dext);
       }},
      {"cpr_upper",
       [](const BoundReport& r) {
         Int p = small(r.input("p"), "p"), rk = small(r.input("r"), "r"), k = small(r.input("k"), "k");
         Int m = small(r.input("m"), "m");
         if (!is_prime(p)) throw UsageError("cpr_upper: p must be prime");
         if (rk < 2) throw UsageError("cpr_upper: r must be >= 2");
         BigInt pm = pow_big(BigInt(p), static_cast<unsigned>(m));
         if (BigInt(rk * (p - 1) + 1) >= 2 * pm) throw UsageError("cpr_upper: requires r(p-1)+1 < 2p^m");
         BigInt a = BigInt((k * (rk - 1) + 1) * p - rk + 1);
         BigInt b = BigInt(k - 1) * pm + rk * (p - 1) + 1;
         return Extended(a < b ? a : b);
       }},
      {"inductive_quotient", [](const BoundReport& r) { return r.input("D_quot_at_Dk_sub"); }},
      {"inductive_linear",
       [](const BoundReport& r) {
         Int dk = small(r.input("Dk_sub"), "D_k(G')"), l = small(r.input("ell"), "ell");
         Int dq = small(r.input("D_quot"), "D(G/G')"), s = small(r.input("s_quot"), "s_le(G/G')");
         return Extended((dk - 1) * l + std::max(dq, s - l));
       }},
      {"lower_direct_sum",
       [](const BoundReport& r) { return Extended(r.input("Dk1").value() + r.input("Dk2").value() - 1); }},
      {"lower_dstar",
       [](const BoundReport& r) {
         return Extended(r.input("D_star").value() + (r.input("k").value() - 1) * r.input("exp").value());
       }},
      {"lower_minus",
       [](const BoundReport& r) {
         return Extended(r.input("D_minus").value() - 1 + r.input("k").value() * r.input("exp").value());
       }},
      {"step_lower", [](const BoundReport& r) { return Extended(r.input("D_prev").value() + 2); }},
      {"elb_lower",
       [](const BoundReport& r) {
         Int ds = small(r.input("D_star"), "D*"), s = small(r.input("s"), "s"), nt = small(r.input("n_t"), "n_t");
         Int nr = small(r.input("n_r"), "n_r"), k = small(r.input("k"), "k");
         return Extended(ds + s * (nt / 2) + (nt % 2) + (k - 2) * nr);
       }},
      {"delta_upper",
       [](const BoundReport& r) {
         Int n = small(r.input("order"), "|G|");
         return Extended(pow_big(BigInt(2 * n), static_cast<unsigned>(3 * n + 1)));
       }},
      {"kD_upper",
       [](const BoundReport& r) {
         return Extended(r.input("delta").value() * r.input("exp").value() * r.input("atoms").value() +
                         r.input("eta").value() - r.input("D_minus").value());
       }},
      {"kD_crude_chain",
       [](const BoundReport& r) {
         // delta <= (2n)^(3n+1), exp <= n, |A(G)| <= n^n, eta <= n, D(G^-) >= 1
         Int n = small(r.input("order"), "|G|");
         BigInt delta = pow_big(BigInt(2 * n), static_cast<unsigned>(3 * n + 1));
         return Extended(delta * n * pow_big(BigInt(n), static_cast<unsigned>(n)) + n - 1);
       }},
      {"kD_crude",
       [](const BoundReport& r) {
         Int n = small(r.input("order"), "|G|");
         return Extended(pow_big(BigInt(2 * n), static_cast<unsigned>(4 * n + 2)));
       }},
      {"e2g_d2",
       [](const BoundReport& r) {
         // D_2 < (3r+6)/2, so D_2 <= ceil((3r+6)/2) - 1 = floor((3r+5)/2)
         Int rk = small(r.input("r"), "r");
         return Extended((3 * rk + 5) / 2);
       }},
      {"e2g_s2m",
       [](const BoundReport& r) {
         // s_le_2m <= (m-1) + (m! 2^r)^(1/m); s is an integer threshold, so
         // the bound is (m-1) + least u with u^m >= m! 2^r
         Int rk = small(r.input("r"), "r"), m = small(r.input("m"), "m");
         if (m < 2) throw UsageError("e2g_s2m: m must be >= 2");
         BigInt x = BigInt(1) << static_cast<unsigned>(rk);
         for (Int i = 2; i <= m; ++i) x *= i;
         return Extended(m - 1 + least_root_at_least(x, static_cast<unsigned>(m)));
       }},
      {"e2g_kD",
       [](const BoundReport& r) {
         Int rk = small(r.input("r"), "r");
         return Extended(((Int(1) << rk) - 1) / 3);
       }},
      {"e2g_D0_lower",
       [](const BoundReport& r) {
         Int rk = small(r.input("r"), "r");
         return Extended(ceil_div((Int(1) << rk) - 1, 3));
       }},
      {"e2g_D0_upper",
       [](const BoundReport& r) {
         Int rk = small(r.input("r"), "r");
         return Extended(ceil_div((Int(1) << rk) - 1, 3) + isqrt_pow2_floor(rk));
       }},
      {"e2g_split",
       [](const BoundReport& r) { return Extended(r.input("D_quot").value() + r.input("s").value()); }},
      {"e2g_squarefree_split",
       [](const BoundReport& r) {
         // D_k <= max(min(SF-size cap, U_k), max_{t>=1} 2t + D_{k-t}) with D_0 read as 0
         Int rk = small(r.input("r"), "r"), k = small(r.input("k"), "k");
         Int full = (Int(1) << rk) - 1;
         Int other = small(r.input("U_k"), "U_k");
         // largest size of a 0-free squarefree zero-sum set that is <= U_k:
         // sizes 1, 2, 2^r-2, 2^r-3 never occur, 2^r-1 only once k >= floor((2^r-1)/3)
         Int cap = 0;
         if (rk >= 2 && k >= full / 3 && other >= full)
           cap = full;
         else if (std::min(other, full - 3) >= 3)
           cap = std::min(other, full - 3);
         Int best = cap;
         for (Int t = 1; t <= k; ++t) {
           Int prev = t == k ? 0 : small(r.input("D_" + std::to_string(k - t)), "D_j");
           best = std::max(best, 2 * t + prev);
         }
         return Extended(best);
       }},
  };
  return table;
}

inline const std::map<std::string, std::string>& preconditions() {
  static const std::map<std::string, std::string> table = {
      {"kD_trivial", "k >= 1"},
      {"ub_recursion", "exp(G) <= ell_1 < ... < ell_n <= D(G); s-values finite"},
      {"remark_ub", "exp(G) <= ell_1 <= D(G)-1"},
      {"prop_bas_step", "k >= 2"},
      {"s_le_from_extension", "n >= 1"},
      {"cpr_upper", "p prime; r >= 2; r(p-1)+1 < 2p^m"},
      {"inductive_quotient", "coordinate-aligned splitting G = G' + G/G'"},
      {"inductive_linear", "coordinate-aligned splitting G = G' + G/G'"},
      {"lower_direct_sum", "G = G_1 + G_2"},
      {"lower_dstar", "none"},
      {"lower_minus", "none"},
      {"step_lower", "|G| >= 2"},
      {"elb_lower", "s >= 2; 1 <= t <= r; s(s-1)/2 <= r-t+1; k >= 2"},
      {"delta_upper", "none"},
      {"kD_upper", "none"},
      {"kD_crude_chain", "none"},
      {"kD_crude", "none"},
      {"e2g_d2", "G = C_2^r"},
      {"e2g_s2m", "G = C_2^r; m >= 2"},
      {"e2g_kD", "G = C_2^r"},
      {"e2g_D0_lower", "G = C_2^r; r >= 2"},
      {"e2g_D0_upper", "G = C_2^r; r >= 2"},
      {"e2g_split", "G = C_2^r; 0 <= s <= r"},
      {"e2g_squarefree_split", "G = C_2^r; upper bounds for D_1..D_{k-1} and D_k supplied"},
  };
  return table;
}

inline BoundReport finish(BoundReport r) {
  auto it = evaluators().find(r.rule_id);
  if (it == evaluators().end()) throw UsageError("unknown bound rule " + r.rule_id);
  r.preconditions = preconditions().at(r.rule_id);
  r.value = it->second(r);
  return r;
}

inline BoundInput in(const std::string& name, Extended v, Provenance p = Provenance::kSupplied) {
  return BoundInput{name, std::move(v), p, {}};
}

inline std::string dk_target(Int k) { return "D_" + std::to_string(k); }

}  // namespace detail

// Recomputes a report's value from its recorded inputs.
inline Extended reevaluate(const BoundReport& r) {
  auto it = detail::evaluators().find(r.rule_id);
  if (it == detail::evaluators().end()) throw UsageError("unknown bound rule " + r.rule_id);
  return it->second(r);
}

inline bool known_rule(const std::string& id) { return detail::evaluators().count(id) > 0; }

inline std::vector<std::string> rule_ids() {
  std::vector<std::string> out;
  for (const auto& [k, v] : detail::evaluators()) out.push_back(k);
  return out;
}

inline BoundReport kd_trivial_ub(Int k, Int d, Provenance p = Provenance::kSupplied) {
  return detail::finish({"kD_trivial", detail::dk_target(k), Direction::kUpper,
                         {detail::in("k", k), detail::in("D", d, p)}, {}, ""});
}

namespace detail {

inline void check_ell(const Group& g, const std::vector<Int>& ell, const std::vector<Extended>& s, Int d) {
  if (ell.size() != s.size()) throw UsageError("ell and s_values differ in length");
  for (std::size_t i = 0; i < ell.size(); ++i) {
    if (i && ell[i] <= ell[i - 1]) throw UsageError("ell must be strictly increasing");
    if (s[i].is_infinite()) throw UsageError("ub_recursion: infinite s_le value for ell = " + std::to_string(ell[i]));
  }
  if (!ell.empty() && (ell.front() < g.exponent() || ell.back() > d))
    throw UsageError("ub_recursion: ell must lie in [exp(G), D(G)]");
}

inline BoundReport recursion_report(const std::string& rule, const Group& g, const std::vector<Int>& ell,
                                    const std::vector<Extended>& s, Int d, Provenance p) {
  check_ell(g, ell, s, d);
  BoundReport r{rule, "", Direction::kUpper, {}, {}, ""};
  r.inputs.push_back(in("D", d, p));
  r.inputs.push_back(in("n", static_cast<Int>(ell.size())));
  for (std::size_t i = 0; i < ell.size(); ++i) {
    r.inputs.push_back(in("ell_" + std::to_string(i + 1), ell[i]));
    r.inputs.push_back(in("s_" + std::to_string(i + 1), s[i], p));
  }
  return r;
}

}  // namespace detail

inline BoundReport ub_recursion(const Group& g, const std::vector<Int>& ell, const std::vector<Extended>& s_values,
                                Int d, Int k, Provenance p = Provenance::kSupplied) {
  if (k < 1) throw UsageError("k must be >= 1");
  BoundReport r = detail::recursion_report("ub_recursion", g, ell, s_values, d, p);
  r.target = detail::dk_target(k);
  r.inputs.insert(r.inputs.begin(), detail::in("k", k));
  return detail::finish(r);
}

// Best ub_recursion over all ell-vectors drawn from subsets of the supplied
// s-values (keys in [exp(G), D-1]) of size at most max_size. Not claimed optimal.
inline BoundReport ub_recursion_sweep(const Group& g, const std::map<Int, Extended>& s_table, Int d, Int k,
                                      std::size_t max_size = 3, Provenance p = Provenance::kSupplied) {
  std::vector<Int> keys;
  for (const auto& [ell, v] : s_table)
    if (ell >= g.exponent() && ell <= d - 1 && !v.is_infinite()) keys.push_back(ell);
  std::optional<BoundReport> best;
  std::vector<Int> ell;
  std::vector<Extended> sv;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    BoundReport r = ub_recursion(g, ell, sv, d, k, p);
    if (!best || r.value < best->value) best = r;
    if (ell.size() == max_size) return;
    for (std::size_t i = from; i < keys.size(); ++i) {
      ell.push_back(keys[i]);
      sv.push_back(s_table.at(keys[i]));
      rec(i + 1);
      ell.pop_back();
      sv.pop_back();
    }
  };
  rec(0);
  best->note = "best of sweep over ell subsets of size <= " + std::to_string(max_size);
  return *best;
}

// Sum of k_i(m): a lower bound for max L(B) over zero-sum B with |B| = m.
inline Int lower_max_length(const Group& g, const std::vector<Int>& ell, const std::vector<Extended>& s_values, Int d,
                            Int m) {
  BoundReport r = detail::recursion_report("ub_recursion", g, ell, s_values, d, Provenance::kSupplied);
  return detail::recursion_sum(detail::read_recursion(r, false), m);
}

inline BoundReport remark_ub(const Group& g, Int k, Int ell_1, const Extended& s_value, Int d,
                             Provenance p = Provenance::kSupplied) {
  return detail::finish({"remark_ub", detail::dk_target(k), Direction::kUpper,
                         {detail::in("k", k), detail::in("ell_1", ell_1), detail::in("s", s_value, p),
                          detail::in("D", d, p), detail::in("exp", g.exponent(), Provenance::kDerived)},
                         {},
                         ell_1 == g.exponent() ? "eta form" : ""});
}

// D_k <= max{D_{k-1} + ell, s_le_ell - 1}.
inline BoundReport prop_bas_step(Int k, Int d_prev, Int ell, const Extended& s_value,
                                 Provenance p = Provenance::kSupplied) {
  if (k < 2) throw UsageError("prop_bas_step needs k >= 2");
  return detail::finish({"prop_bas_step", detail::dk_target(k), Direction::kUpper,
                         {detail::in("D_prev", d_prev, p), detail::in("ell", ell), detail::in("s", s_value, p)},
                         {},
                         ""});
}

// s_le_m(G) <= D(G + C_n) with m = max{floor(floor(D_ext/n) n / 2), floor(D_G/n) n}.
inline BoundReport s_le_from_extension(const Group&, Int n, Int d_ext, Int d_g, Provenance p = Provenance::kSupplied) {
  if (n < 1) throw UsageError("n must be >= 1");
  Int m = std::max((d_ext / n) * n / 2, (d_g / n) * n);
  return detail::finish({"s_le_from_extension", "s_le_" + std::to_string(m), Direction::kUpper,
                         {detail::in("n", n), detail::in("D_ext", d_ext, p), detail::in("D_G", d_g, p),
                          detail::in("m", m, Provenance::kDerived)},
                         {},
                         ""});
}

inline BoundReport cpr_upper(Int p, Int r, Int k, Int m) {
  return detail::finish({"cpr_upper", detail::dk_target(k), Direction::kUpper,
                         {detail::in("p", p), detail::in("r", r), detail::in("k", k), detail::in("m", m)},
                         {},
                         ""});
}

// D_k(G) <= D_{D_k(G')}(G/G').
inline BoundReport inductive_ub(Int k, Int dk_sub, const Extended& dquot_at, Provenance p = Provenance::kSupplied) {
  return detail::finish({"inductive_quotient", detail::dk_target(k), Direction::kUpper,
                         {detail::in("Dk_sub", dk_sub, p), detail::in("D_quot_at_Dk_sub", dquot_at, p)},
                         {},
                         ""});
}

// D_k(G) <= (D_k(G') - 1) ell + max{D(G/G'), s_le_ell(G/G') - ell}.
inline BoundReport inductive_ub(Int k, Int dk_sub, Int ell, Int d_quot, const Extended& s_quot,
                                Provenance p = Provenance::kSupplied) {
  return detail::finish({"inductive_linear", detail::dk_target(k), Direction::kUpper,
                         {detail::in("Dk_sub", dk_sub, p), detail::in("ell", ell), detail::in("D_quot", d_quot, p),
                          detail::in("s_quot", s_quot, p)},
                         {},
                         ""});
}

inline BoundReport lower_direct_sum(Int k1, Int dk1, Int k2, Int dk2, Provenance p = Provenance::kSupplied) {
  return detail::finish({"lower_direct_sum", detail::dk_target(k1 + k2 - 1), Direction::kLower,
                         {detail::in("k1", k1), detail::in("Dk1", dk1, p), detail::in("k2", k2), detail::in("Dk2", dk2, p)},
                         {},
                         ""});
}

inline BoundReport lower_dstar(const Group& g, Int k) {
  return detail::finish({"lower_dstar", detail::dk_target(k), Direction::kLower,
                         {detail::in("D_star", d_star(g), Provenance::kDerived), detail::in("k", k),
                          detail::in("exp", g.exponent(), Provenance::kDerived)},
                         {},
                         ""});
}

// D_k(G) >= D(G^-) - 1 + k exp(G).
inline BoundReport lower_minus(const Group& g, Int k, Int d_minus, Provenance p = Provenance::kSupplied) {
  return detail::finish({"lower_minus", detail::dk_target(k), Direction::kLower,
                         {detail::in("D_minus", d_minus, p), detail::in("k", k),
                          detail::in("exp", g.exponent(), Provenance::kDerived)},
                         {},
                         ""});
}

// D_k >= D_{k-1} + 2 for |G| >= 2.
inline BoundReport step_lower(Int k, Int d_prev, Provenance p = Provenance::kSupplied) {
  return detail::finish({"step_lower", detail::dk_target(k), Direction::kLower, {detail::in("D_prev", d_prev, p)}, {}, ""});
}

inline void check_elb_params(const Group& g, Int s, Int t, Int k) {
  Int r = static_cast<Int>(g.rank());
  if (s < 2) throw UsageError("elb: s must be >= 2");
  if (t < 1 || t > r) throw UsageError("elb: t must lie in [1, r]");
  if (s * (s - 1) / 2 > r - t + 1) throw UsageError("elb: need s(s-1)/2 <= r - t + 1");
  if (k < 2) throw UsageError("elb: k must be >= 2");
}

inline BoundReport elb_lower(const Group& g, Int s, Int t, Int k) {
  check_elb_params(g, s, t, k);
  const auto& n = g.invariant_factors();
  return detail::finish({"elb_lower", detail::dk_target(k), Direction::kLower,
                         {detail::in("D_star", d_star(g), Provenance::kDerived), detail::in("s", s), detail::in("t", t),
                          detail::in("n_t", n[static_cast<std::size_t>(t - 1)], Provenance::kDerived),
                          detail::in("n_r", n.back(), Provenance::kDerived), detail::in("k", k)},
                         {},
                         ""});
}

inline BoundReport delta_upper(const Group& g) {
  return detail::finish({"delta_upper", "delta", Direction::kUpper,
                         {detail::in("order", g.order(), Provenance::kDerived)},
                         {},
                         g.order() <= 2 ? "vacuous: the set of distances is empty for |G| <= 2" : ""});
}

inline BoundReport kD_upper(const Group& g, const Extended& delta_val, const Extended& atoms_count,
                            const Extended& eta_val, const Extended& d_minus, Provenance p = Provenance::kSupplied) {
  return detail::finish({"kD_upper", "k_D", Direction::kUpper,
                         {detail::in("delta", delta_val, p), detail::in("exp", g.exponent(), Provenance::kDerived),
                          detail::in("atoms", atoms_count, p), detail::in("eta", eta_val, p),
                          detail::in("D_minus", d_minus, p)},
                         {},
                         ""});
}

inline BoundReport kD_crude_chain(const Group& g) {
  return detail::finish({"kD_crude_chain", "k_D", Direction::kUpper,
                         {detail::in("order", g.order(), Provenance::kDerived)},
                         {},
                         "delta, exp, |A(G)|, eta replaced by their crude bounds"});
}

inline BoundReport kD_crude(const Group& g) {
  return detail::finish({"kD_crude", "k_D", Direction::kUpper, {detail::in("order", g.order(), Provenance::kDerived)}, {}, ""});
}

// Extra inputs for the elementary 2-group rules.
struct E2Extras {
  // Known upper bounds (or exact values) D_j(C_2^r) for j < k, keyed by j.
  std::map<Int, Int> dk_upper;
  // Best known upper bound for D_k(C_2^r) from other rules.
  std::optional<Int> other_upper;
  // Split rule: s together with D_k(C_2^s) and D_{D_k(C_2^s)-s}(C_2^{r-s}).
  struct Split {
    Int s;
    Int dk_sub;
    Int d_quot;
  };
  std::vector<Split> splits;
  Provenance provenance = Provenance::kSupplied;
};

inline BoundReport e2g_squarefree_split(Int r, Int k, Int other_upper, const std::map<Int, Int>& dk_upper,
                                        Provenance p = Provenance::kSupplied) {
  BoundReport rep{"e2g_squarefree_split", detail::dk_target(k), Direction::kUpper, {}, {}, ""};
  rep.inputs.push_back(detail::in("r", r));
  rep.inputs.push_back(detail::in("k", k));
  rep.inputs.push_back(detail::in("U_k", other_upper, p));
  for (Int j = 1; j < k; ++j) {
    auto it = dk_upper.find(j);
    if (it == dk_upper.end()) throw UsageError("e2g_squarefree_split needs D_" + std::to_string(j));
    rep.inputs.push_back(detail::in("D_" + std::to_string(j), it->second, p));
  }
  return detail::finish(rep);
}

inline std::vector<BoundReport> e2g_bounds(Int r, Int k, const E2Extras& extras = {}) {
  if (r < 1) throw UsageError("e2g_bounds: r must be >= 1");
  std::vector<BoundReport> out;
  auto rin = detail::in("r", r);
  if (k == 2) out.push_back(detail::finish({"e2g_d2", "D_2", Direction::kUpper, {rin}, {}, ""}));
  for (Int m = 2; 2 * m <= r; ++m)
    out.push_back(detail::finish({"e2g_s2m", "s_le_" + std::to_string(2 * m), Direction::kUpper,
                                  {rin, detail::in("m", m)}, {}, ""}));
  out.push_back(detail::finish({"e2g_kD", "k_D", Direction::kUpper, {rin}, {}, ""}));
  if (r >= 2) {
    out.push_back(detail::finish({"e2g_D0_lower", "D_0", Direction::kLower, {rin}, {}, ""}));
    out.push_back(detail::finish({"e2g_D0_upper", "D_0", Direction::kUpper, {rin}, {}, ""}));
  }
  for (const auto& sp : extras.splits) {
    if (sp.s < 0 || sp.s > r) throw UsageError("e2g split: s must lie in [0, r]");
    out.push_back(detail::finish({"e2g_split", detail::dk_target(k), Direction::kUpper,
                                  {rin, detail::in("k", k), detail::in("s", sp.s),
                                   detail::in("Dk_sub", sp.dk_sub, extras.provenance),
                                   detail::in("D_quot", sp.d_quot, extras.provenance)},
                                  {},
                                  "quotient index " + std::to_string(sp.dk_sub - sp.s)}));
  }
  if (extras.other_upper && k >= 1) {
    bool have_all = true;
    for (Int j = 1; j < k; ++j) have_all = have_all && extras.dk_upper.count(j);
    if (have_all) out.push_back(e2g_squarefree_split(r, k, *extras.other_upper, extras.dk_upper, extras.provenance));
  }
  return out;
}

struct ConsistencyViolation {
  std::string target;
  BoundReport lower;
  BoundReport upper;
};

// Every lower report must not exceed any upper report on the same target.
inline std::vector<ConsistencyViolation> check_consistency(const std::vector<BoundReport>& reports) {
  std::vector<ConsistencyViolation> out;
  for (const auto& lo : reports) {
    if (lo.direction != Direction::kLower) continue;
    for (const auto& up : reports)
      if (up.direction == Direction::kUpper && up.target == lo.target && lo.value > up.value)
        out.push_back({lo.target, lo, up});
  }
  return out;
}

}  // namespace zsk
