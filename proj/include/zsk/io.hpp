#pragma once

#include "zsk/bounds.hpp"
#include "zsk/constructions.hpp"
#include "zsk/factor.hpp"
#include "zsk/session.hpp"

#include <json.hpp>

#include <string>

namespace zsk {

using Json = nlohmann::ordered_json;

// Integers that fit in int64 stay numbers; larger ones become decimal
// strings, infinity is "inf".
inline Json to_json(const Extended& e) {
  if (e.is_infinite()) return "inf";
  if (e.fits_int64()) return e.to_int64();
  return e.str();
}

inline Extended extended_from_json(const Json& j) {
  if (j.is_number_integer()) return Extended(j.get<std::int64_t>());
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return Extended::infinity();
    if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos)
      throw ParseError("bad integer literal \"" + s + "\"", 0);
    return Extended(BigInt(s));
  }
  throw ParseError("expected an integer or \"inf\"", 0);
}

inline Json to_json(const GroupElement& e) { return e.coords; }

inline Json to_json(const Sequence& s) {
  Json arr = Json::array();
  for (auto [idx, c] : s.counts()) arr.push_back({{"coords", s.group().element_at(idx).coords}, {"mult", c}});
  return arr;
}

inline Sequence sequence_from_json(const Group& g, const Json& j) {
  if (!j.is_array()) throw ParseError("sequence must be an array of {coords, mult}", 0);
  Sequence s(g);
  for (const auto& t : j) {
    GroupElement e{t.at("coords").get<std::vector<Int>>()};
    Int m = t.value("mult", Int{1});
    if (m < 1) throw ParseError("multiplicity must be positive", 0);
    g.check(e);
    s.push(e, static_cast<std::uint32_t>(m));
  }
  return s;
}

inline Json to_json(const BoundReport& r) {
  Json inputs = Json::array();
  for (const auto& in : r.inputs) {
    Json x{{"name", in.name}, {"value", to_json(in.value)}, {"provenance", to_string(in.provenance)}};
    if (!in.source.empty()) x["source"] = in.source;
    inputs.push_back(std::move(x));
  }
  Json out{{"rule_id", r.rule_id},
           {"target", r.target},
           {"direction", to_string(r.direction)},
           {"inputs", std::move(inputs)},
           {"value", to_json(r.value)}};
  if (!r.preconditions.empty()) out["preconditions"] = r.preconditions;
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

inline BoundReport bound_report_from_json(const Json& j) {
  BoundReport r;
  r.rule_id = j.at("rule_id").get<std::string>();
  r.target = j.at("target").get<std::string>();
  auto dir = j.at("direction").get<std::string>();
  if (dir != "lower" && dir != "upper") throw ParseError("direction must be lower or upper", 0);
  r.direction = dir == "lower" ? Direction::kLower : Direction::kUpper;
  for (const auto& x : j.at("inputs")) {
    BoundInput in;
    in.name = x.at("name").get<std::string>();
    in.value = extended_from_json(x.at("value"));
    auto p = x.value("provenance", std::string("supplied"));
    in.provenance = p == "computed" ? Provenance::kComputed : p == "derived" ? Provenance::kDerived : Provenance::kSupplied;
    in.source = x.value("source", std::string());
    r.inputs.push_back(std::move(in));
  }
  r.value = extended_from_json(j.at("value"));
  r.note = j.value("note", std::string());
  r.preconditions = j.value("preconditions", std::string());
  return r;
}

inline Json to_json(const Certificate& c) {
  Json out{{"constant", c.constant}, {"group", c.group.spec()}, {"k", c.k}};
  if (c.exact())
    out["value"] = to_json(c.lower);
  else
    out["interval"] = Json::array({to_json(c.lower), to_json(c.upper)});
  out["witness"] = c.witness ? to_json(*c.witness) : Json();
  Json chain = Json::array();
  for (const auto& st : c.upper_chain) chain.push_back(to_json(st));
  out["upper_chain"] = std::move(chain);
  out["exhaustive"] = c.exhaustive;
  out["method"] = c.method;
  if (c.elapsed_ms) out["elapsed_ms"] = *c.elapsed_ms;
  return out;
}

inline Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.constant = j.at("constant").get<std::string>();
  c.group = parse_group(j.at("group").get<std::string>());
  c.k = j.at("k").get<Int>();
  if (j.contains("value")) {
    c.lower = c.upper = extended_from_json(j.at("value"));
  } else {
    const auto& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2) throw ParseError("interval must be [lower, upper]", 0);
    c.lower = extended_from_json(iv[0]);
    c.upper = extended_from_json(iv[1]);
  }
  if (j.contains("witness") && !j.at("witness").is_null()) c.witness = sequence_from_json(c.group, j.at("witness"));
  for (const auto& st : j.value("upper_chain", Json::array())) c.upper_chain.push_back(bound_report_from_json(st));
  c.exhaustive = j.value("exhaustive", false);
  c.method = j.value("method", std::string());
  if (j.contains("elapsed_ms")) c.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
  return c;
}

inline Json to_json(const StabilizationReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row.cert));
  Json out{{"group", r.group.spec()}, {"k_max", r.k_max}, {"rows", std::move(rows)}};
  out["D_0"] = r.d0 ? Json(*r.d0) : Json();
  out["k_D"] = r.kd ? Json(*r.kd) : Json();
  out["certified"] = r.certified;
  out["rule"] = r.rule;
  out["note"] = r.note;
  return out;
}

inline Json to_json(const Factorization& f) {
  Json arr = Json::array();
  for (const auto& [atom, m] : f.atoms()) arr.push_back({{"atom", format_sequence(atom)}, {"mult", m}});
  return arr;
}

inline Factorization factorization_from_json(const Group& g, const Json& j) {
  Factorization f(g);
  for (const auto& x : j) f.add(parse_sequence(g, x.at("atom").get<std::string>()), x.value("mult", 1u));
  return f;
}

inline Json to_json(const PaigeMap& m) {
  Json arr = Json::array();
  for (const auto& [a, b] : m) arr.push_back(Json::array({a.coords, b.coords}));
  return arr;
}

inline PaigeMap paige_from_json(const Json& j) {
  PaigeMap m;
  for (const auto& x : j) m.emplace_back(GroupElement{x.at(0).get<std::vector<Int>>()}, GroupElement{x.at(1).get<std::vector<Int>>()});
  return m;
}

}  // namespace zsk
