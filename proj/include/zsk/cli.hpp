#pragma once

#include "zsk/atom_cache.hpp"
#include "zsk/io.hpp"
#include "zsk/session.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace zsk {

struct RunConfig {
  std::string command;     // group, compute, bound, construct, table, verify
  std::string subcommand;  // info, davenport, dk, ..., all, elb-witness, ...
  std::string group;
  Int k = 0;
  Int k_max = 0;
  std::uint64_t budget = SearchOptions{}.budget.nodes;
  std::size_t workers = 1;
  std::string cache_dir;  // empty: ZS_CACHE_DIR or the default location
  bool no_cache = false;
  std::string format = "json";
  bool verify = false;
  bool timing = false;
  bool search_first = false;
  std::size_t rank = 0;
  Int s = 0, t = 0;
  std::string inputs_file;
  std::string cert_file;
  std::optional<Int> external_d0;
};

namespace detail {

inline constexpr int kExitValue = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInterval = 2;

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string cert_name(const Certificate& c) {
  if (c.constant == "D") return "D(" + c.group.pretty() + ")";
  if (c.constant == "eta") return "eta(" + c.group.pretty() + ")";
  if (c.constant == "s_le") return "s_<=" + std::to_string(c.k) + "(" + c.group.pretty() + ")";
  return "D_" + std::to_string(c.k) + "(" + c.group.pretty() + ")";
}

inline std::string value_text(const Certificate& c) {
  return c.exact() ? c.lower.str() : "[" + c.lower.str() + ", " + c.upper.str() + "]";
}

inline std::string report_text(const BoundReport& r) {
  std::string s = r.rule_id + ": " + r.target + (r.direction == Direction::kUpper ? " <= " : " >= ") + r.value.str();
  std::string args;
  for (const auto& in : r.inputs) {
    if (!args.empty()) args += ", ";
    args += in.name + "=" + in.value.str();
    if (!in.source.empty()) args += " <" + in.source + ">";
  }
  if (!args.empty()) s += "  (" + args + ")";
  if (!r.note.empty()) s += "  [" + r.note + "]";
  return s;
}

inline void emit_certificate(const Certificate& c, const std::string& fmt, std::ostream& out) {
  if (fmt == "json") {
    out << to_json(c).dump(2) << "\n";
  } else if (fmt == "csv") {
    out << "constant,group,k,lower,upper,exact,exhaustive,method\n";
    out << c.constant << "," << csv_field(c.group.spec()) << "," << c.k << "," << c.lower.str() << "," << c.upper.str()
        << "," << (c.exact() ? "yes" : "no") << "," << (c.exhaustive ? "yes" : "no") << "," << csv_field(c.method)
        << "\n";
  } else {
    out << cert_name(c) << " = " << value_text(c) << "\n";
    out << "method: " << c.method << (c.exhaustive ? " (exhaustive)" : "") << "\n";
    if (c.witness) out << "witness (length " << c.witness->length() << "): " << format_sequence(*c.witness) << "\n";
    if (!c.upper_chain.empty()) {
      out << "upper chain:\n";
      for (std::size_t i = 0; i < c.upper_chain.size(); ++i)
        out << "  [" << i << "] " << report_text(c.upper_chain[i]) << "\n";
    }
    if (c.elapsed_ms) out << "elapsed: " << *c.elapsed_ms << " ms\n";
  }
}

inline void emit_table(const StabilizationReport& r, const std::string& fmt, std::ostream& out) {
  Int e = r.group.exponent();
  if (fmt == "json") {
    out << to_json(r).dump(2) << "\n";
    return;
  }
  auto dk = [](const Certificate& c) { return c.exact() ? c.lower.str() : c.lower.str() + ":" + c.upper.str(); };
  if (fmt == "csv") {
    out << "k,dk,dk_minus_kexp,step,certified\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const auto& c = r.rows[i].cert;
      Int k = r.rows[i].k;
      out << k << "," << dk(c) << ",";
      if (c.exact()) out << c.lower.to_int64() - k * e;
      out << ",";
      if (i > 0 && c.exact() && r.rows[i - 1].cert.exact())
        out << c.lower.to_int64() - r.rows[i - 1].cert.lower.to_int64();
      out << "," << (c.exact() ? "yes" : "no") << "\n";
    }
    return;
  }
  out << "D_k(" << r.group.pretty() << "), exp = " << e << "\n";
  out << "  k  D_k  D_k-k*exp  step  method\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& c = r.rows[i].cert;
    std::ostringstream line;
    line << "  " << r.rows[i].k << "  " << dk(c) << "  ";
    line << (c.exact() ? std::to_string(c.lower.to_int64() - r.rows[i].k * e) : "?") << "  ";
    if (i > 0 && c.exact() && r.rows[i - 1].cert.exact())
      line << c.lower.to_int64() - r.rows[i - 1].cert.lower.to_int64();
    else
      line << "-";
    line << "  " << c.method;
    out << line.str() << "\n";
  }
  out << "D_0 = " << (r.d0 ? std::to_string(*r.d0) : "?") << ", k_D = " << (r.kd ? std::to_string(*r.kd) : "?")
      << (r.certified ? " (certified by rule " + r.rule + ")" : " (observed only)") << "\n";
  if (!r.note.empty()) out << r.note << "\n";
}

inline SuppliedInputs read_inputs(const std::string& path) {
  SuppliedInputs in;
  if (path.empty()) return in;
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read inputs file " + path);
  Json j;
  try {
    j = Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("inputs file: ") + e.what(), e.byte);
  }
  auto get = [&](const char* key, std::optional<Int>& slot) {
    if (j.contains(key)) slot = j.at(key).get<Int>();
  };
  get("D", in.d);
  get("eta", in.eta);
  get("D_minus", in.d_minus);
  get("D_prev_upper", in.d_prev_upper);
  get("D_prev_lower", in.d_prev_lower);
  get("atoms", in.atoms);
  if (j.contains("s_le"))
    for (const auto& [key, v] : j.at("s_le").items()) in.s_le[std::stoll(key)] = extended_from_json(v);
  return in;
}

inline std::filesystem::path cert_cache_file(const std::filesystem::path& dir, const std::string& constant,
                                             const Group& g, Int k) {
  std::string name = constant + "_" + (g.is_trivial() ? std::string("1") : g.spec()) + "_" + std::to_string(k) + ".json";
  for (auto& c : name)
    if (c == ',') c = '-';
  return dir / "certs" / name;
}

inline std::optional<Certificate> cache_load(const std::optional<std::filesystem::path>& f) {
  if (!f || !std::filesystem::exists(*f)) return std::nullopt;
  try {
    std::ifstream is(*f);
    return certificate_from_json(Json::parse(is));
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

inline void cache_store(const std::optional<std::filesystem::path>& f, Certificate c) {
  if (!f || !c.exact()) return;
  c.elapsed_ms.reset();
  std::filesystem::create_directories(f->parent_path());
  auto tmp = *f;
  tmp += ".tmp";
  {
    std::ofstream os(tmp);
    os << to_json(c).dump(2) << "\n";
  }
  std::filesystem::rename(tmp, *f);
}

inline int run_config(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "text")
    throw UsageError("--format must be json, csv or text");
  if (cfg.budget == 0) throw UsageError("--budget must be positive");
  if (cfg.workers == 0) throw UsageError("--workers must be positive");
  SearchOptions opt;
  opt.budget = Budget{cfg.budget};
  opt.workers = cfg.workers;
  Session session(opt);
  auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  };
  std::optional<std::filesystem::path> cache_root;
  if (!cfg.no_cache) cache_root = cfg.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cfg.cache_dir);
  auto need_group = [&] {
    if (cfg.group.empty()) throw UsageError("--group is required");
    return parse_group(cfg.group);
  };

  if (cfg.command == "group") {
    Group g = need_group();
    GroupProfile p = profile(g);
    Json j{{"group", g.spec()},
           {"pretty", g.pretty()},
           {"order", g.order()},
           {"exponent", g.exponent()},
           {"rank", g.rank()},
           {"invariant_factors", g.invariant_factors()},
           {"D_star", p.d_star},
           {"minus_group", minus_group(g).spec()}};
    if (cfg.format == "json") {
      out << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
      out << "group,order,exponent,rank,D_star,minus_group\n"
          << csv_field(g.spec()) << "," << g.order() << "," << g.exponent() << "," << g.rank() << "," << p.d_star
          << "," << csv_field(minus_group(g).spec()) << "\n";
    } else {
      out << g.pretty() << "\n  order " << g.order() << ", exponent " << g.exponent() << ", rank " << g.rank()
          << "\n  invariant factors " << g.spec() << "\n  D*(G) = " << p.d_star << "\n  G^- = "
          << minus_group(g).pretty() << "\n";
    }
    return kExitValue;
  }

  if (cfg.command == "compute") {
    Group g = need_group();
    if (cfg.subcommand == "stabilize") {
      if (cfg.k_max < 1) throw UsageError("--kmax is required and must be >= 1");
      StabilizationReport r = session.stabilization(g, cfg.k_max, cfg.external_d0);
      emit_table(r, cfg.format, out);
      for (const auto& row : r.rows)
        if (!row.cert.exact()) return kExitInterval;
      return kExitValue;
    }
    std::string constant = cfg.subcommand == "davenport" ? "D"
                           : cfg.subcommand == "dk"      ? "D_k"
                           : cfg.subcommand == "sle"     ? "s_le"
                                                         : "eta";
    Int k = cfg.k;
    if (constant == "D") k = 1;
    if (constant == "eta") k = g.exponent();
    if ((constant == "D_k" || constant == "s_le") && k < 1) throw UsageError("--k is required and must be >= 1");
    std::optional<std::filesystem::path> cf;
    if (cache_root) cf = cert_cache_file(*cache_root, constant, g, k);
    std::optional<Certificate> c = cache_load(cf);
    if (!c) {
      if (constant == "D") c = session.davenport(g);
      else if (constant == "eta") c = session.eta(g);
      else if (constant == "s_le") c = session.s_le(g, k);
      else c = cfg.search_first ? session.davenport_k(g, k) : session.certify_dk(g, k);
      cache_store(cf, *c);
    }
    if (cfg.timing) c->elapsed_ms = elapsed();
    emit_certificate(*c, cfg.format, out);
    return c->exact() ? kExitValue : kExitInterval;
  }

  if (cfg.command == "bound") {
    Group g = need_group();
    if (cfg.k < 1) throw UsageError("--k is required and must be >= 1");
    auto reps = applicable_bounds(session, g, cfg.k, read_inputs(cfg.inputs_file));
    if (cfg.format == "json") {
      Json arr = Json::array();
      for (const auto& r : reps) arr.push_back(to_json(r));
      out << arr.dump(2) << "\n";
    } else if (cfg.format == "csv") {
      out << "rule_id,target,direction,value\n";
      for (const auto& r : reps)
        out << r.rule_id << "," << csv_field(r.target) << "," << to_string(r.direction) << "," << r.value.str() << "\n";
    } else {
      for (const auto& r : reps) out << report_text(r) << "\n";
    }
    auto bad = check_consistency(reps);
    for (const auto& v : bad)
      err << "inconsistent bounds on " << v.target << ": " << v.lower.rule_id << " gives >= " << v.lower.value.str()
          << " but " << v.upper.rule_id << " gives <= " << v.upper.value.str() << "\n";
    return bad.empty() ? kExitValue : kExitUsage;
  }

  if (cfg.command == "construct") {
    Json j;
    bool ok = true;
    std::string text;
    if (cfg.subcommand == "elb-witness") {
      Group g = need_group();
      Sequence w = elb_witness(g, cfg.s, cfg.t, cfg.k);
      j = {{"group", g.spec()}, {"s", cfg.s}, {"t", cfg.t}, {"k", cfg.k}, {"length", w.length()},
           {"lower_bound", static_cast<Int>(w.length()) + 1}, {"witness", to_json(w)}};
      text = "elb witness, length " + std::to_string(w.length()) + " (D_" + std::to_string(cfg.k) + " >= " +
             std::to_string(w.length() + 1) + "): " + format_sequence(w);
      if (cfg.verify) {
        try {
          ok = verify_elb_witness(w, cfg.k, PackingOptions{opt.budget, opt.cache_limit});
          j["verified"] = ok;
        } catch (const BudgetExhausted&) {
          j["verified"] = nullptr;
          ok = false;
        }
      }
    } else if (cfg.subcommand == "paige") {
      PaigeMap m = paige_bijection(cfg.rank);
      j = {{"rank", cfg.rank}, {"map", to_json(m)}};
      text = "paige bijection on C_2^" + std::to_string(cfg.rank) + ", " + std::to_string(m.size()) + " pairs";
      if (cfg.verify) j["verified"] = ok = verify_paige(m, cfg.rank);
    } else {
      Factorization f = maxfull_factorization(cfg.rank);
      j = {{"rank", cfg.rank}, {"length", f.length()}, {"factorization", to_json(f)}};
      text = "factorization of the full sequence over C_2^" + std::to_string(cfg.rank) + " into " +
             std::to_string(f.length()) + " atoms";
      if (cfg.verify) j["verified"] = ok = verify_maxfull(f, cfg.rank);
    }
    if (cfg.format == "text") {
      out << text << "\n";
      if (cfg.verify) out << (ok ? "verified" : "verification failed") << "\n";
    } else {
      out << j.dump(2) << "\n";
    }
    return ok ? kExitValue : kExitUsage;
  }

  if (cfg.command == "table") {
    Group g = need_group();
    if (cfg.k_max < 1) throw UsageError("--kmax is required and must be >= 1");
    StabilizationReport r = session.stabilization(g, cfg.k_max, cfg.external_d0);
    emit_table(r, cfg.format, out);
    if (cfg.format == "csv") {
      err << "D_0=" << (r.d0 ? std::to_string(*r.d0) : "?") << " k_D=" << (r.kd ? std::to_string(*r.kd) : "?")
          << " certified=" << (r.certified ? "rule " + r.rule : "no") << "\n";
    }
    for (const auto& row : r.rows)
      if (!row.cert.exact()) return kExitInterval;
    return kExitValue;
  }

  if (cfg.command == "verify") {
    if (cfg.cert_file.empty()) throw UsageError("--cert is required");
    std::ifstream is(cfg.cert_file);
    if (!is) throw UsageError("cannot read " + cfg.cert_file);
    Certificate c;
    try {
      c = certificate_from_json(Json::parse(is));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("certificate: ") + e.what(), 0);
    }
    VerifyResult v = verify_certificate(c, opt);
    if (cfg.format == "json") {
      out << Json{{"ok", v.ok}, {"problems", v.problems}, {"assumptions", v.assumptions}}.dump(2) << "\n";
    } else {
      out << (v.ok ? "ok" : "FAILED") << ": " << cert_name(c) << " = " << value_text(c) << "\n";
      for (const auto& p : v.problems) out << "  problem: " << p << "\n";
      for (const auto& a : v.assumptions) out << "  assumes: " << a << "\n";
    }
    return v.ok ? kExitValue : kExitUsage;
  }
  throw UsageError("unknown command");
}

}  // namespace detail

// Parses argv, runs the command, and returns the exit status: 0 for a value,
// 2 for a bracketing interval, 1 for usage errors and failed checks.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"k-wise Davenport constant toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* c, bool needs_group) {
    if (needs_group) c->add_option("--group", cfg.group, "group spec, e.g. 2^4 or 2^2,4")->required();
    c->add_option("--format", cfg.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    c->add_option("--budget", cfg.budget, "search node budget")->check(CLI::PositiveNumber);
    c->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
    c->add_option("--cache-dir", cfg.cache_dir, "result cache directory (default: $ZS_CACHE_DIR)");
    c->add_flag("--no-cache", cfg.no_cache, "do not read or write cached results");
  };

  auto* group = app.add_subcommand("group", "group information");
  group->require_subcommand(1);
  common(group->add_subcommand("info", "invariants of the group"), true);

  auto* compute = app.add_subcommand("compute", "exact invariants by search and bound chains");
  compute->require_subcommand(1);
  for (const char* name : {"davenport", "dk", "sle", "eta", "stabilize"}) {
    auto* c = compute->add_subcommand(name);
    common(c, true);
    c->add_flag("--timing", cfg.timing, "add elapsed_ms to the output");
    std::string n = name;
    if (n == "dk" || n == "sle") c->add_option("--k", cfg.k)->required();
    if (n == "dk") c->add_flag("--search-first", cfg.search_first, "search before trying the bound chain");
    if (n == "stabilize") {
      c->add_option("--kmax", cfg.k_max)->required();
      c->add_option("--external-d0", cfg.external_d0, "supplied bound D_k <= D0 + k exp(G)");
    }
  }

  auto* bound = app.add_subcommand("bound", "bound calculators");
  bound->require_subcommand(1);
  auto* ball = bound->add_subcommand("all", "every applicable bound for D_k");
  common(ball, true);
  ball->add_option("--k", cfg.k)->required();
  ball->add_option("--inputs", cfg.inputs_file, "JSON file with supplied values");

  auto* construct = app.add_subcommand("construct", "explicit constructions");
  construct->require_subcommand(1);
  auto* elb = construct->add_subcommand("elb-witness");
  common(elb, true);
  elb->add_option("--s", cfg.s)->required();
  elb->add_option("--t", cfg.t)->default_val(1);
  elb->add_option("--k", cfg.k)->required();
  elb->add_flag("--verify", cfg.verify);
  for (const char* name : {"paige", "maxfull"}) {
    auto* c = construct->add_subcommand(name);
    common(c, false);
    c->add_option("--rank", cfg.rank)->required();
    c->add_flag("--verify", cfg.verify);
  }

  auto* table = app.add_subcommand("table", "tables of D_k");
  table->require_subcommand(1);
  auto* tdk = table->add_subcommand("dk");
  common(tdk, true);
  tdk->add_option("--kmax", cfg.k_max)->required();
  tdk->add_option("--external-d0", cfg.external_d0, "supplied bound D_k <= D0 + k exp(G)");
  tdk->callback([&] {
    if (tdk->count("--format") == 0) cfg.format = "csv";
  });

  auto* verify = app.add_subcommand("verify", "re-check a certificate without searching");
  common(verify, false);
  verify->add_option("--cert", cfg.cert_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? detail::kExitValue : detail::kExitUsage;
  }
  for (auto* top : app.get_subcommands()) {
    cfg.command = top->get_name();
    for (auto* sub : top->get_subcommands()) cfg.subcommand = sub->get_name();
  }
  try {
    return detail::run_config(cfg, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const GuardExceeded& e) {
    err << "error: " << e.what() << "\n";
  }
  return detail::kExitUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"zsk"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace zsk
