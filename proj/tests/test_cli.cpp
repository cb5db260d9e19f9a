#include "zsk/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace zsk;

namespace {

struct Result {
  int code;
  std::string out, err;
};

std::filesystem::path scratch() {
  static std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / ("zsk_cli_test_" + std::to_string(::getpid()));
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

Result cli(std::vector<std::string> args, bool cached = false) {
  if (!cached) args.push_back("--no-cache");
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, ComputeDkValue) {
  auto r = cli({"compute", "dk", "--group", "2^4", "--k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("value"), 8);
  EXPECT_EQ(j.at("constant"), "D_k");
  EXPECT_EQ(j.at("group"), "2,2,2,2");
  EXPECT_FALSE(j.contains("elapsed_ms"));
}

TEST(Cli, ComputeOtherConstants) {
  EXPECT_EQ(Json::parse(cli({"compute", "davenport", "--group", "3^3"}).out).at("value"), 7);
  EXPECT_EQ(Json::parse(cli({"compute", "eta", "--group", "2^4"}).out).at("value"), 16);
  EXPECT_EQ(Json::parse(cli({"compute", "sle", "--group", "2^5", "--k", "3"}).out).at("value"), 17);
  auto inf = cli({"compute", "sle", "--group", "2^3", "--k", "1"});
  EXPECT_EQ(inf.code, 0);
  EXPECT_EQ(Json::parse(inf.out).at("value"), "inf");
  auto first = Json::parse(cli({"compute", "dk", "--group", "5", "--k", "3", "--search-first"}).out);
  EXPECT_EQ(first.at("value"), 15);
}

TEST(Cli, BoundAllBracketsD2OfRankFive) {
  auto r = cli({"bound", "all", "--group", "2^5", "--k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  Int lower = 0, upper = INT64_MAX;
  for (const auto& rep : Json::parse(r.out)) {
    if (rep.at("target") != "D_2") continue;
    Int v = rep.at("value").get<Int>();
    if (rep.at("direction") == "lower") lower = std::max(lower, v);
    else upper = std::min(upper, v);
  }
  EXPECT_EQ(lower, 9);
  EXPECT_EQ(upper, 10);
}

TEST(Cli, BoundAllTakesSuppliedInputs) {
  auto path = scratch() / "inputs.json";
  std::ofstream(path) << R"({"D": 6, "s_le": {"4": 9}, "D_prev_upper": 6})";
  auto r = cli({"bound", "all", "--group", "2^5", "--k", "2", "--inputs", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  bool saw = false;
  for (const auto& rep : Json::parse(r.out))
    if (rep.at("rule_id") == "prop_bas_step" && rep.at("inputs")[1].at("value") == 4) {
      saw = true;
      EXPECT_EQ(rep.at("inputs")[2].at("value"), 9);
      EXPECT_EQ(rep.at("inputs")[2].at("provenance"), "supplied");
      EXPECT_EQ(rep.at("value"), 10);
    }
  EXPECT_TRUE(saw);
  std::ofstream(path) << "{ not json";
  EXPECT_EQ(cli({"bound", "all", "--group", "2^5", "--k", "2", "--inputs", path.string()}).code, 1);
}

TEST(Cli, Constructions) {
  auto m = cli({"construct", "maxfull", "--rank", "4", "--verify"});
  ASSERT_EQ(m.code, 0) << m.err;
  Json jm = Json::parse(m.out);
  EXPECT_EQ(jm.at("length"), 5);
  EXPECT_EQ(jm.at("verified"), true);

  auto p = cli({"construct", "paige", "--rank", "7", "--verify"});
  ASSERT_EQ(p.code, 0);
  Json jp = Json::parse(p.out);
  EXPECT_EQ(jp.at("map").size(), 128u);
  EXPECT_EQ(jp.at("verified"), true);

  auto e = cli({"construct", "elb-witness", "--group", "3^3", "--s", "2", "--t", "1", "--k", "2", "--verify"});
  ASSERT_EQ(e.code, 0) << e.err;
  Json je = Json::parse(e.out);
  EXPECT_EQ(je.at("length"), 9);
  EXPECT_EQ(je.at("lower_bound"), 10);
  EXPECT_EQ(je.at("verified"), true);

  EXPECT_EQ(cli({"construct", "elb-witness", "--group", "2^2", "--s", "3", "--k", "2"}).code, 1);
  EXPECT_EQ(cli({"construct", "paige", "--rank", "1"}).code, 1);
}

TEST(Cli, TableCsv) {
  auto r = cli({"table", "dk", "--group", "2^3", "--kmax", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "dk", "dk_minus_kexp", "step", "certified"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "4", "2", "", "yes"}));
  EXPECT_EQ(rows[2][1], "7");
  EXPECT_EQ(rows[2][3], "3");
  EXPECT_EQ(rows[3][1], "9");
  EXPECT_EQ(rows[3][3], "2");
  EXPECT_EQ(rows[4][1], "11");
  EXPECT_EQ(rows[4][3], "2");
  EXPECT_NE(r.err.find("D_0=3 k_D=2"), std::string::npos);
}

TEST(Cli, TableRankFive) {
  auto r = cli({"table", "dk", "--group", "2^5", "--kmax", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  std::vector<std::string> want{"6", "10", "13", "16", "19", "21", "23", "26", "28", "31", "33", "35"};
  ASSERT_EQ(rows.size(), want.size() + 1);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(rows[i + 1][1], want[i]) << "k=" << i + 1;
  EXPECT_EQ(rows[11][3], "2");
  EXPECT_EQ(rows[12][3], "2");
}

TEST(Cli, TableTrivialGroup) {
  auto r = cli({"table", "dk", "--group", "1", "--kmax", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(rows[static_cast<std::size_t>(k)][1], std::to_string(k));
}

TEST(Cli, StabilizeJson) {
  auto r = cli({"compute", "stabilize", "--group", "2^4", "--kmax", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("D_0"), 5);
  EXPECT_EQ(j.at("k_D"), 3);
  EXPECT_EQ(j.at("certified"), true);
  EXPECT_EQ(j.at("rows").size(), 5u);
}

TEST(Cli, IntervalExitCode) {
  auto r = cli({"compute", "davenport", "--group", "3^3", "--budget", "10"});
  EXPECT_EQ(r.code, 2);
  Json j = Json::parse(r.out);
  EXPECT_TRUE(j.contains("interval"));
}

TEST(Cli, UsageErrors) {
  auto bad = cli({"compute", "davenport", "--group", "2^x"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("offset 2"), std::string::npos) << bad.err;
  EXPECT_EQ(cli({"compute", "dk", "--group", "2^3"}).code, 1);
  EXPECT_EQ(cli({"compute", "dk", "--group", "2^3", "--k", "0"}).code, 1);
  EXPECT_EQ(cli({"compute", "dk", "--group", "2^3", "--k", "2", "--format", "xml"}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"compute", "davenport", "--group", "2^3", "--budget", "0"}).code, 1);
  EXPECT_EQ(cli({"verify", "--cert", (scratch() / "missing.json").string()}).code, 1);
}

TEST(Cli, VerifyRoundTrip) {
  auto r = cli({"compute", "dk", "--group", "2^5", "--k", "9"});
  ASSERT_EQ(r.code, 0);
  auto path = scratch() / "d9.json";
  std::ofstream(path) << r.out;
  auto v = cli({"verify", "--cert", path.string()});
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_EQ(Json::parse(v.out).at("ok"), true);

  Json j = Json::parse(r.out);
  j["value"] = 30;
  std::ofstream(path) << j.dump();
  auto bad = cli({"verify", "--cert", path.string(), "--format", "text"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("FAILED"), std::string::npos);
}

TEST(Cli, DeterministicAndCached) {
  auto dir = scratch() / "cache";
  std::vector<std::string> args{"compute", "dk", "--group", "2^4", "--k", "3", "--cache-dir", dir.string()};
  auto a = cli(args, true);
  ASSERT_EQ(a.code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "certs" / "D_k_2-2-2-2_3.json"));
  auto b = cli(args, true);
  EXPECT_EQ(a.out, b.out);
  auto c = cli({"compute", "dk", "--group", "2^4", "--k", "3"});
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, CacheDirFromEnvironment) {
  auto dir = scratch() / "envcache";
  ::setenv("ZS_CACHE_DIR", dir.string().c_str(), 1);
  auto r = cli({"compute", "davenport", "--group", "2^3"}, true);
  ::unsetenv("ZS_CACHE_DIR");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "certs" / "D_2-2-2_1.json"));
}

TEST(Cli, TimingFlag) {
  auto r = cli({"compute", "davenport", "--group", "2^3", "--timing"});
  EXPECT_TRUE(Json::parse(r.out).contains("elapsed_ms"));
}

TEST(Cli, OtherFormats) {
  auto g = cli({"group", "info", "--group", "2^2,4", "--format", "json"});
  ASSERT_EQ(g.code, 0);
  Json j = Json::parse(g.out);
  EXPECT_EQ(j.at("D_star"), 6);
  EXPECT_EQ(j.at("minus_group"), "2,2");

  auto t = cli({"compute", "dk", "--group", "2^4", "--k", "2", "--format", "text"});
  EXPECT_NE(t.out.find("D_2(C_2^4) = 8"), std::string::npos) << t.out;

  auto c = cli({"compute", "sle", "--group", "2^3", "--k", "1", "--format", "csv"});
  auto rows = csv_rows(c.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NE(c.out.find("s_le,\"2,2,2\",1,inf,inf"), std::string::npos) << c.out;
}
