#include "zsk/io.hpp"

#include <gtest/gtest.h>

using namespace zsk;

TEST(Io, ExtendedRoundTrip) {
  for (Extended e : {Extended(0), Extended(-7), Extended(INT64_MAX), Extended::infinity(),
                     Extended(pow_big(BigInt(16), 25)), Extended(-pow_big(BigInt(10), 30))}) {
    Json j = to_json(e);
    EXPECT_EQ(extended_from_json(Json::parse(j.dump())), e) << j.dump();
  }
  EXPECT_EQ(to_json(Extended(42)).dump(), "42");
  EXPECT_EQ(to_json(Extended::infinity()).dump(), "\"inf\"");
  EXPECT_EQ(to_json(Extended(pow_big(BigInt(16), 25))).dump(), "\"1267650600228229401496703205376\"");
  EXPECT_THROW(extended_from_json(Json("12x")), ParseError);
  EXPECT_THROW(extended_from_json(Json(1.5)), ParseError);
}

TEST(Io, SequenceRoundTrip) {
  Group g = parse_group("2^2,4");
  Sequence s = parse_sequence(g, "1,0,0^3; 0,1,3; 1,1,2^2");
  Json j = to_json(s);
  EXPECT_EQ(j.dump(), R"([{"coords":[0,1,3],"mult":1},{"coords":[1,0,0],"mult":3},{"coords":[1,1,2],"mult":2}])");
  EXPECT_EQ(sequence_from_json(g, j), s);
  EXPECT_THROW(sequence_from_json(g, Json::parse(R"([{"coords":[0,2,0],"mult":1}])")), UsageError);
  EXPECT_THROW(sequence_from_json(g, Json::parse(R"([{"coords":[0,1,0],"mult":0}])")), ParseError);
  EXPECT_THROW(sequence_from_json(g, Json::parse(R"({"coords":[0,1,0]})")), ParseError);
}

TEST(Io, BoundReportRoundTrip) {
  Group g = elementary(2, 4);
  std::vector<BoundReport> reps{kd_trivial_ub(3, 5), remark_ub(g, 3, 2, Extended(16), 5), delta_upper(elementary(2, 3)),
                                kD_crude(cyclic(16)), prop_bas_step(8, 23, 3, Extended(17))};
  for (const auto& e : e2g_bounds(5, 2)) reps.push_back(e);
  for (const auto& r : reps) {
    Json j = to_json(r);
    BoundReport back = bound_report_from_json(Json::parse(j.dump()));
    EXPECT_EQ(to_json(back).dump(), j.dump());
    EXPECT_EQ(reevaluate(back), r.value) << r.rule_id;
  }
}

TEST(Io, CertificatesRoundTripAndReverify) {
  Session s;
  std::vector<Certificate> certs{s.davenport(elementary(2, 4)), s.eta(elementary(2, 3)),
                                 s.s_le(elementary(2, 3), 1), s.certify_dk(elementary(2, 5), 8),
                                 s.certify_dk(elementary(2, 5), 10), s.certify_dk(elementary(3, 3), 2),
                                 s.davenport_k(cyclic(6), 3)};
  for (const auto& c : certs) {
    std::string text = to_json(c).dump(2);
    Certificate back = certificate_from_json(Json::parse(text));
    EXPECT_EQ(to_json(back).dump(2), text);
    EXPECT_TRUE(verify_certificate(back).ok) << text;
  }
}

TEST(Io, IntervalsSerializeAsPairs) {
  SearchOptions opt;
  opt.budget = Budget{20};
  Session s(opt);
  Certificate c = s.davenport(elementary(3, 3));
  ASSERT_FALSE(c.exact());
  Json j = to_json(c);
  EXPECT_FALSE(j.contains("value"));
  ASSERT_TRUE(j.at("interval").is_array());
  EXPECT_EQ(certificate_from_json(j).upper, c.upper);
}

TEST(Io, DeterministicOutput) {
  auto run = [] {
    Session s;
    Json out = Json::array();
    out.push_back(to_json(s.certify_dk(elementary(2, 4), 3)));
    out.push_back(to_json(s.stabilization(elementary(2, 3), 4)));
    out.push_back(to_json(s.eta(elementary(3, 2))));
    return out.dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(Io, TimingOnlyWhenSet) {
  Session s;
  Certificate c = s.davenport(cyclic(5));
  EXPECT_FALSE(to_json(c).contains("elapsed_ms"));
  c.elapsed_ms = 3;
  EXPECT_EQ(to_json(c).at("elapsed_ms"), 3);
  EXPECT_EQ(certificate_from_json(to_json(c)).elapsed_ms, 3);
}

TEST(Io, ConstructionsRoundTrip) {
  Factorization f = maxfull_factorization(4);
  Json jf = to_json(f);
  EXPECT_EQ(jf.size(), f.atoms().size());
  Factorization back = factorization_from_json(f.group(), jf);
  EXPECT_EQ(back.length(), 5u);
  EXPECT_TRUE(verify_maxfull(back, 4));

  PaigeMap m = paige_bijection(5);
  PaigeMap pm = paige_from_json(Json::parse(to_json(m).dump()));
  EXPECT_EQ(pm, m);
  EXPECT_TRUE(verify_paige(pm, 5));
}

TEST(Io, TamperedJsonFailsVerification) {
  Session s;
  Json j = to_json(s.certify_dk(elementary(2, 5), 9));
  j["value"] = 29;
  EXPECT_FALSE(verify_certificate(certificate_from_json(j)).ok);

  j = to_json(s.certify_dk(elementary(2, 5), 9));
  j["upper_chain"][0]["inputs"][0]["value"] = 1;
  EXPECT_FALSE(verify_certificate(certificate_from_json(j)).ok);
}
