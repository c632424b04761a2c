#include <gtest/gtest.h>

#include "modglue/errors.hpp"
#include "modglue/gen.hpp"
#include "modglue/io.hpp"

using namespace modglue;

TEST(Io, FnvReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(file_fingerprint("a"), file_fingerprint("a"));
  EXPECT_NE(file_fingerprint("a"), file_fingerprint("b"));
}

TEST(Io, MatrixRoundTrip) {
  SplitMix64 rng(1);
  const CMatrix M = random_gaussian(rng, 3, 2);
  EXPECT_EQ(matrix_from_json(matrix_to_json(M)), M);
  const auto j = matrix_to_json(M);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[1][0][0].get<double>(), M(1, 0).real());
  EXPECT_EQ(j[1][0][1].get<double>(), M(1, 0).imag());
}

TEST(Io, DocumentRoundTripIsByteIdentical) {
  for (auto mode : {TwistMode::coherent, TwistMode::random_unitary}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      GenConfig cfg;
      cfg.seed = seed;
      cfg.twist_mode = mode;
      const auto text = serialize_document(instance_document(random_instance(cfg)));
      const auto doc = parse_document(text);
      ASSERT_TRUE(doc.gluing.has_value());
      EXPECT_EQ(serialize_document(doc), text);
    }
  }
  const auto text = serialize_document(instance_document(phase_instance({1.0, 1.0, -1.0})));
  EXPECT_EQ(serialize_document(parse_document(text)), text);
}

TEST(Io, BimoduleRoundTrip) {
  SplitMix64 rng(2);
  const auto A = random_algebra(rng, 3, 3);
  const auto L = random_partner_algebra(rng, A, 3);
  const auto C = random_cover(rng, A.prim_size(), 3);
  Document doc;
  doc.cover = C;
  doc.algebra = A;
  doc.bimodule = random_bimodule(rng, L, A);
  doc.bimodule_gluing = random_bimodule_datum(rng, L, A, C, true);
  const auto text = serialize_document(doc);
  const auto back = parse_document(text);
  ASSERT_TRUE(back.bimodule && back.bimodule_gluing);
  EXPECT_EQ(serialize_document(back), text);
}

TEST(Io, MalformedInputRaisesParseError) {
  EXPECT_THROW(parse_document("{"), ParseError);
  EXPECT_THROW(parse_document("[1, 2]"), ParseError);
  EXPECT_THROW(parse_document(R"({"algebra": {"blocks": "two"}})"), ParseError);
  EXPECT_THROW(matrix_from_json(Json::parse("[[[1, 0]], [[1, 0], [2, 0]]]")), ParseError);
  EXPECT_THROW(complex_from_json(Json::parse("[1]")), ParseError);
}

TEST(Io, GluingNeedsAlgebraAndCover) {
  const auto text = serialize_document(instance_document(phase_instance({1.0, 1.0, -1.0})));
  auto j = Json::parse(text);
  j.erase("cover");
  EXPECT_THROW(parse_document(j.dump()), ParseError);
}

TEST(Io, ReportPassLogic) {
  EXPECT_TRUE(make_report("c", 1e-13, 1e-12, "f", 0.1).pass);
  EXPECT_FALSE(make_report("c", 1e-11, 1e-12, "f", 0.1).pass);
  EXPECT_FALSE(make_report("c", 0.0, 1e-12, "f", 0.1, Json::object(), false).pass);
  const auto line = report_line(make_report("glue", 0.0, 1e-12, "abc", 0.5));
  const auto j = Json::parse(line);
  EXPECT_EQ(j.at("check"), "glue");
  EXPECT_EQ(j.at("pass"), true);
  EXPECT_EQ(j.at("fingerprint"), "abc");
}
