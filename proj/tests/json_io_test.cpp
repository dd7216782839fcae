#include <gtest/gtest.h>

#include <json.hpp>

#include "galmod/json_io.hpp"

namespace galmod {
namespace {

using Json = nlohmann::json;

SynthParams params(unsigned p, unsigned n, std::optional<Level> m, std::vector<std::size_t> e) {
  SynthParams out;
  out.p = p;
  out.n = n;
  out.m = m;
  out.e = std::move(e);
  out.xi_in_F = m.has_value();
  if (p == 2 && n == 1 && out.xi_in_F) out.minus_one_is_norm = true;
  return out;
}

// Expects a SchemaError whose message contains `needle`.
void expect_schema_error(const std::string& text, const std::string& needle) {
  try {
    (void)datum_from_json(text);
    ADD_FAILURE() << "accepted: " << needle;
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(JsonIo, DatumRoundTrip) {
  for (const auto& sp : {params(3, 2, Level(1), {1, 2, 1}), params(2, 1, Level::neg_infinity(), {1, 1}),
                         params(5, 1, std::nullopt, {2, 1})}) {
    const GaloisDatum d = synthesize(sp);
    const std::string text = datum_to_json(d);
    EXPECT_EQ(datum_from_json(text), d);
    EXPECT_EQ(datum_to_json(datum_from_json(text)), text);
  }
}

TEST(JsonIo, LocalDatumRoundTrip) {
  const GaloisDatum d = build_datum(make_tower(3, TowerKind::cyclotomic, 1, 60));
  EXPECT_EQ(datum_from_json(datum_to_json(d)), d);
}

TEST(JsonIo, DecompositionRoundTrip) {
  const GaloisDatum d = synthesize(params(3, 2, Level(0), {1, 1, 1}));
  const Decomposition dec = decompose(d);
  EXPECT_EQ(decomposition_from_json(decomposition_to_json(dec), 3), dec);

  const Decomposition t1 = decompose(synthesize(params(3, 1, std::nullopt, {1, 1})));
  EXPECT_EQ(decomposition_from_json(decomposition_to_json(t1), 3), t1);
}

TEST(JsonIo, ParamsAndSidecarRoundTrip) {
  SynthParams sp = params(2, 1, Level::neg_infinity(), {1, 2});
  sp.shuffle_seed = 17;
  EXPECT_EQ(params_from_json(params_to_json(sp)), sp);
  const SynthExpectation want = expected_answer(sp);
  EXPECT_EQ(sidecar_expectation_from_json(sidecar_to_json(sp, want)), want);
}

TEST(JsonIo, TowerSpecAndModuleRoundTrip) {
  const TowerSpec spec{3, TowerKind::cyclotomic, 2, 62};
  const TowerSpec back = tower_spec_from_json(tower_spec_to_json(spec));
  EXPECT_EQ(back.p, spec.p);
  EXPECT_EQ(back.kind, spec.kind);
  EXPECT_EQ(back.n, spec.n);
  EXPECT_EQ(back.precision, spec.precision);

  const GModule m = jordan_module(3, 1, {3, 1});
  EXPECT_EQ(module_from_json(module_to_json(m)).sigma(), m.sigma());
}

TEST(JsonIo, LevelLabels) {
  EXPECT_EQ(level_label(std::nullopt), "n/a");
  EXPECT_EQ(level_label(Level::neg_infinity()), "-inf");
  EXPECT_EQ(level_label(Level(2)), "2");
}

TEST(JsonIo, ReportAndAcceptanceSerialize) {
  const GaloisDatum d = synthesize(params(3, 1, Level(0), {1, 1}));
  const Json r = Json::parse(report_to_json(verify(decompose(d), d)));
  EXPECT_TRUE(r.contains("clauses"));

  CriterionResult c;
  c.id = 3;
  c.name = "x";
  c.pass = true;
  const Json a = Json::parse(acceptance_to_json({c}));
  EXPECT_TRUE(a.at("all_pass").get<bool>());
  EXPECT_EQ(a.at("criteria").at(0).at("id").get<int>(), 3);
}

TEST(JsonIoErrors, MalformedTextNamesTheByte) {
  expect_schema_error("{\"p\": 3,", "byte");
}

TEST(JsonIoErrors, FieldPaths) {
  const Json good = Json::parse(datum_to_json(synthesize(params(3, 2, Level(1), {1, 1, 1}))));

  Json bad = good;
  bad["p"] = 4;
  expect_schema_error(bad.dump(), "$.p");

  bad = good;
  bad.erase("sigma");
  expect_schema_error(bad.dump(), "sigma");

  bad = good;
  bad["levels"].erase(2);
  expect_schema_error(bad.dump(), "$.levels");

  bad = good;
  bad["levels"][1]["eps"] = "nope";
  expect_schema_error(bad.dump(), "$.levels[1].eps");

  bad = good;
  bad["levels"][1]["eps"][0][0] = 7;
  expect_schema_error(bad.dump(), "$.levels[1].eps");

  bad = good;
  bad["levels"][2]["inter_norm"]["x"] = bad["levels"][2]["inter_norm"]["0"];
  expect_schema_error(bad.dump(), "$.levels[2].inter_norm.x");

  bad = good;
  bad["sigma"][0][0] = 2;
  expect_schema_error(bad.dump(), "$.sigma");
}

TEST(JsonIoErrors, SchemaErrorIsInvalidInput) {
  EXPECT_THROW((void)params_from_json("[]"), InvalidInput);
  EXPECT_THROW((void)tower_spec_from_json(R"({"p":3,"kind":"eisenstein","n":1,"precision":40})"),
               InvalidInput);
  EXPECT_THROW((void)decomposition_from_json(R"({"m":"seven","x_generator":null,"y_generators":[]})", 3),
               SchemaError);
}

}  // namespace
}  // namespace galmod
