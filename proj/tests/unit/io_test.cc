#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "json.hpp"
#include "mpclo/error.h"
#include "mpclo/io.h"
#include "mpclo/partition.h"
#include "mpclo/properties.h"
#include "test_support.h"

namespace mpclo::io {
namespace {

using nlohmann::json;

std::string parse_error(std::string_view text) {
  try {
    parse_problem(text, "t.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

void expect_same(const ProblemData& a, const ProblemData& b) {
  EXPECT_EQ(a.cone.dim(), b.cone.dim());
  EXPECT_EQ(a.b, b.b);
  EXPECT_EQ(a.c, b.c);
  EXPECT_EQ(a.d, b.d);
  ASSERT_EQ(a.A.rows(), b.A.rows());
  ASSERT_EQ(a.M.rows(), b.M.rows());
  for (std::size_t j = 0; j < a.q(); ++j) {
    for (std::size_t i = 0; i < a.m(); ++i) EXPECT_EQ(a.A(i, j), b.A(i, j));
    for (std::size_t i = 0; i < a.r(); ++i) EXPECT_EQ(a.M(i, j), b.M(i, j));
  }
}

constexpr const char* kTinyLp = R"({
  "format": 1,
  "cone": [{"kind": "orthant", "size": 2}],
  "A": [[1, 1]], "b": [1], "c": [0, 0], "M": [[1, 0]], "d": [0.5, 0.5]
})";

TEST(Io, FixturesMatchBuilders) {
  const ProblemFile e = test::fixture("elliptope");
  EXPECT_EQ(e.data.name, "elliptope");
  ASSERT_TRUE(e.domain_d.has_value());
  EXPECT_EQ(e.domain_d->size(), 2u);
  const ProblemData b = test::elliptope();
  for (std::size_t j = 0; j < b.q(); ++j) {
    EXPECT_NEAR(e.data.c[j], b.c[j], 1e-15);
    EXPECT_NEAR(e.data.d[j], b.d[j], 1e-15);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(e.data.M(i, j), b.M(i, j), 1e-15);
  }
  expect_same(test::fixture("square_lp").data, test::square_lp());
  const ProblemData s = test::fixture("single_param_sdp").data;
  EXPECT_NEAR(s.A(0, 1), test::single_param().A(0, 1), 1e-15);
}

TEST(Io, MinimalFileParses) {
  const ProblemFile f = parse_problem(kTinyLp);
  EXPECT_EQ(f.data.q(), 2u);
  EXPECT_FALSE(f.domain_d.has_value());
}

TEST(Io, SyntaxErrorsCarryLineAndColumn) {
  const std::string msg = parse_error("{\n  \"format\": 1,\n  \"cone\": [\n");
  EXPECT_NE(msg.find("t.json:3:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("malformed JSON"), std::string::npos);
  EXPECT_NE(parse_error("{\"format\": 1,,}").find("t.json:1:"), std::string::npos);
}

TEST(Io, SchemaErrorsNameTheField) {
  std::string text = kTinyLp;
  text.replace(text.find("[0, 0]"), 6, "[0, 0, 0]");
  EXPECT_NE(parse_error(text).find("field 'c'"), std::string::npos);

  text = kTinyLp;
  text.replace(text.find("\"orthant\""), 9, "\"cube\"");
  EXPECT_NE(parse_error(text).find("unknown cone kind"), std::string::npos);

  text = kTinyLp;
  text.replace(text.find("\"format\": 1"), 11, "\"format\": 2");
  EXPECT_NE(parse_error(text).find("field 'format'"), std::string::npos);

  text = kTinyLp;
  text.replace(text.find("\"b\": [1], "), 10, "");
  EXPECT_NE(parse_error(text).find("field 'b': missing"), std::string::npos);

  const std::string asym = R"({"format": 1, "cone": [{"kind": "psd", "size": 2}],
    "A": [{"blocks": [[[1, 0], [0, 0]]]}], "b": [1],
    "c": {"blocks": [[[0, 1], [2, 0]]]}, "M": [[0, 0, 1]], "d": [1, 0, 1]})";
  EXPECT_NE(parse_error(asym).find("not symmetric"), std::string::npos);
}

TEST(Io, WriteParseRoundTrip) {
  for (const char* name : {"elliptope", "single_param_sdp", "square_lp"}) {
    const ProblemFile f = test::fixture(name);
    const ProblemFile back = parse_problem(write_problem(f));
    expect_same(f.data, back.data);
    EXPECT_EQ(f.notes, back.notes);
    EXPECT_EQ(f.domain_d, back.domain_d);
    EXPECT_EQ(f.domain_p, back.domain_p);
  }
}

TEST(Io, NumberFormat) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
}

PartitionReport small_lp_report() {
  GridSpec g;
  g.side = Side::kDualThetaD;
  g.rectangle = {{-1, 1}, {-1, 1}};
  g.resolution = 3;
  return classify_grid(test::square_lp(), g);
}

TEST(Io, PartitionCsvLayout) {
  const std::string csv = partition_csv(small_lp_report());
  const std::string head = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(head,
            "index_i,index_j,coord_1,coord_2,class_tag,region_id,face_dim,image_1,image_2,"
            "extent_width_max,curvature");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST(Io, PartitionSvgHasLegendAndColors) {
  const std::string svg = partition_svg(small_lp_report());
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  for (const char* s : {"#1f77b4", "#ff7f0e", "#000000", "#9e9e9e", "nonlinearity", "linearity",
                        "transition", "</svg>"}) {
    EXPECT_NE(svg.find(s), std::string::npos) << s;
  }
}

TEST(Io, JsonReportsCarrySchema) {
  const PartitionReport rep = small_lp_report();
  const json pj = json::parse(partition_json(rep));
  EXPECT_EQ(pj["schema"], "mpclo.partition");
  EXPECT_EQ(pj["version"], kReportVersion);

  const ProblemData p = test::elliptope();
  const MappingValue mv = eval_phi(p, Vector{-3, -3});
  const json mj = json::parse(mapping_json("d", Vector{-3, -3}, mv));
  EXPECT_EQ(mj["schema"], "mpclo.map");
  EXPECT_EQ(mj["version"], kReportVersion);

  const json cj = json::parse(census_json(vertex_census(test::square_lp(), 50, 1)));
  EXPECT_EQ(cj["schema"], "mpclo.census");

  PropertyVerdict v;
  v.name = "monotonicity";
  v.worst_violation = std::numeric_limits<double>::infinity();
  const json vj = json::parse(verdicts_json({v}));
  EXPECT_EQ(vj["schema"], "mpclo.verify");

  const json ej = json::parse(mapping_error_json("p", Vector{1.5, 0}, Error(ErrorCode::kOutsideDomain, "x")));
  EXPECT_EQ(ej["schema"], "mpclo.map");
}

}  // namespace
}  // namespace mpclo::io
