#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <regex>

#include <gtest/gtest.h>

#include "bq/io.hpp"

namespace bq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(NormJson, RoundTripsEveryFamily) {
  const Norm2 hex = Norm2::polygonal({{1, 0}, {0.5, 0.8}, {-0.5, 0.8}, {-1, 0}, {-0.5, -0.8}, {0.5, -0.8}});
  for (const Norm2& n : {Norm2::p_norm(1.5), Norm2::p_norm(kInf), hex, strictify(hex, 0.25),
                         strictify(Norm2::p_norm(kInf), 0.1)}) {
    const auto j = norm_to_json(n);
    const Norm2 back = construct_norm(j);
    EXPECT_EQ(norm_to_json(back), j);
    EXPECT_DOUBLE_EQ(back({0.3, -0.7}), n({0.3, -0.7}));
  }
  EXPECT_EQ(norm_to_json(Norm2::p_norm(kInf))["p"], "inf");
}

TEST(NormJson, RejectsMalformedDescriptors) {
  using nlohmann::json;
  EXPECT_THROW(construct_norm(json{{"kind", "q"}}), SchemaError);
  EXPECT_THROW(construct_norm(json{{"kind", "p"}}), SchemaError);
  EXPECT_THROW(construct_norm(json{{"kind", "p"}, {"p", "infinity"}}), SchemaError);
  EXPECT_THROW(construct_norm(json{{"kind", "p"}, {"p", 0.5}}), PreconditionError);
  EXPECT_THROW(construct_norm(json{{"kind", "polygonal"}, {"vertices", {{1, 0}, {0, 1}, {-1, 0.2}, {0, -1}}}}),
               PreconditionError);
}

TEST(NormFlag, Shorthands) {
  EXPECT_TRUE(parse_norm_flag("p:2").is_euclidean());
  EXPECT_TRUE(std::isinf(parse_norm_flag("p:inf").p()));
  EXPECT_NEAR(parse_norm_flag("blend:p:inf,0.1")({1, 1}), 1.0414213562373096, 1e-14);
  EXPECT_NEAR(parse_norm_flag("blend:blend:p:1,0.5,0.5")({1, 0}), 1.0, 1e-15);
  const auto path = std::filesystem::temp_directory_path() / "bq_io_square.json";
  std::ofstream(path) << "[[1,0],[0,1],[-1,0],[0,-1]]";
  EXPECT_NEAR(parse_norm_flag("poly:@" + path.string())({0.25, 0.25}), 0.5, 1e-15);
  std::filesystem::remove(path);
  for (const char* bad : {"p:", "p:abc", "p:2x", "q:2", "blend:p:2", "blend:p:2,x", "poly:@/nonexistent"}) {
    EXPECT_THROW(parse_norm_flag(bad), PreconditionError) << bad;
  }
}

TEST(WitnessJson, RoundTripIsByteIdentical) {
  const std::vector<WitnessSet> sets{
      build_rational({0, 0}, {2, 0}, Rational(2), 1.0, Norm2::euclidean()),
      build_rational({0.1, 0.2}, {0.1 + 2.0 / 3.0, 0.2}, Rational(2, 3), 1.0, Norm2::euclidean()),
      approx_set({0, 0}, {std::sqrt(2.0), 0}, 0.1, 1.0, Norm2::euclidean()),
      figure5_config({0, 0}, {2, 0}, Norm2::p_norm(1.5))};
  for (const WitnessSet& w : sets) {
    const std::string first = dump_json(witness_to_json(w));
    const WitnessSet back = witness_from_json(nlohmann::json::parse(first));
    EXPECT_EQ(dump_json(witness_to_json(back)), first);
    EXPECT_EQ(back.points, w.points);
    EXPECT_EQ(back.edges, w.edges);
    EXPECT_EQ(back.config_graph.has_value(), w.config_graph.has_value());
    EXPECT_EQ(back.trace.size(), w.trace.size());
  }
}

TEST(WitnessJson, LayoutFollowsTheSchema) {
  const auto j = witness_to_json(build_rational({0, 0}, {2, 0}, Rational(2), 1.0, Norm2::euclidean()));
  EXPECT_EQ(j["points"][0]["label"], "x");
  EXPECT_EQ(j["anchors"]["y"], 1);
  EXPECT_TRUE(j["eps"].is_null());
  EXPECT_EQ(j["trace"]["rule"], "fig1");
  EXPECT_EQ(j["trace"]["ratio"], "2/1");
  EXPECT_FALSE(j.contains("config_graph"));
}

TEST(WitnessJson, SchemaViolationsAreReported) {
  const auto good = witness_to_json(build_rational({0, 0}, {1, 0}, Rational(1), 1.0, Norm2::euclidean()));
  auto missing = good;
  missing.erase("anchors");
  EXPECT_THROW(witness_from_json(missing), SchemaError);
  auto unknown = good;
  unknown["colour"] = "red";
  EXPECT_THROW(witness_from_json(unknown), SchemaError);
  auto bad_edge = good;
  bad_edge["edges"] = {{0, 7}};
  EXPECT_THROW(witness_from_json(bad_edge), SchemaError);
  auto bad_type = good;
  bad_type["rho"] = "one";
  EXPECT_THROW(witness_from_json(bad_type), SchemaError);
  EXPECT_THROW(witness_from_json(nlohmann::json::array()), SchemaError);
}

TEST(ReportJson, RoundTrip) {
  const WitnessSet w = build_rational({0, 0}, {2, 0}, Rational(2), 1.0, Norm2::euclidean());
  const VerifyReport r = falsify(w, Norm2::p_norm(kInf), 40, 5);
  const std::string text = dump_json(report_to_json(r));
  const VerifyReport back = report_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(dump_json(report_to_json(back)), text);
  EXPECT_EQ(back.mode, VerifyMode::Falsify);
  EXPECT_THROW(report_from_json(nlohmann::json{{"mode", "guess"}}), SchemaError);
}

TEST(Svg, OneLinePerEdgeAndOneCirclePerPoint) {
  for (const WitnessSet& w :
       {build_rational({0, 0}, {2, 0}, Rational(2), 1.0, Norm2::euclidean()),
        figure5_config({0, 0}, {2, 0}, Norm2::euclidean())}) {
    const std::string svg = render_svg(w);
    EXPECT_EQ(count(svg, "<line "), w.edges.size());
    EXPECT_EQ(count(svg, "<circle "), w.points.size());
    EXPECT_EQ(count(svg, "class=\"anchor\""), 2u);
    EXPECT_EQ(count(svg, "data-anchor=\"x\""), 1u);
    EXPECT_EQ(svg.rfind("<svg ", 0), 0u);
  }
}

TEST(Svg, HundredUnitsPerRho) {
  const WitnessSet w = build_rational({0, 0}, {1, 0}, Rational(1), 1.0, Norm2::euclidean());
  const std::string svg = render_svg(w);
  const std::regex line(R"re(<line x1="([0-9.]+)" y1="[0-9.]+" x2="([0-9.]+)")re");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, line));
  EXPECT_NEAR(std::abs(std::stod(m[2]) - std::stod(m[1])), 100.0, 1e-6);
}

TEST(Stats, KnownRows) {
  const auto rows = stats_table(3, 3, Norm2::euclidean());
  auto find = [&](Rational q) {
    for (const auto& r : rows) {
      if (r.q == q) return r;
    }
    ADD_FAILURE() << "missing row " << q.str();
    return StatsRow{};
  };
  EXPECT_EQ(find(Rational(1)).points, 2u);
  EXPECT_EQ(find(Rational(1)).edges, 1u);
  EXPECT_EQ(find(Rational(2)).points, 5u);
  EXPECT_EQ(find(Rational(2)).edges, 7u);
  EXPECT_EQ(find(Rational(1, 2)).points, 9u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i - 1].q, rows[i].q);
  const std::string csv = stats_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "q,points,edges,depth");
  EXPECT_NE(csv.find("\n2/1,5,7,2\n"), std::string::npos);
  EXPECT_THROW(stats_table(0, 3, Norm2::euclidean()), PreconditionError);
}

}  // namespace
}  // namespace bq
