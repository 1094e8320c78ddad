#include <gtest/gtest.h>

#include "poncelet/report_json.hpp"
#include "poncelet/scene.hpp"
#include "poncelet/svg.hpp"

using namespace poncelet;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t c = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++c;
  return c;
}

GenOptions nonagon() {
  GenOptions o;
  o.n = 9;
  return o;
}

}  // namespace

TEST(CanonicalJson, SortedKeysAndFullPrecision) {
  const json j = {{"zeta", 1}, {"alpha", {0.1, 2.0, -3.5e-20}}, {"mid", {{"b", true}, {"a", "x"}}}};
  EXPECT_EQ(canonical_dump(j),
            "{\n"
            "  \"alpha\": [0.10000000000000001, 2.0, -3.5e-20],\n"
            "  \"mid\": {\n"
            "    \"a\": \"x\",\n"
            "    \"b\": true\n"
            "  },\n"
            "  \"zeta\": 1\n"
            "}\n");
}

TEST(Scene, RoundTripIsByteIdentical) {
  for (const SceneDocument& d : {generate_confocal_scene({}), generate_confocal_scene(nonagon()),
                                 generate_pentagon_scene(12)}) {
    const std::string a = write_scene(d);
    const std::string b = write_scene(read_scene(a));
    EXPECT_EQ(a, b);
    EXPECT_EQ(write_scene(read_scene(b)), b);
  }
}

TEST(Scene, RoundTripPreservesGeometry) {
  const SceneDocument d = generate_confocal_scene(nonagon());
  const SceneDocument e = read_scene(write_scene(d));
  const PonceletPolygon p = poncelet_from_scene(e);
  EXPECT_EQ(p.n(), 9u);
  ASSERT_TRUE(p.pair.confocal.has_value());
  EXPECT_TRUE(commute_check(p, 3).passed);
  EXPECT_EQ(e.point_set("grid").points.size(), 45u);
}

TEST(Scene, LabelsAndSchemaAreValidated) {
  SceneDocument d = generate_confocal_scene({});
  try {
    (void)d.conic("delta");
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), Errc::MissingLabel);
  }
  d.conics.push_back(d.conics.front());
  EXPECT_THROW(validate(d), GeometryError);

  json j = json::parse(write_scene(generate_confocal_scene({})));
  j["schema"] = 2;
  EXPECT_THROW((void)scene_from_json(j), GeometryError);
  j.erase("schema");
  EXPECT_THROW((void)scene_from_json(j), GeometryError);
  EXPECT_THROW((void)read_scene("{not json"), std::exception);
}

TEST(Svg, PentagonFigure) {
  const SceneDocument d = generate_pentagon_scene(5);
  const std::string svg = render_figure(d, Figure::pentagon);
  EXPECT_EQ(count(svg, "class=\"polygon "), 4u);
  EXPECT_EQ(count(svg, "class=\"conic "), 2u);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  EXPECT_EQ(svg, render_figure(read_scene(write_scene(d)), Figure::pentagon));
}

TEST(Svg, KasnerFigure) {
  const std::string svg = render_figure(generate_confocal_scene({}), Figure::kasner_nk, 3);
  EXPECT_EQ(count(svg, "class=\"polygon "), 4u);
  EXPECT_EQ(count(svg, "class=\"conic "), 5u);
  EXPECT_THROW((void)render_figure(generate_confocal_scene({}), Figure::kasner_nk, 4), GeometryError);
}

TEST(Svg, GridFigure) {
  const std::string svg = render_figure(generate_confocal_scene(nonagon()), Figure::grid);
  EXPECT_EQ(count(svg, "class=\"grid-line\""), 9u);
  EXPECT_EQ(count(svg, "class=\"point grid\""), 45u);
  EXPECT_GE(count(svg, "class=\"conic "), 5u);
  // layer order is fixed
  EXPECT_LT(svg.find("id=\"conics\""), svg.find("id=\"lines\""));
  EXPECT_LT(svg.find("id=\"lines\""), svg.find("id=\"points\""));
}

TEST(Svg, IncircleFigure) {
  const SceneDocument d = generate_confocal_scene(nonagon());
  const std::string svg = render_figure(d, Figure::incircles);
  EXPECT_EQ(count(svg, "class=\"incircle\""), incircle_survey(build_grid(poncelet_from_scene(d))).cells.size());
  EXPECT_EQ(count(svg, "class=\"grid-line\""), 9u);
}

TEST(Svg, ConicIsSampledAtFixedResolution) {
  const std::string svg = render_figure(generate_pentagon_scene(5), Figure::pentagon);
  const auto start = svg.find("class=\"conic ");
  const auto end = svg.find("/>", start);
  EXPECT_EQ(count(svg.substr(start, end - start), " L "), static_cast<std::size_t>(kConicSamples - 1));
}

TEST(Svg, MissingObjectsReported) {
  SceneDocument d = generate_pentagon_scene(5);
  d.polygons.clear();
  try {
    (void)render_figure(d, Figure::pentagon);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), Errc::MissingLabel);
  }
  EXPECT_THROW((void)render_figure(generate_confocal_scene({}), Figure::pentagon), GeometryError);
}

TEST(Svg, FigureNames) {
  EXPECT_EQ(parse_figure("kasner-nk"), Figure::kasner_nk);
  EXPECT_FALSE(parse_figure("figure5").has_value());
}

TEST(ReportJson, CarriesTolerances) {
  const PonceletPolygon p = poncelet_from_scene(generate_confocal_scene({}));
  const json c = to_json(commute_check(p, 3, 1e-9));
  EXPECT_EQ(c.at("tol").get<double>(), 1e-9);
  EXPECT_TRUE(c.at("passed").get<bool>());
  const json g = to_json(verify_grid_theorem(build_grid(p)));
  EXPECT_EQ(g.at("concentric").size(), 4u);
  EXPECT_EQ(g.at("tolerances").at("fit").get<double>(), 1e-9);
}
