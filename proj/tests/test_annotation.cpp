// Annotation tests: terminal binding, netlist generation, the JSON schema
// round-trip and the SVG overlay, plus the common-source amplifier fixture
// end to end.

#include <fstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "spicekit/annotation.hpp"

using namespace spicekit;

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

BBox box(const std::string& id, ComponentKind kind, double x0, double y0, double x1,
         double y1) {
  BBox b;
  b.id = id;
  b.kind = kind;
  b.x_min = x0;
  b.y_min = y0;
  b.x_max = x1;
  b.y_max = y1;
  return b;
}

NetCluster cluster(int id, std::vector<Segment> segments) {
  NetCluster c;
  c.id = id;
  c.segments = std::move(segments);
  return c;
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++count;
  return count;
}

}  // namespace

// ---- bind_terminals ----

TEST_CASE("anchor binds to the cluster holding the nearest endpoint") {
  // Resistor anchors at (0,10) and (100,10); cluster 2 owns endpoint (105,10).
  std::vector<BBox> boxes = {box("r1", {KindTag::Resistor}, 0, 0, 100, 20)};
  std::vector<NetCluster> clusters = {
      cluster(0, {{{500, 500}, {600, 500}}}),
      cluster(1, {{{500, 400}, {600, 400}}}),
      cluster(2, {{{105, 10}, {200, 10}}}),
  };
  auto bindings = bind_terminals(boxes, clusters, 60.0);
  REQUIRE(bindings.size() == 2);
  CHECK(bindings.at({"r1", TerminalRole::Neg}) == 2);
  CHECK_FALSE(bindings.at({"r1", TerminalRole::Pos}).has_value());
}

TEST_CASE("an endpoint 80px away stays unbound at the default max_dist") {
  std::vector<BBox> boxes = {box("g1", {KindTag::Ground}, 0, 0, 20, 20)};  // anchor (10,0)
  std::vector<NetCluster> clusters = {cluster(0, {{{90, 0}, {200, 0}}})};
  auto bindings = bind_terminals(boxes, clusters);
  CHECK_FALSE(bindings.at({"g1", TerminalRole::Pos}).has_value());

  // A generous max_dist binds it after all.
  auto loose = bind_terminals(boxes, clusters, 80.0);
  CHECK(loose.at({"g1", TerminalRole::Pos}) == 0);
}

TEST_CASE("equidistant candidates tie-break to the lower cluster id") {
  // Anchor (10,0); clusters 1 and 3 both have an endpoint 20px away. Cluster 3
  // is listed first so the tie-break, not visit order, must decide.
  std::vector<BBox> boxes = {box("g1", {KindTag::Ground}, 0, 0, 20, 20)};
  std::vector<NetCluster> clusters = {
      cluster(3, {{{-10, 0}, {-100, 0}}}),
      cluster(1, {{{30, 0}, {100, 0}}}),
      cluster(0, {{{900, 900}, {990, 900}}}),
  };
  auto bindings = bind_terminals(boxes, clusters);
  CHECK(bindings.at({"g1", TerminalRole::Pos}) == 1);
}

// ---- unbound terminals and annotation lint ----

TEST_CASE("unbound MOSFET gate is reported and blocks netlist generation") {
  Annotation a;
  a.image_ref = "mosfet.png";
  // Tall box: gate (0,100), drain (100,50), source (100,150). Clusters sit
  // near drain and source only; the gate anchor is >60px from everything.
  a.boxes = {box("m1", {KindTag::Mosfet, Polarity::N}, 0, 0, 100, 200)};
  a.clusters = {cluster(0, {{{105, 50}, {200, 50}}}),
                cluster(1, {{{105, 150}, {200, 150}}})};
  a.bindings = bind_terminals(a.boxes, a.clusters);

  CHECK(a.bindings.at({"m1", TerminalRole::Drain}) == 0);
  CHECK(a.bindings.at({"m1", TerminalRole::Source}) == 1);
  CHECK_FALSE(a.bindings.at({"m1", TerminalRole::Gate}).has_value());

  auto missing = unbound_terminals(a);
  REQUIRE(missing.size() == 1);
  CHECK(missing[0] == BindingKey{"m1", TerminalRole::Gate});

  auto diags = lint_annotation(a);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == LintCode::UnboundTerminal);
  CHECK(diags[0].severity == Severity::Error);
  CHECK(diags[0].subject == "m1");
  CHECK(diags[0].payload.at("role") == "gate");

  try {
    annotation_to_netlist(a);
    FAIL("expected UnboundTerminalsError");
  } catch (const UnboundTerminalsError& e) {
    REQUIRE(e.unbound.size() == 1);
    CHECK(e.unbound[0] == BindingKey{"m1", TerminalRole::Gate});
    CHECK(std::string(e.what()).find("m1.gate") != std::string::npos);
  }
}

TEST_CASE("fully bound annotation lints clean") {
  auto a = make_annotation(
      "r.png", {box("r1", {KindTag::Resistor}, 0, 0, 100, 20)},
      {cluster(0, {{{-5, 10}, {-80, 10}}}), cluster(1, {{{105, 10}, {180, 10}}})});
  CHECK(unbound_terminals(a).empty());
  CHECK(lint_annotation(a).empty());
}

// ---- annotation_to_netlist ----

TEST_CASE("resistor with a ground on one cluster becomes R1 N0 0") {
  auto a = make_annotation(
      "r.png",
      {box("r1", {KindTag::Resistor}, 0, 0, 100, 20),
       box("g1", {KindTag::Ground}, 95, 60, 125, 80)},  // anchor (110,60)
      {cluster(0, {{{-5, 10}, {-80, 10}}}),
       cluster(1, {{{105, 10}, {110, 55}}})});

  CHECK(ground_clusters(a) == std::set<int>{1});
  auto n = annotation_to_netlist(a);
  REQUIRE(n.components.size() == 1);
  CHECK(serialize_netlist(n) == "R1 N0 0");
  CHECK(lint(n).size() == 1);  // N0 floats, by construction of this tiny example
}

TEST_CASE("empty annotation produces an empty netlist") {
  auto n = annotation_to_netlist(Annotation{});
  CHECK(n.components.empty());
  CHECK(serialize_netlist(n).empty());
}

TEST_CASE("component names count per prefix in box order") {
  auto a = make_annotation(
      "two.png",
      {box("ra", {KindTag::Resistor}, 0, 0, 100, 20),
       box("ca", {KindTag::Capacitor}, 0, 100, 100, 120),
       box("rb", {KindTag::Resistor}, 0, 200, 100, 220)},
      {cluster(0, {{{-5, 10}, {-5, 110}}, {{-5, 110}, {-5, 210}}}),
       cluster(1, {{{105, 10}, {105, 110}}, {{105, 110}, {105, 210}}})});
  auto n = annotation_to_netlist(a);
  REQUIRE(n.components.size() == 3);
  CHECK(n.components[0].name == "R1");
  CHECK(n.components[1].name == "C1");
  CHECK(n.components[2].name == "R2");
}

TEST_CASE("source kinds carry their flavor in the value field") {
  auto clusters = std::vector<NetCluster>{cluster(0, {{{-5, 10}, {-80, 10}}}),
                                          cluster(1, {{{105, 10}, {180, 10}}})};
  auto kinds = std::vector<std::pair<ComponentKind, std::string>>{
      {{KindTag::AcSource}, "V1 N0 N1 AC"},
      {{KindTag::DcSource}, "V1 N0 N1 DC"},
      {{KindTag::Battery}, "V1 N0 N1 DC"},
      {{KindTag::VoltageSource}, "V1 N0 N1"},
      {{KindTag::CurrentSource}, "I1 N0 N1"},
  };
  for (const auto& [kind, expected] : kinds) {
    auto a = make_annotation("s.png", {box("s1", kind, 0, 0, 100, 20)}, clusters);
    CHECK(serialize_netlist(annotation_to_netlist(a)) == expected);
  }
}

TEST_CASE("unclassified MOSFET polarity falls back to model UNKNOWN") {
  auto a = make_annotation("m.png",
                           {box("m1", {KindTag::Mosfet}, 0, 0, 100, 200)},
                           {cluster(0, {{{105, 50}, {200, 50}}}),
                            cluster(1, {{{-5, 100}, {-90, 100}}}),
                            cluster(2, {{{105, 150}, {200, 150}}})});
  auto n = annotation_to_netlist(a);
  REQUIRE(n.components.size() == 1);
  CHECK(n.components[0].model == "UNKNOWN");
  // Bulk ties to source.
  CHECK(n.components[0].net(TerminalRole::Bulk) == n.components[0].net(TerminalRole::Source));
}

// ---- common-source amplifier fixture, end to end ----

TEST_CASE("cs_amp fixture: mask, cluster, bind, generate, lint") {
  auto segments = segments_from_json(
      load_json(std::string(SPICEKIT_FIXTURE_DIR) + "/cs_amp_segments.json"));
  auto boxes =
      boxes_from_json(load_json(std::string(SPICEKIT_FIXTURE_DIR) + "/cs_amp_boxes.json"));
  REQUIRE(boxes.size() == 6);

  auto masked = mask_segments(segments, boxes);
  auto clusters = cluster_segments(masked);
  REQUIRE(clusters.size() == 5);

  auto a = make_annotation("cs_amp.png", boxes, clusters);

  BindingMap expected = {
      {{"v1", TerminalRole::Pos}, 1},  {{"v1", TerminalRole::Neg}, 0},
      {{"v2", TerminalRole::Pos}, 2},  {{"v2", TerminalRole::Neg}, 0},
      {{"r1", TerminalRole::Pos}, 1},  {{"r1", TerminalRole::Neg}, 3},
      {{"m1", TerminalRole::Gate}, 2}, {{"m1", TerminalRole::Drain}, 3},
      {{"m1", TerminalRole::Source}, 4}, {{"g1", TerminalRole::Pos}, 4},
      {{"g2", TerminalRole::Pos}, 0},
  };
  CHECK(a.bindings == expected);
  CHECK(ground_clusters(a) == std::set<int>{0, 4});
  CHECK(lint_annotation(a).empty());

  auto n = annotation_to_netlist(a);
  CHECK(serialize_netlist(n) == "V1 N1 0 DC\nV2 N2 0 AC\nR1 N1 N3\nM1 N3 N2 0 NMOS");
  CHECK(lint(n).empty());

  // The text round-trip is stable. Structurally everything survives except
  // the Battery kind, which has no flat-SPICE spelling of its own: it comes
  // back as a plain DC source.
  auto reparsed = parse_netlist(serialize_netlist(n));
  CHECK(serialize_netlist(reparsed) == serialize_netlist(n));
  auto expected_rt = n;
  REQUIRE(expected_rt.components[0].kind.tag == KindTag::Battery);
  expected_rt.components[0].kind = {KindTag::DcSource, Polarity::Unknown};
  CHECK(reparsed == expected_rt);

  // Annotation round-trips through its JSON schema.
  auto restored = annotation_from_json(annotation_to_json(a));
  CHECK(restored == a);

  // SVG overlay: one rect per box, one label per cluster, grounds labeled 0.
  auto svg = annotation_to_svg(a);
  CHECK(count_occurrences(svg, "<rect") == 6);
  CHECK(count_occurrences(svg, "<text") == 5);
  CHECK(count_occurrences(svg, ">0</text>") == 2);
  CHECK(svg.find(">N1</text>") != std::string::npos);
}

// ---- JSON schema ----

TEST_CASE("annotation JSON keeps unbound entries as null") {
  Annotation a;
  a.image_ref = "img.png";
  a.boxes = {box("r1", {KindTag::Resistor}, 0, 0, 100, 20)};
  a.clusters = {cluster(0, {{{-5, 10}, {-80, 10}}})};
  a.bindings = bind_terminals(a.boxes, a.clusters);
  REQUIRE(a.bindings.at({"r1", TerminalRole::Pos}) == 0);
  REQUIRE_FALSE(a.bindings.at({"r1", TerminalRole::Neg}).has_value());

  auto j = annotation_to_json(a);
  CHECK(j.at("image_ref") == "img.png");
  CHECK(j.at("bindings").at("r1:pos") == 0);
  CHECK(j.at("bindings").at("r1:neg").is_null());

  auto restored = annotation_from_json(j);
  CHECK(restored == a);
}

TEST_CASE("empty annotation JSON schema") {
  auto j = annotation_to_json(Annotation{});
  CHECK(j.at("boxes").is_array());
  CHECK(j.at("boxes").empty());
  CHECK(j.at("clusters").empty());
  CHECK(j.at("bindings").is_object());
  CHECK(j.at("bindings").empty());

  auto restored = annotation_from_json(j);
  CHECK(restored == Annotation{});
}

TEST_CASE("annotation_from_json validates binding targets and keys") {
  auto base = nlohmann::json::parse(R"({
    "image_ref": "x.png",
    "boxes": [{"id": "r1", "class": "Resistor", "bbox": [0, 0, 100, 20]}],
    "clusters": [{"id": 0, "segments": [{"x1": -5, "y1": 10, "x2": -80, "y2": 10}]}],
    "bindings": {"r1:pos": 0, "r1:neg": null}
  })");
  CHECK(annotation_from_json(base).bindings.size() == 2);

  auto bad_target = base;
  bad_target["bindings"]["r1:pos"] = 7;
  CHECK_THROWS_AS(annotation_from_json(bad_target), GeometryError);

  auto bad_role = base;
  bad_role["bindings"] = {{"r1:anode", 0}};
  CHECK_THROWS_AS(annotation_from_json(bad_role), GeometryError);

  auto bad_key = base;
  bad_key["bindings"] = {{"r1", 0}};
  CHECK_THROWS_AS(annotation_from_json(bad_key), GeometryError);
}

// ---- SVG / export ----

TEST_CASE("svg overlay counts one rect per box and one text per cluster") {
  auto a = make_annotation("one.png",
                           {box("r1", {KindTag::Resistor}, 0, 0, 100, 20)},
                           {cluster(0, {{{105, 10}, {180, 10}}})});
  auto svg = annotation_to_svg(a);
  CHECK(count_occurrences(svg, "<rect") == 1);
  CHECK(count_occurrences(svg, "<text") == 1);
  CHECK(svg.find("fill=\"red\"") != std::string::npos);
  CHECK(svg.find(">N0</text>") != std::string::npos);
  CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
}

TEST_CASE("export_annotation dispatches on format and rejects others") {
  Annotation a;
  auto json_text = export_annotation(a, "json");
  CHECK(nlohmann::json::parse(json_text).contains("bindings"));
  CHECK(export_annotation(a, "svg").rfind("<svg", 0) == 0);
  CHECK_THROWS_AS(export_annotation(a, "png"), GeometryError);
}
