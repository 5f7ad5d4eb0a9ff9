#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spicekit/graph.hpp"

using namespace spicekit;

namespace {

CircuitGraph random_graph(std::mt19937& rng, int max_nodes, GraphMode mode) {
  static const char* labels[] = {"Resistor", "Capacitor", "Mosfet:N", "Net"};
  std::uniform_int_distribution<int> node_count(0, max_nodes);
  std::uniform_int_distribution<int> label_pick(0, 3);
  std::bernoulli_distribution edge_pick(0.4);

  CircuitGraph g;
  g.mode = mode;
  int n = node_count(rng);
  for (int i = 0; i < n; ++i)
    g.nodes.push_back({"n" + std::to_string(i), labels[label_pick(rng)]});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (edge_pick(rng)) g.add_edge(i, j);
  g.finish_edges();
  return g;
}

}  // namespace

TEST_CASE("build_graph: single component", "[graph]") {
  Netlist n = parse_netlist("R1 a b 1k");
  CircuitGraph ca = build_graph(n, GraphMode::ComponentAdjacency);
  CHECK(ca.node_count() == 1);
  CHECK(ca.edge_count() == 0);
  CHECK(ca.nodes[0].label == "Resistor");

  CircuitGraph bi = build_graph(n, GraphMode::Bipartite);
  CHECK(bi.node_count() == 3);  // R1 + nets a, b
  CHECK(bi.edge_count() == 2);
}

TEST_CASE("build_graph: shared nets become adjacency", "[graph]") {
  Netlist n = parse_netlist("R1 in out 1k\nC1 out 0 100n");
  CircuitGraph ca = build_graph(n, GraphMode::ComponentAdjacency);
  CHECK(ca.node_count() == 2);
  CHECK(ca.edge_count() == 1);

  CircuitGraph bi = build_graph(n, GraphMode::Bipartite);
  CHECK(bi.node_count() == 5);  // 2 components + nets in, out, 0
  CHECK(bi.edge_count() == 4);
  int net_nodes = 0;
  for (const auto& node : bi.nodes)
    if (node.label == kNetLabel) ++net_nodes;
  CHECK(net_nodes == 3);
}

TEST_CASE("build_graph: labels carry polarity, duplicate names get suffixes", "[graph]") {
  Netlist n = parse_netlist("M1 d g s NMOS\nM1 d g s PMOS");
  CircuitGraph g = build_graph(n, GraphMode::ComponentAdjacency);
  REQUIRE(g.node_count() == 2);
  CHECK(g.nodes[0].id == "M1#0");
  CHECK(g.nodes[1].id == "M1#1");
  CHECK(g.nodes[0].label == "Mosfet:N");
  CHECK(g.nodes[1].label == "Mosfet:P");
}

TEST_CASE("build_graph: MOSFET bulk tied to source adds no extra net", "[graph]") {
  Netlist n = parse_netlist("M1 d g s NMOS");
  CircuitGraph bi = build_graph(n, GraphMode::Bipartite);
  CHECK(bi.node_count() == 4);  // M1 + nets d, g, s
  CHECK(bi.edge_count() == 3);  // bulk incidence collapses onto source's edge
}

TEST_CASE("ged: identical graphs have distance 0 and similarity 100", "[graph]") {
  Netlist n = parse_netlist("R1 in out 1k\nC1 out 0 100n\nM1 out in 0 NMOS");
  for (GraphMode mode : {GraphMode::ComponentAdjacency, GraphMode::Bipartite}) {
    CircuitGraph g = build_graph(n, mode);
    GedResult r = graph_edit_distance(g, g, {.exact_node_limit = 16});
    CHECK(r.distance == 0.0);
    CHECK(r.similarity == 100.0);
    CHECK(r.exact);
  }
}

TEST_CASE("ged: RC vs RL divider matches the normalized formula", "[graph]") {
  Netlist rc = parse_netlist("R1 in out 1k\nC1 out 0 100n");
  Netlist rl = parse_netlist("R1 in out 1k\nL1 out 0 10m");
  CircuitGraph g1 = build_graph(rc, GraphMode::ComponentAdjacency);
  CircuitGraph g2 = build_graph(rl, GraphMode::ComponentAdjacency);

  GedResult r = graph_edit_distance(g1, g2);
  CHECK(r.exact);
  CHECK(r.distance == 1.0);  // one label substitution: Capacitor -> Inductor
  CHECK(r.ged_max == 6.0);   // (2 nodes + 1 edge) + (2 nodes + 1 edge)
  CHECK_THAT(r.similarity, Catch::Matchers::WithinAbs(83.3333, 0.01));

  // independent oracle agrees
  CHECK(brute_force_ged(g1, g2) == 1.0);
}

TEST_CASE("ged: renaming components and nets never changes the score", "[graph]") {
  Netlist a = parse_netlist(
      "V1 vdd 0 DC 1.8\nM1 out in 0 NMOS\nR1 vdd out 10k\nC1 out 0 1p");
  Netlist b = a;
  for (auto& c : b.components) c.name = "X" + c.name;
  for (auto& c : b.components)
    for (auto& t : c.terminals) t.net = t.net + "_renamed";
  for (GraphMode mode : {GraphMode::ComponentAdjacency, GraphMode::Bipartite}) {
    GedResult r = similarity(a, b, mode, {.exact_node_limit = 16});
    CHECK(r.similarity == 100.0);
    CHECK(r.exact);
  }
}

TEST_CASE("ged: symmetric in its arguments", "[graph]") {
  Netlist a = parse_netlist("R1 x y 1\nC1 y 0 1\nM1 y x 0 NMOS");
  Netlist b = parse_netlist("R1 x y 1\nL1 y 0 1");
  for (GraphMode mode : {GraphMode::ComponentAdjacency, GraphMode::Bipartite}) {
    GedResult ab = similarity(a, b, mode, {.exact_node_limit = 16});
    GedResult ba = similarity(b, a, mode, {.exact_node_limit = 16});
    CHECK(ab.distance == ba.distance);
    CHECK(ab.similarity == ba.similarity);
  }
}

TEST_CASE("ged: empty vs empty and empty vs nonempty", "[graph]") {
  CircuitGraph empty;
  GedResult r = graph_edit_distance(empty, empty);
  CHECK(r.distance == 0.0);
  CHECK(r.similarity == 100.0);

  CircuitGraph one;
  one.nodes.push_back({"R1", "Resistor"});
  GedResult r2 = graph_edit_distance(empty, one);
  CHECK(r2.distance == 1.0);  // insert one node
  CHECK(r2.ged_max == 1.0);
  CHECK(r2.similarity == 0.0);
}

TEST_CASE("ged: mode mismatch throws", "[graph]") {
  Netlist n = parse_netlist("R1 a b 1");
  CircuitGraph ca = build_graph(n, GraphMode::ComponentAdjacency);
  CircuitGraph bi = build_graph(n, GraphMode::Bipartite);
  try {
    graph_edit_distance(ca, bi);
    FAIL("expected GraphError");
  } catch (const GraphError& e) {
    CHECK(e.code() == GraphError::Code::ModeMismatch);
  }
}

TEST_CASE("ged: A* agrees with the exhaustive oracle on random small pairs", "[graph]") {
  std::mt19937 rng(20260814);
  for (int trial = 0; trial < 40; ++trial) {
    CircuitGraph g1 = random_graph(rng, 5, GraphMode::ComponentAdjacency);
    CircuitGraph g2 = random_graph(rng, 5, GraphMode::ComponentAdjacency);
    GedResult r = graph_edit_distance(g1, g2);
    REQUIRE(r.exact);
    double oracle = brute_force_ged(g1, g2);
    INFO("trial " << trial << ": astar=" << r.distance << " oracle=" << oracle);
    CHECK(r.distance == oracle);
  }
}

TEST_CASE("ged: oracle refuses graphs beyond its size limit", "[graph]") {
  std::mt19937 rng(7);
  CircuitGraph big;
  big.mode = GraphMode::ComponentAdjacency;
  for (int i = 0; i < 7; ++i) big.nodes.push_back({"n" + std::to_string(i), "Resistor"});
  try {
    brute_force_ged(big, big);
    FAIL("expected GraphError");
  } catch (const GraphError& e) {
    CHECK(e.code() == GraphError::Code::SizeLimitExceeded);
  }
}

TEST_CASE("ged: greedy fallback above the exact limit is bounded and sane", "[graph]") {
  // 30 components in a chain: far beyond the default exact limit.
  std::string text;
  for (int i = 0; i < 30; ++i)
    text += "R" + std::to_string(i + 1) + " n" + std::to_string(i) + " n" +
            std::to_string(i + 1) + " 1k\n";
  Netlist chain = parse_netlist(text);
  GedResult r = similarity(chain, chain, GraphMode::Bipartite);  // 61 bipartite nodes
  CHECK_FALSE(r.exact);
  CHECK(r.distance >= 0.0);
  CHECK(r.similarity >= 0.0);
  CHECK(r.similarity <= 100.0);
}

TEST_CASE("ged: exhausted expansion budget falls back to a valid upper bound", "[graph]") {
  std::mt19937 rng(99);
  CircuitGraph g1 = random_graph(rng, 5, GraphMode::ComponentAdjacency);
  CircuitGraph g2 = random_graph(rng, 5, GraphMode::ComponentAdjacency);
  GedCostConfig cfg;
  cfg.max_expansions = 1;
  GedResult limited = graph_edit_distance(g1, g2, cfg);
  GedResult full = graph_edit_distance(g1, g2);
  CHECK(limited.distance >= full.distance);  // upper bound, never below optimum
}

TEST_CASE("similarity: structural difference scores below 100", "[graph]") {
  Netlist a = parse_netlist("R1 in out 1k\nC1 out 0 1n");
  Netlist b = parse_netlist("R1 in out 1k");
  GedResult r = similarity(a, b, GraphMode::ComponentAdjacency);
  CHECK(r.similarity < 100.0);
  CHECK(r.distance > 0.0);
}

TEST_CASE("graph_to_json shape", "[graph]") {
  CircuitGraph g = build_graph(parse_netlist("R1 a b 1"), GraphMode::Bipartite);
  auto j = graph_to_json(g);
  CHECK(j["mode"] == "bipartite");
  CHECK(j["nodes"].size() == 3);
  CHECK(j["edges"].size() == 2);
  CHECK(j["nodes"][0].contains("id"));
  CHECK(j["nodes"][0].contains("label"));
}

TEST_CASE("graph_to_dot emits an undirected graph", "[graph]") {
  CircuitGraph g = build_graph(parse_netlist("R1 a b 1\nC1 b 0 1"), GraphMode::ComponentAdjacency);
  std::string dot = graph_to_dot(g);
  CHECK(dot.find("graph circuit {") != std::string::npos);
  CHECK(dot.find("\"R1\" -- \"C1\"") != std::string::npos);
}

TEST_CASE("ged_result_to_json is stable", "[graph]") {
  GedResult r{1.0, 6.0, 83.3, true};
  auto j = ged_result_to_json(r, GraphMode::ComponentAdjacency);
  CHECK(j["mode"] == "component_adjacency");
  CHECK(j["distance"] == 1.0);
  CHECK(j["ged_max"] == 6.0);
  CHECK(j["exact"] == true);
}
