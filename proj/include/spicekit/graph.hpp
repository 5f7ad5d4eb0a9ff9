#pragma once

// Label-invariant circuit graphs and normalized graph-edit-distance scoring.
// Node labels carry component kinds only, never names, so two netlists that
// differ just in naming compare as identical graphs.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "spicekit/spice.hpp"

namespace spicekit {

enum class GraphMode { ComponentAdjacency, Bipartite };

inline std::string graph_mode_name(GraphMode m) {
  return m == GraphMode::ComponentAdjacency ? "component_adjacency" : "bipartite";
}

inline std::optional<GraphMode> graph_mode_from_name(const std::string& s) {
  if (s == "component_adjacency") return GraphMode::ComponentAdjacency;
  if (s == "bipartite") return GraphMode::Bipartite;
  return std::nullopt;
}

// Label used for net nodes in bipartite mode.
inline constexpr const char* kNetLabel = "Net";

struct GraphNode {
  std::string id;
  std::string label;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct CircuitGraph {
  GraphMode mode = GraphMode::ComponentAdjacency;
  std::vector<GraphNode> nodes;
  std::vector<std::pair<int, int>> edges;  // index pairs, a < b, sorted, unique

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  void add_edge(int a, int b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    edges.emplace_back(a, b);
  }

  void finish_edges() {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
};

class GraphError : public SpiceError {
 public:
  enum class Code { ModeMismatch, SizeLimitExceeded };

  GraphError(Code code, const std::string& what) : SpiceError(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct GedCostConfig {
  double node_insert = 1.0;
  double node_delete = 1.0;
  double node_substitute_mismatch = 1.0;  // identical labels always cost 0
  double edge_insert = 1.0;
  double edge_delete = 1.0;
  std::size_t exact_node_limit = 10;      // above this, a greedy upper bound is used
  std::size_t max_expansions = 2'000'000; // A* safety valve; falls back to greedy
};

struct GedResult {
  double distance = 0.0;
  double ged_max = 0.0;
  double similarity = 100.0;  // percent in [0,100]
  bool exact = true;
};

inline CircuitGraph build_graph(const Netlist& n, GraphMode mode) {
  CircuitGraph g;
  g.mode = mode;

  std::set<std::string> seen_names;
  bool unique_names = true;
  for (const auto& c : n.components)
    if (!seen_names.insert(c.name).second) unique_names = false;

  for (std::size_t i = 0; i < n.components.size(); ++i) {
    const auto& c = n.components[i];
    std::string id = unique_names && !c.name.empty() ? c.name
                                                     : c.name + "#" + std::to_string(i);
    g.nodes.push_back({id, kind_label(c.kind)});
  }

  // net -> indices of touching components (deduplicated)
  std::map<std::string, std::vector<int>> net_members;
  for (std::size_t i = 0; i < n.components.size(); ++i) {
    for (const auto& t : n.components[i].terminals) {
      auto& v = net_members[t.net];
      if (v.empty() || v.back() != static_cast<int>(i)) v.push_back(static_cast<int>(i));
    }
  }

  if (mode == GraphMode::ComponentAdjacency) {
    for (const auto& [net, members] : net_members)
      for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
          g.add_edge(members[a], members[b]);
  } else {
    for (const auto& [net, members] : net_members) {
      int net_node = static_cast<int>(g.nodes.size());
      g.nodes.push_back({"net:" + net, kNetLabel});
      for (int m : members) g.add_edge(m, net_node);
    }
  }
  g.finish_edges();
  return g;
}

namespace ged_detail {

struct Encoded {
  int n = 0;
  std::vector<int> labels;
  std::vector<char> adj;  // n x n matrix
  int edge_total = 0;

  bool connected(int a, int b) const { return adj[static_cast<std::size_t>(a) * n + b] != 0; }
  int degree(int u) const {
    int d = 0;
    for (int v = 0; v < n; ++v)
      if (connected(u, v)) ++d;
    return d;
  }
};

inline void encode_pair(const CircuitGraph& g1, const CircuitGraph& g2, Encoded& e1,
                        Encoded& e2) {
  std::map<std::string, int> label_ids;
  auto intern = [&](const std::string& s) {
    auto [it, _] = label_ids.emplace(s, static_cast<int>(label_ids.size()));
    return it->second;
  };
  auto encode = [&](const CircuitGraph& g, Encoded& e) {
    e.n = static_cast<int>(g.nodes.size());
    e.labels.resize(e.n);
    for (int i = 0; i < e.n; ++i) e.labels[i] = intern(g.nodes[i].label);
    e.adj.assign(static_cast<std::size_t>(e.n) * e.n, 0);
    for (auto [a, b] : g.edges) {
      e.adj[static_cast<std::size_t>(a) * e.n + b] = 1;
      e.adj[static_cast<std::size_t>(b) * e.n + a] = 1;
    }
    e.edge_total = static_cast<int>(g.edges.size());
  };
  encode(g1, e1);
  encode(g2, e2);
}

// most-constrained-first processing order: rare labels, then high degree
inline std::vector<int> processing_order(const Encoded& e) {
  std::map<int, int> freq;
  for (int u = 0; u < e.n; ++u) ++freq[e.labels[u]];
  std::vector<int> order(e.n);
  for (int i = 0; i < e.n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (freq[e.labels[a]] != freq[e.labels[b]]) return freq[e.labels[a]] < freq[e.labels[b]];
    return e.degree(a) > e.degree(b);
  });
  return order;
}

// Full edit cost of a complete node correspondence. map[u] is the image of
// g1 node u or -1 for deletion; every unused g2 node is an insertion.
inline double mapping_cost(const Encoded& e1, const Encoded& e2, const std::vector<int>& map,
                           const GedCostConfig& cfg) {
  double cost = 0.0;
  std::vector<char> used(e2.n, 0);
  for (int u = 0; u < e1.n; ++u) {
    if (map[u] < 0) {
      cost += cfg.node_delete;
    } else {
      used[map[u]] = 1;
      if (e1.labels[u] != e2.labels[map[u]]) cost += cfg.node_substitute_mismatch;
    }
  }
  for (int v = 0; v < e2.n; ++v)
    if (!used[v]) cost += cfg.node_insert;

  // node mapping is injective, so preserved g1 edges hit distinct g2 edges
  int preserved = 0;
  for (int u = 0; u < e1.n; ++u)
    for (int w = u + 1; w < e1.n; ++w)
      if (e1.connected(u, w) && map[u] >= 0 && map[w] >= 0 &&
          e2.connected(map[u], map[w]))
        ++preserved;

  cost += (e1.edge_total - preserved) * cfg.edge_delete;
  cost += (e2.edge_total - preserved) * cfg.edge_insert;
  return cost;
}

// Label-aware greedy assignment plus local refinement; returns an upper bound.
inline double greedy_upper_bound(const Encoded& e1, const Encoded& e2,
                                 const GedCostConfig& cfg) {
  const int n1 = e1.n, n2 = e2.n;
  std::vector<int> map(n1, -1);
  std::vector<char> used(n2, 0);

  for (int u : processing_order(e1)) {
    double best = -1;
    int best_v = -1;
    for (int v = 0; v < n2; ++v) {
      if (used[v]) continue;
      double local = (e1.labels[u] == e2.labels[v]) ? 0.0 : cfg.node_substitute_mismatch;
      for (int w = 0; w < n1; ++w) {
        if (map[w] < 0 || w == u) continue;
        bool a1 = e1.connected(u, w), a2 = e2.connected(v, map[w]);
        if (a1 && !a2) local += cfg.edge_delete;
        if (!a1 && a2) local += cfg.edge_insert;
      }
      local += 0.001 * std::abs(e1.degree(u) - e2.degree(v));
      if (best_v < 0 || local < best) {
        best = local;
        best_v = v;
      }
    }
    if (best_v >= 0) {
      map[u] = best_v;
      used[best_v] = 1;
    }
  }

  double cost = mapping_cost(e1, e2, map, cfg);

  // refinement passes: image swaps, deletions, and moves to unused targets
  for (int pass = 0; pass < 4; ++pass) {
    bool improved = false;
    for (int a = 0; a < n1; ++a) {
      for (int b = a + 1; b < n1; ++b) {
        if (map[a] == map[b]) continue;
        std::swap(map[a], map[b]);
        double c = mapping_cost(e1, e2, map, cfg);
        if (c + 1e-12 < cost) {
          cost = c;
          improved = true;
        } else {
          std::swap(map[a], map[b]);
        }
      }
    }
    for (int a = 0; a < n1; ++a) {
      if (map[a] >= 0) {
        int old = map[a];
        map[a] = -1;
        used[old] = 0;
        double c = mapping_cost(e1, e2, map, cfg);
        if (c + 1e-12 < cost) {
          cost = c;
          improved = true;
        } else {
          map[a] = old;
          used[old] = 1;
        }
      }
      for (int v = 0; v < n2; ++v) {
        if (used[v]) continue;
        int prev = map[a];
        if (prev >= 0) used[prev] = 0;
        map[a] = v;
        used[v] = 1;
        double c = mapping_cost(e1, e2, map, cfg);
        if (c + 1e-12 < cost) {
          cost = c;
          improved = true;
        } else {
          used[v] = 0;
          map[a] = prev;
          if (prev >= 0) used[prev] = 1;
        }
      }
    }
    if (!improved) break;
  }
  return cost;
}

struct AStarState {
  double f = 0.0;
  double g = 0.0;
  int depth = 0;
  int g2_edges_open = 0;  // g2 edges with >= 1 unused endpoint
  std::uint64_t used = 0;
  std::vector<int> map;  // image per processed order position, -1 = deleted
  std::uint64_t seq = 0;
};

struct AStarCmp {
  bool operator()(const AStarState& a, const AStarState& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.depth != b.depth) return a.depth < b.depth;  // deeper first
    return a.seq > b.seq;                              // then insertion order
  }
};

// Exact minimum edit cost by best-first search over node assignments, with an
// admissible label-count + edge-count heuristic. Requires <= 64 nodes per
// graph. Returns -1 when the expansion budget is exhausted.
inline double astar_exact(const Encoded& e1, const Encoded& e2, const GedCostConfig& cfg) {
  const int n1 = e1.n, n2 = e2.n;
  const double sub_or_swap =
      std::min(cfg.node_substitute_mismatch, cfg.node_delete + cfg.node_insert);

  std::vector<int> order = processing_order(e1);

  int n_labels = 0;
  for (int u = 0; u < n1; ++u) n_labels = std::max(n_labels, e1.labels[u] + 1);
  for (int v = 0; v < n2; ++v) n_labels = std::max(n_labels, e2.labels[v] + 1);

  // label counts of the g1 suffix not yet processed, per depth
  std::vector<std::vector<int>> suffix_counts(n1 + 1, std::vector<int>(n_labels, 0));
  for (int d = n1 - 1; d >= 0; --d) {
    suffix_counts[d] = suffix_counts[d + 1];
    ++suffix_counts[d][e1.labels[order[d]]];
  }
  // g1 edges still undecided (>= 1 endpoint at position >= depth)
  std::vector<int> g1_open(n1 + 1, 0);
  {
    std::vector<int> pos(n1);
    for (int d = 0; d < n1; ++d) pos[order[d]] = d;
    for (int d = 0; d <= n1; ++d) {
      int cnt = 0;
      for (int u = 0; u < n1; ++u)
        for (int w = u + 1; w < n1; ++w)
          if (e1.connected(u, w) && (pos[u] >= d || pos[w] >= d)) ++cnt;
      g1_open[d] = cnt;
    }
  }

  std::vector<int> g2_label_totals(n_labels, 0);
  for (int v = 0; v < n2; ++v) ++g2_label_totals[e2.labels[v]];

  auto heuristic = [&](const AStarState& s) {
    int r1 = n1 - s.depth;
    int r2 = n2 - static_cast<int>(std::popcount(s.used));
    std::vector<int> g2_remaining = g2_label_totals;
    std::uint64_t m = s.used;
    while (m) {
      int v = std::countr_zero(m);
      m &= m - 1;
      --g2_remaining[e2.labels[v]];
    }
    int matched = 0;
    for (int l = 0; l < n_labels; ++l)
      matched += std::min(suffix_counts[s.depth][l], g2_remaining[l]);
    int pairs = std::min(r1, r2);
    double h = (pairs - matched) * sub_or_swap;
    h += (r1 > r2) ? (r1 - r2) * cfg.node_delete : (r2 - r1) * cfg.node_insert;
    int o1 = g1_open[s.depth];
    int o2 = s.g2_edges_open;
    h += (o1 > o2) ? (o1 - o2) * cfg.edge_delete : (o2 - o1) * cfg.edge_insert;
    return h;
  };

  std::priority_queue<AStarState, std::vector<AStarState>, AStarCmp> open;
  std::uint64_t seq = 0;

  AStarState root;
  root.g2_edges_open = e2.edge_total;
  root.f = heuristic(root);
  root.seq = seq++;
  open.push(std::move(root));

  std::size_t expansions = 0;
  while (!open.empty()) {
    AStarState s = open.top();
    open.pop();
    if (s.depth == n1) {
      // remaining g2 nodes inserted, plus all still-open g2 edges
      int remaining = n2 - static_cast<int>(std::popcount(s.used));
      return s.g + remaining * cfg.node_insert + s.g2_edges_open * cfg.edge_insert;
    }
    if (++expansions > cfg.max_expansions) return -1.0;

    int u = order[s.depth];
    auto edge_delta_map = [&](int v) {
      double d = 0.0;
      for (int dprev = 0; dprev < s.depth; ++dprev) {
        int w = order[dprev];
        int x = s.map[dprev];
        bool a1 = e1.connected(u, w);
        if (x < 0) {
          if (a1) d += cfg.edge_delete;
          continue;
        }
        bool a2 = e2.connected(v, x);
        if (a1 && !a2) d += cfg.edge_delete;
        if (!a1 && a2) d += cfg.edge_insert;
      }
      return d;
    };

    // map u -> each unused v, in node order, then the deletion branch
    for (int v = 0; v < n2; ++v) {
      if ((s.used >> v) & 1u) continue;
      AStarState c = s;
      c.map.push_back(v);
      c.used |= std::uint64_t{1} << v;
      c.depth = s.depth + 1;
      c.g += (e1.labels[u] == e2.labels[v]) ? 0.0 : cfg.node_substitute_mismatch;
      c.g += edge_delta_map(v);
      int closed = 0;  // g2 edges from v to already-used nodes are decided now
      std::uint64_t mm = s.used;
      while (mm) {
        int x = std::countr_zero(mm);
        mm &= mm - 1;
        if (e2.connected(v, x)) ++closed;
      }
      c.g2_edges_open = s.g2_edges_open - closed;
      c.f = c.g + heuristic(c);
      c.seq = seq++;
      open.push(std::move(c));
    }
    {
      AStarState c = s;
      c.map.push_back(-1);
      c.depth = s.depth + 1;
      c.g += cfg.node_delete;
      for (int dprev = 0; dprev < s.depth; ++dprev)
        if (e1.connected(u, order[dprev])) c.g += cfg.edge_delete;
      c.f = c.g + heuristic(c);
      c.seq = seq++;
      open.push(std::move(c));
    }
  }
  return -1.0;
}

}  // namespace ged_detail

inline double ged_normalizer(const CircuitGraph& g1, const CircuitGraph& g2) {
  return static_cast<double>(g1.node_count() + g1.edge_count() + g2.node_count() +
                             g2.edge_count());
}

inline GedResult graph_edit_distance(const CircuitGraph& g1, const CircuitGraph& g2,
                                     const GedCostConfig& cfg = {}) {
  if (g1.mode != g2.mode)
    throw GraphError(GraphError::Code::ModeMismatch,
                     "cannot compare graphs built in different modes");

  GedResult r;
  r.ged_max = ged_normalizer(g1, g2);
  if (g1.nodes.empty() && g2.nodes.empty()) return r;  // both empty: 0 / 100%

  ged_detail::Encoded e1, e2;
  ged_detail::encode_pair(g1, g2, e1, e2);

  std::size_t biggest = std::max(g1.node_count(), g2.node_count());
  double d = -1.0;
  if (biggest <= cfg.exact_node_limit && biggest <= 64) {
    d = ged_detail::astar_exact(e1, e2, cfg);
    r.exact = d >= 0.0;
  } else {
    r.exact = false;
  }
  if (d < 0.0) {
    d = ged_detail::greedy_upper_bound(e1, e2, cfg);
    r.exact = false;
  }
  r.distance = d;
  r.similarity = r.ged_max > 0 ? (1.0 - r.distance / r.ged_max) * 100.0 : 100.0;
  r.similarity = std::clamp(r.similarity, 0.0, 100.0);
  return r;
}

// Exhaustive minimum over all injective partial node mappings. Validation
// oracle for the A* path; deliberately shares no cost code with it.
inline double brute_force_ged(const CircuitGraph& g1, const CircuitGraph& g2,
                              const GedCostConfig& cfg = {}) {
  if (g1.mode != g2.mode)
    throw GraphError(GraphError::Code::ModeMismatch,
                     "cannot compare graphs built in different modes");
  if (g1.node_count() > 6 || g2.node_count() > 6)
    throw GraphError(GraphError::Code::SizeLimitExceeded,
                     "brute_force_ged is limited to 6 nodes per graph");

  const int n1 = static_cast<int>(g1.node_count());
  const int n2 = static_cast<int>(g2.node_count());
  auto has_edge = [](const CircuitGraph& g, int a, int b) {
    if (a > b) std::swap(a, b);
    return std::binary_search(g.edges.begin(), g.edges.end(), std::make_pair(a, b));
  };

  std::vector<int> image(n1, -1);
  std::vector<char> taken(n2, 0);
  double best = -1.0;

  auto evaluate = [&]() {
    double cost = 0.0;
    for (int u = 0; u < n1; ++u) {
      if (image[u] < 0)
        cost += cfg.node_delete;
      else if (g1.nodes[u].label != g2.nodes[image[u]].label)
        cost += cfg.node_substitute_mismatch;
    }
    for (int v = 0; v < n2; ++v)
      if (!taken[v]) cost += cfg.node_insert;
    for (auto [u, w] : g1.edges) {
      bool preserved = image[u] >= 0 && image[w] >= 0 && has_edge(g2, image[u], image[w]);
      if (!preserved) cost += cfg.edge_delete;
    }
    for (auto [v, x] : g2.edges) {
      bool covered = false;
      for (auto [u, w] : g1.edges) {
        if (image[u] < 0 || image[w] < 0) continue;
        int a = image[u], b = image[w];
        if (a > b) std::swap(a, b);
        if (a == std::min(v, x) && b == std::max(v, x)) {
          covered = true;
          break;
        }
      }
      if (!covered) cost += cfg.edge_insert;
    }
    return cost;
  };

  auto recurse = [&](auto&& self, int u) -> void {
    if (u == n1) {
      double c = evaluate();
      if (best < 0 || c < best) best = c;
      return;
    }
    for (int v = 0; v < n2; ++v) {
      if (taken[v]) continue;
      image[u] = v;
      taken[v] = 1;
      self(self, u + 1);
      taken[v] = 0;
    }
    image[u] = -1;
    self(self, u + 1);
  };
  recurse(recurse, 0);
  return best < 0 ? 0.0 : best;
}

inline GedResult similarity(const Netlist& a, const Netlist& b,
                            GraphMode mode = GraphMode::ComponentAdjacency,
                            const GedCostConfig& cfg = {}) {
  return graph_edit_distance(build_graph(a, mode), build_graph(b, mode), cfg);
}

inline nlohmann::ordered_json graph_to_json(const CircuitGraph& g) {
  nlohmann::ordered_json j;
  j["mode"] = graph_mode_name(g.mode);
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) j["nodes"].push_back({{"id", n.id}, {"label", n.label}});
  j["edges"] = nlohmann::ordered_json::array();
  for (auto [a, b] : g.edges) j["edges"].push_back({g.nodes[a].id, g.nodes[b].id});
  return j;
}

inline std::string graph_to_dot(const CircuitGraph& g) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::string dot = "graph circuit {\n";
  for (const auto& n : g.nodes)
    dot += "  " + quote(n.id) + " [label=" + quote(n.label) + "];\n";
  for (auto [a, b] : g.edges)
    dot += "  " + quote(g.nodes[a].id) + " -- " + quote(g.nodes[b].id) + ";\n";
  dot += "}\n";
  return dot;
}

inline nlohmann::ordered_json ged_result_to_json(const GedResult& r, GraphMode mode) {
  return nlohmann::ordered_json{{"mode", graph_mode_name(mode)},
                                {"distance", r.distance},
                                {"ged_max", r.ged_max},
                                {"similarity", r.similarity},
                                {"exact", r.exact}};
}

}  // namespace spicekit
