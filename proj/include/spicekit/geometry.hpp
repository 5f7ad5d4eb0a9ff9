#pragma once

// Geometry stage: detector boxes and Hough line segments in, clustered nets
// out. Coordinates are pixels in image space, y axis pointing down.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spicekit/spice.hpp"

namespace spicekit {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;  // (x, y) lex
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Segment {
  Point p1;
  Point p2;

  double length() const { return distance(p1, p2); }
  Point lower() const { return std::min(p1, p2); }
  Point upper() const { return std::max(p1, p2); }

  friend bool operator==(const Segment&, const Segment&) = default;
};

inline double point_segment_distance(const Point& p, const Segment& s) {
  double dx = s.p2.x - s.p1.x, dy = s.p2.y - s.p1.y;
  double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, s.p1);
  double t = ((p.x - s.p1.x) * dx + (p.y - s.p1.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {s.p1.x + t * dx, s.p1.y + t * dy});
}

struct BBox {
  std::string id;
  ComponentKind kind;
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  double confidence = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  Point center() const { return {(x_min + x_max) / 2, (y_min + y_max) / 2}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct ClusterConfig {
  double radius = 40.0;  // endpoint merge radius in pixels
  bool merge_on_body_proximity = false;
};

struct NetCluster {
  int id = 0;
  std::vector<Segment> segments;

  // deduplicated member endpoints, sorted
  std::vector<Point> endpoints() const {
    std::vector<Point> pts;
    for (const auto& s : segments) {
      pts.push_back(s.p1);
      pts.push_back(s.p2);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

  friend bool operator==(const NetCluster&, const NetCluster&) = default;
};

class GeometryError : public SpiceError {
 public:
  using SpiceError::SpiceError;
};

namespace geo_detail {

// Parameter interval of seg that lies inside the rect, or nullopt.
inline std::optional<std::pair<double, double>> inside_interval(const Segment& seg,
                                                                double x0, double y0,
                                                                double x1, double y1) {
  double t0 = 0.0, t1 = 1.0;
  double dx = seg.p2.x - seg.p1.x, dy = seg.p2.y - seg.p1.y;
  auto clip = [&](double p, double q) {
    // p * t <= q required
    if (p == 0.0) return q >= 0.0;
    double r = q / p;
    if (p < 0.0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
    return true;
  };
  if (!clip(-dx, seg.p1.x - x0)) return std::nullopt;
  if (!clip(dx, x1 - seg.p1.x)) return std::nullopt;
  if (!clip(-dy, seg.p1.y - y0)) return std::nullopt;
  if (!clip(dy, y1 - seg.p1.y)) return std::nullopt;
  if (t0 > t1) return std::nullopt;
  return std::make_pair(t0, t1);
}

inline Point at(const Segment& s, double t) {
  return {s.p1.x + t * (s.p2.x - s.p1.x), s.p1.y + t * (s.p2.y - s.p1.y)};
}

}  // namespace geo_detail

// Removes the parts of each segment covered by any margin-inflated box.
// Pieces crossing a boundary are clipped there; leftover pieces shorter than
// min_keep pixels are dropped.
inline std::vector<Segment> mask_segments(const std::vector<Segment>& segments,
                                          const std::vector<BBox>& boxes, double margin = 0.0,
                                          double min_keep = 2.0) {
  std::vector<Segment> out;
  for (const auto& seg : segments) {
    double len = seg.length();
    if (len == 0.0) continue;
    std::vector<std::pair<double, double>> covered;
    for (const auto& b : boxes) {
      auto iv = geo_detail::inside_interval(seg, b.x_min - margin, b.y_min - margin,
                                            b.x_max + margin, b.y_max + margin);
      if (iv && iv->second > iv->first) covered.push_back(*iv);
    }
    std::sort(covered.begin(), covered.end());
    double cursor = 0.0;
    auto emit = [&](double a, double b) {
      if ((b - a) * len >= min_keep)
        out.push_back({geo_detail::at(seg, a), geo_detail::at(seg, b)});
    };
    for (const auto& [a, b] : covered) {
      if (a > cursor) emit(cursor, a);
      cursor = std::max(cursor, b);
    }
    if (cursor < 1.0) emit(cursor, 1.0);
  }
  return out;
}

// Union-find clustering: segments merge when endpoints come within
// cfg.radius of each other (optionally of the other segment's body).
// Cluster ids are ordered by each cluster's lexicographically smallest
// endpoint, so the result does not depend on input order.
inline std::vector<NetCluster> cluster_segments(const std::vector<Segment>& segments,
                                                const ClusterConfig& cfg = {}) {
  const std::size_t n = segments.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

  auto should_merge = [&](const Segment& a, const Segment& b) {
    for (const Point& pa : {a.p1, a.p2})
      for (const Point& pb : {b.p1, b.p2})
        if (distance(pa, pb) <= cfg.radius) return true;
    if (cfg.merge_on_body_proximity) {
      for (const Point& pa : {a.p1, a.p2})
        if (point_segment_distance(pa, b) <= cfg.radius) return true;
      for (const Point& pb : {b.p1, b.p2})
        if (point_segment_distance(pb, a) <= cfg.radius) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (should_merge(segments[i], segments[j])) unite(i, j);

  std::map<std::size_t, NetCluster> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].segments.push_back(segments[i]);

  std::vector<NetCluster> clusters;
  for (auto& [root, cluster] : groups) {
    std::sort(cluster.segments.begin(), cluster.segments.end(),
              [](const Segment& a, const Segment& b) {
                return std::tie(a.p1, a.p2) < std::tie(b.p1, b.p2);
              });
    clusters.push_back(std::move(cluster));
  }
  auto smallest = [](const NetCluster& c) {
    Point m = c.segments.front().lower();
    for (const auto& s : c.segments) m = std::min({m, s.lower()});
    return m;
  };
  std::sort(clusters.begin(), clusters.end(), [&](const NetCluster& a, const NetCluster& b) {
    Point pa = smallest(a), pb = smallest(b);
    if (pa != pb) return pa < pb;
    return a.segments.size() < b.segments.size();
  });
  for (std::size_t i = 0; i < clusters.size(); ++i) clusters[i].id = static_cast<int>(i);
  return clusters;
}

// Terminal roles a box of the given kind must bind before a netlist can be
// generated from it.
inline std::vector<TerminalRole> required_roles(const ComponentKind& kind) {
  switch (kind.tag) {
    case KindTag::Mosfet:
      return {TerminalRole::Drain, TerminalRole::Gate, TerminalRole::Source};
    case KindTag::Bjt:
      return {TerminalRole::Collector, TerminalRole::Base, TerminalRole::Emitter};
    case KindTag::Ground:
      return {TerminalRole::Pos};
    default:
      return {TerminalRole::Pos, TerminalRole::Neg};
  }
}

// Per-class anchor templates. Two-terminal kinds put anchors on the midpoints
// of the two shorter sides (square boxes default to left/right). Three-
// terminal kinds put the control terminal (gate/base) at the midpoint of one
// long side and the remaining pair at the quarter points of the opposite
// side. Ground gets a single top-center anchor.
inline std::vector<std::pair<TerminalRole, Point>> terminal_anchors(const BBox& b) {
  double w = b.width(), h = b.height();
  double cx = (b.x_min + b.x_max) / 2, cy = (b.y_min + b.y_max) / 2;

  if (b.kind.tag == KindTag::Ground) return {{TerminalRole::Pos, {cx, b.y_min}}};

  if (b.kind.tag == KindTag::Mosfet || b.kind.tag == KindTag::Bjt) {
    auto roles = required_roles(b.kind);  // {drain/collector, gate/base, source/emitter}
    if (h >= w) {
      return {{roles[1], {b.x_min, cy}},
              {roles[0], {b.x_max, b.y_min + h / 4}},
              {roles[2], {b.x_max, b.y_min + 3 * h / 4}}};
    }
    return {{roles[1], {cx, b.y_min}},
            {roles[0], {b.x_min + w / 4, b.y_max}},
            {roles[2], {b.x_min + 3 * w / 4, b.y_max}}};
  }

  if (w >= h)
    return {{TerminalRole::Pos, {b.x_min, cy}}, {TerminalRole::Neg, {b.x_max, cy}}};
  return {{TerminalRole::Pos, {cx, b.y_min}}, {TerminalRole::Neg, {cx, b.y_max}}};
}

// ---- detector output ingestion ----

// Class order used by the upstream 12-class component detector.
inline const std::vector<std::pair<std::string, ComponentKind>>& detector_classes() {
  static const std::vector<std::pair<std::string, ComponentKind>> classes = {
      {"AC Source", {KindTag::AcSource}},
      {"BJT", {KindTag::Bjt}},
      {"Battery", {KindTag::Battery}},
      {"Capacitor", {KindTag::Capacitor}},
      {"DC Source", {KindTag::DcSource}},
      {"Diode", {KindTag::Diode}},
      {"Ground", {KindTag::Ground}},
      {"Inductor", {KindTag::Inductor}},
      {"MOSFET", {KindTag::Mosfet}},
      {"Resistor", {KindTag::Resistor}},
      {"Current Source", {KindTag::CurrentSource}},
      {"Voltage Source", {KindTag::VoltageSource}},
  };
  return classes;
}

// Accepts canonical labels ("Mosfet:N"), detector class names ("AC Source"),
// and common device spellings ("NMOS", "pnp").
inline std::optional<ComponentKind> kind_from_string(const std::string& s) {
  if (auto k = kind_from_label(s)) return k;
  std::string key;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::map<std::string, ComponentKind> table = {
      {"resistor", {KindTag::Resistor}},
      {"capacitor", {KindTag::Capacitor}},
      {"inductor", {KindTag::Inductor}},
      {"mosfet", {KindTag::Mosfet}},
      {"nmos", {KindTag::Mosfet, Polarity::N}},
      {"pmos", {KindTag::Mosfet, Polarity::P}},
      {"bjt", {KindTag::Bjt}},
      {"npn", {KindTag::Bjt, Polarity::N}},
      {"pnp", {KindTag::Bjt, Polarity::P}},
      {"diode", {KindTag::Diode}},
      {"voltagesource", {KindTag::VoltageSource}},
      {"currentsource", {KindTag::CurrentSource}},
      {"acsource", {KindTag::AcSource}},
      {"dcsource", {KindTag::DcSource}},
      {"battery", {KindTag::Battery}},
      {"ground", {KindTag::Ground}},
      {"gnd", {KindTag::Ground}},
  };
  auto it = table.find(key);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

// JSON array of {class, bbox:[x_min,y_min,x_max,y_max], confidence}.
inline std::vector<BBox> boxes_from_json(const nlohmann::json& j) {
  std::vector<BBox> out;
  for (const auto& e : j) {
    BBox b;
    std::string cls = e.at("class").get<std::string>();
    auto kind = kind_from_string(cls);
    if (!kind) throw GeometryError("unknown component class: " + cls);
    b.kind = *kind;
    const auto& bb = e.at("bbox");
    b.x_min = bb.at(0).get<double>();
    b.y_min = bb.at(1).get<double>();
    b.x_max = bb.at(2).get<double>();
    b.y_max = bb.at(3).get<double>();
    if (b.x_min >= b.x_max || b.y_min >= b.y_max)
      throw GeometryError("degenerate bbox for class " + cls);
    b.confidence = e.value("confidence", 1.0);
    b.id = e.contains("id") ? e.at("id").get<std::string>()
                            : "b" + std::to_string(out.size());
    out.push_back(std::move(b));
  }
  return out;
}

// Normalized detector text lines: "class_index cx cy w h [confidence]",
// coordinates relative to the image size.
inline std::vector<BBox> boxes_from_detector_lines(const std::string& text, double image_w,
                                                   double image_h) {
  std::vector<BBox> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int cls;
    double cx, cy, w, h;
    if (!(ls >> cls >> cx >> cy >> w >> h))
      throw GeometryError("malformed detector line: " + line);
    double conf = 1.0;
    ls >> conf;
    const auto& classes = detector_classes();
    if (cls < 0 || cls >= static_cast<int>(classes.size()))
      throw GeometryError("detector class index out of range: " + std::to_string(cls));
    BBox b;
    b.kind = classes[cls].second;
    b.x_min = (cx - w / 2) * image_w;
    b.x_max = (cx + w / 2) * image_w;
    b.y_min = (cy - h / 2) * image_h;
    b.y_max = (cy + h / 2) * image_h;
    b.confidence = conf;
    b.id = "b" + std::to_string(out.size());
    out.push_back(std::move(b));
  }
  return out;
}

// JSON array of {x1,y1,x2,y2}.
inline std::vector<Segment> segments_from_json(const nlohmann::json& j) {
  std::vector<Segment> out;
  for (const auto& e : j) {
    Segment s{{e.at("x1").get<double>(), e.at("y1").get<double>()},
              {e.at("x2").get<double>(), e.at("y2").get<double>()}};
    if (s.p1 == s.p2) continue;  // degenerate detector output
    out.push_back(s);
  }
  return out;
}

inline nlohmann::ordered_json segment_to_json(const Segment& s) {
  return {{"x1", s.p1.x}, {"y1", s.p1.y}, {"x2", s.p2.x}, {"y2", s.p2.y}};
}

inline nlohmann::ordered_json clusters_to_json(const std::vector<NetCluster>& clusters) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : clusters) {
    auto segs = nlohmann::ordered_json::array();
    for (const auto& s : c.segments) segs.push_back(segment_to_json(s));
    arr.push_back({{"id", c.id}, {"segments", segs}});
  }
  return arr;
}

}  // namespace spicekit
