#pragma once

// Annotated schematic: detector boxes + clustered nets + terminal bindings.
// Exports a stable JSON schema and an SVG overlay, and can generate a
// deterministic netlist without any model in the loop.

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spicekit/geometry.hpp"
#include "spicekit/lint.hpp"

namespace spicekit {

// (box id, terminal role) -> cluster id; nullopt means Unbound.
using BindingKey = std::pair<std::string, TerminalRole>;
using BindingMap = std::map<BindingKey, std::optional<int>>;

struct Annotation {
  std::string image_ref;
  std::vector<BBox> boxes;
  std::vector<NetCluster> clusters;
  BindingMap bindings;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

class UnboundTerminalsError : public GeometryError {
 public:
  std::vector<BindingKey> unbound;

  explicit UnboundTerminalsError(std::vector<BindingKey> pairs)
      : GeometryError(format(pairs)), unbound(std::move(pairs)) {}

 private:
  static std::string format(const std::vector<BindingKey>& pairs) {
    std::string msg = "unbound terminals:";
    for (const auto& [box, role] : pairs) msg += " " + box + "." + role_name(role);
    return msg;
  }
};

// Binds every anchor of every box to the cluster holding the nearest cluster
// endpoint within max_dist pixels; ties go to the lower cluster id (clusters
// are visited in id order and only a strictly closer endpoint wins).
inline BindingMap bind_terminals(const std::vector<BBox>& boxes,
                                 const std::vector<NetCluster>& clusters,
                                 double max_dist = 60.0) {
  BindingMap bindings;
  for (const auto& box : boxes) {
    for (const auto& [role, anchor] : terminal_anchors(box)) {
      std::optional<int> best;
      double best_dist = 0.0;
      for (const auto& cluster : clusters) {
        for (const auto& ep : cluster.endpoints()) {
          double d = distance(anchor, ep);
          if (d > max_dist) continue;
          if (!best || d < best_dist || (d == best_dist && cluster.id < *best)) {
            best_dist = d;
            best = cluster.id;
          }
        }
      }
      bindings[{box.id, role}] = best;
    }
  }
  return bindings;
}

inline Annotation make_annotation(std::string image_ref, std::vector<BBox> boxes,
                                  std::vector<NetCluster> clusters, double max_dist = 60.0) {
  Annotation a;
  a.image_ref = std::move(image_ref);
  a.boxes = std::move(boxes);
  a.clusters = std::move(clusters);
  a.bindings = bind_terminals(a.boxes, a.clusters, max_dist);
  return a;
}

// Required roles that are unbound or missing from the binding map, in box
// order then template role order.
inline std::vector<BindingKey> unbound_terminals(const Annotation& a) {
  std::vector<BindingKey> out;
  for (const auto& box : a.boxes) {
    for (TerminalRole role : required_roles(box.kind)) {
      auto it = a.bindings.find({box.id, role});
      if (it == a.bindings.end() || !it->second) out.push_back({box.id, role});
    }
  }
  return out;
}

inline std::vector<Diagnostic> lint_annotation(const Annotation& a) {
  std::vector<Diagnostic> out;
  for (const auto& [box, role] : unbound_terminals(a))
    out.push_back({LintCode::UnboundTerminal, Severity::Error, box,
                   "terminal '" + role_name(role) + "' of box '" + box +
                       "' is not bound to any net cluster",
                   {{"box", box}, {"role", role_name(role)}}});
  sort_diagnostics(out);
  return out;
}

// Clusters that a Ground box's anchor binds to; their net becomes "0".
inline std::set<int> ground_clusters(const Annotation& a) {
  std::set<int> grounds;
  for (const auto& box : a.boxes) {
    if (box.kind.tag != KindTag::Ground) continue;
    auto it = a.bindings.find({box.id, TerminalRole::Pos});
    if (it != a.bindings.end() && it->second) grounds.insert(*it->second);
  }
  return grounds;
}

namespace ann_detail {

inline char name_prefix(KindTag tag) {
  switch (tag) {
    case KindTag::Resistor: return 'R';
    case KindTag::Capacitor: return 'C';
    case KindTag::Inductor: return 'L';
    case KindTag::Mosfet: return 'M';
    case KindTag::Bjt: return 'Q';
    case KindTag::Diode: return 'D';
    case KindTag::CurrentSource: return 'I';
    default: return 'V';  // voltage/AC/DC sources and batteries
  }
}

}  // namespace ann_detail

// Deterministic netlist generation: cluster k becomes net "Nk" ("0" when a
// Ground box binds it), names are kind prefix + per-prefix counter in box
// order, MOSFET/BJT models come from box polarity (else "UNKNOWN").
inline Netlist annotation_to_netlist(const Annotation& a) {
  if (auto missing = unbound_terminals(a); !missing.empty())
    throw UnboundTerminalsError(std::move(missing));

  std::set<int> grounds = ground_clusters(a);
  auto net_name = [&](int cluster) {
    return grounds.count(cluster) ? std::string("0") : "N" + std::to_string(cluster);
  };

  Netlist n;
  std::map<char, int> counters;
  for (const auto& box : a.boxes) {
    if (box.kind.tag == KindTag::Ground) continue;  // ground only renames its net
    Component c;
    c.kind = box.kind;
    char prefix = ann_detail::name_prefix(box.kind.tag);
    c.name = std::string(1, prefix) + std::to_string(++counters[prefix]);
    for (TerminalRole role : required_roles(box.kind))
      c.terminals.push_back({role, net_name(*a.bindings.at({box.id, role}))});
    switch (box.kind.tag) {
      case KindTag::Mosfet:
        c.terminals.push_back({TerminalRole::Bulk, c.net(TerminalRole::Source)});
        c.model = box.kind.polarity == Polarity::N   ? "NMOS"
                  : box.kind.polarity == Polarity::P ? "PMOS"
                                                     : "UNKNOWN";
        break;
      case KindTag::Bjt:
        c.model = box.kind.polarity == Polarity::N   ? "NPN"
                  : box.kind.polarity == Polarity::P ? "PNP"
                                                     : "UNKNOWN";
        break;
      case KindTag::AcSource: c.value = "AC"; break;
      case KindTag::DcSource:
      case KindTag::Battery: c.value = "DC"; break;
      default: break;
    }
    n.components.push_back(std::move(c));
  }
  return n;
}

// ---- JSON schema ----

inline nlohmann::ordered_json bbox_to_json(const BBox& b) {
  return {{"id", b.id},
          {"class", kind_label(b.kind)},
          {"bbox", {b.x_min, b.y_min, b.x_max, b.y_max}},
          {"confidence", b.confidence}};
}

inline nlohmann::ordered_json annotation_to_json(const Annotation& a) {
  nlohmann::ordered_json j;
  j["image_ref"] = a.image_ref;
  auto boxes = nlohmann::ordered_json::array();
  for (const auto& b : a.boxes) boxes.push_back(bbox_to_json(b));
  j["boxes"] = std::move(boxes);
  j["clusters"] = clusters_to_json(a.clusters);
  auto bindings = nlohmann::ordered_json::object();
  for (const auto& [key, target] : a.bindings) {
    std::string k = key.first + ":" + role_name(key.second);
    if (target)
      bindings[k] = *target;
    else
      bindings[k] = nullptr;
  }
  j["bindings"] = std::move(bindings);
  return j;
}

inline Annotation annotation_from_json(const nlohmann::json& j) {
  Annotation a;
  a.image_ref = j.value("image_ref", std::string{});
  for (const auto& e : j.at("boxes")) {
    BBox b;
    b.id = e.at("id").get<std::string>();
    std::string cls = e.at("class").get<std::string>();
    auto kind = kind_from_string(cls);
    if (!kind) throw GeometryError("unknown component class: " + cls);
    b.kind = *kind;
    const auto& bb = e.at("bbox");
    b.x_min = bb.at(0).get<double>();
    b.y_min = bb.at(1).get<double>();
    b.x_max = bb.at(2).get<double>();
    b.y_max = bb.at(3).get<double>();
    b.confidence = e.value("confidence", 1.0);
    a.boxes.push_back(std::move(b));
  }
  std::set<int> cluster_ids;
  for (const auto& e : j.at("clusters")) {
    NetCluster c;
    c.id = e.at("id").get<int>();
    c.segments = segments_from_json(e.at("segments"));
    cluster_ids.insert(c.id);
    a.clusters.push_back(std::move(c));
  }
  for (const auto& [key, value] : j.at("bindings").items()) {
    auto sep = key.rfind(':');
    if (sep == std::string::npos) throw GeometryError("malformed binding key: " + key);
    auto role = role_from_name(key.substr(sep + 1));
    if (!role) throw GeometryError("unknown terminal role in binding key: " + key);
    std::optional<int> target;
    if (!value.is_null()) {
      target = value.get<int>();
      if (!cluster_ids.count(*target))
        throw GeometryError("binding " + key + " targets unknown cluster " +
                            std::to_string(*target));
    }
    a.bindings[{key.substr(0, sep), *role}] = target;
  }
  return a;
}

// ---- SVG overlay ----

namespace ann_detail {

inline std::string class_color(KindTag tag) {
  switch (tag) {
    case KindTag::Resistor: return "#e6194b";
    case KindTag::Capacitor: return "#3cb44b";
    case KindTag::Inductor: return "#ffe119";
    case KindTag::Mosfet: return "#4363d8";
    case KindTag::Bjt: return "#f58231";
    case KindTag::Diode: return "#f032e6";
    case KindTag::VoltageSource: return "#9a6324";
    case KindTag::CurrentSource: return "#469990";
    case KindTag::AcSource: return "#911eb4";
    case KindTag::DcSource: return "#008080";
    case KindTag::Battery: return "#808000";
    case KindTag::Ground: return "#000000";
  }
  return "#888888";
}

inline std::string cluster_color(int id) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[static_cast<std::size_t>(id) % (sizeof(palette) / sizeof(palette[0]))];
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace ann_detail

// Overlay: one rect per box (stroke colored by class), one line per cluster
// segment (colored by cluster id), one red net-id label per cluster at its
// endpoint centroid.
inline std::string annotation_to_svg(const Annotation& a) {
  using ann_detail::fmt;
  double w = 1, h = 1;
  for (const auto& b : a.boxes) {
    w = std::max(w, b.x_max);
    h = std::max(h, b.y_max);
  }
  for (const auto& c : a.clusters)
    for (const auto& s : c.segments) {
      w = std::max({w, s.p1.x, s.p2.x});
      h = std::max({h, s.p1.y, s.p2.y});
    }
  w += 20;
  h += 20;

  std::set<int> grounds = ground_clusters(a);
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) +
                    "\" height=\"" + fmt(h) + "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) +
                    "\">\n";
  for (const auto& b : a.boxes) {
    svg += "  <rect x=\"" + fmt(b.x_min) + "\" y=\"" + fmt(b.y_min) + "\" width=\"" +
           fmt(b.width()) + "\" height=\"" + fmt(b.height()) + "\" fill=\"none\" stroke=\"" +
           ann_detail::class_color(b.kind.tag) + "\" stroke-width=\"2\"/>\n";
  }
  for (const auto& c : a.clusters) {
    std::string color = ann_detail::cluster_color(c.id);
    for (const auto& s : c.segments)
      svg += "  <line x1=\"" + fmt(s.p1.x) + "\" y1=\"" + fmt(s.p1.y) + "\" x2=\"" +
             fmt(s.p2.x) + "\" y2=\"" + fmt(s.p2.y) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
    auto pts = c.endpoints();
    Point centroid{0, 0};
    for (const auto& p : pts) {
      centroid.x += p.x;
      centroid.y += p.y;
    }
    if (!pts.empty()) {
      centroid.x /= static_cast<double>(pts.size());
      centroid.y /= static_cast<double>(pts.size());
    }
    std::string label =
        grounds.count(c.id) ? std::string("0") : "N" + std::to_string(c.id);
    svg += "  <text x=\"" + fmt(centroid.x) + "\" y=\"" + fmt(centroid.y) +
           "\" fill=\"red\" font-size=\"14\">" + label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string export_annotation(const Annotation& a, const std::string& format) {
  if (format == "json") return annotation_to_json(a).dump(2);
  if (format == "svg") return annotation_to_svg(a);
  throw GeometryError("unknown annotation export format: " + format);
}

}  // namespace spicekit
