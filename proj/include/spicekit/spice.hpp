#pragma once

// Flat SPICE netlist model: parse, canonicalize, serialize, characterize.
// The dialect is line-oriented: one component per line, "*" comments,
// "+" continuations, whitespace-separated tokens, case-insensitive prefixes.

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spicekit {

enum class KindTag {
  Resistor,
  Capacitor,
  Inductor,
  Mosfet,
  Bjt,
  Diode,
  VoltageSource,
  CurrentSource,
  AcSource,
  DcSource,
  Battery,
  Ground,
};

// Device polarity where it applies (Mosfet: N/P channel, Bjt: NPN/PNP).
enum class Polarity { Unknown, N, P };

struct ComponentKind {
  KindTag tag;
  Polarity polarity = Polarity::Unknown;

  friend bool operator==(const ComponentKind&, const ComponentKind&) = default;
};

inline int kind_rank(KindTag t) { return static_cast<int>(t); }

inline std::string kind_label(const ComponentKind& k) {
  std::string base;
  switch (k.tag) {
    case KindTag::Resistor: base = "Resistor"; break;
    case KindTag::Capacitor: base = "Capacitor"; break;
    case KindTag::Inductor: base = "Inductor"; break;
    case KindTag::Mosfet: base = "Mosfet"; break;
    case KindTag::Bjt: base = "Bjt"; break;
    case KindTag::Diode: base = "Diode"; break;
    case KindTag::VoltageSource: base = "VoltageSource"; break;
    case KindTag::CurrentSource: base = "CurrentSource"; break;
    case KindTag::AcSource: base = "AcSource"; break;
    case KindTag::DcSource: base = "DcSource"; break;
    case KindTag::Battery: base = "Battery"; break;
    case KindTag::Ground: base = "Ground"; break;
  }
  if (k.tag == KindTag::Mosfet || k.tag == KindTag::Bjt) {
    if (k.polarity == Polarity::N) base += (k.tag == KindTag::Mosfet ? ":N" : ":NPN");
    if (k.polarity == Polarity::P) base += (k.tag == KindTag::Mosfet ? ":P" : ":PNP");
  }
  return base;
}

// Parses labels produced by kind_label; returns nullopt for unknown text.
inline std::optional<ComponentKind> kind_from_label(std::string_view s) {
  auto eat = [&](std::string_view prefix) {
    if (s.substr(0, prefix.size()) == prefix) return true;
    return false;
  };
  static const std::pair<std::string_view, KindTag> table[] = {
      {"Resistor", KindTag::Resistor},       {"Capacitor", KindTag::Capacitor},
      {"Inductor", KindTag::Inductor},       {"Mosfet", KindTag::Mosfet},
      {"Bjt", KindTag::Bjt},                 {"Diode", KindTag::Diode},
      {"VoltageSource", KindTag::VoltageSource},
      {"CurrentSource", KindTag::CurrentSource},
      {"AcSource", KindTag::AcSource},       {"DcSource", KindTag::DcSource},
      {"Battery", KindTag::Battery},         {"Ground", KindTag::Ground},
  };
  for (const auto& [name, tag] : table) {
    if (eat(name)) {
      ComponentKind k{tag, Polarity::Unknown};
      std::string_view rest = s.substr(name.size());
      if (rest == ":N" || rest == ":NPN") k.polarity = Polarity::N;
      else if (rest == ":P" || rest == ":PNP") k.polarity = Polarity::P;
      else if (!rest.empty()) continue;
      return k;
    }
  }
  return std::nullopt;
}

enum class TerminalRole { Pos, Neg, Drain, Gate, Source, Bulk, Collector, Base, Emitter };

inline std::string role_name(TerminalRole r) {
  switch (r) {
    case TerminalRole::Pos: return "pos";
    case TerminalRole::Neg: return "neg";
    case TerminalRole::Drain: return "drain";
    case TerminalRole::Gate: return "gate";
    case TerminalRole::Source: return "source";
    case TerminalRole::Bulk: return "bulk";
    case TerminalRole::Collector: return "collector";
    case TerminalRole::Base: return "base";
    case TerminalRole::Emitter: return "emitter";
  }
  return "?";
}

inline std::optional<TerminalRole> role_from_name(std::string_view s) {
  static const std::array<TerminalRole, 9> all = {
      TerminalRole::Pos,      TerminalRole::Neg,  TerminalRole::Drain,
      TerminalRole::Gate,     TerminalRole::Source, TerminalRole::Bulk,
      TerminalRole::Collector, TerminalRole::Base, TerminalRole::Emitter};
  for (TerminalRole r : all)
    if (role_name(r) == s) return r;
  return std::nullopt;
}

struct Terminal {
  TerminalRole role;
  std::string net;

  friend bool operator==(const Terminal&, const Terminal&) = default;
};

struct Component {
  std::string name;
  ComponentKind kind;
  std::vector<Terminal> terminals;  // order fixed per kind
  std::string value;                // opaque, "" = absent
  std::string model;                // "" = absent

  const std::string& net(TerminalRole r) const {
    for (const auto& t : terminals)
      if (t.role == r) return t.net;
    throw std::out_of_range("component " + name + " has no terminal " + role_name(r));
  }

  friend bool operator==(const Component&, const Component&) = default;
};

struct Netlist {
  std::optional<std::string> title;
  std::vector<Component> components;
  std::vector<std::string> directives;  // non-component lines, verbatim, in order

  // Distinct net identifiers referenced by any terminal, sorted.
  std::vector<std::string> nets() const {
    std::set<std::string> s;
    for (const auto& c : components)
      for (const auto& t : c.terminals) s.insert(t.net);
    return {s.begin(), s.end()};
  }

  friend bool operator==(const Netlist&, const Netlist&) = default;
};

struct NetlistStats {
  std::size_t num_components = 0;
  std::size_t num_nodes = 0;
  std::size_t num_mosfets = 0;
  std::size_t num_lines = 0;

  friend bool operator==(const NetlistStats&, const NetlistStats&) = default;
};

class SpiceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public SpiceError {
 public:
  enum class Code { UnknownPrefix, ArityError, UnsupportedDirective };

  ParseError(Code code, std::size_t line, const std::string& what)
      : SpiceError("line " + std::to_string(line) + ": " + what), code_(code), line_(line) {}

  Code code() const { return code_; }
  std::size_t line() const { return line_; }

 private:
  Code code_;
  std::size_t line_;
};

namespace detail {

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

inline std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

inline std::string join(const std::vector<std::string>& toks, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < toks.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += toks[i];
  }
  return out;
}

inline std::string join_with(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline Polarity mosfet_polarity(const std::string& model) {
  std::string m = to_upper(model);
  if (m.rfind("NMOS", 0) == 0 || m == "N") return Polarity::N;
  if (m.rfind("PMOS", 0) == 0 || m == "P") return Polarity::P;
  return Polarity::Unknown;
}

inline Polarity bjt_polarity(const std::string& model) {
  std::string m = to_upper(model);
  if (m.rfind("NPN", 0) == 0 || m.rfind("QNPN", 0) == 0) return Polarity::N;
  if (m.rfind("PNP", 0) == 0 || m.rfind("QPNP", 0) == 0) return Polarity::P;
  return Polarity::Unknown;
}

// Logical lines with their 1-based source line number, "+" continuations joined.
inline std::vector<std::pair<std::size_t, std::string>> logical_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t lineno = 0;
  std::string cur;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw = (nl == std::string_view::npos) ? text.substr(pos)
                                                          : text.substr(pos, nl - pos);
    ++lineno;
    std::string line = trim(raw);
    if (!line.empty()) {
      if (line[0] == '+') {
        std::string cont = trim(line.substr(1));
        if (out.empty())
          throw ParseError(ParseError::Code::UnknownPrefix, lineno,
                           "continuation line with nothing to continue");
        if (!cont.empty()) out.back().second += ' ' + cont;
      } else {
        out.emplace_back(lineno, line);
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace detail

// Required net-token count for a component prefix.
inline std::vector<TerminalRole> roles_for(KindTag tag) {
  switch (tag) {
    case KindTag::Mosfet:
      return {TerminalRole::Drain, TerminalRole::Gate, TerminalRole::Source, TerminalRole::Bulk};
    case KindTag::Bjt:
      return {TerminalRole::Collector, TerminalRole::Base, TerminalRole::Emitter};
    default:
      return {TerminalRole::Pos, TerminalRole::Neg};
  }
}

inline Netlist parse_netlist(std::string_view text) {
  Netlist n;
  for (const auto& [lineno, line] : detail::logical_lines(text)) {
    if (line[0] == '*') {
      n.directives.push_back(line);
      continue;
    }
    if (line[0] == '.') {
      auto toks = detail::tokenize(line);
      std::string d = detail::to_upper(toks[0]);
      if (d == ".SUBCKT" || d == ".ENDS")
        throw ParseError(ParseError::Code::UnsupportedDirective, lineno,
                         "hierarchical netlists are not supported: " + toks[0]);
      n.directives.push_back(line);
      continue;
    }
    if (!std::isalpha(static_cast<unsigned char>(line[0])))
      throw ParseError(ParseError::Code::UnknownPrefix, lineno,
                       "expected a component line, got: " + line);

    auto toks = detail::tokenize(line);
    const std::string& name = toks[0];
    char prefix = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    std::size_t rest = toks.size() - 1;

    Component c;
    c.name = name;
    auto arity = [&](std::size_t need) {
      if (rest < need)
        throw ParseError(ParseError::Code::ArityError, lineno,
                         name + ": expected at least " + std::to_string(need) +
                             " node tokens, got " + std::to_string(rest));
    };

    switch (prefix) {
      case 'R': case 'C': case 'L': case 'V': case 'I': case 'D': {
        arity(2);
        KindTag tag = prefix == 'R'   ? KindTag::Resistor
                      : prefix == 'C' ? KindTag::Capacitor
                      : prefix == 'L' ? KindTag::Inductor
                      : prefix == 'V' ? KindTag::VoltageSource
                      : prefix == 'I' ? KindTag::CurrentSource
                                      : KindTag::Diode;
        c.terminals = {{TerminalRole::Pos, toks[1]}, {TerminalRole::Neg, toks[2]}};
        if (prefix == 'D') {
          if (rest >= 3) c.model = toks[3];
          c.value = detail::join(toks, 4);
        } else {
          c.value = detail::join(toks, 3);
        }
        // V lines with an AC/DC flavor token map to the dedicated source kinds.
        if (prefix == 'V' && !c.value.empty()) {
          std::string first = detail::to_upper(detail::tokenize(c.value)[0]);
          if (first == "AC") tag = KindTag::AcSource;
          else if (first == "DC") tag = KindTag::DcSource;
        }
        c.kind = {tag, Polarity::Unknown};
        break;
      }
      case 'M': {
        arity(3);
        // 3 node tokens: bulk defaults to source. 4 tokens: nets + model.
        // 5+ tokens: 4 nets, model, trailing params.
        std::string d = toks[1], g = toks[2], s = toks[3], b;
        if (rest == 3) {
          b = s;
        } else if (rest == 4) {
          b = s;
          c.model = toks[4];
        } else {
          b = toks[4];
          c.model = toks[5];
          c.value = detail::join(toks, 6);
        }
        c.terminals = {{TerminalRole::Drain, d},
                       {TerminalRole::Gate, g},
                       {TerminalRole::Source, s},
                       {TerminalRole::Bulk, b}};
        c.kind = {KindTag::Mosfet, detail::mosfet_polarity(c.model)};
        break;
      }
      case 'Q': {
        arity(3);
        c.terminals = {{TerminalRole::Collector, toks[1]},
                       {TerminalRole::Base, toks[2]},
                       {TerminalRole::Emitter, toks[3]}};
        if (rest >= 4) c.model = toks[4];
        c.value = detail::join(toks, 5);
        c.kind = {KindTag::Bjt, detail::bjt_polarity(c.model)};
        break;
      }
      default:
        throw ParseError(ParseError::Code::UnknownPrefix, lineno,
                         std::string("unsupported component prefix '") + prefix + "' in " + name);
    }
    n.components.push_back(std::move(c));
  }
  return n;
}

inline std::string serialize_component(const Component& c) {
  std::string line = c.name;
  if (c.kind.tag == KindTag::Mosfet) {
    const std::string &d = c.net(TerminalRole::Drain), &g = c.net(TerminalRole::Gate),
                      &s = c.net(TerminalRole::Source), &b = c.net(TerminalRole::Bulk);
    line += ' ' + d + ' ' + g + ' ' + s;
    // 3-node emission only when it re-parses to the same structure: with
    // trailing params present, "M d g s MODEL p=..." would read the model
    // token as a bulk net, so the bulk is spelled out.
    if (b != s || !c.value.empty()) line += ' ' + b;
  } else {
    for (const auto& t : c.terminals) line += ' ' + t.net;
  }
  if (!c.model.empty()) line += ' ' + c.model;
  if (!c.value.empty()) line += ' ' + c.value;
  return line;
}

inline std::string serialize_netlist(const Netlist& n) {
  std::vector<std::string> lines;
  if (n.title && !n.title->empty()) lines.push_back("* " + *n.title);
  for (const auto& c : n.components) lines.push_back(serialize_component(c));
  for (const auto& d : n.directives) lines.push_back(d);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

inline const std::vector<std::string>& default_ground_aliases() {
  static const std::vector<std::string> aliases = {"0", "GND"};
  return aliases;
}

inline bool is_ground_alias(const std::string& net,
                            const std::vector<std::string>& aliases = default_ground_aliases()) {
  std::string u = detail::to_upper(net);
  return std::any_of(aliases.begin(), aliases.end(),
                     [&](const std::string& a) { return detail::to_upper(a) == u; });
}

// Upper-cases component names, rewrites ground aliases to "0", and sorts
// components by (kind, name). Idempotent.
inline Netlist canonicalize(const Netlist& n,
                            const std::vector<std::string>& ground_aliases =
                                default_ground_aliases()) {
  Netlist out = n;
  for (auto& c : out.components) {
    c.name = detail::to_upper(c.name);
    for (auto& t : c.terminals)
      if (is_ground_alias(t.net, ground_aliases)) t.net = "0";
  }
  std::stable_sort(out.components.begin(), out.components.end(),
                   [](const Component& a, const Component& b) {
                     int ra = kind_rank(a.kind.tag), rb = kind_rank(b.kind.tag);
                     return ra != rb ? ra < rb : a.name < b.name;
                   });
  return out;
}

inline NetlistStats netlist_stats(const Netlist& n) {
  NetlistStats s;
  s.num_components = n.components.size();
  s.num_nodes = n.nets().size();
  s.num_mosfets = static_cast<std::size_t>(
      std::count_if(n.components.begin(), n.components.end(),
                    [](const Component& c) { return c.kind.tag == KindTag::Mosfet; }));
  std::istringstream in(serialize_netlist(n));
  std::string line;
  while (std::getline(in, line))
    if (!detail::trim(line).empty()) ++s.num_lines;
  return s;
}

}  // namespace spicekit
