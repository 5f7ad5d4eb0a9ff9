#pragma once

// Structural netlist checks. Lint never mutates its input; findings feed the
// LLM repair loop as machine-readable JSON.

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "spicekit/spice.hpp"

namespace spicekit {

enum class LintCode {
  FloatingNet,
  NoGround,
  DuplicateName,
  DisconnectedSubcircuit,
  AllTerminalsShorted,
  UnboundTerminal,
};

enum class Severity { Error, Warning };

inline std::string lint_code_name(LintCode c) {
  switch (c) {
    case LintCode::FloatingNet: return "FloatingNet";
    case LintCode::NoGround: return "NoGround";
    case LintCode::DuplicateName: return "DuplicateName";
    case LintCode::DisconnectedSubcircuit: return "DisconnectedSubcircuit";
    case LintCode::AllTerminalsShorted: return "AllTerminalsShorted";
    case LintCode::UnboundTerminal: return "UnboundTerminal";
  }
  return "?";
}

inline std::string severity_name(Severity s) {
  return s == Severity::Error ? "error" : "warning";
}

struct Diagnostic {
  LintCode code;
  Severity severity;
  std::string subject;  // net id or component name
  std::string message;
  nlohmann::ordered_json payload;

  friend bool operator==(const Diagnostic& a, const Diagnostic& b) {
    return a.code == b.code && a.severity == b.severity && a.subject == b.subject;
  }
};

struct LintConfig {
  std::vector<std::string> ground_aliases = default_ground_aliases();
  Severity treat_no_ground_as = Severity::Warning;
  bool connectivity_check = true;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

// Canonical report order: code (enum order), then subject. Stable, so
// same-subject diagnostics keep their emission order.
inline void sort_diagnostics(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    if (a.code != b.code) return static_cast<int>(a.code) < static_cast<int>(b.code);
    return a.subject < b.subject;
  });
}

inline std::vector<Diagnostic> lint(const Netlist& n, const LintConfig& cfg = {}) {
  std::vector<Diagnostic> out;

  // net -> attached (component, terminal role) pairs
  std::map<std::string, std::vector<std::pair<std::string, TerminalRole>>> attach;
  for (const auto& c : n.components)
    for (const auto& t : c.terminals) attach[t.net].emplace_back(c.name, t.role);

  for (const auto& [net, terms] : attach) {
    if (terms.size() == 1 && !is_ground_alias(net, cfg.ground_aliases)) {
      const auto& [comp, role] = terms.front();
      out.push_back({LintCode::FloatingNet, Severity::Error, net,
                     "net '" + net + "' is attached to a single terminal (" + comp + "." +
                         role_name(role) + ")",
                     {{"net", net}, {"component", comp}, {"terminal", role_name(role)}}});
    }
  }

  if (!n.components.empty()) {
    bool grounded = std::any_of(attach.begin(), attach.end(), [&](const auto& kv) {
      return is_ground_alias(kv.first, cfg.ground_aliases);
    });
    if (!grounded) {
      nlohmann::ordered_json aliases = nlohmann::ordered_json::array();
      for (const auto& a : cfg.ground_aliases) aliases.push_back(a);
      out.push_back({LintCode::NoGround, cfg.treat_no_ground_as, "",
                     "no net matches a ground alias",
                     {{"aliases", aliases}}});
    }
  }

  {
    std::map<std::string, int> counts;
    for (const auto& c : n.components) ++counts[detail::to_upper(c.name)];
    for (const auto& [name, count] : counts) {
      if (count > 1)
        out.push_back({LintCode::DuplicateName, Severity::Error, name,
                       "component name '" + name + "' appears " + std::to_string(count) +
                           " times",
                       {{"name", name}, {"count", count}}});
    }
  }

  if (cfg.connectivity_check && n.components.size() >= 2) {
    std::vector<int> parent(n.components.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::map<std::string, int> first_on_net;
    for (std::size_t i = 0; i < n.components.size(); ++i) {
      for (const auto& t : n.components[i].terminals) {
        auto [it, fresh] = first_on_net.emplace(t.net, static_cast<int>(i));
        if (!fresh) parent[find(static_cast<int>(i))] = find(it->second);
      }
    }
    std::map<int, std::vector<std::string>> islands;
    for (std::size_t i = 0; i < n.components.size(); ++i)
      islands[find(static_cast<int>(i))].push_back(n.components[i].name);
    if (islands.size() >= 2) {
      std::vector<std::vector<std::string>> groups;
      for (auto& [root, members] : islands) {
        std::sort(members.begin(), members.end());
        groups.push_back(members);
      }
      // keep the largest island (ties: smallest leading name) as the main one
      std::sort(groups.begin(), groups.end(),
                [](const auto& a, const auto& b) {
                  return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
                });
      for (std::size_t i = 1; i < groups.size(); ++i) {
        nlohmann::ordered_json members = nlohmann::ordered_json::array();
        for (const auto& m : groups[i]) members.push_back(m);
        out.push_back({LintCode::DisconnectedSubcircuit, Severity::Warning, groups[i].front(),
                       "components {" +
                           std::accumulate(std::next(groups[i].begin()), groups[i].end(),
                                           groups[i].front(),
                                           [](std::string acc, const std::string& s) {
                                             return std::move(acc) + ", " + s;
                                           }) +
                           "} share no net with the rest of the circuit",
                       {{"components", members}}});
      }
    }
  }

  for (const auto& c : n.components) {
    if (c.terminals.size() < 2) continue;
    bool shorted = std::all_of(c.terminals.begin(), c.terminals.end(), [&](const Terminal& t) {
      return t.net == c.terminals.front().net;
    });
    if (shorted)
      out.push_back({LintCode::AllTerminalsShorted, Severity::Warning, c.name,
                     "all terminals of '" + c.name + "' are tied to net '" +
                         c.terminals.front().net + "'",
                     {{"component", c.name}, {"net", c.terminals.front().net}}});
  }

  sort_diagnostics(out);
  return out;
}

inline nlohmann::ordered_json diagnostic_to_json(const Diagnostic& d) {
  return nlohmann::ordered_json{{"code", lint_code_name(d.code)},
                                {"severity", severity_name(d.severity)},
                                {"subject", d.subject},
                                {"message", d.message},
                                {"payload", d.payload}};
}

inline nlohmann::ordered_json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : diags) arr.push_back(diagnostic_to_json(d));
  return arr;
}

enum class ReportFormat { Text, Json };

inline std::string render_report(const std::vector<Diagnostic>& diags, ReportFormat fmt) {
  if (fmt == ReportFormat::Json) return diagnostics_to_json(diags).dump(2);
  std::vector<Diagnostic> sorted = diags;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return static_cast<int>(a.severity) < static_cast<int>(b.severity);
  });
  std::string out;
  for (const auto& d : sorted) {
    if (!out.empty()) out += '\n';
    out += severity_name(d.severity) + ": " + lint_code_name(d.code) + ": " + d.message;
  }
  return out;
}

}  // namespace spicekit
