#pragma once

// Prompt templates for the schematic-to-SPICE flow plus the response-side
// netlist extractor. Template wording is part of the product surface and is
// covered by golden-string tests; edit with care.

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spicekit/annotation.hpp"
#include "spicekit/lint.hpp"
#include "spicekit/llm.hpp"

namespace spicekit {

inline constexpr const char* kPromptPreamble =
    "You are an expert analog designer. You will be provided with a schematic, your task is "
    "to follow the below instructions carefully:";

inline constexpr const char* kComponentIdInstructions =
    "1. To identify the NMOS and PMOS MOSFET, follow the instructions carefully. For NMOS, "
    "the arrow on the source terminal points outwards from the transistor. For PMOS, the "
    "arrow on the source terminal points inward towards the transistor.\n"
    "2. List all the components correctly.";

inline constexpr const char* kNetlistInstructions =
    "1. List all the components which you can observe from the figure.\n"
    "2. MOSFET are 3 terminal devices with (drain, gate, source).\n"
    "3. For each component, look at the net number highlighted in red.\n"
    "4. To identify the source terminal of a MOSFET, choose the net highlighted in red which "
    "is nearest to the arrow of the MOSFET.\n"
    "5. Write a SPICE netlist.";

inline constexpr const char* kGenerationSystemPrompt =
    "You are an expert analog designer. Write a SPICE netlist for the circuit described by "
    "the user. Reply with only the netlist.";

// Stage 1: component identification (NMOS/PMOS disambiguation).
inline std::vector<ChatMessage> build_component_id_prompt(const std::string& image_ref) {
  return {{ChatRole::System, std::string(kPromptPreamble) + "\n" + kComponentIdInstructions},
          {ChatRole::User, "Schematic image: " + image_ref}};
}

// Stage 2: netlist generation from the annotated schematic. The user message
// carries the image reference and the net-id legend the red labels encode.
inline std::vector<ChatMessage> build_netlist_prompt(const Annotation& a) {
  std::set<int> grounds = ground_clusters(a);
  std::string user = "Annotated schematic image: " +
                     (a.image_ref.empty() ? std::string("(inline)") : a.image_ref) + "\n";
  user += "Net ids:";
  if (a.clusters.empty()) user += " (none)";
  for (const auto& c : a.clusters)
    user += std::string(" ") + (grounds.count(c.id) ? "0" : "N" + std::to_string(c.id)) + ",";
  if (!a.clusters.empty()) user.pop_back();
  user += "\nComponents:";
  if (a.boxes.empty()) user += " (none)";
  for (const auto& b : a.boxes) {
    if (b.kind.tag == KindTag::Ground) continue;
    user += "\n- " + b.id + ": " + kind_label(b.kind);
  }
  return {{ChatRole::System, std::string(kPromptPreamble) + "\n" + kNetlistInstructions},
          {ChatRole::User, user}};
}

// Text-description generation (benchmark + fine-tune target format).
inline std::vector<ChatMessage> build_generation_prompt(const std::string& description) {
  return {{ChatRole::System, kGenerationSystemPrompt}, {ChatRole::User, description}};
}

// Repair prompt: netlist plus verifier findings as machine-readable JSON.
// This wording is original to the artifact.
inline std::vector<ChatMessage> build_repair_prompt(const std::string& netlist_text,
                                                    const std::vector<Diagnostic>& diags) {
  std::string system =
      "You are an expert analog designer reviewing a SPICE netlist. Fix every issue "
      "reported by the verifier and reply with the complete corrected SPICE netlist in a "
      "fenced code block. Keep component names stable unless a fix requires renaming. Do "
      "not add commentary.";
  std::string user = "Netlist:\n```spice\n" + netlist_text + "\n```\n";
  user += "Verifier findings (JSON):\n```json\n" + diagnostics_to_json(diags).dump(2) +
          "\n```\nReturn the corrected netlist.";
  return {{ChatRole::System, std::move(system)}, {ChatRole::User, std::move(user)}};
}

namespace prompt_detail {

// The parser itself is deliberately lenient (netlists are token soup), so
// extraction applies a stricter shape gate to avoid reading prose like
// "I cannot determine the circuit." as a current source named "I": device
// names must be a known prefix letter followed by something containing a
// digit (R1, M12, q2a).
inline bool strict_device_name(const std::string& name) {
  if (name.size() < 2) return false;
  char c = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  if (std::string("RCLMQDVI").find(c) == std::string::npos) return false;
  bool has_digit = false;
  for (char ch : name.substr(1)) {
    if (std::isdigit(static_cast<unsigned char>(ch))) has_digit = true;
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  }
  return has_digit;
}

inline std::optional<Netlist> try_parse_strict(const std::string& candidate) {
  try {
    Netlist n = parse_netlist(candidate);
    if (n.components.empty()) return std::nullopt;
    for (const auto& c : n.components)
      if (!strict_device_name(c.name)) return std::nullopt;
    return n;
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

// True when the line parses standalone as a one-component netlist.
inline bool is_component_line(const std::string& line) {
  auto n = try_parse_strict(line);
  return n && n->components.size() == 1;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

// Candidate netlist texts inside fenced code blocks, in order.
inline std::vector<std::string> fenced_blocks(const std::string& text) {
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("```", pos);
    if (open == std::string::npos) break;
    std::size_t body = text.find('\n', open);
    if (body == std::string::npos) break;  // tag line never ends; no block body
    std::size_t close = text.find("```", body + 1);
    if (close == std::string::npos) break;
    blocks.push_back(text.substr(body + 1, close - body - 1));
    pos = close + 3;
  }
  return blocks;
}

// Maximal runs of component/comment/continuation lines, best-first by
// component-line count then earliest start.
inline std::vector<std::string> line_runs(const std::string& text) {
  auto lines = split_lines(text);
  struct Run {
    std::size_t start;
    std::vector<std::string> lines;
    int components = 0;
  };
  std::vector<Run> runs;
  Run cur{0, {}, 0};
  auto flush = [&]() {
    if (cur.components > 0) runs.push_back(cur);
    cur.lines.clear();
    cur.components = 0;
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string t = detail::trim(lines[i]);
    bool keeps_run = false;
    if (!t.empty()) {
      if (t[0] == '*' || t[0] == '+' || t[0] == '.') {
        keeps_run = !cur.lines.empty();  // only meaningful inside a run
      } else if (is_component_line(t)) {
        keeps_run = true;
        ++cur.components;
      }
    }
    if (keeps_run) {
      if (cur.lines.empty()) cur.start = i;
      cur.lines.push_back(lines[i]);
    } else {
      flush();
    }
  }
  flush();
  std::stable_sort(runs.begin(), runs.end(),
                   [](const Run& a, const Run& b) { return a.components > b.components; });
  std::vector<std::string> out;
  for (const auto& r : runs) out.push_back(detail::join_with(r.lines, "\n"));
  return out;
}

// Netlists embedded mid-sentence: take tokens from the first strict device
// name up to sentence punctuation and try to parse that span.
inline std::vector<std::string> inline_spans(const std::string& text) {
  std::vector<std::string> spans;
  for (const auto& line : split_lines(text)) {
    auto tokens = detail::tokenize(line);
    for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
      if (!strict_device_name(tokens[i])) continue;
      std::vector<std::string> span;
      for (std::size_t j = i; j < tokens.size(); ++j) {
        std::string tok = tokens[j];
        bool stop = false;
        while (!tok.empty() && std::string(".,!?;:").find(tok.back()) != std::string::npos) {
          tok.pop_back();
          stop = true;
        }
        if (!tok.empty()) span.push_back(tok);
        if (stop) break;
      }
      if (span.size() >= 3) spans.push_back(detail::join_with(span, " "));
    }
  }
  return spans;
}

}  // namespace prompt_detail

// Pulls a netlist out of free-form model text: fenced code blocks first, then
// maximal runs of netlist-shaped lines, then sentence-embedded spans.
inline Netlist extract_netlist_from_response(const std::string& text) {
  for (const auto& block : prompt_detail::fenced_blocks(text))
    if (auto n = prompt_detail::try_parse_strict(block)) return *n;
  for (const auto& run : prompt_detail::line_runs(text))
    if (auto n = prompt_detail::try_parse_strict(run)) return *n;
  for (const auto& span : prompt_detail::inline_spans(text))
    if (auto n = prompt_detail::try_parse_strict(span)) return *n;
  throw NoNetlistFound("no parseable SPICE netlist in response");
}

}  // namespace spicekit
