#pragma once

// 20-design benchmark harness: issue n generations per design, score each
// sample as lint-clean (+ reference similarity when available), and emit the
// success table as text and JSON.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spicekit/graph.hpp"
#include "spicekit/lint.hpp"
#include "spicekit/llm.hpp"
#include "spicekit/prompts.hpp"

namespace spicekit {

enum class BenchCategory { Easy, Medium, Hard };

inline std::string bench_category_name(BenchCategory c) {
  switch (c) {
    case BenchCategory::Easy: return "Easy";
    case BenchCategory::Medium: return "Medium";
    case BenchCategory::Hard: return "Hard";
  }
  return "?";
}

// Difficulty split by design id: Easy 1-7, Medium 8-14, Hard 15-20.
inline BenchCategory bench_category_from_id(int id) {
  if (id <= 7) return BenchCategory::Easy;
  if (id <= 14) return BenchCategory::Medium;
  return BenchCategory::Hard;
}

struct BenchmarkDesign {
  int id = 0;
  std::string description;
  BenchCategory category = BenchCategory::Easy;
  std::optional<Netlist> reference;  // enables the similarity check
};

inline BenchmarkDesign make_design(int id, std::string description,
                                   std::optional<Netlist> reference = std::nullopt) {
  return {id, std::move(description), bench_category_from_id(id), std::move(reference)};
}

// The bundled 20-design suite.
inline std::vector<BenchmarkDesign> default_benchmark_suite() {
  std::vector<BenchmarkDesign> designs;
  const char* descriptions[] = {
      "Common-source amplifier",
      "2-stage common source amplifier with resistive load",
      "Common-drain amplifier",
      "common-gate amplifier",
      "Single-Stage RC Low-Pass Filter",
      "Source Degenerated Amplifier",
      "Current Mirror",
      "Common-source amplifier using active load",
      "Cascode amplifier using NMOS and resistive load",
      "1-stage differential amplifier",
      "Diode-connected Amplifier",
      "Buffer design using MOSFET",
      "2-input NAND gate",
      "2-stage amplifier with miller compensation",
      "SRAM cell with 6 transistors",
      "2-stage op-amp with differential inputs and single-handled output",
      "Fully Differential Amplifier with Common-Mode Feedback",
      "Cross-coupled LC oscillator",
      "Telescopic cascode operational amplifier",
      "Bandgap Reference Amplifier",
  };
  for (int i = 0; i < 20; ++i) designs.push_back(make_design(i + 1, descriptions[i]));
  return designs;
}

struct BenchConfig {
  int n = 10;                          // samples per design
  double similarity_threshold = 100.0;  // applied only when a reference exists
  GraphMode mode = GraphMode::ComponentAdjacency;
  LintConfig lint;
  GedCostConfig ged;
};

struct BenchRow {
  int id = 0;
  std::string description;
  BenchCategory category = BenchCategory::Easy;
  int successes = 0;
  int n = 0;
  std::vector<std::string> failures;  // one reason per failed sample, in order
};

struct BenchTable {
  std::vector<BenchRow> rows;
  int n = 0;
  double similarity_threshold = 100.0;
};

// Success proxy for one sample: extracts, lints clean of Errors, and (when a
// reference netlist exists) scores similarity >= threshold. The paper
// validated samples manually; this is the documented mechanical substitute.
inline BenchTable run_benchmark(const std::vector<BenchmarkDesign>& designs, LlmClient& client,
                                const BenchConfig& cfg = {}) {
  if (cfg.n < 1) throw LlmError("run_benchmark requires n >= 1");

  BenchTable table;
  table.n = cfg.n;
  table.similarity_threshold = cfg.similarity_threshold;
  for (const auto& design : designs) {
    BenchRow row{design.id, design.description, design.category, 0, cfg.n, {}};
    auto prompt = build_generation_prompt(design.description);
    for (int sample = 0; sample < cfg.n; ++sample) {
      std::string reply;
      try {
        reply = client.complete(prompt);
      } catch (const TransportError& e) {
        row.failures.push_back(std::string("transport: ") + e.what());
        continue;
      }
      Netlist n;
      try {
        n = extract_netlist_from_response(reply);
      } catch (const NoNetlistFound&) {
        row.failures.push_back("no netlist found in response");
        continue;
      }
      auto diags = lint(n, cfg.lint);
      if (has_errors(diags)) {
        row.failures.push_back("lint errors: " + std::to_string(std::count_if(
                                   diags.begin(), diags.end(), [](const Diagnostic& d) {
                                     return d.severity == Severity::Error;
                                   })));
        continue;
      }
      if (design.reference) {
        GedResult r = similarity(*design.reference, n, cfg.mode, cfg.ged);
        if (r.similarity < cfg.similarity_threshold) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "similarity %.2f below threshold", r.similarity);
          row.failures.push_back(buf);
          continue;
        }
      }
      ++row.successes;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Text table: "id, description, successes, category" per row.
inline std::string bench_table_text(const BenchTable& t) {
  std::string out = "id, description, successes, category\n";
  for (const auto& r : t.rows)
    out += std::to_string(r.id) + ", " + r.description + ", " +
           std::to_string(r.successes) + ", " + bench_category_name(r.category) + "\n";
  return out;
}

inline nlohmann::ordered_json bench_table_to_json(const BenchTable& t) {
  nlohmann::ordered_json j;
  j["n"] = t.n;
  j["similarity_threshold"] = t.similarity_threshold;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json row;
    row["id"] = r.id;
    row["description"] = r.description;
    row["category"] = bench_category_name(r.category);
    row["successes"] = r.successes;
    row["n"] = r.n;
    row["failures"] = r.failures;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

// Suite file: JSON array of {id, description, reference?: SPICE text}.
inline std::vector<BenchmarkDesign> suite_from_json(const nlohmann::json& j) {
  std::vector<BenchmarkDesign> designs;
  for (const auto& e : j) {
    int id = e.at("id").get<int>();
    std::string desc = e.at("description").get<std::string>();
    std::optional<Netlist> ref;
    if (e.contains("reference") && e["reference"].is_string())
      ref = parse_netlist(e["reference"].get<std::string>());
    designs.push_back(make_design(id, std::move(desc), std::move(ref)));
  }
  return designs;
}

}  // namespace spicekit
