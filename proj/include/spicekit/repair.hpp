#pragma once

// Closed-loop verification: lint, prompt for a fix, extract, re-lint, bounded
// by max_iters. The trace records every intermediate netlist and finding set
// so harnesses can audit exactly what the model was shown and produced.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spicekit/lint.hpp"
#include "spicekit/llm.hpp"
#include "spicekit/prompts.hpp"

namespace spicekit {

enum class RepairStatus { Clean, FixedAfter, GaveUp };

inline std::string repair_status_name(RepairStatus s) {
  switch (s) {
    case RepairStatus::Clean: return "clean";
    case RepairStatus::FixedAfter: return "fixed_after";
    case RepairStatus::GaveUp: return "gave_up";
  }
  return "?";
}

struct RepairTrace {
  struct Iteration {
    std::string netlist_text;  // what was linted (or the raw unparseable reply)
    std::vector<Diagnostic> diagnostics;
    bool extracted = true;  // false when the reply yielded no netlist
  };

  std::vector<Iteration> iterations;  // [0] is the initial netlist
  RepairStatus status = RepairStatus::Clean;
  int fixed_after = 0;  // repair round that cleaned the netlist (status FixedAfter)
  int llm_calls = 0;
};

struct RepairResult {
  Netlist netlist;
  RepairTrace trace;
};

// Transport failure mid-loop: carries the partial trace for post-mortems.
class RepairAbortedError : public TransportError {
 public:
  RepairTrace trace;
  Netlist last_netlist;

  RepairAbortedError(const std::string& msg, RepairTrace t, Netlist n)
      : TransportError(msg), trace(std::move(t)), last_netlist(std::move(n)) {}
};

inline RepairResult repair_loop(LlmClient& client, const Netlist& initial, int max_iters = 3,
                                const LintConfig& lint_cfg = {}) {
  if (max_iters < 1) throw LlmError("repair_loop requires max_iters >= 1");

  RepairTrace trace;
  Netlist current = initial;
  std::vector<Diagnostic> diags = lint(current, lint_cfg);
  trace.iterations.push_back({serialize_netlist(current), diags, true});
  if (!has_errors(diags)) {
    trace.status = RepairStatus::Clean;
    return {std::move(current), std::move(trace)};
  }

  for (int round = 1; round <= max_iters; ++round) {
    auto prompt = build_repair_prompt(serialize_netlist(current), diags);
    std::string reply;
    try {
      reply = client.complete(prompt);
    } catch (const TransportError& e) {
      trace.status = RepairStatus::GaveUp;
      throw RepairAbortedError(e.what(), std::move(trace), std::move(current));
    }
    ++trace.llm_calls;
    try {
      Netlist fixed = extract_netlist_from_response(reply);
      current = std::move(fixed);
      diags = lint(current, lint_cfg);
      trace.iterations.push_back({serialize_netlist(current), diags, true});
      if (!has_errors(diags)) {
        trace.status = RepairStatus::FixedAfter;
        trace.fixed_after = round;
        return {std::move(current), std::move(trace)};
      }
    } catch (const NoNetlistFound&) {
      // Unusable reply: record it, keep the previous netlist and findings.
      trace.iterations.push_back({reply, diags, false});
    }
  }
  trace.status = RepairStatus::GaveUp;
  return {std::move(current), std::move(trace)};
}

inline nlohmann::ordered_json repair_trace_to_json(const RepairTrace& t) {
  nlohmann::ordered_json j;
  j["status"] = repair_status_name(t.status);
  if (t.status == RepairStatus::FixedAfter) j["fixed_after"] = t.fixed_after;
  j["llm_calls"] = t.llm_calls;
  auto iters = nlohmann::ordered_json::array();
  for (const auto& it : t.iterations)
    iters.push_back({{"netlist", it.netlist_text},
                     {"extracted", it.extracted},
                     {"diagnostics", diagnostics_to_json(it.diagnostics)}});
  j["iterations"] = std::move(iters);
  return j;
}

}  // namespace spicekit
