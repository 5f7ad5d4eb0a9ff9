#pragma once

// Fine-tuning dataset records and the chat-format JSONL exporter
// ({"messages":[system,user,assistant]} per line).

#include <string>
#include <vector>

#include <json.hpp>

#include "spicekit/prompts.hpp"
#include "spicekit/spice.hpp"

namespace spicekit {

struct DatasetRecord {
  std::string id;
  std::string image_ref;
  std::string caption;
  std::string description;
  Netlist netlist;
  NetlistStats stats;  // must equal netlist_stats(netlist)
};

inline DatasetRecord make_dataset_record(std::string id, std::string image_ref,
                                         std::string caption, std::string description,
                                         Netlist netlist) {
  DatasetRecord r;
  r.id = std::move(id);
  r.image_ref = std::move(image_ref);
  r.caption = std::move(caption);
  r.description = std::move(description);
  r.stats = netlist_stats(netlist);
  r.netlist = std::move(netlist);
  return r;
}

struct FinetuneExport {
  struct Skip {
    std::string id;
    std::string reason;
  };

  std::string jsonl;  // UTF-8, one record per line, newline-terminated
  std::vector<Skip> skipped;
};

// Serializes records to chat-format JSONL in input order. Records that cannot
// form a valid training example are skipped and reported, not fatal.
inline FinetuneExport export_finetune_records(const std::vector<DatasetRecord>& records) {
  FinetuneExport out;
  for (const auto& r : records) {
    std::string netlist_text = serialize_netlist(r.netlist);
    if (r.description.empty()) {
      out.skipped.push_back({r.id, "empty description"});
      continue;
    }
    if (netlist_text.empty()) {
      out.skipped.push_back({r.id, "empty netlist"});
      continue;
    }
    if (r.stats != netlist_stats(r.netlist)) {
      out.skipped.push_back({r.id, "stats do not match netlist"});
      continue;
    }
    nlohmann::ordered_json line{
        {"messages",
         {{{"role", "system"}, {"content", kGenerationSystemPrompt}},
          {{"role", "user"}, {"content", r.description}},
          {{"role", "assistant"}, {"content", netlist_text}}}}};
    out.jsonl += line.dump();
    out.jsonl += '\n';
  }
  return out;
}

// Records file: JSON array of {id, description, netlist: SPICE text,
// image_ref?, caption?}. Unparseable netlists are reported as skips by the
// caller contract, so this loader throws ParseError per bad record id.
inline std::vector<DatasetRecord> load_dataset_records(const nlohmann::json& j) {
  std::vector<DatasetRecord> records;
  for (const auto& e : j) {
    DatasetRecord r;
    r.id = e.contains("id") && e["id"].is_string()
               ? e["id"].get<std::string>()
               : std::to_string(records.size());
    r.image_ref = e.value("image_ref", std::string{});
    r.caption = e.value("caption", std::string{});
    r.description = e.value("description", std::string{});
    r.netlist = parse_netlist(e.value("netlist", std::string{}));
    r.stats = netlist_stats(r.netlist);
    records.push_back(std::move(r));
  }
  return records;
}

inline nlohmann::ordered_json stats_to_json(const NetlistStats& s) {
  return {{"components", s.num_components},
          {"nodes", s.num_nodes},
          {"mosfets", s.num_mosfets},
          {"lines", s.num_lines}};
}

}  // namespace spicekit
