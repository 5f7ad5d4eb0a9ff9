// spicekit command-line tool: schematic-to-SPICE pipeline stages as
// composable subcommands. stdout carries data, stderr carries logs.
//
// Exit codes: 0 success, 1 usage/input error, 2 lint errors found (lint),
// 3 transport failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spicekit/spicekit.hpp"

namespace sk = spicekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitLintErrors = 2;
constexpr int kExitTransport = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

nlohmann::json read_json(const std::string& path) {
  return nlohmann::json::parse(read_file(path));
}

sk::Netlist load_netlist(const std::string& path) {
  return sk::parse_netlist(read_file(path));
}

sk::GraphMode parse_mode(const std::string& name) {
  auto m = sk::graph_mode_from_name(name);
  if (!m) throw CLI::ValidationError("--mode", "unknown graph mode: " + name);
  return *m;
}

// Common LLM client flags shared by `generate` and `bench`.
struct ClientOptions {
  std::string kind = "replay";  // http | replay
  std::string fixture;          // replay JSONL path
  sk::HttpClientConfig http;

  void attach(CLI::App* cmd) {
    cmd->add_option("--client", kind, "LLM client: http or replay")
        ->check(CLI::IsMember({"http", "replay"}))
        ->capture_default_str();
    cmd->add_option("--replay-fixture", fixture, "JSONL file of scripted responses");
    cmd->add_option("--base-url", http.base_url, "chat endpoint scheme://host[:port]")
        ->capture_default_str();
    cmd->add_option("--path", http.path, "chat endpoint path")->capture_default_str();
    cmd->add_option("--model", http.model, "model name")->capture_default_str();
    cmd->add_option("--temperature", http.temperature, "sampling temperature")
        ->capture_default_str();
    cmd->add_option("--api-key-env", http.api_key_env, "env var holding the bearer token")
        ->capture_default_str();
    cmd->add_option("--timeout", http.timeout_seconds, "request timeout in seconds")
        ->capture_default_str();
    cmd->add_option("--retries", http.max_retries, "retry attempts after the first")
        ->capture_default_str();
  }

  std::unique_ptr<sk::LlmClient> make() const {
    if (kind == "replay") {
      if (fixture.empty())
        throw CLI::ValidationError("--replay-fixture", "replay client needs a fixture file");
      return std::make_unique<sk::ReplayClient>(sk::ReplayClient::from_jsonl_file(fixture));
    }
    return std::make_unique<sk::HttpLlmClient>(http);
  }
};

// Optional JSON config file: values become flag defaults, command-line flags
// override. Keys mirror long flag names without the leading dashes.
nlohmann::json load_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") return read_json(argv[i + 1]);
  return nlohmann::json::object();
}

template <typename T>
void config_default(const nlohmann::json& cfg, const std::string& key, T& target) {
  if (cfg.contains(key)) target = cfg.at(key).get<T>();
}

int cmd_parse(const std::string& file) {
  sk::Netlist n = sk::canonicalize(load_netlist(file));
  std::cout << sk::serialize_netlist(n) << "\n";
  return kExitOk;
}

int cmd_stats(const std::vector<std::string>& files, bool as_json,
              const std::string& hist_dir) {
  struct Entry {
    std::string file;
    sk::NetlistStats stats;
  };
  std::vector<Entry> entries;
  for (const auto& f : files) entries.push_back({f, sk::netlist_stats(load_netlist(f))});

  // Aggregate histograms over the four dimensions.
  std::map<std::string, std::map<std::size_t, std::size_t>> hist;
  for (const auto& e : entries) {
    ++hist["components"][e.stats.num_components];
    ++hist["nodes"][e.stats.num_nodes];
    ++hist["mosfets"][e.stats.num_mosfets];
    ++hist["lines"][e.stats.num_lines];
  }

  if (!hist_dir.empty()) {
    std::filesystem::create_directories(hist_dir);
    for (const auto& [dim, counts] : hist) {
      std::string csv = dim + ",count\n";
      for (const auto& [value, count] : counts)
        csv += std::to_string(value) + "," + std::to_string(count) + "\n";
      write_file(hist_dir + "/" + dim + ".csv", csv);
    }
    std::cerr << "wrote 4 histogram CSVs to " << hist_dir << "\n";
  }

  if (as_json) {
    nlohmann::ordered_json j;
    auto files_json = nlohmann::ordered_json::array();
    for (const auto& e : entries)
      files_json.push_back({{"file", e.file}, {"stats", sk::stats_to_json(e.stats)}});
    j["files"] = std::move(files_json);
    nlohmann::ordered_json hj;
    for (const char* dim : {"components", "nodes", "mosfets", "lines"}) {
      nlohmann::ordered_json counts;
      for (const auto& [value, count] : hist[dim])
        counts[std::to_string(value)] = count;
      hj[dim] = std::move(counts);
    }
    j["histograms"] = std::move(hj);
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& e : entries)
      std::cout << e.file << ": components=" << e.stats.num_components
                << " nodes=" << e.stats.num_nodes << " mosfets=" << e.stats.num_mosfets
                << " lines=" << e.stats.num_lines << "\n";
  }
  return kExitOk;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& mode_name,
                int exact_limit, long long max_expansions) {
  sk::GraphMode mode = parse_mode(mode_name);
  sk::GedCostConfig cfg;
  if (exact_limit >= 0) cfg.exact_node_limit = exact_limit;
  if (max_expansions > 0) cfg.max_expansions = static_cast<std::size_t>(max_expansions);
  sk::GedResult r = sk::similarity(load_netlist(a), load_netlist(b), mode, cfg);
  std::cout << sk::ged_result_to_json(r, mode).dump(2) << "\n";
  return kExitOk;
}

int cmd_lint(const std::string& file, bool as_json, bool no_connectivity,
             const std::string& no_ground_severity) {
  sk::LintConfig cfg;
  cfg.connectivity_check = !no_connectivity;
  if (no_ground_severity == "error") cfg.treat_no_ground_as = sk::Severity::Error;
  auto diags = sk::lint(load_netlist(file), cfg);
  std::cout << sk::render_report(diags,
                                 as_json ? sk::ReportFormat::Json : sk::ReportFormat::Text);
  if (!as_json && diags.empty()) std::cerr << "clean\n";
  return sk::has_errors(diags) ? kExitLintErrors : kExitOk;
}

int cmd_cluster(const std::string& segments_file, const std::string& boxes_file,
                double radius, double margin, bool body_proximity) {
  auto segments = sk::segments_from_json(read_json(segments_file));
  if (!boxes_file.empty()) {
    auto boxes = sk::boxes_from_json(read_json(boxes_file));
    segments = sk::mask_segments(segments, boxes, margin);
  }
  sk::ClusterConfig cfg;
  cfg.radius = radius;
  cfg.merge_on_body_proximity = body_proximity;
  auto clusters = sk::cluster_segments(segments, cfg);
  std::cout << sk::clusters_to_json(clusters).dump(2) << "\n";
  return kExitOk;
}

int cmd_annotate(const std::string& segments_file, const std::string& boxes_file,
                 const std::string& image_ref, double radius, double margin,
                 double max_dist, bool body_proximity, const std::string& out_json,
                 const std::string& out_svg) {
  auto boxes = sk::boxes_from_json(read_json(boxes_file));
  auto segments = sk::segments_from_json(read_json(segments_file));
  segments = sk::mask_segments(segments, boxes, margin);
  sk::ClusterConfig ccfg;
  ccfg.radius = radius;
  ccfg.merge_on_body_proximity = body_proximity;
  auto clusters = sk::cluster_segments(segments, ccfg);
  sk::Annotation a = sk::make_annotation(image_ref, std::move(boxes), std::move(clusters),
                                         max_dist);
  std::string json_text = sk::export_annotation(a, "json");
  if (out_json.empty())
    std::cout << json_text << "\n";
  else
    write_file(out_json, json_text + "\n");
  if (!out_svg.empty()) write_file(out_svg, sk::export_annotation(a, "svg"));
  for (const auto& d : sk::lint_annotation(a))
    std::cerr << sk::severity_name(d.severity) << ": " << d.message << "\n";
  return kExitOk;
}

int cmd_netlist_from_annotation(const std::string& file) {
  sk::Annotation a = sk::annotation_from_json(read_json(file));
  sk::Netlist n = sk::annotation_to_netlist(a);
  std::cout << sk::serialize_netlist(n) << "\n";
  return kExitOk;
}

int cmd_generate(const std::string& annotation_file, const ClientOptions& copts,
                 int max_iters, bool as_json) {
  sk::Annotation a = sk::annotation_from_json(read_json(annotation_file));
  auto client = copts.make();
  auto prompt = sk::build_netlist_prompt(a);
  std::string reply = client->complete(prompt);
  sk::Netlist initial = sk::extract_netlist_from_response(reply);
  sk::RepairResult result = sk::repair_loop(*client, initial, max_iters);
  if (as_json) {
    nlohmann::ordered_json j;
    j["netlist"] = sk::serialize_netlist(result.netlist);
    j["trace"] = sk::repair_trace_to_json(result.trace);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << sk::serialize_netlist(result.netlist) << "\n";
    std::cerr << "repair status: " << sk::repair_status_name(result.trace.status)
              << " after " << result.trace.llm_calls << " LLM call(s)\n";
  }
  return kExitOk;
}

int cmd_export_finetune(const std::string& records_file, const std::string& out) {
  auto records = sk::load_dataset_records(read_json(records_file));
  sk::FinetuneExport ex = sk::export_finetune_records(records);
  for (const auto& skip : ex.skipped)
    std::cerr << "skipped record " << skip.id << ": " << skip.reason << "\n";
  if (out.empty())
    std::cout << ex.jsonl;
  else
    write_file(out, ex.jsonl);
  return kExitOk;
}

int cmd_bench(const std::string& suite_file, const ClientOptions& copts, int n,
              double threshold, const std::string& mode_name, bool as_json) {
  std::vector<sk::BenchmarkDesign> designs =
      suite_file.empty() ? sk::default_benchmark_suite()
                         : sk::suite_from_json(read_json(suite_file));
  auto client = copts.make();
  sk::BenchConfig cfg;
  cfg.n = n;
  cfg.similarity_threshold = threshold;
  cfg.mode = parse_mode(mode_name);
  sk::BenchTable table = sk::run_benchmark(designs, *client, cfg);
  if (as_json)
    std::cout << sk::bench_table_to_json(table).dump(2) << "\n";
  else
    std::cout << sk::bench_table_text(table);
  return kExitOk;
}

int cmd_graph(const std::string& file, const std::string& mode_name,
              const std::string& format) {
  sk::CircuitGraph g = sk::build_graph(load_netlist(file), parse_mode(mode_name));
  if (format == "dot")
    std::cout << sk::graph_to_dot(g);
  else
    std::cout << sk::graph_to_json(g).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spicekit: schematic-to-SPICE pipeline toolkit"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file; flags override its values");

  nlohmann::json cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  // parse
  auto* parse_cmd = app.add_subcommand("parse", "parse a netlist and echo its canonical form");
  std::string parse_file;
  parse_cmd->add_option("file", parse_file, "netlist file")->required();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "per-file stats and aggregate histograms");
  std::vector<std::string> stats_files;
  bool stats_json = false;
  std::string hist_dir;
  stats_cmd->add_option("files", stats_files, "netlist files")->required()->expected(-1);
  stats_cmd->add_flag("--json", stats_json, "emit JSON");
  stats_cmd->add_option("--hist", hist_dir, "directory for histogram CSVs");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "similarity score between two netlists");
  std::string cmp_a, cmp_b, cmp_mode = "component_adjacency";
  int exact_limit = -1;
  long long max_expansions = 0;
  config_default(cfg, "mode", cmp_mode);
  compare_cmd->add_option("a", cmp_a, "first netlist")->required();
  compare_cmd->add_option("b", cmp_b, "second netlist")->required();
  compare_cmd->add_option("--mode", cmp_mode, "component_adjacency or bipartite")
      ->capture_default_str();
  compare_cmd->add_option("--exact-limit", exact_limit,
                          "max node count for the exact search");
  compare_cmd->add_option("--max-expansions", max_expansions,
                          "search expansion budget before greedy fallback");

  // lint
  auto* lint_cmd = app.add_subcommand("lint", "verify a netlist and report findings");
  std::string lint_file, no_ground_severity = "warning";
  bool lint_json = false, no_connectivity = false;
  lint_cmd->add_option("file", lint_file, "netlist file")->required();
  lint_cmd->add_flag("--json", lint_json, "emit JSON diagnostics");
  lint_cmd->add_flag("--no-connectivity", no_connectivity, "skip the connectivity check");
  lint_cmd->add_option("--no-ground-severity", no_ground_severity,
                       "severity for a missing ground: warning or error")
      ->check(CLI::IsMember({"warning", "error"}))
      ->capture_default_str();

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "mask and cluster line segments");
  std::string seg_file, box_file;
  double radius = 40.0, margin = 0.0;
  bool body_proximity = false;
  config_default(cfg, "radius", radius);
  config_default(cfg, "margin", margin);
  cluster_cmd->add_option("--segments", seg_file, "segments JSON")->required();
  cluster_cmd->add_option("--boxes", box_file, "detector boxes JSON (enables masking)");
  cluster_cmd->add_option("--radius", radius, "endpoint merge radius in pixels")
      ->capture_default_str();
  cluster_cmd->add_option("--margin", margin, "box inflation margin for masking")
      ->capture_default_str();
  cluster_cmd->add_flag("--body-proximity", body_proximity,
                        "also merge endpoint-to-body contacts (T junctions)");

  // annotate
  auto* annotate_cmd =
      app.add_subcommand("annotate", "full geometry stage: mask, cluster, bind, export");
  std::string ann_segments, ann_boxes, ann_image, ann_out_json, ann_out_svg;
  double ann_radius = 40.0, ann_margin = 0.0, ann_max_dist = 60.0;
  bool ann_body_proximity = false;
  config_default(cfg, "radius", ann_radius);
  config_default(cfg, "margin", ann_margin);
  config_default(cfg, "max_dist", ann_max_dist);
  annotate_cmd->add_option("--segments", ann_segments, "segments JSON")->required();
  annotate_cmd->add_option("--boxes", ann_boxes, "detector boxes JSON")->required();
  annotate_cmd->add_option("--image", ann_image, "image reference recorded in the annotation");
  annotate_cmd->add_option("--radius", ann_radius, "endpoint merge radius")
      ->capture_default_str();
  annotate_cmd->add_option("--margin", ann_margin, "masking margin")->capture_default_str();
  annotate_cmd->add_option("--max-dist", ann_max_dist, "terminal binding distance")
      ->capture_default_str();
  annotate_cmd->add_flag("--body-proximity", ann_body_proximity,
                         "merge endpoint-to-body contacts");
  annotate_cmd->add_option("--out-json", ann_out_json, "write annotation JSON here");
  annotate_cmd->add_option("--out-svg", ann_out_svg, "write annotation SVG here");

  // netlist-from-annotation
  auto* nfa_cmd = app.add_subcommand("netlist-from-annotation",
                                     "deterministic netlist from an annotation JSON");
  std::string nfa_file;
  nfa_cmd->add_option("file", nfa_file, "annotation JSON")->required();

  // generate
  auto* generate_cmd =
      app.add_subcommand("generate", "prompt an LLM for a netlist and run the repair loop");
  std::string gen_annotation;
  int max_iters = 3;
  bool gen_json = false;
  ClientOptions gen_client;
  config_default(cfg, "max_iters", max_iters);
  config_default(cfg, "base_url", gen_client.http.base_url);
  config_default(cfg, "model", gen_client.http.model);
  generate_cmd->add_option("--annotation", gen_annotation, "annotation JSON")->required();
  generate_cmd->add_option("--max-iters", max_iters, "repair loop bound")
      ->capture_default_str();
  generate_cmd->add_flag("--json", gen_json, "emit netlist + repair trace as JSON");
  gen_client.attach(generate_cmd);

  // export-finetune
  auto* ft_cmd = app.add_subcommand("export-finetune", "chat-format JSONL from records");
  std::string ft_records, ft_out;
  ft_cmd->add_option("records", ft_records, "records JSON file")->required();
  ft_cmd->add_option("--out", ft_out, "output JSONL path (default stdout)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the generation benchmark suite");
  std::string bench_suite, bench_mode = "component_adjacency";
  int bench_n = 10;
  double bench_threshold = 100.0;
  bool bench_json = false;
  ClientOptions bench_client;
  config_default(cfg, "n", bench_n);
  config_default(cfg, "threshold", bench_threshold);
  config_default(cfg, "mode", bench_mode);
  config_default(cfg, "base_url", bench_client.http.base_url);
  config_default(cfg, "model", bench_client.http.model);
  bench_cmd->add_option("--suite", bench_suite, "suite JSON (default: bundled 20 designs)");
  bench_cmd->add_option("-n,--samples", bench_n, "samples per design")->capture_default_str();
  bench_cmd->add_option("--threshold", bench_threshold, "similarity success threshold")
      ->capture_default_str();
  bench_cmd->add_option("--mode", bench_mode, "graph mode for the similarity check")
      ->capture_default_str();
  bench_cmd->add_flag("--json", bench_json, "emit JSON");
  bench_client.attach(bench_cmd);

  // graph (debugging aid)
  auto* graph_cmd = app.add_subcommand("graph", "export a netlist's comparison graph");
  std::string graph_file, graph_mode = "component_adjacency", graph_format = "json";
  graph_cmd->add_option("file", graph_file, "netlist file")->required();
  graph_cmd->add_option("--mode", graph_mode, "component_adjacency or bipartite")
      ->capture_default_str();
  graph_cmd->add_option("--format", graph_format, "json or dot")
      ->check(CLI::IsMember({"json", "dot"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*parse_cmd) return cmd_parse(parse_file);
    if (*stats_cmd) return cmd_stats(stats_files, stats_json, hist_dir);
    if (*compare_cmd)
      return cmd_compare(cmp_a, cmp_b, cmp_mode, exact_limit, max_expansions);
    if (*lint_cmd) return cmd_lint(lint_file, lint_json, no_connectivity, no_ground_severity);
    if (*cluster_cmd) return cmd_cluster(seg_file, box_file, radius, margin, body_proximity);
    if (*annotate_cmd)
      return cmd_annotate(ann_segments, ann_boxes, ann_image, ann_radius, ann_margin,
                          ann_max_dist, ann_body_proximity, ann_out_json, ann_out_svg);
    if (*nfa_cmd) return cmd_netlist_from_annotation(nfa_file);
    if (*generate_cmd) return cmd_generate(gen_annotation, gen_client, max_iters, gen_json);
    if (*ft_cmd) return cmd_export_finetune(ft_records, ft_out);
    if (*bench_cmd)
      return cmd_bench(bench_suite, bench_client, bench_n, bench_threshold, bench_mode,
                       bench_json);
    if (*graph_cmd) return cmd_graph(graph_file, graph_mode, graph_format);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sk::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
