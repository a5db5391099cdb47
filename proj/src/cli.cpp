#include "hpm/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "hpm/bench.hpp"
#include "hpm/discovery.hpp"
#include "hpm/export.hpp"
#include "hpm/heuristics.hpp"
#include "hpm/rewrite.hpp"
#include "hpm/workbench.hpp"
#include "hpm/xes.hpp"

namespace hpm {

namespace {

struct RunConfig {
  std::string input;
  std::string config_file;
  std::string heuristic = "none";
  std::string separator = ".";
  std::vector<std::string> attr_keys;
  std::string mode = "rad";
  double paths = 1.0;
  std::size_t threads = 1;
  std::size_t min_depth = 0;
  std::string max_depth = "inf";
  std::string format = "tree";
  std::string output;
  std::string sublog_dump;
};

void add_input_options(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--in", rc.input, "XES or CSV event log")->required()->check(CLI::ExistingFile);
  cmd->add_option("--config", rc.config_file, "JSON file with {heuristic: {...}, discovery: {...}}");
  cmd->add_option("--heuristic", rc.heuristic, "none | nested-calls | structured-names | attribute-combination");
  cmd->add_option("--separator", rc.separator, "separator for structured-names");
  cmd->add_option("--attr-keys", rc.attr_keys, "attribute keys for attribute-combination")->delimiter(',');
  cmd->add_option("--mode", rc.mode, "naive | rad | flat");
  cmd->add_option("--paths", rc.paths, "share of directly-follows paths kept, in [0,1]");
  cmd->add_option("--threads", rc.threads, "worker threads for rad");
}

struct Loaded {
  HierLog log;
  HeuristicConfig heuristic;
  DiscoveryConfig discovery;
};

Loaded load(const RunConfig& rc) {
  Loaded l;
  l.heuristic.kind = parse_heuristic_kind(rc.heuristic);
  l.heuristic.separator = rc.separator;
  l.heuristic.attr_keys = rc.attr_keys;
  l.discovery.mode = parse_discovery_mode(rc.mode);
  l.discovery.paths = rc.paths;
  l.discovery.threads = rc.threads;
  if (!rc.config_file.empty()) {
    std::ifstream in(rc.config_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      if (auto h = j.find("heuristic"); h != j.end()) {
        if (h->contains("kind")) l.heuristic.kind = parse_heuristic_kind(h->at("kind").get<std::string>());
        if (h->contains("separator")) l.heuristic.separator = h->at("separator").get<std::string>();
        if (h->contains("attr_keys")) l.heuristic.attr_keys = h->at("attr_keys").get<std::vector<std::string>>();
      }
      if (auto d = j.find("discovery"); d != j.end()) {
        if (d->contains("mode")) l.discovery.mode = parse_discovery_mode(d->at("mode").get<std::string>());
        if (d->contains("paths")) l.discovery.paths = d->at("paths").get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, std::string("bad config file: ") + e.what());
    }
  }
  l.heuristic.validate();
  l.discovery.validate();
  l.log = apply_heuristic(read_log_file(rc.input), l.heuristic);
  return l;
}

void print_stats(std::ostream& err, const HierLog& log) {
  LogStats s = log_stats(log);
  err << "log: " << s.traces << " traces, " << s.events << " events, depth " << s.depth << ", "
      << s.alphabet.size() << " activities, avg trace length " << s.avg_trace_len << "\n";
}

std::size_t tree_size(const Tree& t) {
  std::size_t n = 0;
  walk(t, [&](const Tree&, const std::vector<std::size_t>&) { ++n; });
  return n;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

int cmd_discover(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  Loaded l;
  std::size_t max_depth = kUnboundedDepth;
  try {
    l = load(rc);
    if (rc.max_depth != "inf") max_depth = std::stoul(rc.max_depth);
    if (rc.min_depth > max_depth) throw Error(ErrorCode::InvalidRange, "min-depth exceeds max-depth");
    if (rc.format != "tree" && rc.format != "dot" && rc.format != "pnml" && rc.format != "json")
      throw Error(ErrorCode::InvalidConfig, "unknown format '" + rc.format + "'");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  print_stats(err, l.log);

  DiscoveryStats stats;
  Tree tree;
  auto t0 = std::chrono::steady_clock::now();
  try {
    tree = reduce(depth_filter(discover(l.log, l.discovery, &stats), rc.min_depth, max_depth));
  } catch (const std::exception& e) {
    err << "error: discovery failed: " << e.what() << "\n";
    return 2;
  }
  auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  err << "model: " << tree_size(tree) << " nodes, mode " << to_string(l.discovery.mode) << ", " << ms << " ms\n";
  if (!rc.sublog_dump.empty()) write_output(rc.sublog_dump, sublog_store_json(stats), out);

  std::string text;
  try {
    if (rc.format == "tree") text = tree.to_string() + "\n";
    else if (rc.format == "dot") text = to_dot(tree, nullptr);
    else if (rc.format == "pnml") text = to_pnml(tree);
    else text = to_json(tree) + "\n";
    write_output(rc.output, text, out);
  } catch (const std::exception& e) {
    err << "error: export failed: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int cmd_bench(const BenchOptions& opts, const std::string& output, std::ostream& out, std::ostream& err) {
  try {
    write_output(output, bench_csv(run_bench(opts)), out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_serve(const RunConfig& rc, int port, const std::string& host, const std::string& static_dir,
              std::ostream& err) {
  Loaded l;
  try {
    l = load(rc);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  print_stats(err, l.log);
  Workbench bench(std::move(l.log), l.discovery.mode);
  httplib::Server server;
  register_routes(server, bench, static_dir);
  err << "listening on http://" << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    err << "error: cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical process discovery"};
  app.require_subcommand(1);

  RunConfig rc;
  auto* discover_cmd = app.add_subcommand("discover", "discover a process tree from a log");
  add_input_options(discover_cmd, rc);
  discover_cmd->add_option("--min-depth", rc.min_depth, "keep nodes from this depth on");
  discover_cmd->add_option("--max-depth", rc.max_depth, "keep nodes up to this depth, or 'inf'");
  discover_cmd->add_option("--format", rc.format, "tree | dot | pnml | json");
  discover_cmd->add_option("--out", rc.output, "output file (stdout when omitted)");
  discover_cmd->add_option("--dump-sublogs", rc.sublog_dump, "write the rad sublog store as JSON");

  BenchOptions bopts;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "time the discovery modes on synthetic logs");
  bench_cmd->add_option("--suite", bopts.suite, "depth-scaling | trace-length-scaling")
      ->check(CLI::IsMember({"depth-scaling", "trace-length-scaling"}));
  bench_cmd->add_option("--repetitions", bopts.repetitions, "timed runs per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", bopts.warmup, "untimed runs per cell");
  bench_cmd->add_option("--seed", bopts.seed, "generator seed");
  bench_cmd->add_option("--traces", bopts.traces, "traces per generated log");
  bench_cmd->add_option("--out", bench_out, "CSV output file (stdout when omitted)");

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "serve the workbench HTTP API");
  add_input_options(serve_cmd, rc);
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--static-dir", static_dir, "directory with the workbench UI bundle");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (*discover_cmd) return cmd_discover(rc, out, err);
  if (*bench_cmd) return cmd_bench(bopts, bench_out, out, err);
  return cmd_serve(rc, port, host, static_dir, err);
}

}  // namespace hpm
