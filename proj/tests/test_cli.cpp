#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hpm/cli.hpp"
#include "hpm/export.hpp"
#include "hpm/generate.hpp"
#include "hpm/xes.hpp"
#include "support.hpp"

using namespace hpm;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture() {
  std::string path = std::string(HPM_TEST_DATA_DIR) + "/cli-run.xes";
  std::ofstream(path) << testkit::running_xes();
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("discover prints the running example model") {
  std::string in = fixture();
  Run r = run({"discover", "--in", in, "--heuristic", "nested-calls", "--mode", "rad", "--paths", "1.0", "--format",
               "tree"});
  CHECK(r.code == 0);
  CHECK(structurally_equal(Tree::parse(r.out), testkit::running_tree()));
  CHECK(r.err.find("1 traces, 5 events, depth 4") != std::string::npos);
  CHECK(r.err.find("model: 11 nodes") != std::string::npos);
  Run again = run({"discover", "--in", in, "--heuristic", "nested-calls", "--format", "tree"});
  CHECK(again.out == r.out);
}

TEST_CASE("recursive model cannot be written as pnml") {
  Run r = run({"discover", "--in", fixture(), "--heuristic", "nested-calls", "--format", "pnml"});
  CHECK(r.code == 3);
  CHECK(r.err.find("B.process()") != std::string::npos);
  Run filtered = run({"discover", "--in", fixture(), "--heuristic", "nested-calls", "--max-depth", "1", "--format",
                      "pnml"});
  CHECK(filtered.code == 0);
  CHECK(filtered.out.find("<pnml>") != std::string::npos);
}

TEST_CASE("other formats and output files") {
  std::string in = fixture();
  std::string out = std::string(HPM_TEST_DATA_DIR) + "/cli-model.json";
  Run r = run({"discover", "--in", in, "--heuristic", "nested-calls", "--format", "json", "--out", out});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(structurally_equal(from_json(slurp(out)), testkit::running_tree()));
  Run dot = run({"discover", "--in", in, "--heuristic", "nested-calls", "--format", "dot"});
  CHECK(dot.out.rfind("digraph", 0) == 0);
  Run flat = run({"discover", "--in", in, "--mode", "flat", "--format", "tree"});
  CHECK(flat.code == 0);
  CHECK(flat.err.find("ms") != std::string::npos);
}

TEST_CASE("config file and sublog dump") {
  std::string dir = HPM_TEST_DATA_DIR;
  std::ofstream(dir + "/cli-config.json") << R"({"heuristic":{"kind":"nested_calls"},"discovery":{"mode":"rad","paths":1.0}})";
  Run r = run({"discover", "--in", fixture(), "--config", dir + "/cli-config.json", "--dump-sublogs",
               dir + "/cli-sublogs.json"});
  CHECK(r.code == 0);
  CHECK(structurally_equal(Tree::parse(r.out), testkit::running_tree()));
  auto j = nlohmann::json::parse(slurp(dir + "/cli-sublogs.json"));
  CHECK(j.is_array());
  CHECK(j.size() >= 2);
}

TEST_CASE("error exit codes") {
  std::string dir = HPM_TEST_DATA_DIR;
  std::ofstream(dir + "/cli-bad.xes") << "<log><trace><event>";
  CHECK(run({"discover", "--in", dir + "/cli-bad.xes"}).code == 2);
  std::ofstream(dir + "/cli-flat.xes") << "<log><trace><event><string key=\"concept:name\" value=\"a\"/></event>"
                                          "</trace></log>";
  Run nc = run({"discover", "--in", dir + "/cli-flat.xes", "--heuristic", "nested-calls"});
  CHECK(nc.code == 2);
  CHECK(nc.err.find("MissingLifecycle") != std::string::npos);
  CHECK(run({"discover", "--in", fixture(), "--paths", "2"}).code == 2);
  CHECK(run({"discover", "--in", fixture(), "--min-depth", "3", "--max-depth", "1"}).code == 2);
  CHECK(run({"discover", "--in", fixture(), "--format", "svg"}).code == 2);
  CHECK(run({"discover", "--in", fixture(), "--mode", "im"}).code == 2);
  CHECK(run({"discover", "--in", dir + "/missing.xes"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
}

TEST_CASE("bench command writes csv") {
  Run r = run({"bench", "--suite", "trace-length-scaling", "--repetitions", "1", "--warmup", "0", "--traces", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("suite,mode,param,mean_ms,ci95_ms\n", 0) == 0);
  std::size_t lines = std::count(r.out.begin(), r.out.end(), '\n');
  CHECK(lines == 16);
  CHECK(run({"bench", "--suite", "nope"}).code == 1);
}
