#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "hpm/export.hpp"
#include "hpm/heuristics.hpp"
#include "hpm/workbench.hpp"
#include "hpm/xes.hpp"
#include "support.hpp"

using namespace hpm;
using nlohmann::json;

namespace {

HierLog running_example(std::size_t copies = 1) {
  HierLog one = nested_calls(parse_xes_string(testkit::running_xes()));
  HierLog out;
  for (std::size_t i = 0; i < copies; ++i) out.traces.push_back(one.traces[0]);
  return out;
}

class Served {
 public:
  explicit Served(HierLog log, std::string static_dir = "") : bench_(std::move(log)) {
    register_routes(server_, bench_, static_dir);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Served() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  Workbench bench_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::set<std::string> activities(const json& node) {
  std::set<std::string> out;
  if (node.contains("activity")) out.insert(node["activity"].get<std::string>());
  if (node.contains("name")) out.insert(node["name"].get<std::string>());
  if (node.contains("children"))
    for (const auto& c : node["children"]) out.merge(activities(c));
  return out;
}

}  // namespace

TEST_CASE("model endpoint serves the running example model") {
  Served s(running_example());
  auto cli = s.client();
  auto res = cli.Get("/api/model?paths=1.0");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  CHECK(structurally_equal(from_json(res->body), testkit::running_tree()));
  auto j = json::parse(res->body);
  CHECK(j["id"] == "0");
  CHECK(j["freq"] == 5);
  auto again = cli.Get("/api/model?paths=1.0");
  CHECK(again->body == res->body);
}

TEST_CASE("model endpoint rejects invalid parameters") {
  Served s(running_example());
  auto cli = s.client();
  for (const char* q : {"/api/model?paths=2", "/api/model?paths=-0.1", "/api/model?paths=abc",
                        "/api/model?min_depth=3&max_depth=1", "/api/model?max_depth=x"}) {
    auto res = cli.Get(q);
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(json::parse(res->body).contains("error"));
  }
}

TEST_CASE("depth filtering happens on the server") {
  Served s(running_example());
  auto cli = s.client();
  auto res = cli.Get("/api/model?paths=1.0&min_depth=0&max_depth=1");
  REQUIRE(res);
  CHECK(res->status == 200);
  Tree t = from_json(res->body);
  CHECK_FALSE(contains_recursion(t));
  auto inf = cli.Get("/api/model?max_depth=inf");
  CHECK(structurally_equal(from_json(inf->body), testkit::running_tree()));
}

TEST_CASE("lowering paths never grows the alphabet") {
  HierLog l = running_example(4);
  HierLog extra = log_from_shapes({parse_shorthand("x y")});
  l.traces.push_back(extra.traces[0]);
  Served s(l);
  auto cli = s.client();
  auto low = cli.Get("/api/model?paths=0.8");
  auto full = cli.Get("/api/model?paths=1.0");
  REQUIRE(low);
  REQUIRE(full);
  auto a = activities(json::parse(low->body));
  auto b = activities(json::parse(full->body));
  CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
}

TEST_CASE("stats endpoint") {
  Served s(running_example());
  auto res = s.client().Get("/api/stats");
  REQUIRE(res);
  auto j = json::parse(res->body);
  CHECK(j["traces"] == 1);
  CHECK(j["events"] == 5);
  CHECK(j["depth"] == 4);
  CHECK(j["alphabet_size"] == 7);
}

TEST_CASE("search endpoint") {
  Served s(running_example());
  auto cli = s.client();
  auto res = cli.Get("/api/search?q=process");
  REQUIRE(res);
  auto j = json::parse(res->body);
  CHECK(j["query"] == "process");
  REQUIRE(j["ids"].size() == 2);
  CHECK(j["ids"][0] == "0.0.1");
  CHECK(j["ids"][1].get<std::string>().rfind("0.0.1.0.", 0) == 0);
  auto none = json::parse(cli.Get("/api/search?q=nothing")->body);
  CHECK(none["ids"].empty());
  auto empty = json::parse(cli.Get("/api/search")->body);
  CHECK(empty["ids"].empty());
  CHECK(cli.Get("/api/search?q=a&paths=7")->status == 400);
}

TEST_CASE("discovery failures map to 422") {
  HierLog bad;
  bad.traces.push_back({{Event({"a"})}});
  bad.traces[0].events[0].path.clear();
  Served s(bad);
  auto res = s.client().Get("/api/model");
  REQUIRE(res);
  CHECK(res->status == 422);
}

TEST_CASE("index page and static mount") {
  {
    Served s(running_example());
    auto res = s.client().Get("/");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body.find("/api/model") != std::string::npos);
  }
  std::string dir = std::string(HPM_TEST_DATA_DIR) + "/static";
  std::filesystem::create_directories(dir);
  std::ofstream(dir + "/index.html") << "<html><body>workbench-ui bundle</body></html>";
  Served s(running_example(), dir);
  auto res = s.client().Get("/");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.find("workbench-ui") != std::string::npos);
}

TEST_CASE("concurrent requests get identical answers") {
  Served s(running_example(3));
  std::vector<std::string> bodies(8);
  std::vector<std::thread> ts;
  for (std::size_t i = 0; i < bodies.size(); ++i)
    ts.emplace_back([&, i] {
      auto cli = s.client();
      auto res = cli.Get(i % 2 ? "/api/model?paths=0.9" : "/api/model?paths=0.9&min_depth=0");
      if (res) bodies[i] = res->body;
    });
  for (auto& t : ts) t.join();
  for (const auto& b : bodies) CHECK(b == bodies[0]);
  CHECK_FALSE(bodies[0].empty());
}
