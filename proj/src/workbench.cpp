#include "hpm/workbench.hpp"

#include <charconv>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "hpm/export.hpp"

namespace hpm {

namespace {

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(v))
    throw Error(ErrorCode::InvalidConfig, key + " must be a number, got '" + text + "'");
  return v;
}

std::size_t parse_depth(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "infinity") return kUnboundedDepth;
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw Error(ErrorCode::InvalidConfig, key + " must be a natural number or 'inf', got '" + text + "'");
  return v;
}

}  // namespace

ModelQuery ModelQuery::from_params(const std::multimap<std::string, std::string>& params) {
  ModelQuery q;
  if (auto it = params.find("paths"); it != params.end()) q.paths = parse_double("paths", it->second);
  if (auto it = params.find("min_depth"); it != params.end()) q.min_depth = parse_depth("min_depth", it->second);
  if (auto it = params.find("max_depth"); it != params.end()) q.max_depth = parse_depth("max_depth", it->second);
  if (q.paths < 0.0 || q.paths > 1.0) throw Error(ErrorCode::InvalidConfig, "paths must lie in [0, 1]");
  if (q.min_depth > q.max_depth) throw Error(ErrorCode::InvalidRange, "min_depth exceeds max_depth");
  return q;
}

Workbench::Workbench(HierLog log, DiscoveryMode mode) : log_(std::move(log)), mode_(mode) {}

Tree Workbench::model(const ModelQuery& query) {
  Key key{query.paths, query.min_depth, query.max_depth};
  {
    std::lock_guard lock(mu_);
    if (auto it = models_.find(key); it != models_.end()) return it->second;
  }
  DiscoveryConfig config;
  config.paths = query.paths;
  config.mode = mode_;
  Tree t = depth_filter(discover(log_, config), query.min_depth, query.max_depth);
  std::lock_guard lock(mu_);
  return models_.emplace(key, t).first->second;
}

std::string Workbench::model_json(const ModelQuery& query) {
  Key key{query.paths, query.min_depth, query.max_depth};
  {
    std::lock_guard lock(mu_);
    if (auto it = json_.find(key); it != json_.end()) return it->second;
  }
  Tree t = model(query);
  Annotations ann = frequency_annotations(t, log_);
  std::string body = to_json(t, JsonOptions{true, &ann});
  std::lock_guard lock(mu_);
  return json_.emplace(key, std::move(body)).first->second;
}

std::string Workbench::stats_json() const {
  LogStats s = log_stats(log_);
  nlohmann::ordered_json j;
  j["traces"] = s.traces;
  j["events"] = s.events;
  j["depth"] = s.depth;
  j["alphabet_size"] = s.alphabet.size();
  j["alphabet"] = s.alphabet;
  j["avg_trace_len"] = s.avg_trace_len;
  return j.dump();
}

std::vector<std::string> Workbench::search(const std::string& needle, const ModelQuery& query) {
  std::vector<std::string> out;
  if (needle.empty()) return out;
  walk(model(query), [&](const Tree& n, const std::vector<std::size_t>& path) {
    if ((n.kind() == NodeKind::Activity || n.kind() == NodeKind::Sub) && n.label().find(needle) != std::string::npos)
      out.push_back(node_id(path));
  });
  return out;
}

std::string Workbench::search_json(const std::string& needle, const ModelQuery& query) {
  nlohmann::ordered_json j;
  j["query"] = needle;
  j["ids"] = search(needle, query);
  return j.dump();
}

namespace {

constexpr const char* kIndexPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>hpm workbench</title></head>
<body>
<h1>hpm workbench backend</h1>
<p>No static bundle configured. Start the server with <code>--static-dir</code> to serve the UI.</p>
<ul>
<li><a href="/api/model?paths=1.0">/api/model?paths=R&amp;min_depth=A&amp;max_depth=B</a></li>
<li><a href="/api/stats">/api/stats</a></li>
<li><code>/api/search?q=S</code></li>
</ul>
</body></html>
)";

void send_error(httplib::Response& res, int status, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

}  // namespace

void register_routes(httplib::Server& server, Workbench& bench, const std::string& static_dir) {
  auto with_query = [&bench](auto&& body) {
    return [&bench, body](const httplib::Request& req, httplib::Response& res) {
      ModelQuery q;
      try {
        q = ModelQuery::from_params(req.params);
      } catch (const Error& e) {
        send_error(res, 400, e.what());
        return;
      }
      try {
        body(bench, q, req, res);
      } catch (const Error& e) {
        send_error(res, 422, e.what());
      }
    };
  };

  server.Get("/api/model", with_query([](Workbench& b, const ModelQuery& q, const httplib::Request&,
                                         httplib::Response& res) {
    res.set_content(b.model_json(q), "application/json");
  }));
  server.Get("/api/search", with_query([](Workbench& b, const ModelQuery& q, const httplib::Request& req,
                                          httplib::Response& res) {
    res.set_content(b.search_json(req.get_param_value("q"), q), "application/json");
  }));
  server.Get("/api/stats", [&bench](const httplib::Request&, httplib::Response& res) {
    res.set_content(bench.stats_json(), "application/json");
  });
  if (!static_dir.empty() && server.set_mount_point("/", static_dir)) return;
  server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kIndexPage, "text/html"); });
}

}  // namespace hpm
