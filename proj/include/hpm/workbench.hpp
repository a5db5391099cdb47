#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "hpm/discovery.hpp"
#include "hpm/log.hpp"
#include "hpm/rewrite.hpp"
#include "hpm/tree.hpp"

namespace httplib {
class Server;
}

namespace hpm {

struct ModelQuery {
  double paths = 1.0;
  std::size_t min_depth = 0;
  std::size_t max_depth = kUnboundedDepth;

  /// Reads paths, min_depth and max_depth ("inf" allowed); absent keys keep
  /// their defaults. Throws InvalidConfig / InvalidRange on bad values.
  static ModelQuery from_params(const std::multimap<std::string, std::string>& params);
};

/// Backend of the interactive workbench: one loaded log, models rediscovered
/// and refiltered per query and memoized by the query tuple.
class Workbench {
 public:
  explicit Workbench(HierLog log, DiscoveryMode mode = DiscoveryMode::Rad);

  const HierLog& log() const { return log_; }

  Tree model(const ModelQuery& query);
  /// JSON tree with node ids and frequency annotations.
  std::string model_json(const ModelQuery& query);
  std::string stats_json() const;
  /// Ids of activity leaves and ▽ nodes whose name contains `needle`.
  std::vector<std::string> search(const std::string& needle, const ModelQuery& query = {});
  std::string search_json(const std::string& needle, const ModelQuery& query = {});

 private:
  using Key = std::tuple<double, std::size_t, std::size_t>;

  HierLog log_;
  DiscoveryMode mode_;
  std::mutex mu_;
  std::map<Key, Tree> models_;
  std::map<Key, std::string> json_;
};

/// GET /api/model, /api/stats, /api/search and / (static files from
/// `static_dir` when given, otherwise a short index page).
void register_routes(httplib::Server& server, Workbench& bench, const std::string& static_dir = "");

}  // namespace hpm
