#include "hpm/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "hpm/generate.hpp"

namespace hpm {

TimingSummary summarize_timings(const std::vector<double>& samples) {
  TimingSummary s;
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() < 2) return s;
  double ss = 0.0;
  for (double x : samples) ss += (x - s.mean_ms) * (x - s.mean_ms);
  const double sd = std::sqrt(ss / (n - 1.0));
  boost::math::students_t dist(n - 1.0);
  s.ci95_ms = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
  return s;
}

std::vector<double> time_discovery(const HierLog& log, const DiscoveryConfig& config, std::size_t repetitions,
                                   std::size_t warmup) {
  for (std::size_t i = 0; i < warmup; ++i) discover(log, config);
  std::vector<double> out;
  out.reserve(repetitions);
  for (std::size_t i = 0; i < repetitions; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Tree t = discover(log, config);
    auto t1 = std::chrono::steady_clock::now();
    out.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return out;
}

std::vector<std::size_t> bench_params(const std::string& suite) {
  if (suite == "depth-scaling") return {1, 2, 3, 4, 5, 6, 7, 8};
  if (suite == "trace-length-scaling") return {10, 20, 40, 80, 160};
  throw Error(ErrorCode::InvalidConfig, "unknown benchmark suite '" + suite + "'");
}

HierLog bench_log(const std::string& suite, std::size_t param, std::uint64_t seed, std::size_t traces) {
  if (suite == "depth-scaling") return gen_hierarchical_log(seed, param, traces);
  if (suite == "trace-length-scaling") {
    Tree model = gen_hierarchical_model(seed, 3);
    std::mt19937_64 rng(seed * 7919 + param);
    std::vector<ActivityTrace> out(traces);
    for (auto& t : out)
      while (t.size() < param) {
        ActivityTrace part = sample_trace(model, rng);
        t.insert(t.end(), part.begin(), part.end());
      }
    return log_from_shapes(out);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown benchmark suite '" + suite + "'");
}

std::vector<BenchCell> run_bench(const BenchOptions& options) {
  if (options.repetitions == 0) throw Error(ErrorCode::InvalidConfig, "repetitions must be at least 1");
  std::vector<BenchCell> cells;
  for (auto param : bench_params(options.suite)) {
    HierLog log = bench_log(options.suite, param, options.seed, options.traces);
    for (auto mode : {DiscoveryMode::Naive, DiscoveryMode::Rad, DiscoveryMode::Flat}) {
      DiscoveryConfig config;
      config.mode = mode;
      auto samples = time_discovery(log, config, options.repetitions, options.warmup);
      cells.push_back({options.suite, to_string(mode), param, summarize_timings(samples)});
    }
  }
  return cells;
}

std::string bench_csv(const std::vector<BenchCell>& cells) {
  std::ostringstream os;
  os << "suite,mode,param,mean_ms,ci95_ms\n";
  char buf[64];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%.4f", c.timing.mean_ms);
    os << c.suite << ',' << c.mode << ',' << c.param << ',' << buf << ',';
    if (c.timing.ci95_ms) {
      std::snprintf(buf, sizeof buf, "%.4f", *c.timing.ci95_ms);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace hpm
