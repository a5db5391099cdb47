#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpm/discovery.hpp"
#include "hpm/log.hpp"

namespace hpm {

struct TimingSummary {
  double mean_ms = 0.0;
  /// Half-width of the 95% Student-t interval; absent for fewer than 2 samples.
  std::optional<double> ci95_ms;
};

TimingSummary summarize_timings(const std::vector<double>& samples_ms);

/// Runs discovery `warmup` times untimed, then `repetitions` timed runs.
std::vector<double> time_discovery(const HierLog& log, const DiscoveryConfig& config, std::size_t repetitions,
                                   std::size_t warmup);

struct BenchCell {
  std::string suite;
  std::string mode;
  std::size_t param = 0;
  TimingSummary timing;
};

struct BenchOptions {
  std::string suite = "depth-scaling";  // or "trace-length-scaling"
  std::size_t repetitions = 30;
  std::size_t warmup = 3;
  std::uint64_t seed = 1;
  std::size_t traces = 500;
};

/// Seeded log of one benchmark cell. Depth-scaling: `param` is the hierarchy
/// depth. Trace-length-scaling: `param` is the minimum trace length, reached
/// by chaining runs of a depth-3 model.
HierLog bench_log(const std::string& suite, std::size_t param, std::uint64_t seed, std::size_t traces);
std::vector<std::size_t> bench_params(const std::string& suite);

std::vector<BenchCell> run_bench(const BenchOptions& options);

/// Header `suite,mode,param,mean_ms,ci95_ms`; ci95 left empty when absent.
std::string bench_csv(const std::vector<BenchCell>& cells);

}  // namespace hpm
