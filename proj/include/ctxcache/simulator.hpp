#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctxcache/cache_core.hpp"
#include "ctxcache/policies.hpp"
#include "ctxcache/rng.hpp"
#include "ctxcache/workload.hpp"

namespace ctxcache::sim {

// One latency distribution in milliseconds: constant, uniform[a,b], or
// lognormal with log-space mean/stddev. Samples are always >= 0.
struct LatencySpec {
  enum class Kind { kConstant, kUniform, kLognormal };
  Kind kind = Kind::kConstant;
  double a = 0.0;  // constant value | uniform lo | lognormal mu_log
  double b = 0.0;  // unused        | uniform hi | lognormal sigma_log

  static LatencySpec constant(double ms);
  static LatencySpec uniform(double lo_ms, double hi_ms);
  static LatencySpec lognormal(double mu_log, double sigma_log);

  void validate() const;  // throws ValidationError
  double sample(Rng& rng) const;

  nlohmann::json to_json() const;
  static LatencySpec from_json(const nlohmann::json& j);
};

// What each lookup outcome costs the consumer: a fresh hit is served from
// cache, a stale hit pays an in-place refresh, and a miss pays a full
// provider fetch.
struct LatencyModel {
  LatencySpec cache_hit = LatencySpec::constant(5.0);
  LatencySpec refresh = LatencySpec::lognormal(std::log(30.0), 0.3);  // median 30 ms
  LatencySpec fetch = LatencySpec::lognormal(std::log(50.0), 0.4);    // median 50 ms

  void validate() const;
  nlohmann::json to_json() const;
  static LatencyModel from_json(const nlohmann::json& j);
};

// End-of-run counters and ratios for one policy run. running_time_ms is the
// wall-clock cost of the event loop; it is deliberately left out of
// to_json() so that identical seeded runs serialize byte-identically
// (wall-clock numbers are reported through the runtime CSV instead).
struct MetricsReport {
  std::string policy;
  std::uint32_t capacity_units = 0;
  std::uint64_t seed = 0;

  std::uint64_t q_total = 0;
  std::uint64_t q_cache = 0;    // fresh hits
  std::uint64_t q_expired = 0;  // stale hits
  std::uint64_t q_miss = 0;

  double chr_pct = 0.0;
  double cmr_pct = 0.0;
  double cer_pct = 0.0;

  double response_mean_ms = 0.0;
  double response_stddev_ms = 0.0;
  double response_p95_ms = 0.0;
  double throughput_qps = 0.0;  // q_total over the trace span

  std::uint64_t admissions = 0;
  std::uint64_t evictions = 0;
  std::uint64_t background_refreshes = 0;
  std::uint64_t peak_occupancy_units = 0;
  double utilization_pct = 0.0;  // peak occupancy / capacity * 100

  double running_time_ms = 0.0;  // wall clock; not serialized

  nlohmann::json to_json() const;
};

struct RunInputs {
  const context::Corpus* corpus = nullptr;
  const workload::Trace* trace = nullptr;
  std::string policy = "dcmf";
  policy::PolicyParams params;
  LatencyModel latency;
  DurationMs sweep_interval_ms = 60'000;
  std::uint64_t seed = 1;
  bool capture_actions = false;
};

struct RunResult {
  MetricsReport metrics;
  std::vector<policy::CacheActionRecord> actions;  // empty unless captured
  std::vector<cache::SweepStats> sweeps;           // evidence policy only
};

// Replays the trace in timestamp order. Before each event, every due sweep
// tick fires (ticks at t <= event time, starting at one sweep interval);
// then the query is recorded into the shared access tracker and handed to
// the policy, and the outcome's latency is charged from a stream seeded by
// derive_seed(seed, "latency"). Validates that every trace target exists in
// the corpus (with matching kind) before any simulation state is touched.
RunResult run(const RunInputs& in);

// One seeded run per capacity. Capacities must be non-decreasing; each run's
// latency stream is derived from the capacity value itself, so duplicate
// capacities produce byte-identical reports.
std::vector<RunResult> sweep_capacities(const RunInputs& base,
                                        const std::vector<std::uint32_t>& capacities);

}  // namespace ctxcache::sim
