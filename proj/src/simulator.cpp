#include "ctxcache/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ctxcache::sim {

// ---- latency -----------------------------------------------------------------

LatencySpec LatencySpec::constant(double ms) { return {Kind::kConstant, ms, 0.0}; }
LatencySpec LatencySpec::uniform(double lo_ms, double hi_ms) {
  return {Kind::kUniform, lo_ms, hi_ms};
}
LatencySpec LatencySpec::lognormal(double mu_log, double sigma_log) {
  return {Kind::kLognormal, mu_log, sigma_log};
}

void LatencySpec::validate() const {
  switch (kind) {
    case Kind::kConstant:
      if (a < 0.0) throw ValidationError("constant latency must be >= 0");
      break;
    case Kind::kUniform:
      if (a < 0.0 || b < a) throw ValidationError("uniform latency needs 0 <= lo <= hi");
      break;
    case Kind::kLognormal:
      if (b < 0.0) throw ValidationError("lognormal latency sigma must be >= 0");
      break;
  }
}

double LatencySpec::sample(Rng& rng) const {
  switch (kind) {
    case Kind::kConstant:
      return a;
    case Kind::kUniform:
      return rng.uniform(a, b);
    case Kind::kLognormal:
      return rng.lognormal(a, b);
  }
  return 0.0;
}

nlohmann::json LatencySpec::to_json() const {
  switch (kind) {
    case Kind::kConstant:
      return {{"kind", "constant"}, {"ms", a}};
    case Kind::kUniform:
      return {{"kind", "uniform"}, {"lo_ms", a}, {"hi_ms", b}};
    case Kind::kLognormal:
      return {{"kind", "lognormal"}, {"mu_log", a}, {"sigma_log", b}};
  }
  return {};
}

LatencySpec LatencySpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  LatencySpec spec;
  if (kind == "constant") {
    spec = constant(j.at("ms").get<double>());
  } else if (kind == "uniform") {
    spec = uniform(j.at("lo_ms").get<double>(), j.at("hi_ms").get<double>());
  } else if (kind == "lognormal") {
    spec = lognormal(j.at("mu_log").get<double>(), j.at("sigma_log").get<double>());
  } else {
    throw ValidationError("unknown latency kind '" + kind +
                          "'; valid kinds: constant uniform lognormal");
  }
  spec.validate();
  return spec;
}

void LatencyModel::validate() const {
  cache_hit.validate();
  refresh.validate();
  fetch.validate();
}

nlohmann::json LatencyModel::to_json() const {
  return {{"cache_hit", cache_hit.to_json()},
          {"refresh", refresh.to_json()},
          {"fetch", fetch.to_json()}};
}

LatencyModel LatencyModel::from_json(const nlohmann::json& j) {
  LatencyModel m;
  if (j.contains("cache_hit")) m.cache_hit = LatencySpec::from_json(j.at("cache_hit"));
  if (j.contains("refresh")) m.refresh = LatencySpec::from_json(j.at("refresh"));
  if (j.contains("fetch")) m.fetch = LatencySpec::from_json(j.at("fetch"));
  return m;
}

// ---- metrics ------------------------------------------------------------------

nlohmann::json MetricsReport::to_json() const {
  return {
      {"policy", policy},
      {"capacity_units", capacity_units},
      {"seed", seed},
      {"q_total", q_total},
      {"q_cache", q_cache},
      {"q_expired", q_expired},
      {"q_miss", q_miss},
      {"chr_pct", chr_pct},
      {"cmr_pct", cmr_pct},
      {"cer_pct", cer_pct},
      {"response_mean_ms", response_mean_ms},
      {"response_stddev_ms", response_stddev_ms},
      {"response_p95_ms", response_p95_ms},
      {"throughput_qps", throughput_qps},
      {"admissions", admissions},
      {"evictions", evictions},
      {"background_refreshes", background_refreshes},
      {"peak_occupancy_units", peak_occupancy_units},
      {"utilization_pct", utilization_pct},
  };
}

// ---- run ----------------------------------------------------------------------

namespace {

void validate_trace_against_corpus(const workload::Trace& trace,
                                   const context::Corpus& corpus) {
  for (const workload::QueryEvent& e : trace.events) {
    std::uint32_t ix = corpus.target_index(e.target_id);
    if (ix == context::Corpus::kNoTarget) {
      throw ValidationError("trace target not in corpus: " + e.target_id);
    }
    if (corpus.targets()[ix].is_item != e.is_item) {
      throw ValidationError("trace kind mismatch for target: " + e.target_id);
    }
  }
}

struct ResponseAccumulator {
  std::vector<double> samples;

  void add(double ms) { samples.push_back(ms); }

  void finalize(MetricsReport* r) const {
    if (samples.empty()) return;
    double sum = 0.0, sum_sq = 0.0;
    for (double s : samples) {
      sum += s;
      sum_sq += s * s;
    }
    double n = static_cast<double>(samples.size());
    double mean = sum / n;
    r->response_mean_ms = mean;
    r->response_stddev_ms = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));

    // Nearest-rank p95: the ceil(0.95 n)-th smallest sample.
    std::vector<double> sorted = samples;
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(sorted.size())));
    rank = std::min(std::max<std::size_t>(rank, 1), sorted.size());
    std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
    r->response_p95_ms = sorted[rank - 1];
  }
};

}  // namespace

RunResult run(const RunInputs& in) {
  if (in.corpus == nullptr || in.trace == nullptr) {
    throw ValidationError("run needs both a corpus and a trace");
  }
  in.params.validate();
  in.latency.validate();
  if (in.sweep_interval_ms <= 0) throw ValidationError("sweep interval must be > 0");
  validate_trace_against_corpus(*in.trace, *in.corpus);

  eval::AccessTracker tracker(*in.corpus, in.params.recent_window_ms);
  auto pol = policy::make_policy(in.policy, in.params,
                                 policy::SimContext{in.corpus, &tracker});
  pol->set_capture_actions(in.capture_actions);

  Rng latency_rng(derive_seed(in.seed, "latency"));
  ResponseAccumulator responses;

  MetricsReport report;
  report.policy = in.policy;
  report.capacity_units = in.params.capacity_units;
  report.seed = in.seed;

  auto wall_start = std::chrono::steady_clock::now();
  TimeMs next_tick = in.sweep_interval_ms;
  for (const workload::QueryEvent& e : in.trace->events) {
    while (next_tick <= e.timestamp_ms) {
      pol->on_tick(next_tick);
      next_tick += in.sweep_interval_ms;
    }
    tracker.record(e.target_id, e.timestamp_ms);
    LookupOutcome outcome = pol->on_query(e.target_id, e.timestamp_ms);
    double latency_ms = 0.0;
    switch (outcome) {
      case LookupOutcome::kHit:
        ++report.q_cache;
        latency_ms = in.latency.cache_hit.sample(latency_rng);
        break;
      case LookupOutcome::kExpiredHit:
        ++report.q_expired;
        latency_ms = in.latency.refresh.sample(latency_rng);
        break;
      case LookupOutcome::kMiss:
        ++report.q_miss;
        latency_ms = in.latency.fetch.sample(latency_rng);
        break;
    }
    ++report.q_total;
    responses.add(latency_ms);
  }
  auto wall_end = std::chrono::steady_clock::now();
  report.running_time_ms =
      std::chrono::duration<double, std::milli>(wall_end - wall_start).count();

  if (report.q_total > 0) {
    double total = static_cast<double>(report.q_total);
    report.chr_pct = 100.0 * static_cast<double>(report.q_cache) / total;
    report.cer_pct = 100.0 * static_cast<double>(report.q_expired) / total;
    report.cmr_pct = 100.0 * static_cast<double>(report.q_miss) / total;
  }
  responses.finalize(&report);

  DurationMs span_ms = in.trace->duration_ms();
  if (span_ms > 0) {
    report.throughput_qps =
        static_cast<double>(report.q_total) / (static_cast<double>(span_ms) / 1000.0);
  }

  report.admissions = pol->admissions();
  report.evictions = pol->evictions();
  report.background_refreshes = pol->background_refreshes();
  report.peak_occupancy_units = pol->peak_occupancy_units();
  report.utilization_pct = 100.0 * static_cast<double>(report.peak_occupancy_units) /
                           static_cast<double>(in.params.capacity_units);

  RunResult result;
  result.metrics = std::move(report);
  if (in.capture_actions) {
    result.actions = pol->actions();
    if (auto* dcmf = dynamic_cast<cache::DcmfPolicy*>(pol.get())) {
      result.sweeps = dcmf->sweep_stats();
    }
  }
  return result;
}

std::vector<RunResult> sweep_capacities(const RunInputs& base,
                                        const std::vector<std::uint32_t>& capacities) {
  if (capacities.empty()) throw ValidationError("capacity list is empty");
  for (std::size_t i = 1; i < capacities.size(); ++i) {
    if (capacities[i] < capacities[i - 1]) {
      throw ValidationError("capacity list must be non-decreasing");
    }
  }
  std::vector<RunResult> results;
  results.reserve(capacities.size());
  for (std::uint32_t c : capacities) {
    RunInputs inputs = base;
    inputs.params.capacity_units = c;
    inputs.seed = derive_seed(base.seed, "capacity=" + std::to_string(c));
    results.push_back(run(inputs));
  }
  return results;
}

}  // namespace ctxcache::sim
