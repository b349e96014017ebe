#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctxcache/policies.hpp"
#include "ctxcache/simulator.hpp"
#include "ctxcache/workload.hpp"

namespace ctxcache::config {

// Where the corpus comes from: an existing file, or the synthetic generator.
// When `providers` is set it overrides the attribute/item counts with seven
// attributes and two rule items per provider site.
struct CorpusSpec {
  std::optional<std::string> path;
  workload::CorpusGenSpec gen;
  std::optional<std::uint32_t> providers;
};

// Where the trace comes from: an existing file, or one of the two generator
// profiles (one simulated day with morning/afternoon peaks, or steady
// arrivals at a named rate tier for a fixed number of minutes).
struct TraceSpec {
  std::optional<std::string> path;
  enum class Profile { kDiurnal, kPoisson } profile = Profile::kDiurnal;
  std::string tier = "high";
  double minutes = 60.0;
  double expected_total = 70'000.0;
  double peak_boost = 1.0;
  std::uint32_t consumers = 100;
  workload::PopularityModel popularity;
};

// One resolved invocation: sources, policy selection, tuning parameters,
// and the comparison matrix. Built up in layers — scenario preset, then
// config file, then command-line flags — with later layers winning.
struct RunConfig {
  int scenario = 0;  // 0 = no preset applied

  CorpusSpec corpus;
  TraceSpec trace;

  std::string policy = "dcmf";
  std::vector<std::string> policies;       // compare matrix; empty = all known
  std::vector<std::uint32_t> capacities;   // compare matrix; empty = {params capacity}
  std::vector<std::string> tiers;          // compare matrix; empty = trace spec as-is
  std::vector<std::uint32_t> providers;    // compare matrix; empty = corpus spec as-is

  policy::PolicyParams params;
  // Importance vector over the seven utility factors; resolved to the MAUT
  // weight vector through the pairwise-comparison eigenvector. An explicit
  // params.maut_weights wins over this.
  std::optional<std::array<double, eval::kFactorCount>> maut_priorities;

  sim::LatencyModel latency;
  DurationMs sweep_interval_ms = 60'000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  unsigned workers = 0;  // 0 = hardware concurrency
  bool log_actions = false;

  // Applies every key present in `j` on top of the current values.
  void overlay(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static RunConfig load_file(const std::string& path);

  void validate() const;

  // params with maut_priorities resolved into maut_weights (when weights are
  // not already set). Returns the consistency ratio of the derivation, or 0
  // when no derivation happened.
  policy::PolicyParams resolved_params(double* consistency_ratio = nullptr) const;
};

struct ScenarioPreset {
  int number = 0;
  std::string name;
  std::string blurb;
  RunConfig config;
};

const std::vector<ScenarioPreset>& scenario_presets();
const ScenarioPreset& scenario_preset(int number);  // throws ValidationError

// Layered construction: preset (if scenario != 0) -> file fields -> caller
// flag overrides are applied by the CLI afterwards.
RunConfig build_config(const nlohmann::json& file_json, int scenario_flag);

// ---- materialization --------------------------------------------------------

// Loads or generates the corpus. `providers_override` replaces the configured
// provider count (the scalability matrix sweeps it). Generator seed derives
// from the run seed: derive_seed(seed, "corpus[/providers=P]").
context::Corpus materialize_corpus(const RunConfig& cfg,
                                   std::optional<std::uint32_t> providers_override,
                                   std::uint64_t seed);

// Loads or generates the trace over the given corpus. `tier_override`
// switches the poisson profile to the named tier. Generator seed derives
// from the run seed: derive_seed(seed, "trace[/tier=T][/providers=P]").
workload::Trace materialize_trace(const RunConfig& cfg, const context::Corpus& corpus,
                                  std::optional<std::string> tier_override,
                                  std::optional<std::uint32_t> providers_override,
                                  std::uint64_t seed);

}  // namespace ctxcache::config
