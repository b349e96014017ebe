#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ctxcache/access_tracker.hpp"
#include "ctxcache/context_model.hpp"
#include "ctxcache/evaluation.hpp"
#include "ctxcache/evidence.hpp"
#include "ctxcache/types.hpp"

namespace ctxcache::policy {

// One entry of the decision log. Retain actions are logged too: every sweep
// of the evidence-driven policy produces exactly one action per cached entry.
struct CacheActionRecord {
  TimeMs timestamp = 0;
  enum class Type { kAdmit, kEvict, kRefresh, kRetain } type = Type::kRetain;
  std::string item_id;
  double belief = 0.0;
  std::string reason;
};

const char* to_string(CacheActionRecord::Type t);

// How the evidence-driven policy turns a raw probability-of-access into the
// [0,1] score that backs its mass function. Raw PoA values scale like 1/n
// over n targets, so the default rescales against the cached population
// (score 0.5 at the population mean, saturating at twice the mean); the
// alternatives divide by the population maximum or pass the raw value
// through.
enum class PoaScoreMode { kMeanRelative, kMaxRelative, kRaw };

// Which scalar feeds the access-evidence mass: the probability of access
// itself (default) or the blended admission priority.
enum class MassSource { kPoa, kPriority };

struct PolicyParams {
  std::uint32_t capacity_units = 500;

  // Blends: alpha weighs historical vs recent access counts inside PoA;
  // beta weighs utility vs PoA in the admission priority.
  double alpha = 0.5;
  double beta = 0.5;
  // Threshold width multiplier and explicit-uncertainty mass.
  double kappa = 0.5;
  double epsilon = 0.0;
  DurationMs recent_window_ms = 30 * 60 * 1000;

  evidence::CombineRule combine_rule = evidence::CombineRule::kDst;
  double combine_weight_poa = 0.5;  // used by the weighted-sum rule only
  PoaScoreMode poa_score_mode = PoaScoreMode::kMeanRelative;
  MassSource mass_source = MassSource::kPoa;

  eval::WeightVector maut_weights;   // size kFactorCount; default derived in make_policy
  eval::FactorSpecs factor_specs = eval::default_factor_specs();

  // Bandit baseline: reward = (1-blend)*hit + blend*adapted_utility, and the
  // four adapted-utility weights (PoA, CF, QoS, timeliness).
  double mcac_reward_utility_blend = 0.0;
  eval::WeightVector mcac_weights;  // size 4; default uniform

  // Per-target size in capacity units (default 1); exercised by tests.
  std::map<std::string, std::uint32_t> size_units_override;

  void validate() const;
};

struct SimContext {
  const context::Corpus* corpus = nullptr;
  eval::AccessTracker* tracker = nullptr;
};

// A cache policy driven by the simulation harness. The harness records each
// query into the shared access tracker and then calls on_query; on_tick fires
// on the sweep cadence (the evidence-driven policy sweeps on it, the bandit
// reselects its cached set on it, the others ignore it).
class Policy {
 public:
  Policy(std::string name, PolicyParams params, SimContext ctx);
  virtual ~Policy() = default;

  const std::string& name() const { return name_; }
  const PolicyParams& params() const { return params_; }

  virtual LookupOutcome on_query(std::string_view target_id, TimeMs now) = 0;
  virtual void on_tick(TimeMs now) { (void)now; }
  virtual std::size_t occupancy_units() const = 0;

  // Action capture is off by default; runs that persist logs enable it.
  void set_capture_actions(bool on) { capture_actions_ = on; }
  const std::vector<CacheActionRecord>& actions() const { return actions_; }

  std::uint64_t admissions() const { return admissions_; }
  std::uint64_t evictions() const { return evictions_; }
  std::uint64_t background_refreshes() const { return background_refreshes_; }
  std::size_t peak_occupancy_units() const { return peak_occupancy_; }

 protected:
  void log(TimeMs ts, CacheActionRecord::Type type, const std::string& id, double belief,
           const char* reason);
  void note_admit() { ++admissions_; }
  void note_evict() { ++evictions_; }
  void note_refresh() { ++background_refreshes_; }
  void note_occupancy(std::size_t units);
  std::uint32_t size_units_for(std::string_view id) const;

  PolicyParams params_;
  SimContext ctx_;

 private:
  std::string name_;
  bool capture_actions_ = false;
  std::vector<CacheActionRecord> actions_;
  std::uint64_t admissions_ = 0;
  std::uint64_t evictions_ = 0;
  std::uint64_t background_refreshes_ = 0;
  std::size_t peak_occupancy_ = 0;
};

// ---- bandit baseline building blocks (exposed for tests) --------------------

// Original two-factor utility: alpha * popularity + (1 - alpha) * data_rate.
double mcac_utility_original(double popularity, double data_rate, double alpha);

// Adapted four-factor utility over (PoA, CF, QoS, timeliness).
double mcac_utility_adapted(double poa, double cf, double qos, double timeliness,
                            const eval::WeightVector& weights);

struct ArmView {
  std::string id;
  std::uint64_t plays = 0;
  double mean_reward = 0.0;
  double tie_utility = 0.0;
};

// UCB1 selection of the m arms to cache after t total plays: score =
// mean + sqrt(2 ln t / plays). Unplayed arms come first (in id order); ties
// break by adapted utility descending, then id ascending.
std::vector<std::string> mcac_select(const std::vector<ArmView>& arms, std::uint64_t t,
                                     std::size_t m);

// ---- factory -----------------------------------------------------------------

const std::vector<std::string>& known_policies();
bool is_known_policy(std::string_view name);

// Throws ValidationError for unknown names. Valid names: dcmf, mcac,
// mgreedy, mmyopic, lru, lfu.
std::unique_ptr<Policy> make_policy(const std::string& name, PolicyParams params,
                                    SimContext ctx);

}  // namespace ctxcache::policy
