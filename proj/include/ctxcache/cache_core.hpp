#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctxcache/evidence.hpp"
#include "ctxcache/policies.hpp"

namespace ctxcache::cache {

struct CacheEntry {
  std::string id;
  std::uint32_t target_ix = 0;
  TimeMs inserted_at = 0;
  TimeMs last_refreshed = 0;
  TimeMs last_accessed = 0;
  std::uint64_t hit_count = 0;           // fresh hits only
  std::uint64_t total_access_count = 0;  // hits + stale hits while cached
  double poa = 0.0;                      // raw probability of access, last sweep
  double cf = 1.0;                       // freshness, last sweep or refresh
  double combined_belief = 1.0;          // belief(Cache) after combination
  bool belief_defined = true;            // false after a total-conflict combination
  std::uint32_t size_units = 1;
};

enum class Decision { kEvict, kRefresh, kRetain };

// Per-entry decision against the sweep thresholds: belief below the evict
// threshold evicts, below the update threshold refreshes, otherwise the
// entry is retained. An undecidable combination (total conflict) maps to
// refresh: fetching fresh evidence is the conservative move.
Decision decide(double belief, bool decidable, const evidence::Thresholds& t);

// Per-sweep summary row emitted alongside the action log.
struct SweepStats {
  TimeMs timestamp = 0;
  double theta_update = 0.0;
  double theta_evict = 0.0;
  std::size_t occupancy_units = 0;
  double mean_cf = 0.0;
  std::uint32_t refreshes = 0;
  std::uint32_t evictions = 0;
  std::uint32_t admissions = 0;
};

// Context-evidence cache policy. Queries are classified as fresh hit, stale
// hit (served after an implicit refresh) or miss; misses offer the target to
// admission. A periodic sweep recomputes access and freshness evidence for
// every cached entry, combines them, applies the evict/refresh/retain
// decision, and then admits the highest-priority uncached-but-seen targets
// while capacity remains, displacing the minimum-belief entry when a
// candidate's priority exceeds it (ties keep the incumbent).
class DcmfPolicy final : public policy::Policy {
 public:
  DcmfPolicy(policy::PolicyParams params, policy::SimContext ctx);

  LookupOutcome on_query(std::string_view target_id, TimeMs now) override;
  void on_tick(TimeMs now) override;
  std::size_t occupancy_units() const override { return occupancy_; }

  // Admission priority for one target: beta * utility + (1 - beta) * poa,
  // with the live PoA filling the utility's PoA slot.
  double priority_for(std::string_view target_id, TimeMs now);

  // Batch admission from an already-sorted priority list (highest first).
  // Exposed for tests; the sweep calls it with the seen-but-uncached targets.
  void admit_candidates(const std::vector<eval::PriorityEntry>& ranked, TimeMs now);

  const std::map<std::string, CacheEntry, std::less<>>& entries() const { return entries_; }
  const std::vector<SweepStats>& sweep_stats() const { return sweep_stats_; }
  std::optional<evidence::Thresholds> last_thresholds() const { return last_thresholds_; }

 private:
  std::map<std::string, CacheEntry, std::less<>> entries_;
  std::size_t occupancy_ = 0;
  std::vector<SweepStats> sweep_stats_;
  std::optional<evidence::Thresholds> last_thresholds_;

  double raw_poa(std::uint32_t target_ix, TimeMs now);
  double utility_of(std::uint32_t target_ix, double poa_raw) const;
  bool try_admit(const std::string& id, double priority, TimeMs now, std::uint32_t* evicted);
  void insert_entry(const std::string& id, TimeMs now);
  void erase_entry(const std::string& id);
  const CacheEntry* min_belief_entry() const;
};

}  // namespace ctxcache::cache
