#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <string_view>
#include <vector>

#include "ctxcache/context_model.hpp"
#include "ctxcache/evaluation.hpp"
#include "ctxcache/types.hpp"

namespace ctxcache::eval {

// Streaming query log over the corpus targets. For an item, demand is its
// direct queries plus the queries of every attribute in its transitive input
// set (a query answered by inference is demand for the inferred item too);
// for an attribute, demand is direct queries only. The recent window is a
// sliding interval of fixed length ending at "now".
class AccessTracker {
 public:
  AccessTracker(const context::Corpus& corpus, DurationMs window_ms);

  // Records one query at time `now`. Timestamps must be non-decreasing.
  void record(std::string_view target_id, TimeMs now);

  // Counters for one target; prunes the sliding window up to `now`.
  AccessStats stats_for(std::string_view target_id, TimeMs now);
  AccessStats stats_for(std::uint32_t target_index, TimeMs now);

  // Denominator of the historical PoA term: the sum of the historical
  // counts of every target (item counts include their attribute inflow).
  std::uint64_t total_historical() const { return total_historical_; }

  // All-time demand for one target (direct + inferred for items).
  std::uint64_t total_queries(std::string_view target_id) const;

  std::uint64_t direct_count(std::string_view target_id) const;

  // Targets queried at least once, as indices into corpus.targets(),
  // ascending. These are the admission candidates.
  const std::vector<std::uint32_t>& seen_targets() const { return seen_list_; }

  std::uint64_t events_recorded() const { return events_; }
  DurationMs window_ms() const { return window_ms_; }

 private:
  const context::Corpus& corpus_;
  DurationMs window_ms_;
  std::vector<std::uint64_t> historical_direct_;
  std::vector<std::deque<TimeMs>> recent_direct_;
  std::deque<TimeMs> window_all_;
  std::vector<bool> seen_;
  std::vector<std::uint32_t> seen_list_;
  std::uint64_t total_historical_ = 0;
  std::uint64_t events_ = 0;
  TimeMs last_now_ = 0;

  std::uint32_t require_index(std::string_view id) const;
  void prune(std::uint32_t index, TimeMs now);
};

}  // namespace ctxcache::eval
