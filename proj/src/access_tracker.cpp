#include "ctxcache/access_tracker.hpp"

#include <algorithm>

namespace ctxcache::eval {

AccessTracker::AccessTracker(const context::Corpus& corpus, DurationMs window_ms)
    : corpus_(corpus), window_ms_(window_ms) {
  if (window_ms <= 0) throw ValidationError("recent window must be > 0");
  std::size_t n = corpus.targets().size();
  historical_direct_.assign(n, 0);
  recent_direct_.resize(n);
  seen_.assign(n, false);
}

std::uint32_t AccessTracker::require_index(std::string_view id) const {
  std::uint32_t ix = corpus_.target_index(id);
  if (ix == context::Corpus::kNoTarget) {
    throw MissingAttributeError(std::string(id));
  }
  return ix;
}

void AccessTracker::record(std::string_view target_id, TimeMs now) {
  std::uint32_t ix = require_index(target_id);
  if (now < last_now_) throw ValidationError("query log timestamps must be non-decreasing");
  last_now_ = now;

  ++historical_direct_[ix];
  recent_direct_[ix].push_back(now);
  window_all_.push_back(now);
  ++events_;

  // Every event is one unit of direct demand; a query for an attribute is
  // additionally one unit of inferred demand for each item it feeds.
  const context::Target& t = corpus_.targets()[ix];
  total_historical_ += 1;
  if (!t.is_item) total_historical_ += corpus_.dependant_item_count(ix);

  if (!seen_[ix]) {
    seen_[ix] = true;
    auto pos = std::lower_bound(seen_list_.begin(), seen_list_.end(), ix);
    seen_list_.insert(pos, ix);
  }
}

void AccessTracker::prune(std::uint32_t index, TimeMs now) {
  TimeMs cutoff = now - window_ms_;
  auto& dq = recent_direct_[index];
  while (!dq.empty() && dq.front() < cutoff) dq.pop_front();
}

AccessStats AccessTracker::stats_for(std::string_view target_id, TimeMs now) {
  return stats_for(require_index(target_id), now);
}

AccessStats AccessTracker::stats_for(std::uint32_t ix, TimeMs now) {
  const context::Target& t = corpus_.targets().at(ix);

  TimeMs cutoff = now - window_ms_;
  while (!window_all_.empty() && window_all_.front() < cutoff) window_all_.pop_front();
  prune(ix, now);

  AccessStats s;
  s.historical = historical_direct_[ix];
  s.recent = recent_direct_[ix].size();
  for (std::uint32_t a : t.input_attr_targets) {
    prune(a, now);
    s.historical += historical_direct_[a];
    s.recent += recent_direct_[a].size();
  }
  s.window_total = window_all_.size();
  return s;
}

std::uint64_t AccessTracker::total_queries(std::string_view target_id) const {
  std::uint32_t ix = require_index(target_id);
  const context::Target& t = corpus_.targets()[ix];
  std::uint64_t total = historical_direct_[ix];
  for (std::uint32_t a : t.input_attr_targets) total += historical_direct_[a];
  return total;
}

std::uint64_t AccessTracker::direct_count(std::string_view target_id) const {
  return historical_direct_[require_index(target_id)];
}

}  // namespace ctxcache::eval
