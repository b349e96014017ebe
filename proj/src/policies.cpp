#include "ctxcache/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctxcache/cache_core.hpp"

namespace ctxcache::policy {

const char* to_string(CacheActionRecord::Type t) {
  switch (t) {
    case CacheActionRecord::Type::kAdmit: return "admit";
    case CacheActionRecord::Type::kEvict: return "evict";
    case CacheActionRecord::Type::kRefresh: return "refresh";
    case CacheActionRecord::Type::kRetain: return "retain";
  }
  return "?";
}

void PolicyParams::validate() const {
  if (capacity_units == 0) throw ValidationError("capacity must be > 0");
  auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in01(alpha) || !in01(beta) || !in01(epsilon) || !in01(combine_weight_poa) ||
      !in01(mcac_reward_utility_blend)) {
    throw ValidationError("blend parameters must lie in [0,1]");
  }
  if (kappa <= 0.0) throw ValidationError("kappa must be > 0");
  if (recent_window_ms <= 0) throw ValidationError("recent window must be > 0");
  if (!maut_weights.w.empty()) maut_weights.validate();
  if (!mcac_weights.w.empty()) mcac_weights.validate();
}

Policy::Policy(std::string name, PolicyParams params, SimContext ctx)
    : params_(std::move(params)), ctx_(ctx), name_(std::move(name)) {
  params_.validate();
  if (params_.maut_weights.w.empty()) {
    auto pri = eval::default_factor_priorities();
    params_.maut_weights = eval::ahp_weights(eval::AhpMatrix::from_priorities(pri)).weights;
  }
  if (params_.mcac_weights.w.empty()) {
    params_.mcac_weights.w.assign(4, 0.25);
  }
  if (params_.maut_weights.size() != eval::kFactorCount) {
    throw ValidationError("utility weight vector has the wrong dimension");
  }
  if (params_.mcac_weights.size() != 4) {
    throw ValidationError("bandit utility weight vector must have 4 entries");
  }
}

void Policy::log(TimeMs ts, CacheActionRecord::Type type, const std::string& id, double belief,
                 const char* reason) {
  if (!capture_actions_) return;
  actions_.push_back({ts, type, id, belief, reason});
}

void Policy::note_occupancy(std::size_t units) {
  peak_occupancy_ = std::max(peak_occupancy_, units);
}

std::uint32_t Policy::size_units_for(std::string_view id) const {
  auto it = params_.size_units_override.find(std::string(id));
  return it != params_.size_units_override.end() ? it->second : 1;
}

// ---- bandit building blocks --------------------------------------------------

double mcac_utility_original(double popularity, double data_rate, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("mcac_utility_original: alpha outside [0,1]");
  }
  return alpha * popularity + (1.0 - alpha) * data_rate;
}

double mcac_utility_adapted(double poa, double cf, double qos, double timeliness,
                            const eval::WeightVector& weights) {
  double raw[4] = {poa, cf, qos, timeliness};
  return eval::weighted_utility(raw, weights);
}

std::vector<std::string> mcac_select(const std::vector<ArmView>& arms, std::uint64_t t,
                                     std::size_t m) {
  struct Scored {
    const ArmView* arm;
    bool played;
    double score;
  };
  std::vector<Scored> scored;
  scored.reserve(arms.size());
  double log_term = t > 0 ? 2.0 * std::log(static_cast<double>(t)) : 0.0;
  for (const ArmView& a : arms) {
    Scored s{&a, a.plays > 0, 0.0};
    if (s.played) {
      s.score = a.mean_reward + std::sqrt(log_term / static_cast<double>(a.plays));
    }
    scored.push_back(s);
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& x, const Scored& y) {
    if (x.played != y.played) return !x.played;   // unplayed arms explore first
    if (!x.played) return x.arm->id < y.arm->id;  // deterministic cold start
    if (x.score != y.score) return x.score > y.score;
    if (x.arm->tie_utility != y.arm->tie_utility) {
      return x.arm->tie_utility > y.arm->tie_utility;
    }
    return x.arm->id < y.arm->id;
  });
  std::vector<std::string> out;
  out.reserve(std::min(m, scored.size()));
  for (std::size_t i = 0; i < scored.size() && i < m; ++i) out.push_back(scored[i].arm->id);
  return out;
}

// ---- shared baseline machinery -----------------------------------------------

namespace {

// Bookkeeping common to the non-evidence baselines: a slot map with freshness
// stamps, shared hit/stale classification (a stale entry is refreshed in
// place and served as an expired hit), and admit-on-miss with a
// policy-specific victim.
class BaselineCache : public Policy {
 public:
  BaselineCache(std::string name, PolicyParams params, SimContext ctx)
      : Policy(std::move(name), std::move(params), ctx) {
    if (!ctx_.corpus) throw ValidationError("policy requires a corpus");
  }

  LookupOutcome on_query(std::string_view target_id, TimeMs now) final {
    on_access(target_id);
    auto it = slots_.find(target_id);
    if (it != slots_.end()) {
      Slot& s = it->second;
      s.last_accessed = now;
      ++s.accesses_while_cached;
      if (now - s.last_refreshed <= s.lifetime_ms) return LookupOutcome::kHit;
      s.last_refreshed = now;
      log(now, CacheActionRecord::Type::kRefresh, it->first, 0.0, "stale_on_access");
      return LookupOutcome::kExpiredHit;
    }
    admit(std::string(target_id), now);
    return LookupOutcome::kMiss;
  }

  std::size_t occupancy_units() const final { return slots_.size(); }

 protected:
  struct Slot {
    TimeMs inserted_at = 0;
    TimeMs last_refreshed = 0;
    TimeMs last_accessed = 0;
    std::uint64_t accesses_while_cached = 0;
    DurationMs lifetime_ms = 0;
  };

  using SlotMap = std::map<std::string, Slot, std::less<>>;

  // Chooses the entry to evict when the cache is full. Must be deterministic.
  virtual SlotMap::iterator pick_victim(TimeMs now) = 0;
  // Hook for policies that track demand beyond the cached set.
  virtual void on_access(std::string_view) {}

  SlotMap slots_;

 private:
  void admit(std::string id, TimeMs now) {
    if (slots_.size() >= params_.capacity_units) {
      auto victim = pick_victim(now);
      log(now, CacheActionRecord::Type::kEvict, victim->first, 0.0, "capacity");
      slots_.erase(victim);
      note_evict();
    }
    Slot s;
    s.inserted_at = s.last_refreshed = s.last_accessed = now;
    const context::Target* t = ctx_.corpus->find_target(id);
    if (!t) throw MissingAttributeError(id);
    s.lifetime_ms = t->validity_lifetime_ms;
    log(now, CacheActionRecord::Type::kAdmit, id, 0.0, "admitted");
    slots_.emplace(std::move(id), s);
    note_admit();
    note_occupancy(slots_.size());
  }
};

class LruPolicy final : public BaselineCache {
 public:
  LruPolicy(PolicyParams p, SimContext c) : BaselineCache("lru", std::move(p), c) {}

 protected:
  SlotMap::iterator pick_victim(TimeMs) override {
    auto victim = slots_.begin();
    for (auto it = slots_.begin(); it != slots_.end(); ++it) {
      if (it->second.last_accessed < victim->second.last_accessed) victim = it;
    }
    return victim;
  }
};

class LfuPolicy final : public BaselineCache {
 public:
  LfuPolicy(PolicyParams p, SimContext c) : BaselineCache("lfu", std::move(p), c) {}

 protected:
  // Frequency while cached; counters reset when an entry is evicted.
  SlotMap::iterator pick_victim(TimeMs) override {
    auto victim = slots_.begin();
    for (auto it = slots_.begin(); it != slots_.end(); ++it) {
      if (it->second.accesses_while_cached < victim->second.accesses_while_cached) victim = it;
    }
    return victim;
  }
};

class MGreedyPolicy final : public BaselineCache {
 public:
  MGreedyPolicy(PolicyParams p, SimContext c) : BaselineCache("mgreedy", std::move(p), c) {}

 protected:
  void on_access(std::string_view id) override { ++counts_[std::string(id)]; }

  // Immediate-reward greedy: evict the cached entry with the smallest
  // cumulative access count over the whole run (counts survive eviction).
  SlotMap::iterator pick_victim(TimeMs) override {
    auto victim = slots_.begin();
    std::uint64_t victim_count = counts_[victim->first];
    for (auto it = slots_.begin(); it != slots_.end(); ++it) {
      std::uint64_t c = counts_[it->first];
      if (c < victim_count) {
        victim = it;
        victim_count = c;
      }
    }
    return victim;
  }

 private:
  std::map<std::string, std::uint64_t, std::less<>> counts_;
};

class MMyopicPolicy final : public BaselineCache {
 public:
  MMyopicPolicy(PolicyParams p, SimContext c) : BaselineCache("mmyopic", std::move(p), c) {}

 protected:
  // Recency eviction that clears already-expired entries first: the myopic
  // view values only what is still servable now.
  SlotMap::iterator pick_victim(TimeMs now) override {
    SlotMap::iterator victim = slots_.end();
    bool victim_expired = false;
    for (auto it = slots_.begin(); it != slots_.end(); ++it) {
      bool expired = now - it->second.last_refreshed > it->second.lifetime_ms;
      bool better;
      if (victim == slots_.end()) {
        better = true;
      } else if (expired != victim_expired) {
        better = expired;
      } else {
        better = it->second.last_accessed < victim->second.last_accessed;
      }
      if (better) {
        victim = it;
        victim_expired = expired;
      }
    }
    return victim;
  }
};

// UCB1 bandit over the seen targets: each maintenance tick closes one round
// in which the cached set is the pulled super-arm. Every cached arm observes
// one play per round with reward = 1 if the cache served at least one query
// for it during the round (fresh or stale), else 0, so an arm's empirical
// mean estimates how often it draws demand while cached — the policy chases
// popularity and is deliberately blind to freshness. After the fold the
// top-m arms by upper confidence bound become the cached set; free capacity
// is also filled eagerly between rounds so the cold start does not idle.
class MCacPolicy final : public Policy {
 public:
  MCacPolicy(PolicyParams params, SimContext ctx) : Policy("mcac", std::move(params), ctx) {
    if (!ctx_.corpus || !ctx_.tracker) throw ValidationError("mcac requires corpus and tracker");
  }

  LookupOutcome on_query(std::string_view target_id, TimeMs now) override {
    std::uint32_t ix = arm_index(target_id, now);

    LookupOutcome outcome;
    if (arms_[ix].cached) {
      Arm& arm = arms_[ix];
      arm.last_accessed = now;
      DurationMs lifetime = ctx_.corpus->targets()[arm.target_ix].validity_lifetime_ms;
      if (now - arm.last_refreshed <= lifetime) {
        outcome = LookupOutcome::kHit;
      } else {
        arm.last_refreshed = now;
        log(now, CacheActionRecord::Type::kRefresh, id_of(ix), 0.0, "stale_on_access");
        outcome = LookupOutcome::kExpiredHit;
      }
    } else {
      outcome = LookupOutcome::kMiss;
    }

    // Reward the queried arm earns for this round: served-from-cache
    // indicator, optionally blended with the adapted utility so context
    // quality can shape the estimate. The round keeps the strongest query.
    double reward = outcome != LookupOutcome::kMiss ? 1.0 : 0.0;
    double blend = params_.mcac_reward_utility_blend;
    if (blend > 0.0) {
      reward = (1.0 - blend) * reward + blend * adapted_utility(ix, now);
    }
    Arm& arm = arms_[ix];
    arm.round_reward = std::max(arm.round_reward, reward);
    // Refresh the queried arm's tie-break utility; recomputing it lazily on
    // access keeps the per-query cost bounded.
    arm.tie_utility = adapted_utility(ix, now);

    // Free capacity is filled immediately; once full, the cached set is
    // reconsidered when the round closes so boundary arms do not oscillate
    // in and out on every query.
    if (cached_count_ < std::min<std::size_t>(params_.capacity_units, arms_.size())) {
      reselect(now);
    }
    return outcome;
  }

  // Tick = end of a bandit round: every cached arm folds one observation
  // (uncached arms produce none — their demand is invisible to the cache
  // controller), then the cached set is re-chosen by confidence bound.
  void on_tick(TimeMs now) override {
    if (arms_.empty()) return;
    ++rounds_total_;
    for (Arm& arm : arms_) {
      if (arm.cached) {
        ++arm.plays;
        arm.mean_reward += (arm.round_reward - arm.mean_reward) /
                           static_cast<double>(arm.plays);
      }
      arm.round_reward = 0.0;
    }
    reselect(now);
  }

  std::size_t occupancy_units() const override { return cached_count_; }

 private:
  struct Arm {
    std::uint32_t target_ix = 0;
    std::uint64_t plays = 0;
    double mean_reward = 0.0;
    double round_reward = 0.0;
    double tie_utility = 0.0;
    bool cached = false;
    TimeMs last_refreshed = 0;
    TimeMs last_accessed = 0;
  };

  std::vector<Arm> arms_;  // in first-seen order
  std::map<std::string, std::uint32_t, std::less<>> arm_ix_;
  std::uint64_t rounds_total_ = 0;
  std::size_t cached_count_ = 0;
  std::vector<std::uint32_t> select_buf_;
  std::vector<double> score_buf_;
  std::vector<char> in_set_buf_;

  const std::string& id_of(std::uint32_t arm) const {
    return ctx_.corpus->targets()[arms_[arm].target_ix].id;
  }

  std::uint32_t arm_index(std::string_view id, TimeMs now) {
    auto it = arm_ix_.find(id);
    if (it != arm_ix_.end()) return it->second;
    std::uint32_t target_ix = ctx_.corpus->target_index(id);
    if (target_ix == context::Corpus::kNoTarget) throw MissingAttributeError(std::string(id));
    std::uint32_t arm = static_cast<std::uint32_t>(arms_.size());
    Arm fresh;
    fresh.target_ix = target_ix;
    arms_.push_back(fresh);
    arms_.back().tie_utility = adapted_utility(arm, now);
    arm_ix_.emplace(std::string(id), arm);
    return arm;
  }

  double adapted_utility(std::uint32_t arm_ix, TimeMs now) {
    const Arm& arm = arms_[arm_ix];
    const context::Target& t = ctx_.corpus->targets()[arm.target_ix];
    eval::AccessStats stats = ctx_.tracker->stats_for(arm.target_ix, now);
    double poa = eval::compute_poa(stats, ctx_.tracker->total_historical(), params_.alpha);
    double cf = arm.cached
                    ? evidence::compute_cf(now - arm.last_refreshed, t.decay_lambda_per_ms)
                    : 0.0;
    double qos = eval::sub_utility(t.static_utility[eval::kFactorQos],
                                   params_.factor_specs[eval::kFactorQos]);
    double timeliness = eval::sub_utility(t.static_utility[eval::kFactorTimeliness],
                                          params_.factor_specs[eval::kFactorTimeliness]);
    return mcac_utility_adapted(poa, cf, qos, timeliness, params_.mcac_weights);
  }

  // Keep the top-m arms by UCB score cached. The comparator is a strict
  // total order (score, tie utility, id), so the top-m *set* is unique and
  // an O(n) partition suffices; order inside the set does not matter.
  void reselect(TimeMs now) {
    std::size_t n = arms_.size();
    std::size_t m = std::min<std::size_t>(params_.capacity_units, n);
    double log_term =
        rounds_total_ > 0 ? 2.0 * std::log(static_cast<double>(rounds_total_)) : 0.0;
    score_buf_.assign(n, 0.0);
    select_buf_.resize(n);
    for (std::uint32_t a = 0; a < n; ++a) {
      if (arms_[a].plays > 0) {
        score_buf_[a] = arms_[a].mean_reward +
                        std::sqrt(log_term / static_cast<double>(arms_[a].plays));
      }
      select_buf_[a] = a;
    }
    auto better = [&](std::uint32_t x, std::uint32_t y) {
      bool xp = arms_[x].plays > 0, yp = arms_[y].plays > 0;
      if (xp != yp) return !xp;              // unplayed arms explore first
      if (!xp) return id_of(x) < id_of(y);   // deterministic cold start
      if (score_buf_[x] != score_buf_[y]) return score_buf_[x] > score_buf_[y];
      if (arms_[x].tie_utility != arms_[y].tie_utility) {
        return arms_[x].tie_utility > arms_[y].tie_utility;
      }
      return id_of(x) < id_of(y);
    };
    if (m < n) {
      std::nth_element(select_buf_.begin(), select_buf_.begin() + m, select_buf_.end(),
                       better);
    }

    in_set_buf_.assign(n, 0);
    for (std::size_t i = 0; i < m; ++i) in_set_buf_[select_buf_[i]] = 1;
    // Deselections apply before admissions so occupancy never overshoots m.
    for (std::uint32_t a = 0; a < n; ++a) {
      if (in_set_buf_[a] == 0 && arms_[a].cached) {
        arms_[a].cached = false;
        --cached_count_;
        note_evict();
        log(now, CacheActionRecord::Type::kEvict, id_of(a), arms_[a].mean_reward,
            "deselected");
      }
    }
    for (std::uint32_t a = 0; a < n; ++a) {
      if (in_set_buf_[a] != 0 && !arms_[a].cached) {
        arms_[a].cached = true;
        arms_[a].last_refreshed = now;  // fetched on admission
        ++cached_count_;
        note_admit();
        log(now, CacheActionRecord::Type::kAdmit, id_of(a), arms_[a].mean_reward, "selected");
      }
    }
    note_occupancy(cached_count_);
  }
};

}  // namespace

// ---- factory -------------------------------------------------------------------

const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> names = {"dcmf", "mcac", "mgreedy",
                                                 "mmyopic", "lru", "lfu"};
  return names;
}

bool is_known_policy(std::string_view name) {
  for (const std::string& n : known_policies()) {
    if (n == name) return true;
  }
  return false;
}

std::unique_ptr<Policy> make_policy(const std::string& name, PolicyParams params,
                                    SimContext ctx) {
  if (name == "dcmf") return std::make_unique<cache::DcmfPolicy>(std::move(params), ctx);
  if (name == "mcac") return std::make_unique<MCacPolicy>(std::move(params), ctx);
  if (name == "mgreedy") return std::make_unique<MGreedyPolicy>(std::move(params), ctx);
  if (name == "mmyopic") return std::make_unique<MMyopicPolicy>(std::move(params), ctx);
  if (name == "lru") return std::make_unique<LruPolicy>(std::move(params), ctx);
  if (name == "lfu") return std::make_unique<LfuPolicy>(std::move(params), ctx);
  std::string msg = "unknown policy '" + name + "'; valid policies:";
  for (const std::string& n : known_policies()) msg += " " + n;
  throw ValidationError(msg);
}

}  // namespace ctxcache::policy
