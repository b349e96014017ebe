#include "ctxcache/cache_core.hpp"

#include <algorithm>
#include <cmath>

namespace ctxcache::cache {

Decision decide(double belief, bool decidable, const evidence::Thresholds& t) {
  if (!decidable) return Decision::kRefresh;
  if (belief < t.evict) return Decision::kEvict;
  if (belief < t.update) return Decision::kRefresh;
  return Decision::kRetain;
}

DcmfPolicy::DcmfPolicy(policy::PolicyParams params, policy::SimContext ctx)
    : Policy("dcmf", std::move(params), ctx) {
  if (!ctx_.corpus || !ctx_.tracker) throw ValidationError("dcmf requires corpus and tracker");
}

double DcmfPolicy::raw_poa(std::uint32_t target_ix, TimeMs now) {
  eval::AccessStats stats = ctx_.tracker->stats_for(target_ix, now);
  return eval::compute_poa(stats, ctx_.tracker->total_historical(), params_.alpha);
}

double DcmfPolicy::utility_of(std::uint32_t target_ix, double poa_raw) const {
  eval::FactorArray raw = ctx_.corpus->targets()[target_ix].static_utility;
  raw[eval::kFactorPoa] = poa_raw;
  return eval::compute_utility(raw, params_.factor_specs, params_.maut_weights);
}

double DcmfPolicy::priority_for(std::string_view target_id, TimeMs now) {
  std::uint32_t ix = ctx_.corpus->target_index(target_id);
  if (ix == context::Corpus::kNoTarget) throw MissingAttributeError(std::string(target_id));
  double poa = raw_poa(ix, now);
  return params_.beta * utility_of(ix, poa) + (1.0 - params_.beta) * poa;
}

void DcmfPolicy::insert_entry(const std::string& id, TimeMs now) {
  CacheEntry e;
  e.id = id;
  e.target_ix = ctx_.corpus->target_index(id);
  e.inserted_at = e.last_refreshed = e.last_accessed = now;
  e.size_units = size_units_for(id);
  // A just-fetched value carries total freshness evidence, which dominates
  // the combination, so the entry starts at full belief.
  e.cf = 1.0;
  e.combined_belief = 1.0;
  entries_.emplace(id, std::move(e));
  occupancy_ += size_units_for(id);
  note_admit();
  note_occupancy(occupancy_);
}

void DcmfPolicy::erase_entry(const std::string& id) {
  auto it = entries_.find(id);
  occupancy_ -= it->second.size_units;
  entries_.erase(it);
  note_evict();
}

const CacheEntry* DcmfPolicy::min_belief_entry() const {
  const CacheEntry* min = nullptr;
  for (const auto& [id, e] : entries_) {
    // Undecidable entries compare as belief 0: they hold the weakest claim
    // to their slot. Map iteration order makes the earliest id win ties.
    double b = e.belief_defined ? e.combined_belief : 0.0;
    double mb = min && min->belief_defined ? min->combined_belief : 0.0;
    if (!min || b < mb) min = &e;
  }
  return min;
}

bool DcmfPolicy::try_admit(const std::string& id, double priority, TimeMs now,
                           std::uint32_t* evicted) {
  std::uint32_t size = size_units_for(id);
  if (size > params_.capacity_units) return false;
  // Displace minimum-belief incumbents only while the candidate's priority
  // strictly exceeds their belief; an equal score keeps the incumbent.
  while (occupancy_ + size > params_.capacity_units) {
    const CacheEntry* min = min_belief_entry();
    double min_belief = min->belief_defined ? min->combined_belief : 0.0;
    if (!(priority > min_belief)) return false;
    log(now, policy::CacheActionRecord::Type::kEvict, min->id, min_belief, "displaced");
    erase_entry(min->id);
    if (evicted) ++*evicted;
  }
  insert_entry(id, now);
  log(now, policy::CacheActionRecord::Type::kAdmit, id, 1.0, "admitted");
  return true;
}

LookupOutcome DcmfPolicy::on_query(std::string_view target_id, TimeMs now) {
  auto it = entries_.find(target_id);
  if (it != entries_.end()) {
    CacheEntry& e = it->second;
    e.last_accessed = now;
    ++e.total_access_count;
    DurationMs lifetime = ctx_.corpus->targets()[e.target_ix].validity_lifetime_ms;
    if (now - e.last_refreshed <= lifetime) {
      ++e.hit_count;
      return LookupOutcome::kHit;
    }
    // Stale: served only after an implicit refresh.
    e.last_refreshed = now;
    e.cf = 1.0;
    log(now, policy::CacheActionRecord::Type::kRefresh, e.id, e.combined_belief,
        "stale_on_access");
    return LookupOutcome::kExpiredHit;
  }

  std::string id(target_id);
  double priority = priority_for(id, now);
  try_admit(id, priority, now, nullptr);
  return LookupOutcome::kMiss;
}

void DcmfPolicy::admit_candidates(const std::vector<eval::PriorityEntry>& ranked, TimeMs now) {
  for (const eval::PriorityEntry& cand : ranked) {
    if (entries_.count(cand.id)) continue;
    if (!try_admit(cand.id, cand.priority, now, nullptr)) {
      break;  // ranked descending: later candidates cannot do better
    }
  }
}

void DcmfPolicy::on_tick(TimeMs now) {
  SweepStats stats;
  stats.timestamp = now;

  if (!entries_.empty()) {
    // 1. Access and freshness evidence for every cached entry, in id order.
    std::vector<CacheEntry*> order;
    order.reserve(entries_.size());
    std::vector<double> metric(entries_.size());
    std::vector<double> cf(entries_.size());
    std::size_t k = 0;
    for (auto& [id, e] : entries_) {
      e.poa = raw_poa(e.target_ix, now);
      cf[k] = evidence::compute_cf(now - e.last_refreshed,
                                   ctx_.corpus->targets()[e.target_ix].decay_lambda_per_ms);
      metric[k] = params_.mass_source == policy::MassSource::kPoa
                      ? e.poa
                      : params_.beta * utility_of(e.target_ix, e.poa) +
                            (1.0 - params_.beta) * e.poa;
      order.push_back(&e);
      ++k;
    }

    // 2. Rescale the access metric into [0,1] mass scores.
    std::vector<double> score(metric.size());
    switch (params_.poa_score_mode) {
      case policy::PoaScoreMode::kMeanRelative: {
        double mean = 0.0;
        for (double m : metric) mean += m;
        mean /= static_cast<double>(metric.size());
        for (std::size_t i = 0; i < metric.size(); ++i) {
          score[i] = mean > 0.0 ? std::clamp(metric[i] / (2.0 * mean), 0.0, 1.0) : 0.5;
        }
        break;
      }
      case policy::PoaScoreMode::kMaxRelative: {
        double mx = 0.0;
        for (double m : metric) mx = std::max(mx, m);
        for (std::size_t i = 0; i < metric.size(); ++i) {
          score[i] = mx > 0.0 ? std::clamp(metric[i] / mx, 0.0, 1.0) : 0.5;
        }
        break;
      }
      case policy::PoaScoreMode::kRaw:
        for (std::size_t i = 0; i < metric.size(); ++i) {
          score[i] = std::clamp(metric[i], 0.0, 1.0);
        }
        break;
    }

    // 3. Thresholds from the cached population's freshness scores.
    evidence::Thresholds th = evidence::compute_thresholds(cf, params_.kappa);
    last_thresholds_ = th;
    stats.theta_update = th.update;
    stats.theta_evict = th.evict;
    double mean_cf = 0.0;
    for (double c : cf) mean_cf += c;
    stats.mean_cf = mean_cf / static_cast<double>(cf.size());

    // 4. Combine evidence and decide per entry; exactly one action per entry.
    std::vector<std::string> to_evict;
    for (std::size_t i = 0; i < order.size(); ++i) {
      CacheEntry& e = *order[i];
      e.cf = cf[i];
      double belief;
      bool decidable = true;
      if (params_.combine_rule == evidence::CombineRule::kDst) {
        evidence::CombinedBelief cb =
            evidence::combine_dst(evidence::assign_masses(score[i], params_.epsilon),
                                  evidence::assign_masses(cf[i], params_.epsilon));
        decidable = cb.decidable;
        belief = cb.decidable ? cb.mass.cache : 0.0;
      } else {
        belief = evidence::combine_weighted(score[i], cf[i], params_.combine_weight_poa);
      }
      e.combined_belief = belief;
      e.belief_defined = decidable;

      switch (decide(belief, decidable, th)) {
        case Decision::kEvict:
          to_evict.push_back(e.id);
          ++stats.evictions;
          log(now, policy::CacheActionRecord::Type::kEvict, e.id, belief,
              "belief<theta_evict");
          break;
        case Decision::kRefresh:
          e.last_refreshed = now;
          e.cf = 1.0;
          ++stats.refreshes;
          note_refresh();
          log(now, policy::CacheActionRecord::Type::kRefresh, e.id, belief,
              decidable ? "belief<theta_update" : "total_conflict");
          break;
        case Decision::kRetain:
          log(now, policy::CacheActionRecord::Type::kRetain, e.id, belief, "retain");
          break;
      }
    }
    for (const std::string& id : to_evict) erase_entry(id);
  }

  // 5. Admission from the priority ranking of seen-but-uncached targets.
  std::vector<eval::ItemScore> candidates;
  for (std::uint32_t ix : ctx_.tracker->seen_targets()) {
    const context::Target& t = ctx_.corpus->targets()[ix];
    if (entries_.count(t.id)) continue;
    double poa = raw_poa(ix, now);
    candidates.push_back({t.id, utility_of(ix, poa), poa});
  }
  std::uint64_t admits_before = admissions();
  admit_candidates(eval::prioritize(std::move(candidates), params_.beta), now);
  stats.admissions = static_cast<std::uint32_t>(admissions() - admits_before);
  stats.occupancy_units = occupancy_;
  sweep_stats_.push_back(stats);
}

}  // namespace ctxcache::cache
