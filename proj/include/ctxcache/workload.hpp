#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ctxcache/context_model.hpp"
#include "ctxcache/types.hpp"

namespace ctxcache::workload {

// Steady request-rate tiers (queries per second).
struct LoadTier {
  std::string name;
  double lambda_qps = 1.0;
};

// low = 30, medium = 60, high = 120 queries per minute.
LoadTier tier_by_name(const std::string& name);
const std::vector<LoadTier>& standard_tiers();

// Per-half-hour-slot request volume for the daily profile.
struct SlotProfile {
  double mu = 0.0;
  double sigma = 0.0;
};

struct DiurnalProfile {
  std::array<SlotProfile, 48> slots{};

  // Two peak windows (6-11 AM and 3-6 PM) at triple the off-peak per-slot
  // volume, scaled so the expected daily total matches `expected_total`.
  // peak_boost > 1 sharpens the peaks while keeping the same expected total.
  static DiurnalProfile standard(double expected_total = 70000.0, double peak_boost = 1.0);

  double expected_total() const;
};

// Popularity over target ranks. Zipf (weight r^-s) is the default; the
// alternative weights ranks by a half-normal centered on rank 1.
struct PopularityModel {
  enum class Kind { kZipf, kNormalRank } kind = Kind::kZipf;
  double zipf_s = 0.8;
  double normal_sigma_ranks = 0.0;  // 0 = n/3
};

struct QueryEvent {
  std::uint64_t seq = 0;
  TimeMs timestamp_ms = 0;
  bool is_item = false;
  std::string target_id;
  std::string consumer_id;
};

struct Trace {
  std::vector<QueryEvent> events;

  static constexpr const char* kVersionLine = "# ctxcache trace v1";
  static constexpr const char* kHeaderLine = "seq,timestamp_ms,kind,target_id,consumer_id";

  void save_csv(const std::string& path) const;
  std::string to_csv() const;
  static Trace load_csv(const std::string& path);
  static Trace from_csv(const std::string& text);

  TimeMs duration_ms() const {
    return events.empty() ? 0 : events.back().timestamp_ms;
  }
};

// Rank-to-target assignment plus popularity sampling over every corpus
// target (items and attributes share one popularity universe). The rank
// shuffle is part of the trace seed.
class TargetSampler {
 public:
  TargetSampler(const context::Corpus& corpus, const PopularityModel& model,
                std::uint64_t seed);

  // Target index in corpus.targets() for a uniform draw u in [0,1).
  std::uint32_t sample(double u) const;
  // Probability mass of the target at the given rank (rank 0 = hottest).
  double rank_probability(std::size_t rank) const;
  std::uint32_t target_at_rank(std::size_t rank) const { return rank_to_target_[rank]; }
  std::size_t size() const { return rank_to_target_.size(); }

 private:
  std::vector<std::uint32_t> rank_to_target_;
  std::vector<double> cumulative_;
};

// Homogeneous Poisson arrivals at the tier's rate for `duration_ms`.
// Deterministic in (corpus, model, tier, duration, seed).
Trace gen_poisson_trace(const context::Corpus& corpus, const PopularityModel& model,
                        const LoadTier& tier, DurationMs duration_ms,
                        std::uint32_t n_consumers, std::uint64_t seed);

// One simulated day: per-slot counts drawn from the profile's truncated
// normals, arrival instants uniform within the slot, globally sorted.
Trace gen_diurnal_trace(const context::Corpus& corpus, const PopularityModel& model,
                        const DiurnalProfile& profile, std::uint32_t n_consumers,
                        std::uint64_t seed);

struct CorpusGenSpec {
  std::uint32_t n_attributes = 1400;
  std::uint32_t n_items = 400;
  DurationMs lifetime_lo_ms = 90'000;
  DurationMs lifetime_hi_ms = 300'000;
  std::uint64_t seed = 1;
};

// Synthetic road-traffic-style corpus: sites of seven attributes feeding a
// "roadwork" rule item and a hierarchical "hazard" item each, padded with
// standalone attributes up to n_attributes. n_attributes below the rule
// requirement is raised to the minimum feasible count.
context::Corpus gen_corpus(const CorpusGenSpec& spec);

}  // namespace ctxcache::workload
